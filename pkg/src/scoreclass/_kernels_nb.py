"""Numba-jitted kernels; signatures mirror ``_kernels_np``.

Same state conventions as the numpy twin: ``mask`` is the queried-test
bitmask, ``acc`` the weighted sum of known positive outcomes, and a state is
determined when [acc, acc + remaining weight] sits inside one class.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _class_of(cuts, score):
    j = 1
    while cuts[j] <= score:
        j += 1
    return j


@njit(cache=True)
def _mask_weights(weights):
    n = weights.shape[0]
    size = 1 << n
    wsum = np.zeros(size, dtype=np.int64)
    for mask in range(size):
        s = 0
        for i in range(n):
            if (mask >> i) & 1:
                s += weights[i]
        wsum[mask] = s
    return wsum


@njit(cache=True)
def score_pmf_table(probs, weights):
    n = probs.shape[0]
    w_total = 0
    for i in range(n):
        w_total += weights[i]
    size = 1 << n
    table = np.zeros((size, w_total + 1))
    table[0, 0] = 1.0
    for mask in range(1, size):
        low = mask & -mask
        i = 0
        while (low >> i) & 1 == 0:
            i += 1
        prev = mask ^ low
        w = weights[i]
        p = probs[i]
        for s in range(w_total, -1, -1):
            v = table[prev, s] * (1.0 - p)
            if s >= w:
                v += table[prev, s - w] * p
            table[mask, s] = v
    return table


@njit(cache=True)
def adaptive_dp(costs, probs, weights, cuts):
    n = costs.shape[0]
    w_total = 0
    for i in range(n):
        w_total += weights[i]
    size = 1 << n
    wsum = _mask_weights(weights)
    value = np.zeros((size, w_total + 1))
    policy = np.full((size, w_total + 1), -1, dtype=np.int16)
    for mask in range(size - 1, -1, -1):
        cap = wsum[mask]
        remw = w_total - cap
        for acc in range(cap + 1):
            if _class_of(cuts, acc) == _class_of(cuts, acc + remw):
                continue
            best = np.inf
            besti = -1
            for i in range(n):
                if (mask >> i) & 1:
                    continue
                m2 = mask | (1 << i)
                v = (costs[i]
                     + probs[i] * value[m2, acc + weights[i]]
                     + (1.0 - probs[i]) * value[m2, acc])
                if v < best:
                    best = v
                    besti = i
            value[mask, acc] = best
            policy[mask, acc] = besti
    return value, policy


@njit(cache=True)
def nonadaptive_dp(costs, probs, weights, cuts):
    n = costs.shape[0]
    w_total = 0
    for i in range(n):
        w_total += weights[i]
    size = 1 << n
    pmf = score_pmf_table(probs, weights)
    wsum = _mask_weights(weights)
    undet_mass = np.zeros(size)
    for mask in range(size):
        cap = wsum[mask]
        remw = w_total - cap
        s = 0.0
        for acc in range(cap + 1):
            if _class_of(cuts, acc) != _class_of(cuts, acc + remw):
                s += pmf[mask, acc]
        undet_mass[mask] = s
    future = np.zeros(size)
    choice = np.full(size, -1, dtype=np.int64)
    for mask in range(size - 2, -1, -1):
        best = np.inf
        besti = -1
        for i in range(n):
            if (mask >> i) & 1:
                continue
            v = costs[i] * undet_mass[mask] + future[mask | (1 << i)]
            if v < best:
                best = v
                besti = i
        future[mask] = best
        choice[mask] = besti
    order = np.empty(n, dtype=np.int64)
    mask = 0
    for t in range(n):
        i = choice[mask]
        order[t] = i
        mask |= 1 << i
    return future[0], order


@njit(cache=True)
def _suffix_pmfs(probs, weights, order, w_total):
    n = order.shape[0]
    suf = np.zeros((n + 1, w_total + 1))
    suf[n, 0] = 1.0
    for t in range(n - 1, -1, -1):
        i = order[t]
        w = weights[i]
        p = probs[i]
        for s in range(w_total + 1):
            v = suf[t + 1, s] * (1.0 - p)
            if s >= w:
                v += suf[t + 1, s - w] * p
            suf[t, s] = v
    return suf


@njit(cache=True)
def perm_cost_blocks(costs, probs, weights, cuts, order):
    n = costs.shape[0]
    w_total = 0
    for i in range(n):
        w_total += weights[i]
    num_classes = cuts.shape[0] - 1
    suf = _suffix_pmfs(probs, weights, order, w_total)
    cum = np.zeros((n + 1, w_total + 2))
    for t in range(n + 1):
        for s in range(w_total + 1):
            cum[t, s + 1] = cum[t, s] + suf[t, s]
    pref = np.zeros(w_total + 1)
    pref[0] = 1.0
    nxt = np.zeros(w_total + 1)
    queried_w = 0
    total = 0.0
    per_block = np.zeros(num_classes)
    for t in range(n):
        i = order[t]
        remw = w_total - queried_w
        for acc in range(queried_w + 1):
            m = pref[acc]
            if m == 0.0:
                continue
            if _class_of(cuts, acc) == _class_of(cuts, acc + remw):
                continue
            total += costs[i] * m
            for j in range(num_classes):
                lo = cuts[j] - acc
                if lo < 0:
                    lo = 0
                hi = cuts[j + 1] - 1 - acc
                if hi > remw:
                    hi = remw
                if hi >= lo:
                    per_block[j] += costs[i] * m * (cum[t, hi + 1] - cum[t, lo])
        w = weights[i]
        p = probs[i]
        for s in range(w_total + 1):
            v = pref[s] * (1.0 - p)
            if s >= w:
                v += pref[s - w] * p
            nxt[s] = v
        for s in range(w_total + 1):
            pref[s] = nxt[s]
        queried_w += w
    return total, per_block


@njit(cache=True)
def policy_cost_blocks(costs, probs, weights, cuts, policy):
    n = costs.shape[0]
    w_total = 0
    for i in range(n):
        w_total += weights[i]
    num_classes = cuts.shape[0] - 1
    total = 0.0
    per_block = np.zeros(num_classes)
    for x in range(1 << n):
        px = 1.0
        score = 0
        for i in range(n):
            if (x >> i) & 1:
                px *= probs[i]
                score += weights[i]
            else:
                px *= 1.0 - probs[i]
        mask = 0
        acc = 0
        cost = 0.0
        while True:
            i = policy[mask, acc]
            if i < 0:
                break
            cost += costs[i]
            mask |= 1 << i
            if (x >> i) & 1:
                acc += weights[i]
        total += px * cost
        per_block[_class_of(cuts, score) - 1] += px * cost
    return total, per_block


@njit(cache=True)
def _kofn_next(queried_mask, ones, zeros, k, n, idx1, idx0):
    need_ones = k - ones
    need_zeros = (n - k + 1) - zeros
    in_s1 = 0
    cnt = 0
    for a in range(n):
        t = idx1[a]
        if (queried_mask >> t) & 1:
            continue
        in_s1 |= 1 << t
        cnt += 1
        if cnt == need_ones:
            break
    best = -1
    cnt = 0
    for a in range(n):
        t = idx0[a]
        if (queried_mask >> t) & 1:
            continue
        if (in_s1 >> t) & 1 and (best < 0 or t < best):
            best = t
        cnt += 1
        if cnt == need_zeros:
            break
    return best


@njit(cache=True)
def kofn_cost_blocks(costs, probs, cuts, k, idx1, idx0):
    n = costs.shape[0]
    size = 1 << n
    full = size - 1
    num_classes = cuts.shape[0] - 1
    ones_w = np.ones(n, dtype=np.int64)
    pmf = score_pmf_table(probs, ones_w)
    cum = np.zeros((size, n + 2))
    for mask in range(size):
        for s in range(n + 1):
            cum[mask, s + 1] = cum[mask, s] + pmf[mask, s]
    mass = np.zeros((size, n + 1))
    mass[0, 0] = 1.0
    total = 0.0
    per_block = np.zeros(num_classes)
    for mask in range(size):
        pc = 0
        for i in range(n):
            if (mask >> i) & 1:
                pc += 1
        rem = n - pc
        for o in range(pc + 1):
            m = mass[mask, o]
            if m <= 0.0:
                continue
            if _class_of(cuts, o) == _class_of(cuts, o + rem):
                continue
            i = _kofn_next(mask, o, pc - o, k, n, idx1, idx0)
            comp = full ^ mask
            total += costs[i] * m
            for j in range(num_classes):
                lo = cuts[j] - o
                if lo < 0:
                    lo = 0
                hi = cuts[j + 1] - 1 - o
                if hi > rem:
                    hi = rem
                if hi >= lo:
                    per_block[j] += costs[i] * m * (cum[comp, hi + 1] - cum[comp, lo])
            m2 = mask | (1 << i)
            mass[m2, o + 1] += m * probs[i]
            mass[m2, o] += m * (1.0 - probs[i])
    return total, per_block


@njit(cache=True)
def _bminus1_run(x, n, costs, cuts, ks, idx1, idx0):
    known = 0
    ones_g = 0
    zeros_g = 0
    cost = 0.0
    for a in range(ks.shape[0]):
        k = ks[a]
        iq = 0
        io = 0
        iz = 0
        while io < k and iz < n - k + 1:
            t = _kofn_next(iq, io, iz, k, n, idx1, idx0)
            iq |= 1 << t
            bit = (x >> t) & 1
            if bit:
                io += 1
            else:
                iz += 1
            if not (known >> t) & 1:
                known |= 1 << t
                cost += costs[t]
                if bit:
                    ones_g += 1
                else:
                    zeros_g += 1
                if _class_of(cuts, ones_g) == _class_of(cuts, n - zeros_g):
                    return cost, _class_of(cuts, ones_g)
    return cost, _class_of(cuts, ones_g)


@njit(cache=True)
def bminus1_enum(costs, probs, cuts, idx1, idx0):
    n = costs.shape[0]
    num_classes = cuts.shape[0] - 1
    ks = cuts[1:-1].copy()
    total = 0.0
    per_block = np.zeros(num_classes)
    classes = np.zeros(1 << n, dtype=np.uint8)
    for x in range(1 << n):
        px = 1.0
        score = 0
        for i in range(n):
            if (x >> i) & 1:
                px *= probs[i]
                score += 1
            else:
                px *= 1.0 - probs[i]
        cost, decided = _bminus1_run(x, n, costs, cuts, ks, idx1, idx0)
        classes[x] = decided
        total += px * cost
        per_block[_class_of(cuts, score) - 1] += px * cost
    return total, per_block, classes


@njit(cache=True)
def verification_dp(costs, probs, weights, cuts, target, stop_lo, stop_hi, stop_mode):
    n = costs.shape[0]
    w_total = 0
    for i in range(n):
        w_total += weights[i]
    size = 1 << n
    full = size - 1
    pmf = score_pmf_table(probs, weights)
    wsum = _mask_weights(weights)
    value = np.zeros((size, w_total + 1))
    for mask in range(size - 1, -1, -1):
        cap = wsum[mask]
        remw = w_total - cap
        comp = full ^ mask
        for acc in range(cap + 1):
            lo = acc
            hi = acc + remw
            if stop_mode == 0:
                stopped = (lo >= stop_lo and hi <= stop_hi) or hi < stop_lo or lo > stop_hi
            else:
                stopped = _class_of(cuts, lo) == _class_of(cuts, hi)
            if stopped:
                continue
            charge = 0.0
            for s in range(remw + 1):
                charge += pmf[comp, s] * target[acc + s]
            best = np.inf
            for i in range(n):
                if (mask >> i) & 1:
                    continue
                m2 = mask | (1 << i)
                v = (costs[i] * charge
                     + probs[i] * value[m2, acc + weights[i]]
                     + (1.0 - probs[i]) * value[m2, acc])
                if v < best:
                    best = v
            value[mask, acc] = best
    return value[0, 0]


@njit(cache=True)
def _block_cost_eval(costs, probs, alpha, beta, mode, order, suf, cum, run, nxt):
    n = costs.shape[0]
    cap = run.shape[0]
    suf[n, :] = 0.0
    suf[n, 0] = 1.0
    for t in range(n - 1, -1, -1):
        i = order[t]
        p = probs[i]
        for s in range(n, -1, -1):
            v = suf[t + 1, s] * (1.0 - p)
            if s >= 1:
                v += suf[t + 1, s - 1] * p
            suf[t, s] = v
    for t in range(n + 1):
        cum[t, 0] = 0.0
        for s in range(n + 1):
            cum[t, s + 1] = cum[t, s] + suf[t, s]
    for c in range(cap):
        run[c] = 0.0
    run[0] = 1.0
    cost = 0.0
    for t in range(n):
        i = order[t]
        p = probs[i]
        top = t + 1
        if top > cap:
            top = cap
        for c in range(top):
            m = run[c]
            if m == 0.0:
                continue
            pref_ones = c if mode == 1 else t - c
            lo = alpha - pref_ones
            if lo < 0:
                lo = 0
            hi = beta - 1 - pref_ones
            if hi > n - t:
                hi = n - t
            if hi >= lo:
                cost += costs[i] * m * (cum[t, hi + 1] - cum[t, lo])
        if mode == 1:
            for c in range(cap):
                v = run[c] * (1.0 - p)
                if c >= 1:
                    v += run[c - 1] * p
                nxt[c] = v
        else:
            for c in range(cap):
                v = run[c] * p
                if c >= 1:
                    v += run[c - 1] * (1.0 - p)
                nxt[c] = v
        for c in range(cap):
            run[c] = nxt[c]
    return cost


@njit(cache=True)
def block_cost_of_perm(costs, probs, alpha, beta, mode, order):
    n = costs.shape[0]
    cap = alpha if mode == 1 else n - beta + 1
    if cap <= 0:
        return 0.0
    suf = np.zeros((n + 1, n + 1))
    cum = np.zeros((n + 1, n + 2))
    run = np.zeros(cap)
    nxt = np.zeros(cap)
    return _block_cost_eval(costs, probs, alpha, beta, mode, order, suf, cum, run, nxt)


@njit(cache=True)
def _next_perm(a):
    n = a.shape[0]
    i = n - 2
    while i >= 0 and a[i] >= a[i + 1]:
        i -= 1
    if i < 0:
        return False
    j = n - 1
    while a[j] <= a[i]:
        j -= 1
    tmp = a[i]
    a[i] = a[j]
    a[j] = tmp
    lo = i + 1
    hi = n - 1
    while lo < hi:
        tmp = a[lo]
        a[lo] = a[hi]
        a[hi] = tmp
        lo += 1
        hi -= 1
    return True


@njit(cache=True)
def block_cost_min_over_perms(costs, probs, alpha, beta, mode):
    n = costs.shape[0]
    cap = alpha if mode == 1 else n - beta + 1
    if cap <= 0:
        return 0.0
    order = np.arange(n)
    suf = np.zeros((n + 1, n + 1))
    cum = np.zeros((n + 1, n + 2))
    run = np.zeros(cap)
    nxt = np.zeros(cap)
    best = np.inf
    while True:
        v = _block_cost_eval(costs, probs, alpha, beta, mode, order, suf, cum, run, nxt)
        if v < best:
            best = v
        if not _next_perm(order):
            break
    return best
