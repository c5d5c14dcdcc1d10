"""Pure numpy kernels.

Reference implementations of the hot computations: subset score
distributions, the bitmask dynamic programs for optimal adaptive and
non-adaptive testing, exact strategy-cost evaluation, verification optima,
and the permutation sweeps.  ``_kernels_nb`` provides jitted twins with the
same signatures; ``_backend`` picks one at import time.

State conventions shared by both backends:
  * ``mask`` is a bitmask of already-queried tests,
  * ``acc`` is the weighted sum of known positive outcomes,
  * a state is *determined* when the achievable score window
    [acc, acc + remaining weight] sits inside a single class of ``cuts``.
"""

from __future__ import annotations

import itertools

import numpy as np


def _class_of_score(cuts, w_total):
    """1-based class index for every score 0..w_total."""
    scores = np.arange(w_total + 1)
    return np.searchsorted(cuts, scores, side="right").astype(np.int64)


def _mask_weights(weights):
    size = 1 << len(weights)
    idx = np.arange(size)
    wsum = np.zeros(size, dtype=np.int64)
    for i, w in enumerate(weights):
        wsum[(idx >> i) & 1 == 1] += w
    return wsum


def score_pmf_table(probs, weights):
    """P[mask, s] = probability that the tests in ``mask`` contribute score s."""
    n = len(probs)
    w_total = int(np.sum(weights))
    size = 1 << n
    table = np.zeros((size, w_total + 1))
    table[0, 0] = 1.0
    for mask in range(1, size):
        low = mask & -mask
        i = low.bit_length() - 1
        prev = table[mask ^ low]
        row = prev * (1.0 - probs[i])
        w = int(weights[i])
        row[w:] = row[w:] + prev[:w_total + 1 - w] * probs[i]
        table[mask] = row
    return table


def adaptive_dp(costs, probs, weights, cuts):
    """Optimal expected completion cost V[mask, acc] plus the argmin policy.

    policy[mask, acc] is the next test to query (ties to the lowest index) or
    -1 when the state is determined.
    """
    n = len(costs)
    w_total = int(np.sum(weights))
    size = 1 << n
    wsum = _mask_weights(weights)
    cls = _class_of_score(cuts, w_total)
    value = np.zeros((size, w_total + 1))
    policy = np.full((size, w_total + 1), -1, dtype=np.int16)
    for mask in range(size - 1, -1, -1):
        cap = int(wsum[mask])
        remw = w_total - cap
        accs = np.arange(cap + 1)
        undet = cls[accs] != cls[accs + remw]
        if not undet.any():
            continue
        best = np.full(cap + 1, np.inf)
        besti = np.full(cap + 1, -1, dtype=np.int16)
        for i in range(n):
            if (mask >> i) & 1:
                continue
            m2 = mask | (1 << i)
            w = int(weights[i])
            cand = (costs[i]
                    + probs[i] * value[m2, accs + w]
                    + (1.0 - probs[i]) * value[m2, accs])
            upd = cand < best
            best[upd] = cand[upd]
            besti[upd] = i
        value[mask, :cap + 1] = np.where(undet, best, 0.0)
        policy[mask, :cap + 1] = np.where(undet, besti, np.int16(-1))
    return value, policy


def nonadaptive_dp(costs, probs, weights, cuts):
    """Exact minimum over all query permutations of the expected cost.

    A permutation's cost is the sum over positions t of c_t times the
    probability the run is still undetermined after its first t-1 tests; that
    probability depends only on the queried *set*, so the minimum over all n!
    orders decomposes into a shortest path over the subset lattice.
    """
    n = len(costs)
    w_total = int(np.sum(weights))
    size = 1 << n
    pmf = score_pmf_table(probs, weights)
    wsum = _mask_weights(weights)
    cls = _class_of_score(cuts, w_total)
    undet_mass = np.zeros(size)
    for mask in range(size):
        cap = int(wsum[mask])
        remw = w_total - cap
        accs = np.arange(cap + 1)
        undet = cls[accs] != cls[accs + remw]
        undet_mass[mask] = float(pmf[mask, :cap + 1][undet].sum())
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
        i = int(choice[mask])
        order[t] = i
        mask |= 1 << i
    return float(future[0]), order


def _suffix_pmfs(probs, weights, order, w_total):
    n = len(order)
    suf = np.zeros((n + 1, w_total + 1))
    suf[n, 0] = 1.0
    for t in range(n - 1, -1, -1):
        i = int(order[t])
        row = suf[t + 1] * (1.0 - probs[i])
        w = int(weights[i])
        row[w:] = row[w:] + suf[t + 1][:w_total + 1 - w] * probs[i]
        suf[t] = row
    return suf


def perm_cost_blocks(costs, probs, weights, cuts, order):
    """Expected cost of a fixed query order, split by the class of the outcome."""
    n = len(costs)
    w_total = int(np.sum(weights))
    num_classes = len(cuts) - 1
    cls = _class_of_score(cuts, w_total)
    suf = _suffix_pmfs(probs, weights, order, w_total)
    cum = np.concatenate([np.zeros((n + 1, 1)), np.cumsum(suf, axis=1)], axis=1)
    pref = np.zeros(w_total + 1)
    pref[0] = 1.0
    queried_w = 0
    total = 0.0
    per_block = np.zeros(num_classes)
    for t in range(n):
        i = int(order[t])
        remw = w_total - queried_w
        accs = np.arange(queried_w + 1)
        undet = cls[accs] != cls[accs + remw]
        mass = pref[:queried_w + 1] * undet
        if mass.any():
            total += costs[i] * float(mass.sum())
            for j in range(num_classes):
                lo = np.maximum(cuts[j] - accs, 0)
                hi = np.minimum(cuts[j + 1] - 1 - accs, remw)
                ok = hi >= lo
                seg = np.where(
                    ok,
                    cum[t, np.clip(hi + 1, 0, w_total + 1)]
                    - cum[t, np.clip(lo, 0, w_total + 1)],
                    0.0)
                per_block[j] += costs[i] * float((mass * seg).sum())
        w = int(weights[i])
        nxt = pref * (1.0 - probs[i])
        nxt[w:] = nxt[w:] + pref[:w_total + 1 - w] * probs[i]
        pref = nxt
        queried_w += w
    return total, per_block


def policy_cost_blocks(costs, probs, weights, cuts, policy):
    """Expected cost of a (mask, acc)-indexed policy table, split by outcome class."""
    n = len(costs)
    cls = _class_of_score(cuts, int(np.sum(weights)))
    num_classes = len(cuts) - 1
    total = 0.0
    per_block = np.zeros(num_classes)
    for x in range(1 << n):
        px = 1.0
        score = 0
        for i in range(n):
            if (x >> i) & 1:
                px *= probs[i]
                score += int(weights[i])
            else:
                px *= 1.0 - probs[i]
        mask = 0
        acc = 0
        cost = 0.0
        while True:
            i = int(policy[mask, acc])
            if i < 0:
                break
            cost += costs[i]
            mask |= 1 << i
            if (x >> i) & 1:
                acc += int(weights[i])
        total += px * cost
        per_block[cls[score] - 1] += px * cost
    return total, per_block


def _kofn_next(queried_mask, ones, zeros, k, n, idx1, idx0):
    """Lowest-index test in the intersection of the cheap-ones and cheap-zeros sets.

    The residual problem needs k-ones more positive outcomes or
    (n-k+1)-zeros more negative ones; the candidate sets are the prefixes of
    the two ratio orderings restricted to unqueried tests.
    """
    need_ones = k - ones
    need_zeros = (n - k + 1) - zeros
    in_s1 = 0
    cnt = 0
    for t in idx1:
        if (queried_mask >> t) & 1:
            continue
        in_s1 |= 1 << t
        cnt += 1
        if cnt == need_ones:
            break
    best = -1
    cnt = 0
    for t in idx0:
        if (queried_mask >> t) & 1:
            continue
        if (in_s1 >> t) & 1 and (best < 0 or t < best):
            best = t
        cnt += 1
        if cnt == need_zeros:
            break
    return best


def kofn_cost_blocks(costs, probs, cuts, k, idx1, idx0):
    """Expected cost of the optimal k-of-n policy on a two-class instance.

    Propagates state masses forward through (queried mask, ones seen); valid
    because the policy depends on the knowledge state only through that pair.
    """
    n = len(costs)
    size = 1 << n
    full = size - 1
    num_classes = len(cuts) - 1
    cls = _class_of_score(cuts, n)
    ones_w = np.ones(n, dtype=np.int64)
    pmf = score_pmf_table(probs, ones_w)
    cum = np.concatenate([np.zeros((size, 1)), np.cumsum(pmf, axis=1)], axis=1)
    mass = np.zeros((size, n + 1))
    mass[0, 0] = 1.0
    total = 0.0
    per_block = np.zeros(num_classes)
    idx1 = [int(t) for t in idx1]
    idx0 = [int(t) for t in idx0]
    for mask in range(size):
        pc = bin(mask).count("1")
        rem = n - pc
        for o in range(pc + 1):
            m = mass[mask, o]
            if m <= 0.0:
                continue
            if cls[o] == cls[o + rem]:
                continue
            i = _kofn_next(mask, o, pc - o, k, n, idx1, idx0)
            comp = full ^ mask
            total += costs[i] * m
            for j in range(num_classes):
                lo = max(int(cuts[j]) - o, 0)
                hi = min(int(cuts[j + 1]) - 1 - o, rem)
                if hi >= lo:
                    per_block[j] += costs[i] * m * (cum[comp, hi + 1] - cum[comp, lo])
            m2 = mask | (1 << i)
            mass[m2, o + 1] += m * probs[i]
            mass[m2, o] += m * (1.0 - probs[i])
    return total, per_block


def bminus1_enum(costs, probs, cuts, idx1, idx0):
    """Exhaustively evaluate the repeated-threshold strategy on every assignment.

    For each threshold cutoff in turn the optimal k-of-n policy is replayed
    from a fresh internal state; outcomes are cached globally so no test is
    ever paid for twice, and the run halts as soon as the class is determined.
    Returns total expected cost, per-class costs, and the class decided for
    every assignment.
    """
    n = len(costs)
    num_classes = len(cuts) - 1
    cls = _class_of_score(cuts, n)
    ks = [int(a) for a in cuts[1:-1]]
    idx1 = [int(t) for t in idx1]
    idx0 = [int(t) for t in idx0]
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
        cost, decided = _bminus1_run(x, n, costs, cls, ks, idx1, idx0)
        classes[x] = decided
        total += px * cost
        per_block[cls[score] - 1] += px * cost
    return total, per_block, classes


def _bminus1_run(x, n, costs, cls, ks, idx1, idx0):
    known = 0
    ones_g = 0
    zeros_g = 0
    cost = 0.0
    for k in ks:
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
                if cls[ones_g] == cls[n - zeros_g]:
                    return cost, int(cls[ones_g])
    return cost, int(cls[ones_g])


def verification_dp(costs, probs, weights, cuts, target, stop_lo, stop_hi, stop_mode):
    """Minimum expected cost charged against the ``target`` score set.

    Each query at an undetermined state charges its cost times the probability
    that the final score lands in ``target``.  ``stop_mode`` 0 stops when the
    score window certifies membership in [stop_lo, stop_hi] or excludes it;
    mode 1 stops at full class determination.
    """
    n = len(costs)
    w_total = int(np.sum(weights))
    size = 1 << n
    full = size - 1
    pmf = score_pmf_table(probs, weights)
    wsum = _mask_weights(weights)
    cls = _class_of_score(cuts, w_total)
    value = np.zeros((size, w_total + 1))
    for mask in range(size - 1, -1, -1):
        cap = int(wsum[mask])
        remw = w_total - cap
        comp = full ^ mask
        rem_pmf = pmf[comp, :remw + 1]
        for acc in range(cap + 1):
            lo = acc
            hi = acc + remw
            if stop_mode == 0:
                stopped = (lo >= stop_lo and hi <= stop_hi) or hi < stop_lo or lo > stop_hi
            else:
                stopped = cls[lo] == cls[hi]
            if stopped:
                continue
            charge = float(rem_pmf @ target[acc:acc + remw + 1])
            best = np.inf
            for i in range(n):
                if (mask >> i) & 1:
                    continue
                m2 = mask | (1 << i)
                w = int(weights[i])
                v = (costs[i] * charge
                     + probs[i] * value[m2, acc + w]
                     + (1.0 - probs[i]) * value[m2, acc])
                if v < best:
                    best = v
            value[mask, acc] = best
    return float(value[0, 0])


def block_cost_of_perm(costs, probs, alpha, beta, mode, order):
    """Expected cost of a fixed order run as a one-sided threshold verifier.

    mode 1: query until alpha ones are seen, charged on assignments whose
    total lands in [alpha, beta).  mode 0: query until n-beta+1 zeros are
    seen, same charge set.
    """
    n = len(costs)
    ones_w = np.ones(n, dtype=np.int64)
    suf = _suffix_pmfs(probs, ones_w, order, n)
    cum = np.concatenate([np.zeros((n + 1, 1)), np.cumsum(suf, axis=1)], axis=1)
    cap = alpha if mode == 1 else n - beta + 1
    if cap <= 0:
        return 0.0
    run = np.zeros(cap)
    run[0] = 1.0
    cost = 0.0
    for t in range(n):
        i = int(order[t])
        p = probs[i]
        for c in range(min(cap, t + 1)):
            m = run[c]
            if m == 0.0:
                continue
            pref_ones = c if mode == 1 else t - c
            lo = max(alpha - pref_ones, 0)
            hi = min(beta - 1 - pref_ones, n - t)
            if hi >= lo:
                cost += costs[i] * m * (cum[t, hi + 1] - cum[t, lo])
        nxt = np.zeros(cap)
        if mode == 1:
            nxt = run * (1.0 - p)
            nxt[1:] += run[:-1] * p
        else:
            nxt = run * p
            nxt[1:] += run[:-1] * (1.0 - p)
        run = nxt
    return float(cost)


def block_cost_min_over_perms(costs, probs, alpha, beta, mode):
    """Exact minimum of block_cost_of_perm over all n! query orders."""
    n = len(costs)
    best = np.inf
    for perm in itertools.permutations(range(n)):
        order = np.asarray(perm, dtype=np.int64)
        v = block_cost_of_perm(costs, probs, alpha, beta, mode, order)
        if v < best:
            best = v
    return float(best)
