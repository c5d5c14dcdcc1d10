"""Kernel backend selection.

The hot kernels ship in two flavors: numba-jitted (default) and pure numpy.
Set SCORECLASS_BACKEND=numpy to force the fallback, =numba to require the
jitted path, or leave it at auto to use numba when importable.
"""

import os

ENV_VAR = "SCORECLASS_BACKEND"
_VALID = ("auto", "numba", "numpy")


def _select():
    choice = os.environ.get(ENV_VAR, "auto").strip().lower()
    if choice not in _VALID:
        raise RuntimeError(f"{ENV_VAR} must be one of {_VALID}, got {choice!r}")
    if choice in ("auto", "numba"):
        try:
            from . import _kernels_nb
            return _kernels_nb, "numba"
        except ImportError:
            if choice == "numba":
                raise
    from . import _kernels_np
    return _kernels_np, "numpy"


kernels, BACKEND = _select()


def backend_name() -> str:
    """Name of the active kernel backend ("numba" or "numpy")."""
    return BACKEND
