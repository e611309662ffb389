"""Numba switch.

Kernels are compiled with numba when it is importable and the environment
variable ``SUPPESNET_NUMBA`` is not set to ``0``/``false``/``off``. Otherwise
the pure-numpy implementations in :mod:`suppesnet.kernels` are used.
"""
import os

_FLAG = os.environ.get("SUPPESNET_NUMBA", "1").strip().lower()

try:
    from numba import njit as _njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    _njit = None

NUMBA_ENABLED = _FLAG not in {"0", "false", "off", "no"} and _njit is not None


def njit(*args, **kwargs):
    """``numba.njit`` when available, else an identity decorator."""
    if _njit is None:
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f
    return _njit(*args, **kwargs)
