"""Pick the array backend for the hot kernels.

``ISOCHRONE_BACKEND=numpy`` forces the pure numpy/Python path even when
numba is importable; ``numba`` (the default) uses it when available.
"""
import os

_requested = os.environ.get("ISOCHRONE_BACKEND", "numba").strip().lower()

try:
    import numba as _numba
    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is optional
    _numba = None
    HAS_NUMBA = False

USE_NUMBA = HAS_NUMBA and _requested != "numpy"
BACKEND = "numba" if USE_NUMBA else "numpy"


def maybe_jit(func):
    """Compile ``func`` with numba when that backend is active, else return it as is."""
    if not USE_NUMBA:
        return func
    return _numba.njit(cache=True, nogil=True)(func)


def thread_count():
    """Worker cap from ``ISOCHRONE_THREADS`` (default: 1)."""
    raw = os.environ.get("ISOCHRONE_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)
