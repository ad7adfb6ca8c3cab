"""Backend selection for the compiled kernels.

``DIRAC_REDUCE_BACKEND=numpy`` forces the pure-numpy path even when numba is
importable; ``DIRAC_REDUCE_THREADS`` caps the numba thread pool.
"""
import os
import warnings

BACKEND_ENV = "DIRAC_REDUCE_BACKEND"
THREADS_ENV = "DIRAC_REDUCE_THREADS"

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAVE_NUMBA = numba is not None


def _requested_backend():
    value = os.environ.get(BACKEND_ENV, "numba").strip().lower()
    if value not in ("numba", "numpy"):
        warnings.warn(f"{BACKEND_ENV}={value!r} not understood, using numba", stacklevel=2)
        value = "numba"
    if value == "numba" and not HAVE_NUMBA:
        value = "numpy"
    return value


BACKEND = _requested_backend()
USE_NUMBA = BACKEND == "numba"


def thread_cap():
    raw = os.environ.get(THREADS_ENV)
    if not raw:
        return None
    try:
        n = int(raw)
    except ValueError:
        warnings.warn(f"ignoring non-integer {THREADS_ENV}={raw!r}", stacklevel=2)
        return None
    return max(n, 1)


if HAVE_NUMBA:
    _cap = thread_cap()
    if _cap is not None:
        numba.set_num_threads(min(_cap, numba.config.NUMBA_NUM_THREADS))


def njit(*args, **kwargs):
    """``numba.njit`` with caching on; a no-op decorator when numba is absent."""
    kwargs.setdefault("cache", True)
    if not HAVE_NUMBA:
        if args and callable(args[0]):
            return args[0]
        return lambda f: f
    return numba.njit(*args, **kwargs)
