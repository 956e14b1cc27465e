"""Numba detection and the environment switches that control it.

``NONLOCAL_RELAX_NUMBA=0`` forces the pure-numpy kernels even when numba is
importable. ``NONLOCAL_RELAX_THREADS`` caps numba's worker pool.
"""
import importlib
import os

_FALSE = {"0", "false", "no", "off"}

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and os.environ.get("NONLOCAL_RELAX_NUMBA", "1").strip().lower() not in _FALSE


def _apply_thread_cap():
    cap = os.environ.get("NONLOCAL_RELAX_THREADS")
    if not (HAVE_NUMBA and cap):
        return
    try:
        n = int(cap)
    except ValueError:
        return
    if n >= 1:
        numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))


def _pick_threading_layer():
    # numba probes TBB first and warns on old versions; skip the probe
    if not HAVE_NUMBA or "NUMBA_THREADING_LAYER" in os.environ:
        return
    try:
        importlib.import_module("numba.np.ufunc.omppool")
        numba.config.THREADING_LAYER = "omp"
    except ImportError:
        numba.config.THREADING_LAYER = "workqueue"


_pick_threading_layer()
_apply_thread_cap()


def njit(*args, **kwargs):
    """``numba.njit`` when numba is installed, identity otherwise."""
    if not HAVE_NUMBA:
        if args and callable(args[0]):
            return args[0]
        return lambda f: f
    kwargs.setdefault("cache", True)
    return numba.njit(*args, **kwargs)


if HAVE_NUMBA:
    prange = numba.prange
else:  # pragma: no cover
    prange = range
