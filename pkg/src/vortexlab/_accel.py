"""Numba switch.

Kernels in :mod:`vortexlab.kernels` exist twice: a loop version compiled with
``numba.njit`` and a vectorised numpy version. ``VORTEXLAB_NUMBA=0`` (or a
missing numba install) selects the numpy path. ``VORTEXLAB_THREADS`` caps the
numba thread pool; all kernels are written as serial loops with a fixed
reduction order, so the thread cap never changes results.
"""

import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None


def _flag(name, default):
    value = os.environ.get(name)
    if value is None:
        return default
    return value.strip().lower() not in ("0", "false", "no", "off", "")


USE_NUMBA = numba is not None and _flag("VORTEXLAB_NUMBA", True)

if numba is not None and os.environ.get("VORTEXLAB_THREADS"):
    try:
        numba.set_num_threads(max(1, min(int(os.environ["VORTEXLAB_THREADS"]),
                                         numba.config.NUMBA_NUM_THREADS)))
    except ValueError:
        pass


def njit(func):
    """Compile ``func`` with numba when available, else return it unchanged."""
    if numba is None:
        return func
    return numba.njit(cache=True, fastmath=False)(func)


def backend():
    return "numba" if USE_NUMBA else "numpy"
