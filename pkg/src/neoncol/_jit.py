"""Optional numba acceleration.

The inner loops (radial integration, DSMC stepping) are written as
plain numeric kernels; with numba absent they still run, only slowly.
"""

from __future__ import annotations

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(fn):
            return fn

        return wrap
