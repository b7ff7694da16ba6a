"""Backend selection for the hot integrator kernels.

Set ``CAVSIM_BACKEND=numpy`` to force the pure-numpy path even when numba is
importable. Any other value (or unset) uses numba when available.
"""

from __future__ import annotations

import os


def _noop_jit(*args, **kwargs):
    """Stand-in for ``numba.njit`` that returns the function untouched."""
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]

    def wrap(f):
        return f

    return wrap


def _have_numba() -> bool:
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


HAVE_NUMBA = _have_numba()

_requested = os.environ.get("CAVSIM_BACKEND", "numba").strip().lower()
USE_NUMBA = HAVE_NUMBA and _requested != "numpy"
BACKEND = "numba" if USE_NUMBA else "numpy"

if HAVE_NUMBA:
    from numba import njit
else:
    njit = _noop_jit
