"""Backend selection for the hot loops.

``QLGA_BACKEND=numpy`` forces the pure-numpy kernels; anything else (or unset)
uses numba when it can be imported. This only picks an execution path, results
agree to rounding either way.
"""

import os

BACKEND_ENV = "QLGA_BACKEND"

try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False


def requested_backend():
    value = os.environ.get(BACKEND_ENV, "").strip().lower()
    if value == "numpy" or not HAVE_NUMBA:
        return "numpy"
    return "numba"


if HAVE_NUMBA:
    from numba import njit
else:  # pragma: no cover

    def njit(func=None, **kwargs):
        if func is not None:
            return func

        def wrapper(f):
            return f

        return wrapper
