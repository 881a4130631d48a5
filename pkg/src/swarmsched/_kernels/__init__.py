"""Hot-loop kernels with a numba path and a pure-numpy fallback.

The backend is chosen once at import from ``SWARMSCHED_BACKEND``
(``numba`` or ``numpy``).  Unset means numba when it imports, else numpy.
Both backends consume identical random inputs, so a seeded run gives the
same answers either way up to floating-point summation order.
"""

import os

from swarmsched._kernels import _numpy as numpy_kernels

_requested = os.environ.get("SWARMSCHED_BACKEND", "").strip().lower()
if _requested not in ("", "numba", "numpy"):
    raise ImportError(f"SWARMSCHED_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

numba_kernels = None
if _requested != "numpy":
    try:
        from swarmsched._kernels import _numba as numba_kernels
    except ImportError:
        if _requested == "numba":
            raise

if numba_kernels is not None:
    BACKEND = "numba"
    active = numba_kernels
else:
    BACKEND = "numpy"
    active = numpy_kernels

gravity_accelerations = active.gravity_accelerations
repair_onehot = active.repair_onehot
makespans = active.makespans

__all__ = [
    "BACKEND",
    "gravity_accelerations",
    "makespans",
    "numba_kernels",
    "numpy_kernels",
    "repair_onehot",
]
