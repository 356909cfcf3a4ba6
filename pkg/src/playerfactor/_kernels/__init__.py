"""Kernel backend selection.

The compiled Cython extension is preferred when built; otherwise the numpy
fallback is used. Set PLAYERFACTOR_KERNELS=numpy or =cython to force one
(forcing cython raises if the extension is missing).
"""

import os

from . import numpy_backend

_choice = os.environ.get("PLAYERFACTOR_KERNELS", "").strip().lower()
if _choice in ("numpy", "python", "py"):
    _impl = numpy_backend
elif _choice in ("cython", "fast", "c"):
    from . import _fast as _impl
elif _choice:
    raise ValueError(f"unknown PLAYERFACTOR_KERNELS value: {_choice!r}")
else:
    try:
        from . import _fast as _impl
    except ImportError:
        _impl = numpy_backend

BACKEND: str = _impl.NAME
DEGENERACY_RTOL: float = numpy_backend.DEGENERACY_RTOL
FEASIBLE_ATOL: float = numpy_backend.FEASIBLE_ATOL

cm_det_scan = _impl.cm_det_scan
project_columns_to_simplex = _impl.project_columns_to_simplex
pgd_simplex_lsq = _impl.pgd_simplex_lsq
