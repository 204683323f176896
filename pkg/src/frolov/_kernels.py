"""Backend selection for the hot kernels.

The compiled extension is used when it imports cleanly; set the
environment variable ``FROLOV_PURE_PYTHON=1`` to force the numpy fallback.
"""
import os

from . import _pykernels

BACKEND = "python"
if os.environ.get("FROLOV_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels
else:
    _impl = _pykernels

box_points = _impl.box_points
min_abs_product = _impl.min_abs_product
index_bounds = _pykernels.index_bounds

__all__ = ["BACKEND", "box_points", "min_abs_product", "index_bounds"]
