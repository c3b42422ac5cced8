"""Backend selection for the hot kernels.

The compiled extension is preferred; setting ``MQUIVER_PURE_PYTHON=1`` or a
missing build falls back to the numpy versions.
"""
import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if not os.environ.get("MQUIVER_PURE_PYTHON"):
    try:
        from . import _ckernels as _impl  # noqa: F811
        BACKEND = "cython"
    except ImportError:
        pass

char_poly = _impl.char_poly
linear_factor_product = _impl.linear_factor_product
