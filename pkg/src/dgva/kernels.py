"""Backend selection for the sparse row kernels.

The compiled extension is used when it was built; otherwise the pure-Python
module is used. Setting ``DGVA_PURE_PYTHON=1`` forces the fallback.
"""
import os

if os.environ.get("DGVA_PURE_PYTHON"):
    from dgva._kernels_py import axpy, scaled, lincomb, reduce_row, echelon_insert, rref
    BACKEND = "python"
else:
    try:
        from dgva._kernels import axpy, scaled, lincomb, reduce_row, echelon_insert, rref
        BACKEND = "cython"
    except ImportError:
        from dgva._kernels_py import axpy, scaled, lincomb, reduce_row, echelon_insert, rref
        BACKEND = "python"

__all__ = ["axpy", "scaled", "lincomb", "reduce_row", "echelon_insert", "rref", "BACKEND"]
