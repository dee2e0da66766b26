"""Backend selection for the projection kernels.

The compiled Cython extension is preferred; the pure-numpy fallback is used
when the extension is unavailable or when TAILSIMPLEX_PURE is set in the
environment.
"""

import os

from tailsimplex._kernels import python_backend

if os.environ.get("TAILSIMPLEX_PURE"):
    _impl = python_backend
    BACKEND = "python"
else:
    try:
        from tailsimplex._kernels import _projection as _impl

        BACKEND = "compiled"
    except ImportError:
        _impl = python_backend
        BACKEND = "python"

lambda_from_sorted = _impl.lambda_from_sorted
project_rows_median = _impl.project_rows_median

__all__ = ["BACKEND", "lambda_from_sorted", "project_rows_median", "python_backend"]
