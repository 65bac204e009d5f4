"""Kernel selection: the compiled extension when built, pure Python otherwise.

Set ``LEVIFLAT_PURE_PYTHON=1`` to force the fallback.
"""
from __future__ import annotations

import os

from . import _kernels as pure

compiled = None
if not os.environ.get("LEVIFLAT_PURE_PYTHON"):
    try:
        from . import _speedups as compiled  # type: ignore[no-redef]
    except ImportError:
        compiled = None

active = compiled if compiled is not None else pure
BACKEND = "cython" if compiled is not None else "python"

mul_terms = active.mul_terms
row_axpy = active.row_axpy
