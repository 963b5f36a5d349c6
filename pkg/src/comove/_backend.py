"""Pick the compiled kernels when available.

Set ``COMOVE_BACKEND=python`` to force the NumPy fallback.
"""

from __future__ import annotations

import os

from comove import _kernels_py

if os.environ.get("COMOVE_BACKEND", "").lower() == "python":
    kernels = _kernels_py
    BACKEND = "python"
else:
    try:
        from comove import _kernels as kernels
        BACKEND = "cython"
    except ImportError:
        kernels = _kernels_py
        BACKEND = "python"

__all__ = ["BACKEND", "kernels"]
