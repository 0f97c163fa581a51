"""Pick the kernel implementation once, at import.

Set ``ORDSCORE_PURE_PYTHON=1`` to force the pure-Python kernels even when
the compiled extension is built.
"""

import os

if os.environ.get("ORDSCORE_PURE_PYTHON", "").strip() not in ("", "0"):
    from . import _kernels_py as kernels
    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels
        BACKEND = "cython"
    except ImportError:
        from . import _kernels_py as kernels
        BACKEND = "python"

__all__ = ["kernels", "BACKEND"]
