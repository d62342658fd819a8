"""Kernel backend selection.

The compiled extension is used when it was built; otherwise, or when
``MCSYNC_PURE_PYTHON`` is set, the numpy fallback is loaded.
"""

import os

from . import _kernels_py

if os.environ.get("MCSYNC_PURE_PYTHON"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND = "python" if _impl is _kernels_py else "cython"

ml_scan = _impl.ml_scan
tt_scan = _impl.tt_scan

__all__ = ["BACKEND", "ml_scan", "tt_scan"]
