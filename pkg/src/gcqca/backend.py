"""Selects the pair-gate kernel implementation at import time.

Set GCQCA_BACKEND=python to force the numpy fallback, GCQCA_BACKEND=cython
to require the compiled extension (ImportError if it is missing).
"""
from __future__ import annotations

import os

_choice = os.environ.get("GCQCA_BACKEND", "auto")

if _choice == "python":
    from . import _core_py as _impl
elif _choice == "cython":
    from . import _core as _impl  # type: ignore[no-redef]
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]
    except ImportError:
        from . import _core_py as _impl

apply_pair_inplace = _impl.apply_pair_inplace
BACKEND_NAME = _impl.BACKEND_NAME
