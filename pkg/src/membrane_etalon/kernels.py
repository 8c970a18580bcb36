"""Kernel backend selection.

Prefers the compiled extension, falls back to the NumPy implementation.
Set MEMBRANE_ETALON_FORCE_NUMPY=1 to skip the extension (used by the
benchmark and by tests that exercise the fallback path).
"""
from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("MEMBRANE_ETALON_FORCE_NUMPY") == "1":
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _kernels_py

BACKEND: str = _impl.BACKEND
delay_recursion = _impl.delay_recursion
