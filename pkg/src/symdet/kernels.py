"""Backend selection for the numeric kernels.

The compiled extension is used when importable; set ``SYMDET_PURE_PYTHON=1``
to force the numpy fallback. ``BACKEND`` names the active choice.
"""
from __future__ import annotations

import os

from . import _pykernels

if os.environ.get("SYMDET_PURE_PYTHON") == "1":
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = "python" if _impl is _pykernels else "cython"

det = _impl.det
det_batch = _impl.det_batch
permanent_ryser = _impl.permanent_ryser
permanent_naive = _impl.permanent_naive

__all__ = ["BACKEND", "det", "det_batch", "permanent_ryser", "permanent_naive"]
