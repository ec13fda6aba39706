"""Backend selection for the hot loops.

The compiled extension ``fivebar._ckernels`` is used when it was built;
otherwise the numpy implementation in ``fivebar._pykernels`` is loaded.
Set ``FIVEBAR_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _pykernels

python_backend = _pykernels

if os.environ.get("FIVEBAR_PURE_PYTHON", "").strip() not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = "cython" if _impl is not _pykernels else "python"
compiled_backend = _impl if BACKEND == "cython" else None

fk_batch = _impl.fk_batch
tracking_terms = _impl.tracking_terms
reach_terms = _impl.reach_terms

__all__ = ["BACKEND", "fk_batch", "tracking_terms", "reach_terms",
           "python_backend", "compiled_backend"]
