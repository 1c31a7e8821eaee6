"""Hot-loop kernels: compiled extension when available, numpy fallback
otherwise.  Set PHOTONWAIT_PURE=1 to force the pure-Python path."""

import importlib
import os

from . import reference

__all__ = ["ou_intensity", "expsum_solve", "BACKEND"]

_fast = None
if not os.environ.get("PHOTONWAIT_PURE"):
    try:
        _fast = importlib.import_module("._fast", __name__)
    except ImportError:
        _fast = None

if _fast is not None:
    BACKEND = "compiled"
    ou_intensity = _fast.ou_intensity
    expsum_solve = _fast.expsum_solve
else:
    BACKEND = "pure"
    ou_intensity = reference.ou_intensity
    expsum_solve = reference.expsum_solve
