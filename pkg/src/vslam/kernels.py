"""Boundary kernels with backend chosen at import.

The compiled extension is used when it was built and ``VSLAM_PURE_PYTHON`` is
unset; otherwise the pure-Python module is loaded. Both expose ``uup_update``
and ``minimize_antichain`` with identical results.
"""

import os

if os.environ.get("VSLAM_PURE_PYTHON"):
    from . import _pykernels as _impl
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        from . import _pykernels as _impl

BACKEND: str = _impl.BACKEND
uup_update = _impl.uup_update
minimize_antichain = _impl.minimize_antichain

__all__ = ["BACKEND", "uup_update", "minimize_antichain"]
