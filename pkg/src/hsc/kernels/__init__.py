"""Hot loops with a compiled backend and a numpy fallback.

The compiled module is used when it imports; set ``HSC_PURE_PYTHON=1``
before importing :mod:`hsc` to force the fallback.  Both backends stay
importable as :data:`BACKENDS` so they can be compared directly.
"""
from __future__ import annotations

import os

from . import _pykernels

BACKENDS = {"python": _pykernels}

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None
else:
    BACKENDS["cython"] = _ckernels

if _ckernels is not None and os.environ.get("HSC_PURE_PYTHON", "") != "1":
    BACKEND = "cython"
else:
    BACKEND = "python"

_impl = BACKENDS[BACKEND]
fkm_necklaces = _impl.fkm_necklaces
greedy_cover = _impl.greedy_cover
gauss_linking = _impl.gauss_linking
bounded_scan = _impl.bounded_scan

__all__ = ["BACKEND", "BACKENDS", "fkm_necklaces", "greedy_cover", "gauss_linking", "bounded_scan"]
