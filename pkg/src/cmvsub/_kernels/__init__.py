"""Kernel backend selection.

The compiled extension is preferred; the pure-Python module is the fallback.
Set CMVSUB_PURE=1 to force the fallback (used by the parity tests and the
benchmark).
"""

import os

from . import pykernels as _py

if os.environ.get("CMVSUB_PURE"):
    _backend = _py
    COMPILED = False
else:
    try:
        from . import _ckernels as _backend  # type: ignore[attr-defined]

        COMPILED = True
    except ImportError:
        _backend = _py
        COMPILED = False

szego_track = _backend.szego_track
gz_track_up = _backend.gz_track_up
gz_track_down = _backend.gz_track_down
lognorm_scan = _backend.lognorm_scan

pure = _py
