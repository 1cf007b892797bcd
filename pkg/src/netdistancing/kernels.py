"""Kernel backend selection.

The compiled ``_ckernels`` extension is used when it imports; otherwise the
numpy fallback ``_pykernels``. Set ``NETDISTANCING_PURE=1`` to force the
fallback. ``BACKEND`` names the active one.
"""

import os

from . import _pykernels

if os.environ.get("NETDISTANCING_PURE", "") not in ("", "0"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"
    else:
        BACKEND = "cython"

# bitmask kernels cap n here (table size 2**n)
MAX_TABLE_BITS = 24

regular_mask_table = _impl.regular_mask_table
neighbor_union_table = _impl.neighbor_union_table
subset_closure = _impl.subset_closure
replicator_run = _impl.replicator_run


def backends():
    """Available backend modules by name (for tests and benchmarks)."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        out["cython"] = _ckernels
    return out
