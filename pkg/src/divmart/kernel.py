"""Kernel selector: compiled antichain ops when available, else pure Python.

Set DIVMART_PURE_KERNEL=1 to force the fallback (used by the parity tests
and the benchmark).
"""

import os

if os.environ.get("DIVMART_PURE_KERNEL") == "1":
    from . import _kernel_py as impl
else:
    try:
        from . import _kernel as impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernel_py as impl

FULL = impl.FULL
EMPTY = impl.EMPTY
KERNEL_NAME = impl.KERNEL_NAME

normalize = impl.normalize
union = impl.union
intersect = impl.intersect
complement = impl.complement
measure = impl.measure
covers = impl.covers
meets = impl.meets
max_len = impl.max_len
