"""Hot-loop kernels: compiled core with a pure-numpy fallback.

The compiled extension is selected at import time when available; set
``RIFLES_PURE_KERNELS=1`` to force the fallback. Both backends produce
bit-identical results (see tests/test_kernels.py and benchmarks/).
"""

import os

from rifles._kernels import pure as _pure

if os.environ.get("RIFLES_PURE_KERNELS"):
    _impl = _pure
    KERNEL_BACKEND = "pure"
else:
    try:
        from rifles._kernels import _corekern as _impl
        KERNEL_BACKEND = "compiled"
    except ImportError:
        _impl = _pure
        KERNEL_BACKEND = "pure"

run_lengths = _impl.run_lengths
apply_heartbeats = _impl.apply_heartbeats

__all__ = ["KERNEL_BACKEND", "run_lengths", "apply_heartbeats"]
