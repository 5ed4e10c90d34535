"""Backend selection for the walk kernels.

Prefers the compiled extension; falls back to the pure-numpy twin.  Set
WNRQC_FORCE_PYTHON_KERNELS=1 to force the fallback (used by the backend
equivalence tests and the benchmark).
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("WNRQC_FORCE_PYTHON_KERNELS"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_py

BACKEND: str = _impl.BACKEND

walk_run = _impl.walk_run
walk_zm1_batch = _impl.walk_zm1_batch
mc_final_weights = _impl.mc_final_weights
mc_final_weights_resample = _impl.mc_final_weights_resample


def implementations():
    """Both kernel implementations, keyed by backend name (for benchmarks
    and equivalence tests)."""
    impls = {"python": _kernels_py}
    try:
        from . import _kernels
        impls["cython"] = _kernels
    except ImportError:
        pass
    return impls
