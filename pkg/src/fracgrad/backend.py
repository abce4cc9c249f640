"""Summation-backend selection: compiled extension or numpy fallback.

The choice is made once at import time.  Set FRACGRAD_BACKEND to "cython"
or "numpy" to force a backend; "auto" (the default) prefers the compiled
extension and silently falls back when it is not built.
"""

import os

_requested = os.environ.get("FRACGRAD_BACKEND", "auto").lower()
if _requested not in ("auto", "cython", "numpy"):
    raise RuntimeError(
        f"FRACGRAD_BACKEND must be auto, cython or numpy, got {_requested!r}"
    )

if _requested in ("auto", "cython"):
    try:
        from . import _kernels as _impl

        BACKEND_NAME = "cython"
    except ImportError:
        if _requested == "cython":
            raise
        from . import _kernels_np as _impl

        BACKEND_NAME = "numpy"
else:
    from . import _kernels_np as _impl

    BACKEND_NAME = "numpy"

circular_convolve = _impl.circular_convolve
weighted_abs_diff_sum = _impl.weighted_abs_diff_sum
