"""Hot-kernel backend selection.

The compiled Cython backend is preferred when present; set ADFORGE_NO_EXT=1
to force the NumPy fallback. Both expose the same functions and are
interchangeable (see tests/test_kernels.py for the parity suite and
benchmarks/kernel_bench.py for timings).
"""

from __future__ import annotations

import os

from . import _numpy_backend

TANH = _numpy_backend.TANH
RELU = _numpy_backend.RELU
LEAKY_RELU = _numpy_backend.LEAKY_RELU
SIGMOID = _numpy_backend.SIGMOID

if os.environ.get("ADFORGE_NO_EXT") == "1":
    _impl = _numpy_backend
    BACKEND = "numpy"
else:
    try:
        from . import _cy_backend as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        _impl = _numpy_backend
        BACKEND = "numpy"

act_forward = _impl.act_forward
act_backward = _impl.act_backward
hist_sums = _impl.hist_sums

__all__ = [
    "BACKEND",
    "TANH",
    "RELU",
    "LEAKY_RELU",
    "SIGMOID",
    "act_forward",
    "act_backward",
    "hist_sums",
]
