"""Kernel backend selection.

The compiled extension is preferred when importable; otherwise the numpy
backend takes over. Set CONVOBOT_BACKEND=numpy (or =cython) to force one,
e.g. for the benchmark in benchmarks/bench_kernels.py.
"""

import os

from . import _backend_numpy

_requested = os.environ.get("CONVOBOT_BACKEND", "").strip().lower()

if _requested in ("numpy", "python", "pure"):
    _impl = _backend_numpy
elif _requested in ("", "cython", "fast"):
    try:
        from . import _fastkernels as _impl
    except ImportError:
        if _requested:
            raise ImportError(
                "CONVOBOT_BACKEND=cython but the compiled extension is not "
                "available; reinstall with a C compiler present"
            ) from None
        _impl = _backend_numpy
else:
    raise ImportError(f"unknown CONVOBOT_BACKEND value {_requested!r}")

affine = _impl.affine
relu = _impl.relu
softmax_rows = _impl.softmax_rows
matmul_at_b = _impl.matmul_at_b
matmul_a_bt = _impl.matmul_a_bt
colsum = _impl.colsum
relu_backward = _impl.relu_backward


def backend_name() -> str:
    return _impl.NAME


def load_backend(name: str):
    """Explicit backend module lookup, used by tests and the benchmark."""
    if name == "numpy":
        return _backend_numpy
    if name == "cython":
        from . import _fastkernels

        return _fastkernels
    raise ValueError(f"unknown backend {name!r}")
