"""Select the history-kernel implementation at import time.

The compiled extension is optional; environments without a C toolchain get
the numpy fallback with identical semantics.  `BACKEND` reports which one
won so tests and the kernel benchmark can be explicit about it.
"""
from __future__ import annotations

from . import _kernels_py

try:  # pragma: no cover - exercised indirectly via BACKEND
    from . import _kernels as _impl

    BACKEND = "compiled"
except ImportError:  # pragma: no cover
    _impl = _kernels_py
    BACKEND = "python"

hist_dot = _impl.hist_dot
hist_dot_multi = _impl.hist_dot_multi


def backend_table() -> dict:
    """All importable kernel implementations, keyed by name."""
    table = {"python": _kernels_py}
    if BACKEND == "compiled":
        table["compiled"] = _impl
    return table
