"""Select compiled or pure-Python kernels.

The compiled extension is used when it imports; set ``HETSIS_PURE_PYTHON=1``
to force the fallback.
"""
from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("HETSIS_PURE_PYTHON", "") not in ("", "0"):
    kernels = _kernels_py
    NAME = "python"
else:
    try:
        from . import _kernels as kernels  # type: ignore[attr-defined]

        NAME = "cython"
    except ImportError:
        kernels = _kernels_py
        NAME = "python"

OK = _kernels_py.OK
MAX_ITER = _kernels_py.MAX_ITER
UNDERFLOW = _kernels_py.UNDERFLOW


def get(name: str):
    """Return the kernel module called ``name`` ("python" or "cython")."""
    if name == "python":
        return _kernels_py
    if name == "cython":
        from . import _kernels  # type: ignore[attr-defined]

        return _kernels
    raise ValueError(f"unknown backend {name!r}")
