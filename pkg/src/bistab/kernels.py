"""Backend selection for the integration kernel.

The compiled extension is used when it imports; otherwise, or when the
environment variable BISTAB_PURE_PYTHON is set to a non-empty value other
than "0", the pure-Python twin is used.
"""

from __future__ import annotations

import os

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None


def _pick():
    forced = os.environ.get("BISTAB_PURE_PYTHON", "")
    if _compiled is None or (forced and forced != "0"):
        return _kernels_py, "python"
    return _compiled, "compiled"


impl, BACKEND = _pick()


def get(name: str | None = None):
    """Kernel module by name ("compiled" or "python"); default is the active one."""
    if name is None:
        return impl
    if name == "python":
        return _kernels_py
    if name == "compiled":
        if _compiled is None:
            raise ImportError("compiled kernel is not built")
        return _compiled
    raise ValueError(f"unknown kernel backend {name!r}")


def available() -> list[str]:
    return ["compiled", "python"] if _compiled is not None else ["python"]
