"""Kernel backend selection: compiled Cython extension with a NumPy fallback.

Set KNENTROPY_PURE_PYTHON=1 before import to force the fallback (used by the
benchmark and the backend-equivalence tests).
"""

from __future__ import annotations

import os

from . import _fallback

if os.environ.get("KNENTROPY_PURE_PYTHON"):
    _impl = _fallback
else:
    try:
        from . import _ac as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _fallback

ac_objective = _impl.ac_objective
ac_eg_minimize = _impl.ac_eg_minimize
ac_grid_scan = _impl.ac_grid_scan

BACKEND = "python" if _impl is _fallback else "compiled"


def get_backend(name: str):
    """Return a specific backend module ('python' or 'compiled')."""
    if name == "python":
        return _fallback
    if name == "compiled":
        from . import _ac

        return _ac
    raise ValueError(f"unknown backend {name!r}")
