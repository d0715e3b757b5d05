"""Backend selection for the hot kernels.

The compiled Cython extension is preferred when importable; the NumPy
reference implementation is the fallback.  PMODULI_KERNEL=python|cython
forces a choice (forcing cython raises if the extension is missing).
"""

from __future__ import annotations

import os

from . import _ref

_FORCED = os.environ.get("PMODULI_KERNEL", "").strip().lower()

if _FORCED == "python":
    backend = _ref
elif _FORCED == "cython":
    from . import _fast as backend  # noqa: F401  (ImportError is the signal)
else:
    try:
        from . import _fast as backend
    except ImportError:
        backend = _ref


def backend_name() -> str:
    return backend.NAME


def get_backend(name: str | None = None):
    """Return a kernel namespace by name, defaulting to the selected one."""
    if name is None:
        return backend
    if name == "python":
        return _ref
    if name == "cython":
        from . import _fast
        return _fast
    raise ValueError(f"unknown kernel backend {name!r}")
