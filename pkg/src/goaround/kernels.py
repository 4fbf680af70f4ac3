"""Kernel backend selection.

Prefers the compiled extension when it imports cleanly; otherwise falls
back to the pure-Python twin. Set GOAROUND_KERNEL=py (or =compiled) to
force a backend; forcing the compiled one raises if it is not built.
"""

import os

from . import _kernels_py

_forced = os.environ.get("GOAROUND_KERNEL", "").strip().lower()

if _forced in ("py", "python"):
    _impl = _kernels_py
elif _forced in ("c", "compiled"):
    from . import _kernels as _impl  # type: ignore[attr-defined]
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _kernels_py

BACKEND = _impl.BACKEND
scan_candidates = _impl.scan_candidates


def available_backends():
    """Names of the kernel backends importable in this environment."""
    names = ["python"]
    try:
        from . import _kernels  # noqa: F401
        names.insert(0, "compiled")
    except ImportError:
        pass
    return names
