"""Backend selection for the hot loops.

The compiled Cython module is used when it was built and imports cleanly;
otherwise the numpy implementation takes over. Setting ``MUBTOMO_PURE=1``
in the environment forces the numpy path.
"""

import os

from . import _kernels_py

_pure_requested = os.environ.get("MUBTOMO_PURE", "") not in ("", "0")

if _pure_requested:
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

interference_pattern = _impl.interference_pattern
assemble_density = _impl.assemble_density


def compiled_available():
    try:
        from . import _kernels  # noqa: F401
    except ImportError:
        return False
    return True
