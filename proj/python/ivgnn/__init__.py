"""Python bindings for the IV-GNN C++ core."""

import os
import sys

try:
    from ._ivgnn import *  # noqa: F401,F403
    from . import _ivgnn as _core
except ImportError:
    # in-tree use: the extension lives in the CMake build directory
    _build = os.environ.get("IVGNN_BUILD_DIR")
    if not _build:
        raise
    sys.path.insert(0, _build)
    import _ivgnn as _core  # noqa: E402
    from _ivgnn import *  # noqa: F401,F403,E402

__all__ = [n for n in dir(_core) if not n.startswith("_")]
