"""Kernel backend selection.

The compiled core is preferred when importable; set COSETX_KERNEL=pure or
COSETX_KERNEL=compiled to force a backend.  Both backends are contractually
bit-identical, so everything above this layer is backend-agnostic.
"""

from __future__ import annotations

import os

from . import pure
from .common import KeyIndex, fits_uint64, identity_flat, key_powers, pack_key_big, pack_keys

try:
    from . import _core
    HAVE_COMPILED = True
except ImportError:
    _core = None
    HAVE_COMPILED = False

_choice = os.environ.get("COSETX_KERNEL", "").strip().lower()
if _choice in ("", "auto"):
    _backend = _core if HAVE_COMPILED else pure
elif _choice == "pure":
    _backend = pure
elif _choice == "compiled":
    if not HAVE_COMPILED:
        raise ImportError(
            "COSETX_KERNEL=compiled but the extension cosetx._kernels._core "
            "is not built; reinstall or unset COSETX_KERNEL"
        )
    _backend = _core
else:
    raise ImportError(f"unknown COSETX_KERNEL value {_choice!r} (use pure/compiled)")

BACKEND: str = _backend.NAME

matmul_batch = _backend.matmul_batch
closure_bfs = _backend.closure_bfs

__all__ = [
    "BACKEND",
    "HAVE_COMPILED",
    "KeyIndex",
    "closure_bfs",
    "fits_uint64",
    "identity_flat",
    "key_powers",
    "matmul_batch",
    "pack_key_big",
    "pack_keys",
    "pure",
]
