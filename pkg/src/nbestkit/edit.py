"""Alignment kernel selection.

Prefers the compiled extension when it was built, otherwise falls back to
the pure-Python kernel. Set NBESTKIT_NO_EXT=1 to force the fallback (used
by the benchmark and the backend-equivalence tests).
"""

from __future__ import annotations

import os

from . import _levenshtein as _pure

_impl = _pure
if os.environ.get("NBESTKIT_NO_EXT") != "1":
    try:
        from . import _levenshtein_cy as _impl  # type: ignore[no-redef]
    except ImportError:
        pass

BACKEND = "python" if _impl is _pure else "cython"

align_ops = _impl.align_ops

OP_MATCH = _pure.OP_MATCH
OP_SUB = _pure.OP_SUB
OP_DEL = _pure.OP_DEL
OP_INS = _pure.OP_INS
