"""Kernel selection for definite-form enumeration.

Prefers the compiled extension (emptysextic._enum_fast, built from
_enum_fast.pyx) and falls back to the pure-Python reference kernel. Both
expose enumerate_bounded(gram, bound, center=None) with identical output;
the test suite and benchmarks/bench_enum.py compare them directly.

Set EMPTYSEXTIC_PURE=1 to force the pure lane.
"""

from __future__ import annotations

import os

if os.environ.get("EMPTYSEXTIC_PURE"):
    from ._enum_py import BACKEND, enumerate_bounded  # noqa: F401
else:
    try:
        from ._enum_fast import BACKEND, enumerate_bounded  # noqa: F401
    except ImportError:  # compiled lane absent: use the reference kernel
        from ._enum_py import BACKEND, enumerate_bounded  # noqa: F401
