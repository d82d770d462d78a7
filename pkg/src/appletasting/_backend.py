"""Kernel backend selection.

Hot loops ship in two variants: numba ``@njit`` kernels and pure-numpy
fallbacks.  The numba path is used when numba imports cleanly and the
environment variable ``APPLETASTING_DISABLE_NUMBA`` is unset (or "0").
Both paths compute identical results; ``benchmarks/bench_kernels.py``
compares their speed.
"""
from __future__ import annotations

import os

_FLAG = os.environ.get("APPLETASTING_DISABLE_NUMBA", "0").strip().lower()
_DISABLED = _FLAG not in ("", "0", "false", "no")

if not _DISABLED:
    try:
        from numba import njit  # noqa: F401

        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        NUMBA_ENABLED = False
else:
    NUMBA_ENABLED = False


def backend_name() -> str:
    return "numba" if NUMBA_ENABLED else "numpy"
