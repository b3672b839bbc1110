"""Counting kernels with a compiled fast path.

The Cython module works in int64 and reports overflow by returning ``None``;
the pure-Python version (arbitrary precision) is used then, or always when the
extension is not built or ``VPF_PURE_PYTHON`` is set.
"""
from __future__ import annotations

import os

from . import _pykernels

try:
    if os.environ.get("VPF_PURE_PYTHON"):
        raise ImportError("pure Python requested")
    from . import _ckernels
except ImportError:
    _ckernels = None

HAVE_EXTENSION = _ckernels is not None


def series_coeffs(parts, n):
    if _ckernels is not None:
        out = _ckernels.series_coeffs(list(parts), n)
        if out is not None:
            return out
    return _pykernels.series_coeffs(parts, n)


def count_solutions(columns, rhs):
    cols = [tuple(int(x) for x in c) for c in columns]
    rhs = [int(b) for b in rhs]
    if _ckernels is not None:
        out = _ckernels.count_solutions(cols, rhs)
        if out is not None:
            return out
    return _pykernels.count_solutions(cols, rhs)
