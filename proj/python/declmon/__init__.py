"""Decentralized LTL runtime monitoring.

Formulas, traces and alphabets use the same text formats as the declmon CLI:
traces are one step per line with comma-separated true atoms (``-`` for an
empty step), alphabets look like ``"A:a1,a2;B:b;C:c"``. Truth values are the
strings ``"T"``, ``"F"`` and ``"?"``.
"""

from ._declmon import (
    DeclmonError,
    ParseError,
    atoms,
    bench,
    classify,
    deduce,
    ltl3,
    monitor,
    monitor_bf,
    normalize,
    progress,
    size,
)

__all__ = [
    "DeclmonError",
    "ParseError",
    "atoms",
    "bench",
    "classify",
    "deduce",
    "ltl3",
    "monitor",
    "monitor_bf",
    "normalize",
    "progress",
    "size",
]
