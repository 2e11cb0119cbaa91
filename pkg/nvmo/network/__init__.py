from .graph import (
    Assumption1Flags,
    Digraph,
    TreeReport,
    WResult,
    compute_W,
    neighbors,
    validate_assumption1,
)

__all__ = [
    "Assumption1Flags",
    "Digraph",
    "TreeReport",
    "WResult",
    "compute_W",
    "neighbors",
    "validate_assumption1",
]
