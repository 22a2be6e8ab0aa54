from ._qnm import (  # noqa: F401
    Increment,
    NonMarkovReport,
    RobustnessResult,
    bec,
    diamond_distance,
    max_entangled,
    nm_total,
    rg,
)

__all__ = [
    "Increment",
    "NonMarkovReport",
    "RobustnessResult",
    "bec",
    "diamond_distance",
    "max_entangled",
    "nm_total",
    "rg",
]
