"""Randomized constructions of spanning maximal planar subgraphs of given girth."""

from .bipartite import build_bipartite
from .cycles import find_g_cycle, find_g_cycles
from .even import EvenPlan, build_even, plan_even
from .matching import disjoint_faces, match_insert, max_matching, partition_insertion_faces
from .odd import build_odd, ring_size
from .paths import PathRequest, check_paths, embed_disjoint_paths, route_disjoint_paths
from .state import (BuildConfig, BuildFailure, BuildOutcome, ConstructionState,
                    StageRecord)

FAMILIES = ("bipartite", "even", "odd")


def family_for(g: int) -> str:
    if g == 4:
        return "bipartite"
    return "even" if g % 2 == 0 else "odd"


def build(family: str, n: int, g: int, p: float, seed: int = 0,
          config: BuildConfig | None = None) -> BuildOutcome:
    """Dispatch to the builder of ``family``."""
    if family == "bipartite":
        if g != 4:
            raise ValueError("the bipartite family has girth 4")
        return build_bipartite(n, p, seed, config)
    if family == "even":
        return build_even(n, g, p, seed, config)
    if family == "odd":
        return build_odd(n, g, p, seed, config)
    raise ValueError(f"unknown family {family!r}")


__all__ = [
    "BuildConfig", "BuildFailure", "BuildOutcome", "ConstructionState", "EvenPlan",
    "FAMILIES", "PathRequest", "StageRecord", "build", "build_bipartite", "build_even",
    "build_odd", "check_paths", "disjoint_faces", "embed_disjoint_paths", "family_for",
    "find_g_cycle", "find_g_cycles", "match_insert", "max_matching",
    "partition_insertion_faces", "plan_even", "ring_size", "route_disjoint_paths",
]
