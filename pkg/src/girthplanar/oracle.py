"""Brute-force ground truth at desk scale, independent of the builders.

A spanning subgraph H of a graph on n vertices is maximal planar of girth
g iff it is connected, planar, has girth >= g and exactly g(n-2)/(g-2)
edges: by Euler's formula with all faces of length >= g, that edge count
forces every face to have length exactly g.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import networkx as nx
import numpy as np
from scipy.stats import binomtest

from .graph import SimpleGraph, _rng
from .planar import divisibility_ok, max_edges

MAX_ORACLE_N = 8


class CapacityError(ValueError):
    """The exhaustive oracle was asked about a graph that is too large."""


@dataclass(frozen=True)
class ExactResult:
    n: int
    g: int
    tag: str
    probability: Fraction | float
    enumeration_size: int

    def __post_init__(self):
        if not 0 <= self.probability <= 1:
            raise ValueError("probability out of range")


@dataclass(frozen=True)
class Estimate:
    successes: int
    trials: int
    lo: float
    hi: float

    @property
    def fraction(self) -> float:
        return self.successes / self.trials if self.trials else float("nan")


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    if trials == 0:
        return 0.0, 1.0
    ci = binomtest(successes, trials).proportion_ci(confidence_level=confidence, method="wilson")
    return float(ci.low), float(ci.high)


def _as_rational(p):
    if isinstance(p, (int, Fraction)):
        return Fraction(p)
    return p


def exact_c4_spanning_probability(p) -> Fraction | float:
    """Pr[G(4, p) has a spanning 4-cycle] = 3p^4 - 2p^6 (exact for rational p)."""
    p = _as_rational(p)
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    return 3 * p**4 - 2 * p**6


def enumerate_c4_probability(p) -> Fraction | float:
    """The same probability by summing over all 2^6 edge subsets of K_4."""
    p = _as_rational(p)
    pairs = list(itertools.combinations(range(4), 2))
    total = 0 * p
    for mask in range(1 << 6):
        edges = [pairs[i] for i in range(6) if mask >> i & 1]
        k = len(edges)
        if contains_spanning_maximal(SimpleGraph.from_edges(4, edges), 4):
            total += p**k * (1 - p) ** (6 - k)
    return total


def _girth_at_least(adj: list[set[int]], g: int) -> bool:
    """No cycle shorter than g (g <= 8 here, so depth-limited search suffices)."""
    n = len(adj)
    for s in range(n):
        dist = {s: 0}
        parent = {s: -1}
        frontier = [s]
        while frontier:
            nxt = []
            for u in frontier:
                for w in adj[u]:
                    if w not in dist:
                        dist[w] = dist[u] + 1
                        parent[w] = u
                        nxt.append(w)
                    elif parent[u] != w and dist[u] + dist[w] + 1 < g:
                        return False
            frontier = nxt
    return True


@lru_cache(maxsize=1 << 16)
def _contains(n: int, edge_mask: int, g: int) -> bool:
    pairs = list(itertools.combinations(range(n), 2))
    host = [pairs[i] for i in range(len(pairs)) if edge_mask >> i & 1]
    target = max_edges(g, n)
    if target.denominator != 1 or len(host) < target:
        return False
    target = int(target)
    adj: list[set[int]] = [set() for _ in range(n)]
    chosen: list[tuple[int, int]] = []

    def connected() -> bool:
        seen = {0}
        stack = [0]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == n

    def search(i: int) -> bool:
        if len(chosen) == target:
            if not connected():
                return False
            graph = nx.Graph(chosen)
            return nx.check_planarity(graph)[0]
        if len(host) - i < target - len(chosen):
            return False
        u, v = host[i]
        adj[u].add(v)
        adj[v].add(u)
        chosen.append((u, v))
        if _girth_at_least(adj, g) and search(i + 1):
            return True
        chosen.pop()
        adj[u].discard(v)
        adj[v].discard(u)
        return search(i + 1)

    return search(0)


def contains_spanning_maximal(graph: SimpleGraph, g: int) -> bool:
    """Whether ``graph`` has a spanning maximal planar subgraph of girth g (n <= 8)."""
    n = graph.n
    if n > MAX_ORACLE_N:
        raise CapacityError(f"exhaustive oracle handles n <= {MAX_ORACLE_N}, got {n}")
    if n < 3 or not divisibility_ok(g, n):
        return False
    mask = 0
    for i, (u, v) in enumerate(itertools.combinations(range(n), 2)):
        if graph.matrix[u, v]:
            mask |= 1 << i
    return _contains(n, mask, g)


def exact_containment_probability(n: int, g: int, p) -> ExactResult:
    """Sum over all 2^C(n,2) hosts (practical for n <= 5)."""
    p = _as_rational(p)
    m = n * (n - 1) // 2
    total = 0 * p
    for mask in range(1 << m):
        if _contains(n, mask, g):
            k = bin(mask).count("1")
            total += p**k * (1 - p) ** (m - k)
    return ExactResult(n, g, "spanning-maximal", total, 1 << m)


def empirical_containment(n: int, g: int, p: float, trials: int, seed: int = 0) -> Estimate:
    """Fraction of sampled G(n, p) containing a spanning maximal planar girth-g subgraph."""
    if n > MAX_ORACLE_N:
        raise CapacityError(f"exhaustive oracle handles n <= {MAX_ORACLE_N}, got {n}")
    m = n * (n - 1) // 2
    rng = _rng(seed, 0x0AC1E)
    masks = (rng.random((trials, m)) < p) @ (1 << np.arange(m, dtype=np.int64))
    counts = np.unique(masks, return_counts=True)
    hits = sum(int(c) for mask, c in zip(*counts) if _contains(n, int(mask), g))
    lo, hi = wilson_interval(hits, trials)
    return Estimate(hits, trials, lo, hi)

