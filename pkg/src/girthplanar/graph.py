"""Undirected graphs, G(n, p) sampling and independent edge layers.

Graphs are stored as dense symmetric boolean adjacency matrices. The
random graphs handled here have a few thousand vertices at most, and the
builders spend most of their time asking "is uv an edge of layer j", which
a matrix answers in O(1) and vectorises well.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np


class SimpleGraph:
    """Immutable simple undirected graph on vertices ``0..n-1``."""

    def __init__(self, n: int, matrix: np.ndarray | None = None):
        if n < 1:
            raise ValueError(f"vertex count must be positive, got {n}")
        if matrix is None:
            matrix = np.zeros((n, n), dtype=bool)
        else:
            matrix = np.asarray(matrix, dtype=bool)
            if matrix.shape != (n, n):
                raise ValueError(f"matrix shape {matrix.shape} != ({n}, {n})")
            if matrix.diagonal().any():
                raise ValueError("self-loops are not allowed")
            if not np.array_equal(matrix, matrix.T):
                raise ValueError("adjacency matrix must be symmetric")
        matrix.flags.writeable = False
        self.n = n
        self.matrix = matrix

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "SimpleGraph":
        m = np.zeros((n, n), dtype=bool)
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            m[u, v] = m[v, u] = True
        return cls(n, m)

    @classmethod
    def complete(cls, n: int) -> "SimpleGraph":
        m = np.ones((n, n), dtype=bool)
        np.fill_diagonal(m, False)
        return cls(n, m)

    @classmethod
    def cycle(cls, n: int) -> "SimpleGraph":
        return cls.from_edges(n, [(i, (i + 1) % n) for i in range(n)])

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.matrix[u, v])

    def neighbors(self, v: int) -> np.ndarray:
        return np.flatnonzero(self.matrix[v])

    def degree(self, v: int) -> int:
        return int(self.matrix[v].sum())

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(int(w) for w in np.flatnonzero(row)) for row in self.matrix)

    @property
    def edge_count(self) -> int:
        return int(np.count_nonzero(self.matrix)) // 2

    def edges(self) -> list[tuple[int, int]]:
        """Edges as ``(u, v)`` with ``u < v``, sorted lexicographically."""
        us, vs = np.nonzero(np.triu(self.matrix, 1))
        return list(zip(us.tolist(), vs.tolist()))

    def is_connected(self) -> bool:
        seen = np.zeros(self.n, dtype=bool)
        seen[0] = True
        frontier = np.array([0])
        while frontier.size:
            nxt = self.matrix[frontier].any(axis=0) & ~seen
            seen |= nxt
            frontier = np.flatnonzero(nxt)
        return bool(seen.all())

    def union(self, other: "SimpleGraph") -> "SimpleGraph":
        if other.n != self.n:
            raise ValueError("vertex counts differ")
        return SimpleGraph(self.n, self.matrix | other.matrix)

    def to_json(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.edges()]}

    @classmethod
    def from_json(cls, data: dict) -> "SimpleGraph":
        return cls.from_edges(int(data["n"]), data["edges"])

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SimpleGraph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.matrix, other.matrix)

    def __hash__(self):
        return hash((self.n, self.matrix.tobytes()))

    def __repr__(self) -> str:
        return f"SimpleGraph(n={self.n}, edges={self.edge_count})"


@dataclass(frozen=True)
class SampleParams:
    n: int
    p: float
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")


def layer_probability(p: float, m: int) -> float:
    """Per-layer probability p' with (1 - p')**m == 1 - p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if p == 1.0 or m == 1:
        return float(p)
    return -math.expm1(math.log1p(-p) / m)


@lru_cache(maxsize=2)
def _pair_index(n: int) -> tuple[np.ndarray, np.ndarray]:
    dtype = np.int16 if n < 2**15 else np.int32
    us, vs = np.triu_indices(n, 1)
    return us.astype(dtype), vs.astype(dtype)


def _rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed) & (2**64 - 1), *key]))


def _bernoulli_positions(rng: np.random.Generator, total: int, q: float) -> np.ndarray:
    """Indices of successes among ``total`` iid Bernoulli(q) trials."""
    if q <= 0.0 or total == 0:
        return np.empty(0, dtype=np.int64)
    if q >= 1.0:
        return np.arange(total, dtype=np.int64)
    # geometric skipping: gaps between successes are Geometric(q)
    out = []
    pos = -1
    chunk = max(16, int(total * q * 1.1) + 64)
    while True:
        gaps = rng.geometric(q, size=chunk)
        cand = pos + np.cumsum(gaps)
        if cand[-1] >= total:
            out.append(cand[cand < total])
            break
        out.append(cand)
        pos = int(cand[-1])
    return np.concatenate(out)


def _matrix_from_pairs(n: int, idx: np.ndarray, values=True, dtype=bool) -> np.ndarray:
    us, vs = _pair_index(n)
    m = np.zeros((n, n), dtype=dtype)
    m.ravel()[us[idx].astype(np.int64) * n + vs[idx]] = values
    return m | m.T


def sample_gnp(params: SampleParams) -> SimpleGraph:
    """Draw G(n, p); identical params give an identical graph."""
    n, p = params.n, params.p
    rng = _rng(params.seed, 0xE5)
    idx = _bernoulli_positions(rng, n * (n - 1) // 2, p)
    return SimpleGraph(n, _matrix_from_pairs(n, idx))


def _pattern_thresholds(q: float, parts: int) -> np.ndarray:
    """Cumulative law of the sub-layer membership mask given "in the layer".

    Masks run over 1..2**parts-1; bit l set means the edge is in sub-layer l.
    """
    masks = np.arange(1, 2**parts)
    bits = ((masks[:, None] >> np.arange(parts)) & 1).astype(float)
    probs = np.prod(np.where(bits == 1, q, 1.0 - q), axis=1)
    cum = np.cumsum(probs)
    if cum[-1] == 0:  # empty layer: the law is never consulted
        return np.ones_like(cum)
    return cum / cum[-1]


class EdgeLayers:
    """m independent G(n, p') layers whose union is distributed as G(n, p).

    Each layer can further be split into ``parts`` independent sub-layers
    G(n, p'') with (1 - p'')**parts == 1 - p' whose union is the layer.
    A layer is then stored as a uint8 matrix of sub-layer bit masks.

    Layers are drawn lazily from per-layer seed streams, so only the layers
    a builder actually touches cost memory and time. With ``coupled=True``
    every potential edge of every layer gets one uniform variate and is
    present iff that variate falls below p'; for a fixed seed the layers are
    then nested (monotone) in p.
    """

    def __init__(self, n: int, p: float, m: int, seed: int = 0, *, parts: int = 1,
                 coupled: bool = False, cache_size: int = 3):
        if m < 1:
            raise ValueError(f"layer count must be >= 1, got {m}")
        if not 1 <= parts <= 8:
            raise ValueError(f"parts must lie in 1..8, got {parts}")
        SampleParams(n, p, seed)
        self.n, self.p, self.layer_count, self.seed = n, p, m, seed
        self.parts = parts
        self.coupled = coupled
        self.p_layer = layer_probability(p, m)
        self.p_part = layer_probability(self.p_layer, parts)
        self._cache: dict[int, np.ndarray] = {}
        self._cache_size = cache_size

    def _draw(self, j: int) -> np.ndarray:
        n = self.n
        total = n * (n - 1) // 2
        rng = _rng(self.seed, 0x1A7E, j)
        q = self.p_layer
        if self.coupled:
            u = rng.random(total)
            idx = np.flatnonzero(u < q)
            w = u[idx] / q if q > 0 else u[idx]
        else:
            idx = _bernoulli_positions(rng, total, q)
            w = rng.random(idx.size)
        if self.parts == 1:
            return _matrix_from_pairs(n, idx)
        cum = _pattern_thresholds(self.p_part, self.parts)
        masks = (np.searchsorted(cum, w, side="right") + 1).astype(np.uint8)
        masks = np.minimum(masks, 2**self.parts - 1).astype(np.uint8)
        return _matrix_from_pairs(n, idx, masks, dtype=np.uint8)

    def _raw(self, j: int) -> np.ndarray:
        if not 0 <= j < self.layer_count:
            raise IndexError(f"layer {j} out of range 0..{self.layer_count - 1}")
        raw = self._cache.get(j)
        if raw is None:
            raw = self._draw(j)
            raw.flags.writeable = False
            if len(self._cache) >= self._cache_size:
                self._cache.pop(next(iter(self._cache)))
            self._cache[j] = raw
        return raw

    def matrix(self, j: int) -> np.ndarray:
        """Boolean adjacency matrix of layer ``j`` (0-based)."""
        raw = self._raw(j)
        return raw if raw.dtype == bool else raw != 0

    def sub_matrix(self, j: int, part: int) -> np.ndarray:
        if not 0 <= part < self.parts:
            raise IndexError(f"sub-layer {part} out of range 0..{self.parts - 1}")
        raw = self._raw(j)
        if self.parts == 1:
            return raw
        return (raw & np.uint8(1 << part)) != 0

    def layer(self, j: int) -> SimpleGraph:
        return SimpleGraph(self.n, self.matrix(j).copy())

    @property
    def layers(self) -> list[SimpleGraph]:
        return [self.layer(j) for j in range(self.layer_count)]

    @cached_property
    def union_graph(self) -> SimpleGraph:
        acc = np.zeros((self.n, self.n), dtype=bool)
        for j in range(self.layer_count):
            acc |= self.matrix(j)
        return SimpleGraph(self.n, acc)

    def __repr__(self) -> str:
        return (f"EdgeLayers(n={self.n}, p={self.p:g}, m={self.layer_count}, "
                f"parts={self.parts}, seed={self.seed})")


def split_layers(n: int, p: float, m: int, seed: int = 0, **kwargs) -> EdgeLayers:
    """Independent layers E_1..E_m, each G(n, layer_probability(p, m)).

    The host edge set is defined as the union of the layers, which has
    exactly the law of G(n, p).
    """
    return EdgeLayers(n, p, m, seed, **kwargs)
