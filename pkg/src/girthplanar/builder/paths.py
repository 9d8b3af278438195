"""Vertex-disjoint path families through a vertex pool in one edge layer.

Each path s -> t of length L needs L-1 interior vertices from the pool.
Routing a single pair is a layered shortest-path problem: position i of
the path may hold pool vertex v iff v is reachable from s in i steps
through the pool. With a cost per pool vertex (0 free, 1 owned by another
pair) the same layering finds a path that steals as few vertices as
possible; that drives a min-conflicts repair loop, which is what makes
tight pools (every pool vertex must be used) solvable.

Length-2 families are exactly bipartite matchings (pair <-> middle
vertex) and are solved exactly with Hopcroft-Karp.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import maximum_bipartite_matching

from .state import BuildFailure, ConstructionState

_INF = np.int32(1 << 20)


@dataclass(frozen=True)
class PathRequest:
    pairs: tuple[tuple[int, int], ...]
    length: int | tuple[int, ...]
    interior_pool: tuple[int, ...]
    layer: object = 0

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple((int(s), int(t)) for s, t in self.pairs))
        object.__setattr__(self, "interior_pool", tuple(int(v) for v in self.interior_pool))
        lens = self.lengths
        if len(lens) != len(self.pairs):
            raise ValueError("one length per pair is required")
        if any(L < 1 for L in lens):
            raise ValueError("path lengths must be >= 1")
        pool = set(self.interior_pool)
        if len(pool) != len(self.interior_pool):
            raise ValueError("interior pool has repeated vertices")
        terms = {v for st in self.pairs for v in st}
        if terms & pool:
            raise ValueError("terminals must not lie in the interior pool")
        if len(pool) < self.interior_needed:
            raise ValueError(f"pool of {len(pool)} vertices cannot hold "
                             f"{self.interior_needed} path interiors")

    @property
    def lengths(self) -> tuple[int, ...]:
        if isinstance(self.length, int):
            return (self.length,) * len(self.pairs)
        return tuple(int(x) for x in self.length)

    @property
    def interior_needed(self) -> int:
        return sum(L - 1 for L in self.lengths)

    @property
    def tight(self) -> bool:
        return len(self.interior_pool) == self.interior_needed


class _Router:
    """Single-pair layered routing over a fixed pool, with vertex costs."""

    def __init__(self, adj: np.ndarray, pool: np.ndarray, rng: np.random.Generator):
        self.adj = adj
        self.pool = pool
        self.rng = rng
        sub = adj[np.ix_(pool, pool)]
        self.A = sparse.csr_matrix(sub, dtype=np.float32)
        self.indptr, self.indices = self.A.indptr, self.A.indices

    def _minplus(self, f: np.ndarray) -> np.ndarray:
        """out[v] = min over pool neighbours u of f[u]."""
        out = np.full(f.shape, _INF, dtype=np.int32)
        todo = np.ones(f.shape, dtype=bool)
        for level in np.unique(f[f < _INF]):
            reach = (self.A @ (f <= level).astype(np.float32)) > 0
            hit = reach & todo
            out[hit] = level
            todo &= ~hit
            if not todo.any():
                break
        return out

    def route(self, s: int, t: int, L: int, cost: np.ndarray, tries: int = 4):
        """Local pool indices of a min-cost s-t path interior, or None."""
        if L == 1:
            return [] if self.adj[s, t] else None
        if self.pool.size < L - 1:
            return None
        s_nb = self.adj[s, self.pool]
        t_nb = self.adj[t, self.pool]
        layers = [np.where(s_nb, cost, _INF).astype(np.int32)]
        for _ in range(L - 2):
            m = self._minplus(layers[-1])
            layers.append(np.minimum(m + cost, _INF).astype(np.int32))
        last = np.where(t_nb, layers[-1], _INF)
        best = last.min()
        if best >= _INF:
            return None
        ends = np.flatnonzero(last == best)
        for _ in range(tries):
            v = int(self.rng.choice(ends))
            path = [v]
            ok = True
            for i in range(L - 2, 0, -1):
                want = layers[i][v] - cost[v]
                nb = self.indices[self.indptr[v]:self.indptr[v + 1]]
                nb = nb[layers[i - 1][nb] == want]
                if len(path) > 1:
                    nb = nb[~np.isin(nb, path)]
                if nb.size == 0:
                    ok = False
                    break
                v = int(self.rng.choice(nb))
                path.append(v)
            if ok and len(set(path)) == len(path):
                path.reverse()
                return path
        return None


def _match_length_two(adj, pairs, pool, rng):
    s = np.array([p[0] for p in pairs])
    t = np.array([p[1] for p in pairs])
    perm = rng.permutation(pool.size)
    cols = pool[perm]
    aux = adj[np.ix_(s, cols)] & adj[np.ix_(t, cols)]
    match = maximum_bipartite_matching(sparse.csr_matrix(aux), perm_type="column")
    if (match < 0).any():
        return None
    return [[int(a), int(cols[m]), int(b)] for (a, b), m in zip(pairs, match)]


def route_disjoint_paths(adj: np.ndarray, pairs: Sequence[tuple[int, int]],
                         lengths: Sequence[int], pool: Sequence[int],
                         rng: np.random.Generator, restarts: int = 20,
                         repair_factor: int = 30) -> list[list[int]] | None:
    """Pairwise internally disjoint paths, path i of length ``lengths[i]``.

    Interiors come from ``pool``; all edges are edges of ``adj``. Returns
    None when the restart budget runs out.
    """
    pairs = [(int(a), int(b)) for a, b in pairs]
    lengths = [int(L) for L in lengths]
    pool = np.asarray(pool, dtype=np.int64)
    if not pairs:
        return []
    if all(L == 2 for L in lengths):
        return _match_length_two(adj, pairs, pool, rng)
    if all(L == 1 for L in lengths):
        return [[a, b] for a, b in pairs] if all(adj[a, b] for a, b in pairs) else None

    router = _Router(adj, pool, rng)
    npairs = len(pairs)
    budget = max(200, repair_factor * npairs)
    for _ in range(restarts):
        owner = np.full(pool.size, -1, dtype=np.int64)
        local: list[list[int] | None] = [None] * npairs
        queue = deque(int(i) for i in rng.permutation(npairs))
        moves = 0
        while queue and moves < budget:
            i = queue.popleft()
            moves += 1
            s, t = pairs[i]
            free_cost = np.where(owner < 0, 0, _INF).astype(np.int32)
            path = router.route(s, t, lengths[i], free_cost)
            if path is None:
                path = router.route(s, t, lengths[i], (owner >= 0).astype(np.int32))
                if path is None:
                    break
                for victim in {int(owner[v]) for v in path if owner[v] >= 0}:
                    owner[local[victim]] = -1
                    local[victim] = None
                    queue.append(victim)
            owner[path] = i
            local[i] = path
        if not queue and all(x is not None for x in local):
            return [[s, *pool[local[i]].tolist(), t] for i, (s, t) in enumerate(pairs)]
    return None


def check_paths(paths: Sequence[Sequence[int]], req: PathRequest, adj: np.ndarray) -> None:
    """Assert the contract of an embedded path family."""
    assert len(paths) == len(req.pairs), "wrong number of paths"
    pool = set(req.interior_pool)
    seen: set[int] = set()
    for path, (s, t), L in zip(paths, req.pairs, req.lengths):
        assert path[0] == s and path[-1] == t, f"path {path} has wrong terminals"
        assert len(path) == L + 1, f"path {path} has length {len(path) - 1} != {L}"
        mid = path[1:-1]
        assert all(v in pool for v in mid), "interior vertex outside the pool"
        assert not seen.intersection(mid) and len(set(mid)) == len(mid), "paths overlap"
        seen.update(mid)
        assert all(adj[u, v] for u, v in zip(path, path[1:])), "edge missing from layer"


def embed_disjoint_paths(req: PathRequest, state: ConstructionState) -> list[list[int]]:
    """Embed the request in ``state``'s layer ``req.layer``; reserves the interiors.

    Raises BuildFailure("paths") when no family is found within the budget.
    """
    pool = np.asarray(req.interior_pool, dtype=np.int64)
    if pool.size and not state.free[pool].all():
        raise ValueError("interior pool contains used vertices")
    adj = state.matrix(req.layer)
    cfg = state.config
    paths = route_disjoint_paths(adj, req.pairs, req.lengths, pool, state.rng,
                                 cfg.path_restarts, cfg.repair_factor)
    if paths is None:
        state.bump("path_failures")
        raise BuildFailure("paths", f"{len(req.pairs)} paths of length "
                           f"{sorted(set(req.lengths))} in layer {req.layer} "
                           f"(pool {pool.size}, tight={req.tight})")
    if cfg.check_paths:
        check_paths(paths, req, adj)
    for path in paths:
        state.take(path[1:-1])
        state.record_path(path, req.layer)
    return paths
