"""Initial g-cycles, each spliced from two paths drawn in two different layers."""

from __future__ import annotations

import numpy as np
from scipy import sparse

from .paths import route_disjoint_paths
from .state import BuildFailure, ConstructionState


def _four_cycle(state: ConstructionState, key) -> list[int]:
    pool = state.pool()
    A = sparse.csr_matrix(state.matrix(key)[np.ix_(pool, pool)], dtype=np.float32)
    deg = np.diff(A.indptr)
    order = state.rng.permutation(np.flatnonzero(deg >= 2))
    for u in order:
        row_u = np.zeros(pool.size, dtype=np.float32)
        row_u[A.indices[A.indptr[u]:A.indptr[u + 1]]] = 1.0
        common = A @ row_u
        common[u] = 0
        vs = np.flatnonzero(common >= 2)
        if vs.size == 0:
            continue
        v = int(state.rng.choice(vs))
        row_v = np.zeros(pool.size, dtype=bool)
        row_v[A.indices[A.indptr[v]:A.indptr[v + 1]]] = True
        mids = np.flatnonzero((row_u > 0) & row_v)
        w1, w2 = state.rng.choice(mids, size=2, replace=False)
        cycle = [int(pool[x]) for x in (u, w1, v, w2)]
        state.take(cycle)
        state.record_path(cycle + cycle[:1], key)
        return cycle
    raise BuildFailure("cycle", "no 4-cycle in the first layer")


def half_lengths(g: int) -> tuple[int, int]:
    """Lengths of the two paths forming a g-cycle (equal halves, or k and k+1)."""
    return g // 2, g - g // 2


def find_g_cycles(state: ConstructionState, g: int, count: int,
                  keys: tuple = (0, 1)) -> list[list[int]]:
    """``count`` vertex-disjoint g-cycles, first halves in layer keys[0], second in keys[1].

    For g = 4 a single 4-cycle is searched directly in the first layer.
    Cycles are returned as vertex lists in cyclic order; their vertices
    are reserved and their edges recorded.
    """
    if g < 4:
        raise ValueError("g must be >= 4")
    if g == 4 and count == 1:
        return [_four_cycle(state, keys[0])]
    L1, L2 = half_lengths(g)
    rng = state.rng
    attempts = max(1, state.config.cycle_attempts if count == 1 else 5)
    restarts = 1 if count == 1 else state.config.path_restarts
    for _ in range(attempts):
        pool = state.pool()
        if pool.size < count * g:
            raise BuildFailure("cycle", f"pool of {pool.size} too small for {count} {g}-cycles")
        ends = rng.choice(pool, size=2 * count, replace=False)
        pairs = [(int(ends[2 * i]), int(ends[2 * i + 1])) for i in range(count)]
        rest = np.setdiff1d(pool, ends)
        first = route_disjoint_paths(state.matrix(keys[0]), pairs, [L1] * count, rest,
                                     rng, restarts, state.config.repair_factor)
        if first is None:
            continue
        used = np.array([v for p in first for v in p[1:-1]], dtype=np.int64)
        rest2 = np.setdiff1d(rest, used)
        second = route_disjoint_paths(state.matrix(keys[1]), pairs, [L2] * count, rest2,
                                      rng, restarts, state.config.repair_factor)
        if second is None:
            continue
        cycles = []
        for p1, p2 in zip(first, second):
            state.take(p1)
            state.take(p2[1:-1])
            state.record_path(p1, keys[0])
            state.record_path(p2, keys[1])
            cycles.append(p1 + p2[-2:0:-1])
        return cycles
    raise BuildFailure("cycle", f"no {count} disjoint {g}-cycles after {attempts} attempts")


def find_g_cycle(state: ConstructionState, g: int, keys: tuple = (0, 1)) -> list[int]:
    return find_g_cycles(state, g, 1, keys)[0]
