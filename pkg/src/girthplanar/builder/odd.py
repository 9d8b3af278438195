"""Spanning maximal planar subgraphs of odd girth g = 2k+1 in G(n, p).

Layer plan (8 layers, 0-based):
  0, 1   M disjoint g-cycles, each a length-k path plus a length-(k+1) path
  2, 3   straight / diagonal paths between cycles j, j+1 for even j
  4, 5   the same for odd j
  6      final insertions: a -> b paths of length k+1
  7      final insertions: a' -> c paths of length k
M is the largest ring size with ring_vertex_count(M, g) <= (1 - delta) n.
Each final insertion consumes g-2 new vertices and splits a g-face into
three g-faces; insertions repeat on vertex-disjoint faces until the pool
is empty.
"""

from __future__ import annotations

import numpy as np

from ..gadgets import RingSpec, odd_insertion_pattern, odd_ring, ring_vertex_count
from ..planar import divisibility_ok
from .copies import TemplateCopy
from .cycles import find_g_cycles
from .matching import disjoint_faces
from .paths import PathRequest, embed_disjoint_paths
from .state import (BuildConfig, BuildFailure, BuildOutcome, ConstructionState, finish,
                    make_layers)

LAYERS = 8


def ring_size(n: int, g: int, delta: float) -> int:
    M = 1
    while ring_vertex_count(M + 1, g) <= (1 - delta) * n:
        M += 1
    return M


def build_odd(n: int, g: int, p: float, seed: int = 0,
              config: BuildConfig | None = None) -> BuildOutcome:
    if g % 2 == 0 or g < 5:
        raise ValueError(f"build_odd needs an odd girth >= 5, got {g}")
    if not divisibility_ok(g, n):
        raise ValueError(f"n={n} violates the divisibility condition for g={g}")
    cfg = config or BuildConfig()
    delta = cfg.delta_for("odd", g)
    M = ring_size(n, g, delta)
    if M < 2:
        raise ValueError(f"n={n} is too small for a ring of two {g}-cycles")
    k = (g - 1) // 2
    ring = odd_ring(RingSpec(M, g))
    pattern = odd_insertion_pattern(g)
    outcome = BuildOutcome("odd", n, g, p, seed)
    outcome.stats.update(delta=delta, layers=LAYERS, M=M, ring_vertices=ring.vertex_count)
    layers = make_layers(n, p, LAYERS, seed, cfg)
    state = ConstructionState(n, layers, np.random.default_rng([seed & (2**63 - 1), 0x0D]), cfg)
    try:
        with state.stage("cycles", (0, 1)):
            cycles = find_g_cycles(state, g, M, keys=(0, 1))
        slot = np.full(ring.vertex_count, -1, dtype=np.int64)
        index = {name: i for i, name in enumerate(ring.names)}
        for j, cyc in enumerate(cycles):
            for i, v in enumerate(cyc):
                slot[index[f"c{j}.{i}"]] = v
        for stage in range(4):
            segs = [s for s in ring.segments if s.stage == stage]
            j = 2 + stage
            with state.stage(f"ring.stage{stage}", (j,), faces=len(segs)):
                if not segs:
                    continue
                pairs = [(int(slot[s.start]), int(slot[s.end])) for s in segs]
                req = PathRequest(pairs, tuple(s.length for s in segs), state.pool(), j)
                for s, path in zip(segs, embed_disjoint_paths(req, state)):
                    slot[list(s.interior)] = path[1:-1]
        state.map.add_cycle([int(slot[b]) for b in ring.boundary])
        for step in ring.steps:
            state.insert(state.map.face_of(int(slot[step.start]), int(slot[step.via])),
                         [int(slot[x]) for x in step.slots])
        outcome.stats["used_before_final"] = state.used_count
        rounds = 0
        a_step, c_step = pattern.steps
        while state.free.any():
            need = int(state.free.sum()) // (g - 2)
            fs = disjoint_faces(state.map, need)
            with state.stage(f"final{rounds}", (6, 7), faces=len(fs)):
                copies = [TemplateCopy(pattern, state.map.face_walk(f)) for f in fs]
                for step, j in ((a_step, 6), (c_step, 7)):
                    pairs = [c.anchors(step) for c in copies]
                    req = PathRequest(pairs, step.length, state.pool(), j)
                    for c, path in zip(copies, embed_disjoint_paths(req, state)):
                        c.fill(step, path[1:-1])
                        state.insert(c.face(state.map, step), c.path(step))
            rounds += 1
        outcome.stats["final_rounds"] = rounds
        outcome.host = layers.union_graph
        finish(state, outcome, g, outcome.host)
    except BuildFailure as exc:
        outcome.failure = (exc.stage, exc.reason)
        outcome.log = state.log
    outcome.stats["counters"] = dict(state.counters)
    return outcome
