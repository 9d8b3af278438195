"""Spanning maximal planar subgraphs of even girth g >= 6 in G(n, p).

Layer plan with m = 4M + Q + 2 layers (0-based indices):
  0, 1                 the two halves of the initial g-cycle
  4r+2 .. 4r+5         the four gadget stages of round r = 0..M-1
  4M+2+b               final batch b = 0..Q-1
Every path has length g/2. Rounds place one gadget copy in each recursion
face of the previous round. The final phase repeatedly picks up to
floor(eps*n) vertex-disjoint faces and splits each by a path between its
antipodal corners; only the last batch must use up the pool exactly.

M and Q depend only on (n, g, delta, eps): the face structure evolves
identically whatever the vertex labels, so a label-free dry run fixes the
layer budget before any randomness is drawn.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..gadgets import even_gadget
from ..planar import RotationMap, antipodal_pair, divisibility_ok
from .copies import TemplateCopy
from .cycles import find_g_cycle
from .matching import disjoint_faces
from .paths import PathRequest, embed_disjoint_paths
from .state import (BuildConfig, BuildFailure, BuildOutcome, ConstructionState, finish,
                    make_layers)


@dataclass(frozen=True)
class EvenPlan:
    g: int
    n: int
    rounds: int                  # M
    batches: tuple[int, ...]     # faces per final batch; Q = len(batches)
    used_before_final: int

    @property
    def layer_count(self) -> int:
        return 4 * self.rounds + len(self.batches) + 2


def _batch_limit(n: int, eps: float) -> int:
    return max(1, int(eps * n))


@lru_cache(maxsize=256)
def plan_even(n: int, g: int, delta: float, eps: float) -> EvenPlan:
    """Label-free dry run of the even construction."""
    t = even_gadget(g)
    if n < g:
        raise ValueError(f"n={n} is smaller than the initial {g}-cycle")
    rmap = RotationMap(n)
    nxt = g
    inner, _ = rmap.add_cycle(list(range(g)))
    faces = [inner]
    rounds = 0
    while nxt < delta * n and nxt + len(faces) * t.interior_count <= n:
        new_faces = []
        for f in faces:
            c = TemplateCopy(t, rmap.face_walk(f))
            for step in t.steps:
                c.fill(step, range(nxt, nxt + len(step.interior)))
                nxt += len(step.interior)
                rmap.insert_path(c.face(rmap, step), c.path(step))
            new_faces.extend(c.recursion_faces(rmap))
        faces = new_faces
        rounds += 1
    used = nxt
    half = g // 2
    remaining = (n - nxt) // (half - 1)
    batches = []
    while remaining:
        fs = disjoint_faces(rmap, min(_batch_limit(n, eps), remaining))
        for f in fs:
            a, b = antipodal_pair(rmap.face_walk(f))
            rmap.insert_path(f, [a, *range(nxt, nxt + half - 1), b])
            nxt += half - 1
        batches.append(len(fs))
        remaining -= len(fs)
    return EvenPlan(g, n, rounds, tuple(batches), used)


def build_even(n: int, g: int, p: float, seed: int = 0,
               config: BuildConfig | None = None) -> BuildOutcome:
    if g % 2 or g < 6:
        raise ValueError(f"build_even needs an even girth >= 6, got {g}")
    if not divisibility_ok(g, n):
        raise ValueError(f"n={n} violates the divisibility condition for g={g}")
    cfg = config or BuildConfig()
    delta, eps = cfg.delta_for("even", g), cfg.epsilon_for(g)
    plan = plan_even(n, g, delta, eps)
    m = plan.layer_count
    t = even_gadget(g)
    half = g // 2
    outcome = BuildOutcome("even", n, g, p, seed)
    outcome.stats.update(delta=delta, epsilon=eps, layers=m, M=plan.rounds,
                         Q=len(plan.batches), batches=list(plan.batches))
    layers = make_layers(n, p, m, seed, cfg)
    state = ConstructionState(n, layers, np.random.default_rng([seed & (2**63 - 1), 0xE7]), cfg)
    try:
        with state.stage("cycle", (0, 1)):
            cycle = find_g_cycle(state, g, keys=(0, 1))
            inner, _ = state.map.add_cycle(cycle)
        faces = [inner]
        for r in range(plan.rounds):
            copies = [TemplateCopy(t, state.map.face_walk(f)) for f in faces]
            for stage in range(4):
                j = 4 * r + 2 + stage
                steps = [s for s in t.steps if s.stage == stage]
                with state.stage(f"round{r}.stage{stage}", (j,), faces=len(copies)):
                    pairs = [c.anchors(s) for c in copies for s in steps]
                    req = PathRequest(pairs, tuple(s.length for _ in copies for s in steps),
                                      state.pool(), j)
                    paths = iter(embed_disjoint_paths(req, state))
                    for c in copies:
                        for s in steps:
                            c.fill(s, next(paths)[1:-1])
                            state.insert(c.face(state.map, s), c.path(s))
            faces = [f for c in copies for f in c.recursion_faces(state.map)]
        outcome.stats["used_before_final"] = state.used_count
        for b, count in enumerate(plan.batches):
            j = 4 * plan.rounds + 2 + b
            fs = disjoint_faces(state.map, count)
            with state.stage(f"final{b}", (j,), faces=len(fs)):
                if len(fs) != count:
                    raise BuildFailure("final", "face structure diverged from the plan")
                pairs = [antipodal_pair(state.map.face_walk(f)) for f in fs]
                req = PathRequest(pairs, half, state.pool(), j)
                for f, path in zip(fs, embed_disjoint_paths(req, state)):
                    state.insert(f, path)
        outcome.host = layers.union_graph
        finish(state, outcome, g, outcome.host)
    except BuildFailure as exc:
        outcome.failure = (exc.stage, exc.reason)
        outcome.log = state.log
    outcome.stats["counters"] = dict(state.counters)
    return outcome
