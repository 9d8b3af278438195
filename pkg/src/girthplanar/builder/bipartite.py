"""Spanning maximal planar bipartite subgraphs (girth 4) of G(n, p).

Layer plan (8 layers, each split into 4 sub-layers):
  E_1            the initial 4-cycle
  E_2, E_3, E_4  gadget stages of even rounds (labels {2,3}, {4,5}, {6})
  E_5, E_6, E_7  the same stages in odd rounds
  E_8            final one-vertex-per-face insertion
Every vertex after the 4-cycle is inserted as the middle of a length-2
path between two opposite corners of a 4-face, chosen by a bipartite
matching between faces and free vertices.
"""

from __future__ import annotations

import numpy as np

from ..gadgets import bipartite_gadget
from ..planar import StructuralError
from .copies import TemplateCopy
from .cycles import find_g_cycle
from .matching import disjoint_faces, match_insert, partition_insertion_faces
from .state import (BuildConfig, BuildFailure, BuildOutcome, ConstructionState, finish,
                    make_layers)

LAYERS = 8
PARTS = 4
_GADGET = bipartite_gadget()


def _round_layers(r: int) -> tuple[int, int, int]:
    return (1, 2, 3) if r % 2 == 0 else (4, 5, 6)


def _gadget_round(state: ConstructionState, faces: list[int], r: int) -> list[int]:
    """Place one gadget copy into each face; returns the next round's faces."""
    t = _GADGET
    copies = [TemplateCopy(t, state.map.face_walk(f)) for f in faces]
    layers = _round_layers(r)
    for label in sorted({s.label for s in t.steps}):
        steps = [s for s in t.steps if s.label == label]
        j = layers[steps[0].stage]
        todo = [(c, s, c.face(state.map, s)) for c in copies for s in steps]
        fids = [f for _, _, f in todo]
        with state.stage(f"round{r}.label{label}", (j,), faces=len(fids)):
            try:
                classes = partition_insertion_faces(fids, state.map, strict=False,
                                                    max_classes=max(PARTS, state.layers.parts))
            except StructuralError as exc:
                raise BuildFailure("partition", str(exc)) from None
            by_face = {f: (c, s) for c, s, f in todo}
            for l, cls in enumerate(classes):
                anchors = [by_face[f][0].anchors(by_face[f][1]) for f in cls]
                key = (j, l % state.layers.parts)
                got = match_insert(cls, state.pool(), state.matrix(key), state.map,
                                   anchors=anchors, state=state, key=key, rng=state.rng)
                for f, v in got:
                    c, s = by_face[f]
                    c.fill(s, [v])
    return [f for c in copies for f in c.recursion_faces(state.map)]


def _final_insertion(state: ConstructionState) -> int:
    """Fill the remaining vertices into vertex-disjoint faces, round after round.

    Each round scans the faces in id order, skipping faces that no free
    vertex can enter, and keeps a maximal vertex-disjoint selection.
    """
    j = LAYERS - 1
    layer = state.matrix(j)
    rounds = 0
    while state.free.any():
        pool = state.pool()
        fids = state.map.face_ids()
        walks = np.array([state.map.face_walk(f) for f in fids])
        live = (layer[np.ix_(walks[:, 0], pool)] & layer[np.ix_(walks[:, 2], pool)]).any(axis=1)
        faces = disjoint_faces(state.map, faces=[f for f, ok in zip(fids, live) if ok])
        with state.stage(f"final{rounds}", (j,), faces=len(faces)):
            got = match_insert(faces, pool, layer, state.map,
                               saturate=False, state=state, key=j, rng=state.rng)
            if not got:
                raise BuildFailure("final", f"{pool.size} vertices cannot be inserted")
        rounds += 1
    return rounds


def build_bipartite(n: int, p: float, seed: int = 0,
                    config: BuildConfig | None = None) -> BuildOutcome:
    cfg = config or BuildConfig()
    if n < 4:
        raise ValueError(f"n must be >= 4, got {n}")
    outcome = BuildOutcome("bipartite", n, 4, p, seed)
    parts = cfg.sub_layers
    layers = make_layers(n, p, LAYERS, seed, cfg, parts)
    state = ConstructionState(n, layers, np.random.default_rng([seed & (2**63 - 1), 0xB1]), cfg)
    delta = cfg.delta_for("bipartite", 4)
    outcome.stats.update(delta=delta, layers=LAYERS, parts=parts)
    try:
        with state.stage("cycle", (0,)):
            cycle = find_g_cycle(state, 4, keys=(0, 1))
            inner, _ = state.map.add_cycle(cycle)
        faces = [inner]
        r = 0
        while state.used_count < delta * n and len(faces) * _GADGET.interior_count <= state.free.sum():
            faces = _gadget_round(state, faces, r)
            r += 1
        outcome.stats["rounds"] = r
        outcome.stats["used_before_final"] = state.used_count
        outcome.stats["final_rounds"] = _final_insertion(state)
        outcome.host = layers.union_graph
        finish(state, outcome, 4, outcome.host)
    except BuildFailure as exc:
        outcome.failure = (exc.stage, exc.reason)
        outcome.log = state.log
    outcome.stats["counters"] = dict(state.counters)
    return outcome
