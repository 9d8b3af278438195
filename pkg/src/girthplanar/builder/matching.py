"""Matching-based vertex insertion and the face-class partition it relies on."""

from __future__ import annotations

from typing import Sequence

import networkx as nx
import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import maximum_bipartite_matching

from ..planar import RotationMap, StructuralError, antipodal_pair
from .state import BuildFailure, ConstructionState


def max_matching(aux: np.ndarray) -> np.ndarray:
    """Maximum matching of a boolean rows x cols biadjacency; -1 marks unmatched rows."""
    if aux.shape[0] == 0:
        return np.empty(0, dtype=np.int64)
    if aux.shape[1] == 0:
        return np.full(aux.shape[0], -1, dtype=np.int64)
    return maximum_bipartite_matching(sparse.csr_matrix(aux), perm_type="column")


def face_intersection_graph(faces: Sequence[int], rmap: RotationMap) -> nx.Graph:
    graph = nx.Graph()
    graph.add_nodes_from(faces)
    at: dict[int, list[int]] = {}
    for f in faces:
        for v in set(rmap.face_walk(f)):
            at.setdefault(v, []).append(f)
    for fs in at.values():
        for i, f in enumerate(fs):
            for h in fs[i + 1:]:
                graph.add_edge(f, h)
    return graph


def _exact_coloring(graph: nx.Graph, k: int) -> dict | None:
    order = sorted(graph.nodes, key=lambda v: (-graph.degree(v), v))
    color: dict = {}

    def place(i: int) -> bool:
        if i == len(order):
            return True
        v = order[i]
        taken = {color[w] for w in graph[v] if w in color}
        for c in range(k):
            if c not in taken:
                color[v] = c
                if place(i + 1):
                    return True
                del color[v]
        return False

    return dict(color) if place(0) else None


def partition_insertion_faces(faces: Sequence[int], rmap: RotationMap, *,
                              strict: bool = True, max_classes: int = 4) -> list[list[int]]:
    """Split faces into at most ``max_classes`` classes of pairwise vertex-disjoint faces.

    With ``strict`` the textbook precondition is enforced: every face may
    meet at most three of the others. Without it, any face-intersection
    graph that is ``max_classes``-colourable is accepted (greedy DSatur
    colouring, exact backtracking per component if greedy needs more).
    """
    faces = list(faces)
    if len(set(faces)) != len(faces):
        raise StructuralError("repeated face in the insertion list")
    graph = face_intersection_graph(faces, rmap)
    if strict:
        for f in faces:
            if graph.degree(f) > 3:
                raise StructuralError(f"face {f} meets {graph.degree(f)} other insertion faces")
    color = nx.coloring.greedy_color(graph, strategy="DSATUR")
    if color and max(color.values()) >= max_classes:
        color = {}
        for comp in nx.connected_components(graph):
            sub = _exact_coloring(graph.subgraph(comp), max_classes)
            if sub is None:
                raise StructuralError(f"insertion faces {sorted(comp)[:6]} need more than "
                                      f"{max_classes} classes")
            color.update(sub)
    classes: list[list[int]] = [[] for _ in range(max_classes)]
    for f in faces:
        classes[color[f]].append(f)
    return [sorted(c) for c in classes if c]


def match_insert(face_class: Sequence[int], candidates: Sequence[int], layer: np.ndarray,
                 rmap: RotationMap, *, anchors: Sequence[tuple[int, int]] | None = None,
                 saturate: bool = True, state: ConstructionState | None = None,
                 key=None, rng: np.random.Generator | None = None) -> list[tuple[int, int]]:
    """Insert one candidate vertex into each face by a length-2 path between its anchors.

    Face f and candidate v are joined in the auxiliary bipartite graph iff
    v is adjacent in ``layer`` to both anchors of f (default: the fixed
    antipodal pair of the face). A maximum matching decides the
    insertions. With ``saturate`` every face must be matched, else
    BuildFailure("match"); otherwise the matched subset is inserted.
    Returns (face id, inserted vertex) pairs.
    """
    face_class = list(face_class)
    cand = np.asarray(candidates, dtype=np.int64)
    if anchors is None:
        anchors = [antipodal_pair(rmap.face_walk(f)) for f in face_class]
    if not face_class:
        return []
    if saturate and cand.size < len(face_class):
        raise BuildFailure("match", f"{cand.size} candidates for {len(face_class)} faces")
    if rng is not None:
        cand = cand[rng.permutation(cand.size)]
    a = np.array([x for x, _ in anchors], dtype=np.int64)
    b = np.array([y for _, y in anchors], dtype=np.int64)
    aux = layer[np.ix_(a, cand)] & layer[np.ix_(b, cand)]
    match = max_matching(aux)
    if saturate and (match < 0).any():
        raise BuildFailure("match", f"{int((match < 0).sum())} of {len(face_class)} "
                           "faces unmatched")
    out = []
    for f, (x, y), m in zip(face_class, anchors, match):
        if m < 0:
            continue
        v = int(cand[m])
        path = [int(x), v, int(y)]
        if state is not None:
            state.take([v])
            state.insert(f, path, key)
        else:
            rmap.insert_path(f, path)
        out.append((f, v))
    return out


def disjoint_faces(rmap: RotationMap, limit: int | None = None,
                   faces: Sequence[int] | None = None) -> list[int]:
    """Greedy scan over face ids keeping faces vertex-disjoint from those already kept."""
    blocked: set[int] = set()
    out = []
    for f in (rmap.face_ids() if faces is None else faces):
        walk = rmap.face_walk(f)
        if blocked.isdisjoint(walk):
            out.append(f)
            blocked.update(walk)
            if limit is not None and len(out) >= limit:
                break
    return out
