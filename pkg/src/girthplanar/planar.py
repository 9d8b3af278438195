"""Combinatorial planar maps (rotation systems), girth and maximality checks.

A map stores, for each vertex, the cyclic order of its neighbours. Faces
are traced with the rule ``next(u -> v) = (v, succ_v(u))`` where ``succ_v``
is the cyclic successor in the rotation at ``v``. Every face carries an
integer id that survives unrelated insertions: splitting a face retires
its id and hands out two fresh ones.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

from .graph import SimpleGraph


class StructuralError(ValueError):
    """Raised when a rotation system or face operation is malformed."""


class RotationMap:
    """Rotation system on vertices ``0..vertex_count-1`` with tracked faces.

    Vertices that have not been placed yet simply have no rotation. Faces
    are stored as vertex walks; the walk of a face starts at a canonical
    corner fixed when the face is created.
    """

    def __init__(self, vertex_count: int):
        if vertex_count < 1:
            raise ValueError("vertex_count must be positive")
        self.vertex_count = vertex_count
        self.rotations: dict[int, list[int]] = {}
        self._face_of: dict[tuple[int, int], int] = {}
        self._walks: dict[int, tuple[int, ...]] = {}
        self._next_id = 0

    # -- construction -----------------------------------------------------

    @classmethod
    def from_rotations(cls, n: int, rotations: dict[int, Sequence[int]] | Sequence[Sequence[int]]
                       ) -> "RotationMap":
        if not isinstance(rotations, dict):
            rotations = {v: r for v, r in enumerate(rotations) if len(r)}
        rmap = cls(n)
        for v, rot in rotations.items():
            rot = [int(w) for w in rot]
            if len(set(rot)) != len(rot):
                raise StructuralError(f"repeated neighbour in rotation of {v}")
            if v in rot:
                raise StructuralError(f"self-loop at {v}")
            rmap.rotations[int(v)] = rot
        for v, rot in rmap.rotations.items():
            for w in rot:
                if w not in rmap.rotations or v not in rmap.rotations[w]:
                    raise StructuralError(f"half-edge {v}->{w} has no twin")
        rmap._rebuild_faces()
        return rmap

    @classmethod
    def cycle(cls, n: int, vertices: Sequence[int]) -> "RotationMap":
        rmap = cls(n)
        rmap.add_cycle(vertices)
        return rmap

    def add_cycle(self, vertices: Sequence[int]) -> tuple[int, int]:
        """Add a new component that is a cycle; returns (inner, outer) face ids.

        The inner face has walk ``vertices`` in the given order.
        """
        k = len(vertices)
        if k < 3 or len(set(vertices)) != k:
            raise StructuralError("a cycle needs at least 3 distinct vertices")
        for v in vertices:
            if v in self.rotations:
                raise StructuralError(f"vertex {v} is already placed")
        for i, v in enumerate(vertices):
            self.rotations[v] = [vertices[i - 1], vertices[(i + 1) % k]]
        inner = self._new_face(vertices[0], vertices[1])
        outer = self._new_face(vertices[1], vertices[0])
        return inner, outer

    def copy(self) -> "RotationMap":
        other = RotationMap(self.vertex_count)
        other.rotations = {v: list(r) for v, r in self.rotations.items()}
        other._face_of = dict(self._face_of)
        other._walks = dict(self._walks)
        other._next_id = self._next_id
        return other

    # -- queries ----------------------------------------------------------

    def succ(self, v: int, u: int) -> int:
        rot = self.rotations[v]
        return rot[(rot.index(u) + 1) % len(rot)]

    def trace(self, u: int, v: int) -> tuple[int, ...]:
        """Vertex walk of the face to which half-edge ``u -> v`` belongs."""
        walk = [u]
        a, b = u, v
        limit = 6 * len(self.rotations) + 6
        while True:
            a, b = b, self.succ(b, a)
            if (a, b) == (u, v):
                return tuple(walk)
            walk.append(a)
            if len(walk) > limit:
                raise StructuralError("face traversal did not close")

    def half_edges(self) -> Iterator[tuple[int, int]]:
        for v in sorted(self.rotations):
            for w in self.rotations[v]:
                yield v, w

    @property
    def edge_count(self) -> int:
        return sum(len(r) for r in self.rotations.values()) // 2

    @property
    def placed_vertices(self) -> list[int]:
        return sorted(v for v, r in self.rotations.items() if r)

    def degree(self, v: int) -> int:
        return len(self.rotations.get(v, ()))

    def edges(self) -> list[tuple[int, int]]:
        return sorted((v, w) for v, rot in self.rotations.items() for w in rot if v < w)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.rotations.get(u, ())

    def face_ids(self) -> list[int]:
        return sorted(self._walks)

    def face_walk(self, fid: int) -> tuple[int, ...]:
        return self._walks[fid]

    def face_of(self, u: int, v: int) -> int:
        try:
            return self._face_of[(u, v)]
        except KeyError:
            raise StructuralError(f"no half-edge {u}->{v}") from None

    @property
    def face_count(self) -> int:
        return len(self._walks)

    def faces_at(self, v: int) -> list[int]:
        return sorted({self._face_of[(v, w)] for w in self.rotations.get(v, ())})

    def to_graph(self) -> SimpleGraph:
        m = np.zeros((self.vertex_count, self.vertex_count), dtype=bool)
        e = self.edges()
        if e:
            a = np.asarray(e)
            m[a[:, 0], a[:, 1]] = True
            m[a[:, 1], a[:, 0]] = True
        return SimpleGraph(self.vertex_count, m)

    def component_count(self) -> int:
        seen: set[int] = set()
        comps = 0
        for s in self.rotations:
            if s in seen:
                continue
            comps += 1
            seen.add(s)
            stack = [s]
            while stack:
                v = stack.pop()
                for w in self.rotations[v]:
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
        return comps

    # -- mutation ---------------------------------------------------------

    def _new_face(self, u: int, v: int) -> int:
        fid = self._next_id
        self._next_id += 1
        walk = self.trace(u, v)
        self._walks[fid] = walk
        k = len(walk)
        for i in range(k):
            self._face_of[(walk[i], walk[(i + 1) % k])] = fid
        return fid

    def _drop_face(self, fid: int) -> tuple[int, ...]:
        walk = self._walks.pop(fid)
        k = len(walk)
        for i in range(k):
            self._face_of.pop((walk[i], walk[(i + 1) % k]), None)
        return walk

    def _rebuild_faces(self) -> None:
        self._face_of.clear()
        self._walks.clear()
        self._next_id = 0
        for u, v in self.half_edges():
            if (u, v) not in self._face_of:
                self._new_face(u, v)

    def insert_path(self, fid: int, path: Sequence[int]) -> tuple[int, int]:
        """Draw ``path`` inside face ``fid``, splitting it in two.

        ``path[0]`` and ``path[-1]`` must be distinct corners of the face;
        interior vertices must be unplaced. Returns the ids of the face
        whose walk starts at ``path[0]`` and the face whose walk starts at
        ``path[-1]``.
        """
        if len(path) < 2:
            raise StructuralError("a path needs at least two vertices")
        walk = self._walks.get(fid)
        if walk is None:
            raise StructuralError(f"unknown face {fid}")
        x, y = path[0], path[-1]
        if x == y:
            raise StructuralError("path endpoints must differ")
        if walk.count(x) != 1 or walk.count(y) != 1:
            raise StructuralError(f"endpoints {x}, {y} are not simple corners of face {fid}")
        interior = path[1:-1]
        if len(set(interior)) != len(interior):
            raise StructuralError("path interior repeats a vertex")
        for w in interior:
            if self.rotations.get(w) or not 0 <= w < self.vertex_count:
                raise StructuralError(f"interior vertex {w} is already placed or out of range")
        if len(path) == 2 and self.has_edge(x, y):
            raise StructuralError(f"edge {x}-{y} already present")
        ix, iy = walk.index(x), walk.index(y)
        before_x, before_y = walk[ix - 1], walk[iy - 1]
        self._drop_face(fid)
        rx = self.rotations[x]
        rx.insert(rx.index(before_x) + 1, path[1])
        ry = self.rotations[y]
        ry.insert(ry.index(before_y) + 1, path[-2])
        for i in range(1, len(path) - 1):
            self.rotations[path[i]] = [path[i - 1], path[i + 1]]
        return self._new_face(x, path[1]), self._new_face(y, path[-2])

    # -- serialisation ----------------------------------------------------

    def to_json(self) -> dict:
        return {"n": self.vertex_count,
                "rotations": [list(self.rotations.get(v, ())) for v in range(self.vertex_count)]}

    @classmethod
    def from_json(cls, data: dict) -> "RotationMap":
        return cls.from_rotations(int(data["n"]), data["rotations"])

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))

    def __repr__(self) -> str:
        return (f"RotationMap(n={self.vertex_count}, placed={len(self.rotations)}, "
                f"edges={self.edge_count}, faces={self.face_count})")


def faces(rmap: RotationMap) -> list[tuple[int, ...]]:
    """Boundary walks of all faces, retraced from the rotations."""
    for v, rot in rmap.rotations.items():
        for w in rot:
            if v not in rmap.rotations.get(w, ()):
                raise StructuralError(f"half-edge {v}->{w} has no twin")
    seen: set[tuple[int, int]] = set()
    out = []
    for u, v in rmap.half_edges():
        if (u, v) in seen:
            continue
        walk = rmap.trace(u, v)
        k = len(walk)
        for i in range(k):
            seen.add((walk[i], walk[(i + 1) % k]))
        out.append(walk)
    return out


def girth(graph: SimpleGraph | RotationMap) -> int | None:
    """Length of a shortest cycle, or None for a forest.

    Breadth-first search from every vertex; a search stops once its depth
    can no longer beat the best cycle found so far.
    """
    if isinstance(graph, RotationMap):
        adj = {v: r for v, r in graph.rotations.items()}
        verts = list(adj)
    else:
        adj = dict(enumerate(graph.adjacency))
        verts = range(graph.n)
    best = math.inf
    for s in verts:
        dist = {s: 0}
        parent = {s: -1}
        q = deque([s])
        while q:
            u = q.popleft()
            du = dist[u]
            if 2 * du + 1 >= best:
                break
            for w in adj[u]:
                if w not in dist:
                    dist[w] = du + 1
                    parent[w] = u
                    q.append(w)
                elif parent[u] != w:
                    best = min(best, du + dist[w] + 1)
    return None if best == math.inf else int(best)


def max_edges(g: int, n: int) -> Fraction:
    """Euler bound g(n-2)/(g-2) on the edges of a planar graph of girth g."""
    if g < 3 or n < 3:
        raise ValueError(f"need g >= 3 and n >= 3, got g={g}, n={n}")
    return Fraction(g * (n - 2), g - 2)


def divisibility_ok(g: int, n: int) -> bool:
    """Whether n admits a maximal planar graph of girth g (the congruence test)."""
    if g < 3:
        raise ValueError(f"girth must be >= 3, got {g}")
    mod = g - 2 if g % 2 else (g - 2) // 2
    return n % mod == 2 % mod


@dataclass
class VerificationReport:
    is_spanning: bool = False
    all_edges_in_host: bool = False
    girth_found: int | None = None
    all_faces_size_g: bool = False
    edge_count: int = 0
    edge_count_matches_bound: bool = False
    planar: bool | None = None
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {"passed": self.passed, "is_spanning": self.is_spanning,
                "all_edges_in_host": self.all_edges_in_host, "girth_found": self.girth_found,
                "all_faces_size_g": self.all_faces_size_g, "edge_count": self.edge_count,
                "edge_count_matches_bound": self.edge_count_matches_bound,
                "planar": self.planar, "failures": list(self.failures)}


def euler_characteristic(rmap: RotationMap) -> int:
    return len(rmap.placed_vertices) - rmap.edge_count + len(faces(rmap))


def check_planar(rmap: RotationMap) -> bool:
    """Independent planarity test of the underlying graph (networkx LR test)."""
    import networkx as nx
    g = nx.Graph()
    g.add_nodes_from(rmap.placed_vertices)
    g.add_edges_from(rmap.edges())
    return nx.check_planarity(g)[0]


def verify_spanning_maximal(rmap: RotationMap, host: SimpleGraph, g: int, *,
                            planarity_check: bool | None = None) -> VerificationReport:
    """Check that ``rmap`` is a spanning maximal planar subgraph of girth g of ``host``.

    The rotation system itself must be a genus-0 embedding of a connected
    graph (V - E + F = 2); this is what makes "all faces have length g"
    meaningful. An independent planarity test runs when
    ``planarity_check`` is true, or by default when n <= 500.
    """
    rep = VerificationReport()
    n = rmap.vertex_count
    if host.n != n:
        rep.failures.append(f"vertex counts differ: map {n}, host {host.n}")
        return rep
    edges = rmap.edges()
    rep.edge_count = len(edges)
    missing = [e for e in edges if not host.matrix[e[0], e[1]]]
    rep.all_edges_in_host = not missing
    if missing:
        rep.failures.append(f"{len(missing)} map edges not in host, e.g. {missing[0]}")

    placed = rmap.placed_vertices
    connected = rmap.component_count() == 1
    rep.is_spanning = len(placed) == n and connected
    if not rep.is_spanning:
        rep.failures.append(f"not spanning: {n - len(placed)} isolated vertices, "
                            f"connected={connected}")

    try:
        walks = faces(rmap)
    except StructuralError as exc:
        rep.failures.append(f"malformed rotation: {exc}")
        return rep
    lengths = [len(w) for w in walks]
    rep.all_faces_size_g = bool(lengths) and all(L == g for L in lengths)
    if not rep.all_faces_size_g:
        bad = sorted({L for L in lengths if L != g})
        rep.failures.append(f"face lengths other than {g}: {bad}")
    if connected and len(placed) - len(edges) + len(walks) != 2:
        rep.failures.append("rotation system is not a plane embedding (V - E + F != 2)")

    rep.girth_found = girth(rmap)
    if rep.girth_found != g:
        rep.failures.append(f"girth {rep.girth_found} != {g}")

    bound = max_edges(g, n) if n >= 3 else None
    rep.edge_count_matches_bound = bound is not None and rep.edge_count == bound
    if not rep.edge_count_matches_bound:
        rep.failures.append(f"edge count {rep.edge_count} != bound {bound}")

    if planarity_check is None:
        planarity_check = n <= 500
    if planarity_check:
        rep.planar = check_planar(rmap)
        if not rep.planar:
            rep.failures.append("underlying graph is not planar")
    return rep


def antipodal_pair(walk: Sequence[int]) -> tuple[int, int]:
    """Fixed antipodal pair of an even face: the walk start and the corner g/2 later."""
    if len(walk) % 2:
        raise ValueError("antipodal pairs are defined here for even faces only")
    return walk[0], walk[len(walk) // 2]


def odd_anchors(walk: Sequence[int]) -> tuple[int, int, int]:
    """Anchor a and the two corners at distance k from it in a (2k+1)-face."""
    if len(walk) % 2 == 0:
        raise ValueError("odd anchors need an odd face")
    k = len(walk) // 2
    return walk[0], walk[k], walk[k + 1]


def rotation_from_drawing(positions: dict[int, tuple[float, float]],
                          edges: Iterable[tuple[int, int]]) -> dict[int, list[int]]:
    """Rotations induced by a straight-line drawing (neighbours sorted by angle)."""
    nbrs: dict[int, list[int]] = {}
    for u, v in edges:
        nbrs.setdefault(u, []).append(v)
        nbrs.setdefault(v, []).append(u)
    rot = {}
    for v, ws in nbrs.items():
        x0, y0 = positions[v]
        rot[v] = sorted(ws, key=lambda w: math.atan2(positions[w][1] - y0, positions[w][0] - x0))
    return rot
