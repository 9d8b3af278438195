"""Randomised operation engines shared by the property and acceptance suites."""

import numpy as np

from girthplanar.builder import BuildConfig, ConstructionState, partition_insertion_faces
from girthplanar.planar import RotationMap, StructuralError, faces


class MapFuzzer:
    """Random add_cycle / insert_path sequences with invariant checks after each op."""

    def __init__(self, n: int, seed: int):
        self.rng = np.random.default_rng(seed)
        self.map = RotationMap(n)
        self.unplaced = list(range(n))
        self.rng.shuffle(self.unplaced)
        self.ops = 0
        self.violations: list[str] = []

    def step(self) -> bool:
        rng, rmap = self.rng, self.map
        fids = rmap.face_ids()
        if not fids or (len(self.unplaced) >= 3 and rng.random() < 0.05):
            if len(self.unplaced) < 3:
                return False
            k = int(rng.integers(3, min(8, len(self.unplaced)) + 1))
            rmap.add_cycle([self.unplaced.pop() for _ in range(k)])
        else:
            f = int(rng.choice(fids))
            walk = rmap.face_walk(f)
            simple = [v for v in set(walk) if walk.count(v) == 1]
            if len(simple) < 2:
                return True
            x, y = (int(v) for v in rng.choice(simple, size=2, replace=False))
            k = int(rng.integers(0, min(4, len(self.unplaced)) + 1))
            if k == 0 and rmap.has_edge(x, y):
                k = 1 if self.unplaced else 0
                if k == 0:
                    return True
            path = [x] + [self.unplaced.pop() for _ in range(k)] + [y]
            rmap.insert_path(f, path)
        self.ops += 1
        self.check()
        return True

    def check(self) -> None:
        rmap = self.map
        lengths = sum(len(rmap.face_walk(f)) for f in rmap.face_ids())
        if lengths != 2 * rmap.edge_count:
            self.violations.append(f"op {self.ops}: face lengths {lengths} != 2E")
        comps = rmap.component_count()
        chi = len(rmap.placed_vertices) - rmap.edge_count + rmap.face_count
        if chi != 2 * comps:
            self.violations.append(f"op {self.ops}: V-E+F = {chi} with {comps} components")
        if self.ops % 25 == 0:
            tracked = sorted(_canon(rmap.face_walk(f)) for f in rmap.face_ids())
            if tracked != sorted(_canon(w) for w in faces(rmap)):
                self.violations.append(f"op {self.ops}: tracked faces differ from retraced")

    def run(self, ops: int) -> int:
        for _ in range(20 * ops):
            if self.ops >= ops or not self.step():
                break
        return self.ops


def _canon(walk):
    k = len(walk)
    return min(tuple(walk[i:] + walk[:i]) for i in range(k))


def partition_trial(rng: np.random.Generator, fuzz: MapFuzzer) -> list[str]:
    """Partition a random face subset; returns violations of within-class disjointness."""
    fids = fuzz.map.face_ids()
    if not fids:
        return []
    take = rng.choice(fids, size=int(rng.integers(1, len(fids) + 1)), replace=False)
    try:
        classes = partition_insertion_faces([int(f) for f in take], fuzz.map, strict=False,
                                            max_classes=len(take))
    except StructuralError as exc:
        return [f"partition raised: {exc}"]
    out = []
    if sorted(f for c in classes for f in c) != sorted(int(f) for f in take):
        out.append("classes do not cover the input")
    for c in classes:
        seen: set[int] = set()
        for f in c:
            walk = set(fuzz.map.face_walk(f))
            if seen & walk:
                out.append(f"class {c} has intersecting faces")
            seen |= walk
    return out


def provenance_trial(rng: np.random.Generator, n: int = 30) -> tuple[int, list[str]]:
    """Random recorded insertions over several layers; provenance must verify,
    and a recorded edge that is removed from its layer must be reported."""
    layers = [rng.random((n, n)) < 0.6 for _ in range(3)]
    layers = [np.triu(m, 1) | np.triu(m, 1).T for m in layers]
    st = ConstructionState(n, None, rng, BuildConfig(), layers)
    ops = 0
    for key in range(3):
        a = layers[key]
        tri = [(u, v, w) for u in range(n) for v in range(u + 1, n) for w in range(v + 1, n)
               if a[u, v] and a[v, w] and a[u, w]]
        if not tri:
            continue
        if not st.map.face_ids():
            u, v, w = tri[int(rng.integers(len(tri)))]
            st.map.add_cycle([u, v, w])
            st.take([u, v, w])
            st.record_path([u, v, w, u], key)
            ops += 1
        for _ in range(10):
            f = int(rng.choice(st.map.face_ids()))
            walk = st.map.face_walk(f)
            x, y = walk[0], walk[len(walk) // 2]
            free = [z for z in st.pool() if a[x, z] and a[z, y]]
            if not free:
                continue
            z = int(free[0])
            st.take([z])
            st.insert(f, [x, z, y], key)
            ops += 1
    bad = st.check_provenance()
    edges = st.map.edges()
    if edges:
        u, v = edges[int(rng.integers(len(edges)))]
        key = st.provenance[(u, v)]
        layers[key][u, v] = layers[key][v, u] = False
        if not st.check_provenance():
            bad.append("tampered edge not detected")
        ops += 1
    return ops, bad
