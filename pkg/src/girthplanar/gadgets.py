"""Gadget templates: the recursive building blocks, as replayable path insertions.

A template lives on named slots. Its boundary is a g-cycle; every further
piece is a path drawn inside a face between two existing slots. Steps are
compiled once against a standalone copy so that each step knows which face
it goes into: the face holding the half-edge ``start -> via``. Replaying a
template in a host map only needs a slot -> vertex mapping.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .planar import RotationMap, StructuralError, euler_characteristic, faces, girth


@dataclass(frozen=True)
class PathStep:
    start: int
    end: int
    via: int
    interior: tuple[int, ...]
    stage: int
    label: int = 0

    @property
    def length(self) -> int:
        return len(self.interior) + 1

    @property
    def slots(self) -> tuple[int, ...]:
        return (self.start, *self.interior, self.end)


@dataclass(frozen=True)
class Segment:
    """A path the builder must find in one edge layer."""
    start: int
    end: int
    interior: tuple[int, ...]
    stage: int

    @property
    def length(self) -> int:
        return len(self.interior) + 1


@dataclass(frozen=True)
class GadgetTemplate:
    name: str
    boundary_length: int
    names: tuple[str, ...]
    labels: Mapping[str, int]
    boundary: tuple[int, ...]
    steps: tuple[PathStep, ...]
    segments: tuple[Segment, ...]
    recursion_faces: tuple[tuple[int, ...], ...] = ()
    insertion_anchors: tuple[tuple[int, int], ...] = ()
    layer_schedule: tuple[int, ...] = ()

    @property
    def vertex_count(self) -> int:
        return len(self.names)

    @property
    def interior_count(self) -> int:
        return len(self.names) - len(self.boundary)

    @property
    def stage_count(self) -> int:
        return 1 + max((s.stage for s in self.segments), default=-1)

    def slot(self, name: str) -> int:
        return self.names.index(name)

    def label_counts(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for name in self.names:
            lab = self.labels.get(name)
            if lab is not None:
                out[lab] = out.get(lab, 0) + 1
        return dict(sorted(out.items()))

    def instantiate(self, vertex_count: int | None = None) -> RotationMap:
        """Standalone copy: boundary cycle on slots plus every step."""
        rmap = RotationMap(vertex_count or self.vertex_count)
        rmap.add_cycle(self.boundary)
        for step in self.steps:
            apply_step(rmap, step, None)
        return rmap

    def to_json(self) -> dict:
        rmap = self.instantiate()
        nm = self.names
        return {
            "name": self.name,
            "boundary_length": self.boundary_length,
            "vertices": [{"name": n, "label": self.labels.get(n)} for n in nm],
            "boundary": [nm[s] for s in self.boundary],
            "edges": [[nm[u], nm[v]] for u, v in rmap.edges()],
            "steps": [{"start": nm[s.start], "end": nm[s.end], "via": nm[s.via],
                       "interior": [nm[v] for v in s.interior], "stage": s.stage}
                      for s in self.steps],
            "recursion_faces": [[nm[v] for v in w] for w in self.recursion_faces],
            "insertion_anchors": [[nm[a], nm[b]] for a, b in self.insertion_anchors],
            "layer_schedule": list(self.layer_schedule),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True)


def apply_step(rmap: RotationMap, step: PathStep, mapping: Sequence[int] | None
               ) -> tuple[int, int]:
    """Replay one template step in ``rmap`` (``mapping`` sends slots to vertices)."""
    h = (lambda s: s) if mapping is None else mapping.__getitem__
    fid = rmap.face_of(h(step.start), h(step.via))
    return rmap.insert_path(fid, [h(s) for s in step.slots])


# -- compilation --------------------------------------------------------------

@dataclass
class _RawStep:
    start: str
    end: str
    interior: Sequence[str]
    stage: int
    label: int = 0
    hint: str | None = None
    avoid: str | None = None
    via: str | None = None


class _Compiler:
    def __init__(self, boundary: Sequence[str]):
        self.names: list[str] = []
        self.index: dict[str, int] = {}
        for n in boundary:
            self._slot(n)
        self.boundary = tuple(self.index[n] for n in boundary)
        self.steps: list[PathStep] = []

    def _slot(self, name: str) -> int:
        if name in self.index:
            return self.index[name]
        self.index[name] = len(self.names)
        self.names.append(name)
        return self.index[name]

    def compile(self, raw: Sequence[_RawStep]) -> RotationMap:
        for r in raw:
            for n in r.interior:
                if n in self.index:
                    raise StructuralError(f"slot {n!r} reused as a path interior")
                self._slot(n)
        rmap = RotationMap(len(self.names))
        _, outer = rmap.add_cycle(self.boundary)
        ix = self.index
        for r in raw:
            s, e = ix[r.start], ix[r.end]
            if r.via is not None:
                via = ix[r.via]
                fid = rmap.face_of(s, via)
            else:
                # templates fill the inside of their boundary
                cands = [f for f in rmap.faces_at(s)
                         if f != outer and e in rmap.face_walk(f)]
                if r.hint is not None:
                    cands = [f for f in cands if ix[r.hint] in rmap.face_walk(f)]
                if r.avoid is not None:
                    cands = [f for f in cands if ix[r.avoid] not in rmap.face_walk(f)]
                if len(cands) != 1:
                    raise StructuralError(
                        f"step {r.start}->{r.end}: {len(cands)} candidate faces")
                fid = cands[0]
                walk = rmap.face_walk(fid)
                via = walk[(walk.index(s) + 1) % len(walk)]
            step = PathStep(s, e, via, tuple(ix[n] for n in r.interior), r.stage, r.label)
            rmap.insert_path(fid, list(step.slots))
            self.steps.append(step)
        return rmap

    def face_containing(self, rmap: RotationMap, corners: Sequence[str]) -> tuple[int, ...]:
        want = {self.index[c] for c in corners}
        hits = [rmap.face_walk(f) for f in rmap.face_ids() if want <= set(rmap.face_walk(f))]
        if len(hits) != 1:
            raise StructuralError(f"{len(hits)} faces contain corners {sorted(corners)}")
        return hits[0]


def _make(name: str, g: int, boundary: Sequence[str], raw: Sequence[_RawStep],
          labels: Mapping[str, int], recursion: Sequence[Sequence[str]] = (),
          anchors: Sequence[tuple[str, str]] = (), layer_schedule: Sequence[int] = (),
          segments: Sequence[Segment] | None = None) -> GadgetTemplate:
    comp = _Compiler(boundary)
    rmap = comp.compile(raw)
    rec = tuple(comp.face_containing(rmap, c) for c in recursion)
    steps = tuple(comp.steps)
    if segments is None:
        segments = tuple(Segment(s.start, s.end, s.interior, s.stage) for s in steps)
    return GadgetTemplate(
        name=name, boundary_length=g, names=tuple(comp.names), labels=dict(labels),
        boundary=comp.boundary, steps=steps, segments=tuple(segments),
        recursion_faces=rec,
        insertion_anchors=tuple((comp.index[a], comp.index[b]) for a, b in anchors),
        layer_schedule=tuple(layer_schedule))


def _run(prefix: str, count: int) -> list[str]:
    return [f"{prefix}{i}" for i in range(1, count + 1)]


# -- bipartite gadget ---------------------------------------------------------

def bipartite_gadget() -> GadgetTemplate:
    """The 19-vertex quadrangulated square with four recursion faces.

    Every vertex after the boundary is placed by a length-2 path between
    the two antipodal corners of a 4-face. Stage 0 places labels 2 and 3,
    stage 1 labels 4 and 5, stage 2 label 6.
    """
    bisect = [
        ("a", "c", "M", 0, 2), ("b", "M", "f", 0, 3), ("M", "d", "g", 0, 3),
        ("a", "f", "h", 1, 4), ("c", "f", "i", 1, 4), ("c", "g", "j", 1, 4), ("a", "g", "k", 1, 4),
        ("h", "M", "l", 1, 5), ("i", "M", "m", 1, 5), ("j", "M", "n", 1, 5), ("k", "M", "o", 1, 5),
        ("l", "f", "p", 2, 6), ("m", "f", "q", 2, 6), ("o", "g", "r", 2, 6), ("n", "g", "s", 2, 6),
    ]
    raw = [_RawStep(x, y, [v], st, lab) for x, y, v, st, lab in bisect]
    labels = {v: 1 for v in "abcd"}
    labels.update({v: lab for _, _, v, _, lab in bisect})
    return _make("bipartite", 4, "abcd", raw, labels,
                 recursion=["hlpf", "imqf", "korg", "jnsg"], layer_schedule=(0, 1, 2))


# -- even girth gadgets -------------------------------------------------------

def _boundary_with_runs(corners: Sequence[tuple[str, int]]) -> list[str]:
    """Corner names interleaved with unnamed runs; (name, run length to next)."""
    out = []
    for name, run in corners:
        out.append(name)
        out.extend(_run(f"{name}~", run - 1))
    return out


def _even_4s_plus_2(s: int) -> GadgetTemplate:
    g = 4 * s + 2
    boundary = _boundary_with_runs([("a", 1), ("b", s), ("c", s), ("d", 1), ("e", s), ("f", s)])
    raw = [
        # red: c ~s~ g - h ~s~ f, the two label-2 vertices in the middle
        _RawStep("c", "f", [*_run("red", s - 1), "g", "h", *_run("red'", s - 1)], 0),
        # green: a - j ~2s~ g and h - i - k ~(2s-1)~ d
        _RawStep("a", "g", ["j", *_run("grn", 2 * s - 1)], 1),
        _RawStep("h", "d", ["i", "k", *_run("grn'", 2 * s - 2)], 1),
        # yellow: h ~(2s+1)~ j and e - l ~2s~ i
        _RawStep("h", "j", _run("yel", 2 * s), 2),
        _RawStep("e", "i", ["l", *_run("yel'", 2 * s - 1)], 2),
        # burgundy: l ~(2s+1)~ k
        _RawStep("l", "k", _run("brg", 2 * s), 3),
    ]
    labels = {c: 1 for c in "abcdef"}
    labels.update(g=2, h=2, i=3, j=3, k=3, l=4)
    return _make(f"even-{g}", g, boundary, raw, labels,
                 recursion=["hgj", "lik"], layer_schedule=(0, 1, 2, 3))


def _even_4s(s: int) -> GadgetTemplate:
    g = 4 * s
    boundary = _boundary_with_runs([("a", 1), ("b", s - 1), ("c", 1), ("d", s - 1),
                                    ("e", 1), ("f", s - 1), ("g", 1), ("h", s - 1)])
    raw = [
        # red: c ~(s-1)~ j - i - k ~(s-1)~ g, three label-2 vertices
        _RawStep("c", "g", [*_run("red", s - 2), "j", "i", "k", *_run("red'", s - 2)], 0),
        # green: k - l - m ~(2s-2)~ b and f - n - o ~(2s-2)~ j
        _RawStep("k", "b", ["l", "m", *_run("grn", 2 * s - 3)], 1),
        _RawStep("f", "j", ["n", "o", *_run("grn'", 2 * s - 3)], 1),
        # yellow: a - p ~(2s-1)~ l
        _RawStep("a", "l", ["p", *_run("yel", 2 * s - 2)], 2),
        # burgundy: p ~2s~ m and o ~2s~ k
        _RawStep("p", "m", _run("brg", 2 * s - 1), 3),
        _RawStep("o", "k", _run("brg'", 2 * s - 1), 3),
    ]
    labels = {c: 1 for c in "abcdefgh"}
    labels.update(i=2, j=2, k=2, l=3, m=3, n=3, o=3, p=4)
    return _make(f"even-{g}", g, boundary, raw, labels,
                 recursion=["pml", "ojik"], layer_schedule=(0, 1, 2, 3))


def even_gadget(g: int) -> GadgetTemplate:
    """Recursive gadget for even girth g >= 6 with two recursion faces.

    All paths have length g/2. Stages 0..3 are the red, green, yellow and
    burgundy paths, built from four consecutive edge layers.
    """
    if g % 2 or g < 6:
        raise ValueError(f"even_gadget needs an even girth >= 6, got {g}")
    if g % 4 == 2:
        return _even_4s_plus_2((g - 2) // 4)
    return _even_4s(g // 4)


# -- odd girth ----------------------------------------------------------------

@dataclass(frozen=True)
class RingSpec:
    cycle_count: int
    cycle_length: int

    def __post_init__(self):
        g = self.cycle_length
        if g % 2 == 0 or g < 5:
            raise ValueError(f"ring cycles need odd length >= 5, got {g}")
        if self.cycle_count < 2:
            raise ValueError(f"a ring needs at least 2 cycles, got {self.cycle_count}")

    @property
    def path_length(self) -> int:
        return (self.cycle_length - 1) // 2

    @property
    def vertex_count(self) -> int:
        g, M = self.cycle_length, self.cycle_count
        return M * g + (M - 1) * g * (g - 3)

    def cycle_slot(self, j: int, i: int) -> str:
        return f"c{j}.{i % self.cycle_length}"


def ring_vertex_count(M: int, g: int) -> int:
    return M * g + (M - 1) * g * (g - 3)


def odd_ring(spec: RingSpec) -> GadgetTemplate:
    """M nested g-cycles joined by straight and diagonal paths of length k.

    Gap j (between cycles j and j+1) uses stages 0/1 (straight/diagonal)
    when j is even and stages 2/3 when j is odd. The boundary is cycle 0;
    the map is grown outward from it.
    """
    g, M, k = spec.cycle_length, spec.cycle_count, spec.path_length
    c = spec.cycle_slot

    def straight(j, i):
        return [f"s{j}.{i % g}.{t}" for t in range(1, k)]

    def diag(j, i):
        return [f"d{j}.{i % g}.{t}" for t in range(1, k)]

    boundary = [c(0, i) for i in range(g)]
    raw: list[_RawStep] = []
    segments_named = []
    for j in range(M - 1):
        st_s, st_d = (0, 1) if j % 2 == 0 else (2, 3)
        for i in range(g):
            segments_named.append((c(j, i), c(j + 1, i), straight(j, i), st_s))
            segments_named.append((c(j, i), c(j + 1, i + 1), diag(j, i), st_d))
        # first straight pair, closed along cycle j+1
        first = _RawStep(c(j, 0), c(j, 1),
                         [*straight(j, 0), c(j + 1, 0), c(j + 1, 1), *reversed(straight(j, 1))],
                         st_s, via=c(j, 1) if j == 0 else None,
                         avoid=c(j - 1, 0) if j else None)
        raw.append(first)
        raw.append(_RawStep(c(j, 0), c(j + 1, 1), diag(j, 0), st_d, avoid=c(j, 2)))
        for i in range(1, g):
            if i + 1 < g:
                raw.append(_RawStep(c(j + 1, i), c(j, i + 1),
                                    [c(j + 1, i + 1), *reversed(straight(j, i + 1))], st_s))
            else:
                raw.append(_RawStep(c(j + 1, i), c(j + 1, 0), [], st_s))
            raw.append(_RawStep(c(j, i), c(j + 1, i + 1), diag(j, i), st_d))
    labels = {c(j, i): 1 for j in range(M) for i in range(g)}
    comp = _Compiler(boundary)
    rmap = comp.compile(raw)
    del rmap
    ix = comp.index
    segments = tuple(Segment(ix[a], ix[b], tuple(ix[v] for v in mid), st)
                     for a, b, mid, st in segments_named)
    return GadgetTemplate(
        name=f"ring-{g}x{M}", boundary_length=g, names=tuple(comp.names), labels=labels,
        boundary=comp.boundary, steps=tuple(comp.steps), segments=segments,
        layer_schedule=(0, 1, 2, 3))


def odd_insertion_pattern(g: int) -> GadgetTemplate:
    """Fill one g-face (g = 2k+1) with g-2 new vertices, leaving three g-faces.

    Anchor a = w0 and the corners b = w_k, c = w_{k+1}. Stage 0 draws a
    path of length k+1 from a to b; stage 1 draws a path of length k from
    a' (the new neighbour of a) to c.
    """
    if g % 2 == 0 or g < 5:
        raise ValueError(f"odd insertion needs odd g >= 5, got {g}")
    k = (g - 1) // 2
    boundary = [f"w{i}" for i in range(g)]
    first = _run("x", k)
    raw = [_RawStep("w0", f"w{k}", first, 0, via="w1"),
           _RawStep("x1", f"w{k + 1}", _run("y", k - 1), 1)]
    labels = {w: 1 for w in boundary}
    labels.update({v: 2 for v in first})
    return _make(f"odd-insert-{g}", g, boundary, raw, labels,
                 anchors=[("w0", f"w{k}"), ("x1", f"w{k + 1}")], layer_schedule=(0, 1))


# -- validation ---------------------------------------------------------------

@dataclass
class GadgetCheck:
    ok: bool
    diagnostics: list[str] = field(default_factory=list)
    face_lengths: list[int] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def _two_colorable(rmap: RotationMap) -> bool:
    color: dict[int, int] = {}
    for s in rmap.rotations:
        if s in color:
            continue
        color[s] = 0
        q = deque([s])
        while q:
            u = q.popleft()
            for w in rmap.rotations[u]:
                if w not in color:
                    color[w] = 1 - color[u]
                    q.append(w)
                elif color[w] == color[u]:
                    return False
    return True


def _is_face(rmap: RotationMap, walk: Sequence[int]) -> bool:
    if len(walk) < 2:
        return False
    try:
        fid = rmap.face_of(walk[0], walk[1])
    except StructuralError:
        return False
    fw = rmap.face_walk(fid)
    if len(fw) != len(walk):
        return False
    i = fw.index(walk[0])
    return tuple(fw[i:] + fw[:i]) == tuple(walk)


def validate_gadget(t: GadgetTemplate, g: int) -> GadgetCheck:
    """Instantiate ``t`` in a standalone g-cycle and check the face-length invariant."""
    diag: list[str] = []
    if t.boundary_length != g or len(t.boundary) != g:
        diag.append(f"boundary has length {len(t.boundary)}, expected {g}")
        return GadgetCheck(False, diag)
    try:
        rmap = t.instantiate()
    except StructuralError as exc:
        return GadgetCheck(False, [f"instantiation failed: {exc}"])
    lengths = sorted(len(w) for w in faces(rmap))
    bad = [L for L in lengths if L != g]
    if bad:
        diag.append(f"faces of length {sorted(set(bad))} (expected all {g})")
    if euler_characteristic(rmap) != 2:
        diag.append(f"V - E + F = {euler_characteristic(rmap)} != 2")
    gi = girth(rmap)
    if gi != g:
        diag.append(f"girth {gi} != {g}")
    walks = list(t.recursion_faces)
    for w in walks:
        if len(w) != g:
            diag.append(f"recursion face of length {len(w)}")
        if not _is_face(rmap, w):
            diag.append(f"recursion walk {[t.names[v] for v in w]} is not a face")
    if len({frozenset(w) for w in walks}) != len(walks):
        diag.append("recursion faces are not pairwise distinct")
    if g % 2 == 0 and not _two_colorable(rmap):
        diag.append("not bipartite")
    return GadgetCheck(not diag, diag, lengths)
