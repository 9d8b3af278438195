import dataclasses
import itertools
import json

import pytest

from girthplanar.builder import partition_insertion_faces
from girthplanar.builder.copies import TemplateCopy
from girthplanar.gadgets import (RingSpec, apply_step, bipartite_gadget, even_gadget,
                                 odd_insertion_pattern, odd_ring, ring_vertex_count,
                                 validate_gadget)
from girthplanar.planar import RotationMap, euler_characteristic, faces, max_edges

EVEN_G = [6, 8, 10, 12, 14, 16]


def test_bipartite_gadget_golden():
    t = bipartite_gadget()
    rmap = t.instantiate()
    assert t.vertex_count == 19 and t.interior_count == 15
    assert rmap.edge_count == 34 == max_edges(4, 19)
    assert rmap.face_count == 17
    assert len(t.recursion_faces) == 4
    assert t.label_counts() == {1: 4, 2: 1, 3: 2, 4: 4, 5: 4, 6: 4}


def test_bipartite_gadget_validates_and_is_bipartite():
    check = validate_gadget(bipartite_gadget(), 4)
    assert check.ok, check.diagnostics
    assert check.face_lengths == [4] * 17


def test_bipartite_recursion_faces_share_only_label_3():
    t = bipartite_gadget()
    walks = [set(w) for w in t.recursion_faces]
    edges = [{frozenset(e) for e in zip(w, w[1:] + w[:1])} for w in t.recursion_faces]
    for a, b in itertools.combinations(range(4), 2):
        assert not edges[a] & edges[b]
        assert all(t.labels[t.names[v]] == 3 for v in walks[a] & walks[b])
        assert all(t.labels[t.names[v]] in (3, 4, 5, 6) for v in walks[a])


def test_bipartite_label_stages():
    t = bipartite_gadget()
    by_stage = {}
    for s in t.steps:
        by_stage.setdefault(s.stage, set()).add(s.label)
    assert by_stage == {0: {2, 3}, 1: {4, 5}, 2: {6}}


def test_shaded_faces_partition_into_two_classes():
    t = bipartite_gadget()
    rmap = t.instantiate()
    fids = [rmap.face_of(w[0], w[1]) for w in t.recursion_faces]
    classes = partition_insertion_faces(fids, rmap)
    assert len(classes) == 2
    assert sorted(map(sorted, classes)) == sorted([sorted([fids[0], fids[2]]), sorted([fids[1], fids[3]])])


@pytest.mark.parametrize("g", EVEN_G)
def test_even_gadget_validates(g):
    t = even_gadget(g)
    check = validate_gadget(t, g)
    assert check.ok, check.diagnostics
    assert set(check.face_lengths) == {g}
    assert len(t.recursion_faces) == 2
    assert t.stage_count == 4
    assert {s.length for s in t.steps} == {g // 2}


@pytest.mark.parametrize("g", [5, 7, 4, 3, 2])
def test_even_gadget_rejects(g):
    with pytest.raises(ValueError):
        even_gadget(g)


@pytest.mark.parametrize("g,M,expected", [(5, 2, 20), (7, 3, 77), (5, 4, 50)])
def test_odd_ring_vertex_count_examples(g, M, expected):
    assert odd_ring(RingSpec(M, g)).vertex_count == expected == ring_vertex_count(M, g)


@pytest.mark.parametrize("g,M", list(itertools.product([5, 7, 9], range(2, 7))))
def test_odd_ring_formula_and_faces(g, M):
    t = odd_ring(RingSpec(M, g))
    assert t.vertex_count == M * g + (M - 1) * g * (g - 3)
    check = validate_gadget(t, g)
    assert check.ok, check.diagnostics
    k = (g - 1) // 2
    assert {seg.length for seg in t.segments} == {k}
    assert len(t.segments) == 2 * g * (M - 1)


@pytest.mark.parametrize("M,g", [(1, 5), (3, 6), (2, 3)])
def test_odd_ring_rejects(M, g):
    with pytest.raises(ValueError):
        odd_ring(RingSpec(M, g))


@pytest.mark.parametrize("g,new", [(5, 3), (7, 5), (9, 7)])
def test_odd_insertion_pattern(g, new):
    t = odd_insertion_pattern(g)
    assert t.interior_count == new == g - 2
    check = validate_gadget(t, g)
    assert check.ok, check.diagnostics
    assert check.face_lengths == [g] * 4     # outer face + the three new faces
    k = (g - 1) // 2
    assert [s.length for s in t.steps] == [k + 1, k]


@pytest.mark.parametrize("g", [4, 6, 3])
def test_odd_insertion_pattern_rejects(g):
    with pytest.raises(ValueError):
        odd_insertion_pattern(g)


@pytest.mark.parametrize("g", [5, 7])
def test_odd_insertion_face_delta(g):
    t = odd_insertion_pattern(g)
    rmap = RotationMap(t.vertex_count)
    rmap.add_cycle(t.boundary)
    before = rmap.face_count
    for step in t.steps:
        apply_step(rmap, step, None)
    assert rmap.face_count - before == 2


@pytest.mark.parametrize("make,g", [(bipartite_gadget, 4), (lambda: even_gadget(6), 6),
                                    (lambda: even_gadget(8), 8)])
def test_perturbed_template_fails(make, g):
    t = make()
    i = next(i for i, s in enumerate(t.steps) if len(s.interior) >= 1)
    bad = dataclasses.replace(t.steps[i], interior=t.steps[i].interior[:-1])
    broken = dataclasses.replace(t, steps=t.steps[:i] + (bad,) + t.steps[i + 1:])
    check = validate_gadget(broken, g)
    assert not check.ok
    assert g - 1 in check.face_lengths or any("instantiation" in d for d in check.diagnostics)


def test_wrong_boundary_fails():
    assert not validate_gadget(bipartite_gadget(), 6).ok


@pytest.mark.parametrize("g", [6, 8, 10])
def test_instantiation_inside_larger_map(g):
    """Two rounds of recursive replay keep every face at length g and Euler intact."""
    t = even_gadget(g)
    n = g + 3 * t.interior_count
    rmap = RotationMap(n)
    inner, _ = rmap.add_cycle(list(range(g)))
    fresh = iter(range(g, n))
    todo = [inner]
    for _ in range(2):
        copies = [TemplateCopy(t, rmap.face_walk(f)) for f in todo]
        for c in copies:
            for step in t.steps:
                c.fill(step, [next(fresh) for _ in step.interior])
                rmap.insert_path(c.face(rmap, step), c.path(step))
        todo = [f for c in copies for f in c.recursion_faces(rmap)]
    walks = faces(rmap)
    assert all(len(w) == g for w in walks)
    assert euler_characteristic(rmap) == 2
    assert sum(len(w) for w in walks) == 2 * rmap.edge_count


def test_template_json_dump():
    t = bipartite_gadget()
    data = json.loads(t.dumps())
    assert len(data["vertices"]) == 19 and len(data["edges"]) == 34
    assert len(data["recursion_faces"]) == 4
    assert t.dumps() == bipartite_gadget().dumps()
