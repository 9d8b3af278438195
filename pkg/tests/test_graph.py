import json
import math

import numpy as np
import pytest

from girthplanar.graph import (EdgeLayers, SampleParams, SimpleGraph, layer_probability,
                               sample_gnp, split_layers)


@pytest.mark.parametrize("p,edges", [(0.0, 0), (1.0, 10)])
def test_sample_gnp_endpoints(p, edges):
    assert sample_gnp(SampleParams(5, p, seed=3)).edge_count == edges


def test_sample_gnp_mean_edge_count():
    counts = np.array([sample_gnp(SampleParams(100, 0.1, s)).edge_count for s in range(10_000)])
    sigma = math.sqrt(4950 * 0.1 * 0.9)
    assert abs(counts.mean() - 495) < 3 * sigma / math.sqrt(counts.size)
    assert abs(counts.std() - sigma) < 0.05 * sigma


def test_sample_gnp_reproducible():
    a = sample_gnp(SampleParams(60, 0.3, 11))
    b = sample_gnp(SampleParams(60, 0.3, 11))
    c = sample_gnp(SampleParams(60, 0.3, 12))
    assert a == b and a != c


@pytest.mark.parametrize("bad", [dict(n=0, p=0.5), dict(n=3, p=-0.1), dict(n=3, p=1.5)])
def test_sample_params_validation(bad):
    with pytest.raises(ValueError):
        SampleParams(**bad)


@pytest.mark.parametrize("p,m,expected", [
    (0.3, 1, 0.3),
    (0.0, 8, 0.0),
    (0.5, 8, 1 - 2 ** (-1 / 8)),
])
def test_layer_probability_examples(p, m, expected):
    assert layer_probability(p, m) == pytest.approx(expected, abs=1e-15)


def test_layer_probability_half_eight_value():
    assert layer_probability(0.5, 8) == pytest.approx(0.082996, abs=1e-6)


@pytest.mark.parametrize("p", [1e-9, 0.01, 0.2, 0.5, 0.9, 0.999999])
@pytest.mark.parametrize("m", [2, 4, 8, 32])
def test_layer_probability_bounds(p, m):
    q = layer_probability(p, m)
    assert p / m < q < p
    assert (1 - q) ** m == pytest.approx(1 - p, abs=1e-12)


def test_split_layers_empty():
    L = split_layers(10, 0.0, 4, seed=1)
    assert all(layer.edge_count == 0 for layer in L.layers)
    assert L.union_graph.edge_count == 0


def test_split_layers_complete_union():
    L = split_layers(10, 1.0, 2, seed=1)
    assert L.union_graph == SimpleGraph.complete(10)


def test_split_layers_union_is_union():
    L = split_layers(40, 0.3, 5, seed=7, parts=3)
    acc = np.zeros((40, 40), dtype=bool)
    for layer in L.layers:
        assert layer.n == L.union_graph.n
        acc |= layer.matrix
    assert np.array_equal(acc, L.union_graph.matrix)
    for j in range(5):
        subs = [L.sub_matrix(j, t) for t in range(3)]
        assert np.array_equal(np.logical_or.reduce(subs), L.matrix(j))


def test_split_layers_density():
    n, p, m, trials = 50, 0.2, 8, 20_000
    q = layer_probability(p, m)
    # closed form 1 - 0.8**(1/8) = 0.0275075; the rounded reference 0.027510 is 2.5e-6 off
    assert q == pytest.approx(1 - 0.8 ** 0.125, rel=1e-12)
    assert q == pytest.approx(0.027510, abs=5e-6)
    pairs = n * (n - 1) // 2
    totals = np.zeros(m)
    for s in range(trials):
        L = split_layers(n, p, m, seed=s)
        for j in range(m):
            totals[j] += np.count_nonzero(L.matrix(j)) // 2
    dens = totals / (pairs * trials)
    sigma = math.sqrt(q * (1 - q) / (pairs * trials))
    assert np.all(np.abs(dens - q) < 3 * sigma), dens


def test_split_layers_pair_marginal_is_bernoulli_p():
    p, trials = 0.3, 10_000
    hits = sum(split_layers(6, p, 8, seed=s).union_graph.has_edge(1, 4) for s in range(trials))
    assert abs(hits / trials - p) < 3 * math.sqrt(p * (1 - p) / trials)


def test_sub_layer_density():
    L = split_layers(400, 0.5, 2, seed=5, parts=4)
    q = layer_probability(layer_probability(0.5, 2), 4)
    for t in range(4):
        d = np.count_nonzero(L.sub_matrix(0, t)) / (400 * 399)
        assert abs(d - q) < 4 * math.sqrt(q / (400 * 399 / 2))


def test_coupled_layers_are_nested_in_p():
    lo = EdgeLayers(80, 0.2, 4, seed=9, coupled=True, parts=2)
    hi = EdgeLayers(80, 0.35, 4, seed=9, coupled=True, parts=2)
    for j in range(4):
        assert not (lo.matrix(j) & ~hi.matrix(j)).any()


def test_layer_index_errors():
    L = split_layers(5, 0.5, 2)
    with pytest.raises(IndexError):
        L.matrix(2)
    with pytest.raises(IndexError):
        L.sub_matrix(0, 1)


def test_graph_json_canonical():
    g = SimpleGraph.from_edges(5, [(3, 1), (0, 4), (1, 0)])
    data = json.loads(g.dumps())
    assert data == {"n": 5, "edges": [[0, 1], [0, 4], [1, 3]]}
    assert SimpleGraph.from_json(data) == g


@pytest.mark.parametrize("edges", [[(1, 1)], [(0, 7)]])
def test_graph_rejects_bad_edges(edges):
    with pytest.raises(ValueError):
        SimpleGraph.from_edges(5, edges)


def test_graph_adjacency_symmetric():
    g = sample_gnp(SampleParams(30, 0.2, 2))
    for u, nb in enumerate(g.adjacency):
        for v in nb:
            assert u in g.adjacency[v] and g.has_edge(u, v)
    assert sum(len(nb) for nb in g.adjacency) == 2 * g.edge_count
