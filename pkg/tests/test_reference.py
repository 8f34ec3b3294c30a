import numpy as np
import pytest

from txnet.services.metrics_service import avg_shortest_path, clustering, fit_power_law
from txnet.services.reference_service import (
    degree_preserving_rewire,
    er_random,
    lattice_degree_for,
    ring_lattice,
    synthetic_scale_free,
)
from txnet.utils.errors import InvalidDegree, TooManyEdges

from conftest import random_digraph


def edge_set(g):
    return set(zip(g.edge_sources.tolist(), g.out_indices.tolist()))


def test_er_forced_complete():
    g = er_random(4, 6, seed=1)
    assert g.undirected
    assert edge_set(g) == {(a, b) for a in range(4) for b in range(4) if a != b}


def test_er_edgeless():
    g = er_random(10, 0, seed=1)
    assert (g.node_count, g.edge_count) == (10, 0)


def test_er_too_many_edges():
    with pytest.raises(TooManyEdges):
        er_random(4, 7)


def test_er_large_matches_density():
    n, m = 10_000, 50_000
    g = er_random(n, m, seed=3)
    assert g.edge_count == 2 * m
    assert g.out_degrees().mean() == 10.0
    assert g.self_loop_count == 0
    density = m / (n * (n - 1) / 2)
    _, c = clustering(g)
    assert abs(c - density) < 3e-4


def test_er_is_deterministic():
    assert er_random(100, 300, seed=5).equals(er_random(100, 300, seed=5))
    assert not er_random(100, 300, seed=5).equals(er_random(100, 300, seed=6))


def test_ring_lattice_cycle():
    g = ring_lattice(5, 2)
    assert g.edge_count // 2 == 5
    assert clustering(g)[1] == 0.0


def test_ring_lattice_clustering():
    assert clustering(ring_lattice(8, 4))[1] == pytest.approx(0.5)


def test_ring_lattice_path_length_scale():
    n, k = 2000, 10
    value = avg_shortest_path(ring_lattice(n, k)).value
    assert value == pytest.approx(n / (2 * k), rel=0.05)


@pytest.mark.parametrize("n,k", [(5, 3), (5, 5), (5, -2)])
def test_ring_lattice_invalid_degree(n, k):
    with pytest.raises(InvalidDegree):
        ring_lattice(n, k)


@pytest.mark.parametrize("n,m,expected", [(100, 500, 10), (100, 100, 2), (100, 10, 2), (9, 36, 8), (10, 45, 8)])
def test_lattice_degree_for(n, m, expected):
    assert lattice_degree_for(n, m) == expected


def test_rewire_keeps_degrees_and_mixes():
    g = random_digraph(400, 1000, seed=9)
    rewired = degree_preserving_rewire(g, attempts=100_000, seed=1)
    np.testing.assert_array_equal(rewired.out_degrees(), g.out_degrees())
    np.testing.assert_array_equal(rewired.in_degrees(), g.in_degrees())
    assert rewired.self_loop_count == 0
    assert rewired.edge_count == g.edge_count
    assert len(edge_set(rewired) & edge_set(g)) < 0.6 * g.edge_count


def test_rewire_undirected_keeps_degrees():
    g = er_random(200, 800, seed=2)
    rewired = degree_preserving_rewire(g, seed=4)
    assert rewired.undirected
    np.testing.assert_array_equal(rewired.out_degrees(), g.out_degrees())
    assert rewired.edge_count == g.edge_count


def test_rewire_cannot_change_complete_graph():
    g = er_random(4, 6, seed=0)
    assert degree_preserving_rewire(g, seed=3).equals(g)


def test_scale_free_seed_graph_is_complete():
    g = synthetic_scale_free(4, 3, seed=0)
    assert g.edge_count == 6
    assert np.all(g.total_degrees() == 3)


def test_scale_free_is_heavy_tailed():
    g = synthetic_scale_free(10_000, 3, seed=7)
    degrees = g.total_degrees()
    assert degrees.max() > 20 * degrees.mean()
    fit = fit_power_law(degrees)
    assert 2.2 <= fit.alpha <= 3.2
