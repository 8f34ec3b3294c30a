import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from scipy.special import zeta

from txnet.models.graph import WeightedDigraph, WeightedEdge
from txnet.services.graph_service import build_graph, undirected_projection
from txnet.services.metrics_service import (
    Approximation,
    avg_shortest_path,
    betweenness,
    choose_approximation,
    closeness,
    clustering,
    connected_components,
    degree_distribution,
    fit_power_law,
    knn_in_curve,
    mean_by_degree,
    normalized_rich_club,
    pearson_assortativity,
    rich_club,
    small_world_omega,
)
from txnet.services.reference_service import er_random, ring_lattice
from txnet.utils.errors import (
    DegenerateVariance,
    DisconnectedInput,
    EmptyGraph,
    GraphTooLargeForExact,
    InsufficientData,
)

from conftest import (
    directed_cycle,
    graph_from_pairs,
    random_digraph,
    small_digraphs,
    to_networkx,
    undirected_networkx,
)

ORACLE = settings(max_examples=200, deadline=None)


def bidirected(n, pairs):
    return graph_from_pairs(n, [e for a, b in pairs for e in ((a, b), (b, a))])


def complete(n):
    return graph_from_pairs(n, [(a, b) for a in range(n) for b in range(n) if a != b])


def powerlaw_samples(alpha, size, seed, table=10**6):
    """Discrete power law with xmin=1 by inverse CDF; continuous tail past the table."""
    rng = np.random.default_rng(seed)
    survival = zeta(alpha, np.arange(1, table + 1, dtype=np.float64)) / zeta(alpha, 1.0)
    u = rng.random(size)
    x = np.searchsorted(-survival, -u, side="right").astype(np.float64)
    tail = u < survival[-1]
    x[tail] = np.floor(table * (u[tail] / survival[-1]) ** (-1.0 / (alpha - 1.0)))
    return x.astype(np.int64)


# -- degree distribution and power law ---------------------------------------


def test_cycle_total_degree_distribution(triangle):
    dist = degree_distribution(triangle, "total")
    assert dist.support == [2]
    assert dist.pmf == [1.0]


def test_star_in_degree_distribution(star_out):
    dist = degree_distribution(star_out, "in")
    assert dict(zip(dist.support, dist.pmf)) == {0: 0.25, 1: 0.75}
    assert dist.node_count == 4


def test_degree_distribution_of_empty_graph():
    with pytest.raises(EmptyGraph):
        degree_distribution(WeightedDigraph.empty())


@given(small_digraphs())
def test_pmf_sums_to_one(g):
    for mode in ("in", "out", "total"):
        dist = degree_distribution(g, mode)
        assert sum(dist.pmf) == pytest.approx(1.0, abs=1e-9)
        assert all(p > 0 for p in dist.pmf)


@pytest.mark.parametrize("alpha,low,high", [(2.5, 2.4, 2.6), (1.4, 1.3, 1.5)])
def test_power_law_recovery(alpha, low, high):
    fit = fit_power_law(powerlaw_samples(alpha, 100_000, seed=17))
    assert low <= fit.alpha <= high
    assert 0.0 <= fit.ks_gof < 0.05
    assert fit.tail_size >= 50


def test_power_law_rejects_constant_data():
    with pytest.raises(InsufficientData):
        fit_power_law([3] * 500)


def test_power_law_needs_a_tail():
    with pytest.raises(InsufficientData):
        fit_power_law(list(range(1, 20)))


def test_power_law_from_distribution():
    samples = powerlaw_samples(2.5, 20_000, seed=3)
    support, counts = np.unique(samples, return_counts=True)
    from txnet.models.report import DegreeDistribution

    dist = DegreeDistribution(
        mode="total",
        support=support.tolist(),
        pmf=(counts / counts.sum()).tolist(),
        counts=counts.tolist(),
    )
    assert fit_power_law(dist) == fit_power_law(samples)


# -- clustering, components, path length --------------------------------------


def test_triangle_clustering(triangle):
    local, c = clustering(triangle)
    assert c == 1.0
    assert local.tolist() == [1.0, 1.0, 1.0]


def test_path_clustering_is_zero():
    _, c = clustering(graph_from_pairs(3, [(0, 1), (1, 2)]))
    assert c == 0.0


@ORACLE
@given(small_digraphs(self_loops=True))
def test_clustering_matches_networkx(g):
    local, c = clustering(g)
    expected = nx.clustering(undirected_networkx(g))
    np.testing.assert_allclose(local, [expected[i] for i in range(g.node_count)], atol=1e-12)
    assert c == pytest.approx(np.mean(list(expected.values())), abs=1e-12)
    assert np.all(local[undirected_projection(g).out_degrees() < 2] == 0.0)


def test_cycle_components(triangle):
    comp = connected_components(triangle)
    assert (comp.scc_count, comp.largest_scc_size, comp.wcc_count, comp.largest_wcc_size) == (1, 3, 1, 3)


def test_path_components():
    comp = connected_components(graph_from_pairs(3, [(0, 1), (1, 2)]))
    assert (comp.scc_count, comp.wcc_count) == (3, 1)
    assert comp.scc_membership.tolist() == [0, 1, 2]


@ORACLE
@given(small_digraphs(self_loops=True))
def test_components_match_networkx(g):
    oracle = to_networkx(g)
    comp = connected_components(g)
    assert comp.scc_count == nx.number_strongly_connected_components(oracle)
    assert comp.wcc_count == nx.number_weakly_connected_components(oracle)
    assert comp.largest_scc_size == max(len(c) for c in nx.strongly_connected_components(oracle))
    assert comp.largest_wcc_size == max(len(c) for c in nx.weakly_connected_components(oracle))
    for members in nx.strongly_connected_components(oracle):
        assert len({int(comp.scc_membership[i]) for i in members}) == 1


def test_path_length_on_path():
    result = avg_shortest_path(graph_from_pairs(3, [(0, 1), (1, 2)]))
    assert result.value == pytest.approx(4 / 3)
    assert result.exact


def test_path_length_on_complete_graph():
    assert avg_shortest_path(complete(4)).value == 1.0


@ORACLE
@given(small_digraphs(min_nodes=2))
def test_path_length_matches_networkx(g):
    oracle = undirected_networkx(g)
    biggest = max(nx.connected_components(oracle), key=len)
    if len(biggest) < 2:
        with pytest.raises(InsufficientData):
            avg_shortest_path(g)
        return
    expected = nx.average_shortest_path_length(oracle.subgraph(biggest))
    assert avg_shortest_path(g).value == pytest.approx(expected, rel=1e-12)


def test_path_length_disconnected_without_restriction():
    g = graph_from_pairs(4, [(0, 1), (2, 3)])
    with pytest.raises(DisconnectedInput):
        avg_shortest_path(g, restrict_to_largest_wcc=False)


def test_sampled_path_length_tracks_exact():
    g = er_random(300, 900, seed=2)
    exact = avg_shortest_path(g).value
    sampled = avg_shortest_path(g, mode="sampled", pairs=20_000, seed=5)
    assert not sampled.exact
    assert sampled.stderr > 0
    assert abs(sampled.value - exact) < 5 * sampled.stderr


def test_exact_path_length_respects_cap(monkeypatch):
    monkeypatch.setenv("TXNET_EXACT_NODE_CAP", "5")
    with pytest.raises(GraphTooLargeForExact):
        avg_shortest_path(directed_cycle(10))


def test_omega_of_lattice_is_negative():
    world = small_world_omega(ring_lattice(200, 6), replicates=3, seed=1)
    assert world.C == pytest.approx(world.C_latt_mean)
    assert world.omega < 0


def test_omega_of_random_graph_is_positive():
    world = small_world_omega(er_random(500, 2500, seed=9), replicates=3, seed=1)
    assert world.omega > 0
    assert world.lattice_degree == 10


def test_omega_is_deterministic():
    g = er_random(120, 400, seed=4)
    assert small_world_omega(g, 2, seed=3) == small_world_omega(g, 2, seed=3)


# -- centrality ---------------------------------------------------------------


def test_closeness_on_single_edge():
    g = graph_from_pairs(2, [(0, 1)])
    assert closeness(g, "wasserman_faust").tolist() == [0.0, 1.0]


def test_closeness_of_isolated_node():
    g = graph_from_pairs(3, [(0, 1)])
    assert closeness(g)[2] == 0.0


def test_closeness_on_bidirected_triangle():
    g = complete(3)
    assert closeness(g).tolist() == [1.0, 1.0, 1.0]
    assert closeness(g, "wasserman_faust").tolist() == [1.0, 1.0, 1.0]


@ORACLE
@given(small_digraphs(min_nodes=2, self_loops=True))
def test_closeness_matches_networkx(g):
    oracle = to_networkx(g)
    for variant, improved in (("standard", False), ("wasserman_faust", True)):
        expected = nx.closeness_centrality(oracle, wf_improved=improved)
        np.testing.assert_allclose(
            closeness(g, variant), [expected[i] for i in range(g.node_count)], rtol=1e-12, atol=1e-12
        )


def test_betweenness_on_path():
    assert betweenness(graph_from_pairs(3, [(0, 1), (1, 2)])).tolist() == [0.0, 1.0, 0.0]


def test_betweenness_on_complete_graph():
    assert betweenness(complete(3)).tolist() == [0.0, 0.0, 0.0]


def test_betweenness_of_bidirected_star():
    g = bidirected(5, [(0, leaf) for leaf in range(1, 5)])
    assert betweenness(g)[0] == pytest.approx(12.0)


@ORACLE
@given(small_digraphs(self_loops=True))
def test_betweenness_matches_networkx(g):
    expected = nx.betweenness_centrality(to_networkx(g), normalized=False)
    np.testing.assert_allclose(betweenness(g), [expected[i] for i in range(g.node_count)], rtol=1e-9, atol=1e-9)


def test_full_pivot_set_equals_exact():
    g = random_digraph(150, 600, seed=12)
    full = Approximation(sources=g.node_count, seed=99)
    np.testing.assert_array_equal(betweenness(g, full), betweenness(g))
    np.testing.assert_array_equal(closeness(g, "wasserman_faust", full), closeness(g, "wasserman_faust"))


def test_pivot_estimates_are_reproducible_and_close():
    g = random_digraph(400, 2000, seed=13)
    approx = Approximation(sources=200, seed=4)
    first, second = betweenness(g, approx), betweenness(g, approx)
    np.testing.assert_array_equal(first, second)
    exact = betweenness(g)
    assert first.sum() == pytest.approx(exact.sum(), rel=0.1)


def test_exact_betweenness_respects_cap(monkeypatch):
    monkeypatch.setenv("TXNET_EXACT_NODE_CAP", "5")
    with pytest.raises(GraphTooLargeForExact):
        betweenness(directed_cycle(6))


def test_choose_approximation(monkeypatch):
    monkeypatch.setenv("TXNET_EXACT_NODE_CAP", "100")
    monkeypatch.setenv("TXNET_DEFAULT_PIVOTS", "7")
    assert choose_approximation(50).exact
    assert choose_approximation(500).sources == 7
    assert choose_approximation(50, pivots=3).sources == 3
    assert choose_approximation(500, exact=False).sources == 7
    with pytest.raises(GraphTooLargeForExact):
        choose_approximation(500, exact=True)


def test_metrics_are_label_invariant():
    g = random_digraph(40, 120, seed=21)
    renamed = {label: f"z{99 - i:02d}" for i, label in enumerate(g.labels)}
    h = build_graph([WeightedEdge(renamed[e.src], renamed[e.dst], e.weight) for e in g.iter_edges()], renamed.values())
    by_label_g = dict(zip(g.labels, betweenness(g)))
    by_label_h = dict(zip(h.labels, betweenness(h)))
    for label, value in by_label_g.items():
        assert by_label_h[renamed[label]] == pytest.approx(value)
    assert clustering(g)[1] == pytest.approx(clustering(h)[1])
    assert pearson_assortativity(g) == pytest.approx(pearson_assortativity(h))


# -- mixing ---------------------------------------------------------------------


def assortativity_by_hand(g):
    out_deg, in_deg = g.out_degrees(), g.in_degrees()
    pairs = [(out_deg[a], in_deg[b]) for a, b in zip(g.edge_sources.tolist(), g.out_indices.tolist())]
    m = len(pairs)
    product = sum(ki * kj for ki, kj in pairs) / m
    half = sum((ki + kj) / 2 for ki, kj in pairs) / m
    squares = sum((ki * ki + kj * kj) / 2 for ki, kj in pairs) / m
    return (product - half**2) / (squares - half**2)


def test_assortativity_of_cycle_is_undefined():
    with pytest.raises(DegenerateVariance):
        pearson_assortativity(directed_cycle(5))


def test_assortativity_needs_two_edges():
    with pytest.raises(DegenerateVariance):
        pearson_assortativity(graph_from_pairs(2, [(0, 1)]))


def test_assortativity_of_handcrafted_graph():
    g = graph_from_pairs(5, [(0, 1), (0, 2), (1, 2), (2, 3), (3, 0), (4, 0)])
    assert pearson_assortativity(g) == pytest.approx(assortativity_by_hand(g), rel=1e-12)


@ORACLE
@given(small_digraphs(self_loops=True))
def test_assortativity_matches_formula(g):
    try:
        rho = pearson_assortativity(g)
    except DegenerateVariance:
        return
    assert -1.0 <= rho <= 1.0
    assert rho == pytest.approx(max(-1.0, min(1.0, assortativity_by_hand(g))), abs=1e-9)


def test_knn_on_star(star_out):
    curve = knn_in_curve(star_out)
    assert curve.conventional == [(3.0, 1.0)]
    assert curve.as_printed == [(3.0, pytest.approx(1 / 16))]


def test_knn_flat_on_cycle():
    curve = knn_in_curve(directed_cycle(6))
    assert curve.conventional == [(1.0, 1.0)]


def test_knn_decreases_for_disassortative_graph():
    labels = [f"s{i}" for i in range(5)]
    edges = [(s, "X") for s in labels]
    edges += [(a, y) for a in ("a", "b") for y in ("Y1", "Y2")]
    edges += [("c", z) for z in ("Z1", "Z2", "Z3")]
    g = build_graph([WeightedEdge(s, d, 1.0) for s, d in edges])
    curve = knn_in_curve(g)
    ks = [k for k, _ in curve.conventional]
    assert ks == [1.0, 2.0, 3.0]
    assert [v for _, v in curve.conventional] == [5.0, 2.0, 1.0]
    printed = [v for _, v in curve.as_printed]
    assert printed[0] > printed[1] > printed[2]


# -- rich club ------------------------------------------------------------------


def test_rich_club_of_complete_graph():
    assert dict(rich_club(complete(4), [2])) == {2.0: 1.0}


def test_rich_club_omits_small_clubs():
    star = bidirected(5, [(0, leaf) for leaf in range(1, 5)])
    assert dict(rich_club(star, [1])) == {}


@ORACLE
@given(small_digraphs(self_loops=True))
def test_rich_club_matches_networkx(g):
    oracle = undirected_networkx(g)
    if oracle.number_of_edges() == 0:
        return
    expected = nx.rich_club_coefficient(oracle, normalized=False)
    ours = dict(rich_club(g))
    assert set(ours) == {float(k) for k in expected}
    for k, value in expected.items():
        assert ours[float(k)] == pytest.approx(value, abs=1e-12)


def test_normalized_rich_club_of_complete_graph():
    club = normalized_rich_club(complete(4), replicates=3, seed=1)
    assert all(v == pytest.approx(1.0) for _, v in club.phi_norm)
    assert club.ordered_k == []


def test_normalized_rich_club_of_random_graph():
    g = er_random(60, 1239, seed=6)
    club = normalized_rich_club(g, replicates=5, seed=2)
    degree = np.sort(g.out_degrees())
    for k, value in club.phi_norm:
        if (degree > k).sum() >= 25:
            assert 0.85 <= value <= 1.15


def test_mean_by_degree():
    values = np.array([1.0, 3.0, 5.0])
    assert mean_by_degree(values, np.array([2, 2, 1])) == [(1.0, 5.0), (2.0, 2.0)]
