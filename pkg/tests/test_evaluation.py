import itertools
import math
import threading

import networkx as nx
import numpy as np
import pandas as pd
import pytest
from hypothesis import given, settings

from txnet.models.sampling import SamplerConfig, SamplingMethod
from txnet.services import evaluation_service, metrics_service
from txnet.services.evaluation_service import (
    BaseKernel,
    KernelSpec,
    compare_methods,
    fidelity,
    kernel_normalized,
    kernel_reference,
    ks_d,
    p_sweep,
    path_histogram,
    peak_of,
    profile_graph,
    sp_graph_kernel,
    write_comparison_csv,
    write_sweep_csv,
)
from txnet.services.reference_service import er_random, synthetic_scale_free
from txnet.services.sampling_service import sample
from txnet.utils.errors import EmptySample, GraphTooLarge

from conftest import directed_cycle, graph_from_pairs, random_digraph, small_digraphs, to_networkx


def kernel_by_enumeration(g1, g2, vertex=lambda a, b: float(a == b), length=lambda a, b: float(a == b)):
    def pairs(g):
        oracle = to_networkx(g)
        lengths = dict(nx.all_pairs_shortest_path_length(oracle))
        return [
            (oracle.degree(u), oracle.degree(v), d)
            for u, row in lengths.items()
            for v, d in row.items()
            if u != v
        ]

    return sum(
        vertex(du, dw) * vertex(dv, dz) * length(luv, lwz)
        for (du, dv, luv), (dw, dz, lwz) in itertools.product(pairs(g1), pairs(g2))
    )


def test_ks_d_examples():
    assert ks_d([1, 2, 3], [1, 2, 3]) == 0.0
    assert ks_d([1, 2], [3, 4]) == 1.0
    assert ks_d([1, 2, 3, 4], [3, 4, 5, 6]) == pytest.approx(0.5)


def test_ks_d_is_symmetric():
    rng = np.random.default_rng(4)
    a, b = rng.normal(size=50), rng.normal(0.5, size=70)
    assert ks_d(a, b) == ks_d(b, a)


def test_ks_d_needs_data():
    with pytest.raises(EmptySample):
        ks_d([], [1.0])


@settings(max_examples=60, deadline=None)
@given(small_digraphs(max_nodes=6), small_digraphs(max_nodes=6))
def test_delta_kernel_matches_enumeration(g1, g2):
    assert sp_graph_kernel(g1, g2) == pytest.approx(kernel_by_enumeration(g1, g2))


@settings(max_examples=30, deadline=None)
@given(small_digraphs(max_nodes=5), small_digraphs(max_nodes=5))
def test_gaussian_kernel_matches_enumeration(g1, g2):
    spec = KernelSpec(vertex=BaseKernel("gaussian", 1.5), length=BaseKernel("gaussian", 0.7))

    def gauss(sigma):
        return lambda a, b: math.exp(-((a - b) ** 2) / (2 * sigma**2))

    expected = kernel_by_enumeration(g1, g2, gauss(1.5), gauss(0.7))
    assert sp_graph_kernel(g1, g2, spec) == pytest.approx(expected)


def test_directed_triangle_self_kernel():
    assert sp_graph_kernel(directed_cycle(3), directed_cycle(3)) == 18.0


def test_edgeless_graph_scores_zero():
    edgeless = graph_from_pairs(4, [])
    assert sp_graph_kernel(edgeless, directed_cycle(3)) == 0.0
    assert kernel_normalized(edgeless, directed_cycle(3)) == 0.0


@settings(max_examples=60, deadline=None)
@given(small_digraphs(min_nodes=2, max_nodes=7))
def test_normalized_self_kernel_is_one(g):
    if path_histogram(g).pair_count == 0:
        assert kernel_normalized(g, g) == 0.0
    else:
        assert kernel_normalized(g, g) == 1.0


def test_normalized_kernel_symmetric_and_bounded():
    g1, g2 = er_random(40, 80, seed=1), er_random(40, 80, seed=2)
    value = kernel_normalized(g1, g2)
    assert 0.0 < value < 1.0
    assert value == pytest.approx(kernel_normalized(g2, g1))


def test_tiny_gaussian_width_behaves_like_delta():
    g1, g2 = random_digraph(12, 30, seed=1), random_digraph(12, 25, seed=2)
    narrow = KernelSpec(vertex=BaseKernel("gaussian", 0.01), length=BaseKernel("gaussian", 0.01))
    assert sp_graph_kernel(g1, g2, narrow) == pytest.approx(sp_graph_kernel(g1, g2))


def test_invalid_base_kernel():
    with pytest.raises(ValueError):
        BaseKernel("gaussian", 0.0)
    with pytest.raises(ValueError):
        BaseKernel("cosine")


def test_kernel_cap_from_environment(monkeypatch):
    monkeypatch.setenv("TXNET_KERNEL_NODE_CAP", "3")
    with pytest.raises(GraphTooLarge) as info:
        path_histogram(directed_cycle(4))
    assert info.value.exit_code == 3
    assert path_histogram(directed_cycle(3)).pair_count == 6


def test_kernel_reference_subsamples_large_graphs():
    g = random_digraph(50, 150, seed=3)
    small = kernel_reference(g, cap=60, seed=0)
    assert small.graph is g and not small.subsampled
    reference = kernel_reference(g, cap=20, seed=5)
    assert reference.subsampled
    assert reference.graph.node_count == 20
    assert reference.graph.equals(kernel_reference(g, cap=20, seed=5).graph)


def test_fidelity_of_graph_with_itself():
    g = random_digraph(30, 90, seed=8)
    score = fidelity(g, g, kernel=KernelSpec())
    assert score.d_avg == 0.0
    assert score.d_degree == score.d_clustering == score.d_betweenness == score.d_closeness == 0.0
    assert score.kernel_normalized == 1.0
    assert score.kernel_reference_subsampled is False


def test_fidelity_reuses_profile():
    g = random_digraph(40, 120, seed=2)
    profile = profile_graph(g)
    sub = sample(g, SamplerConfig(target_nodes=15, seed=3)).subgraph
    assert fidelity(profile, sub) == fidelity(g, sub)
    assert fidelity(profile, sub).kernel_normalized is None


def test_compare_methods_rows_and_best_marks():
    g = random_digraph(60, 240, seed=1)
    methods = [SamplingMethod.RN, SamplingMethod.RWFB]
    rows = compare_methods(g, methods, target_nodes=20, seeds=[1, 2], kernel=KernelSpec())
    runs = [row for row in rows if row.row_type == "run"]
    means = [row for row in rows if row.row_type == "mean"]
    assert [(row.method, row.seed) for row in runs] == [("rn", 1), ("rn", 2), ("rwfb", 1), ("rwfb", 2)]
    assert [row.method for row in means] == ["rn", "rwfb"]
    for column in ("d_degree", "d_clustering", "d_betweenness", "d_closeness", "d_avg", "kernel"):
        assert any(column in row.best for row in means)
    rn_runs = [row.score.d_degree for row in runs if row.method == "rn"]
    assert means[0].score.d_degree == pytest.approx(np.mean(rn_runs))


def test_compare_methods_is_deterministic():
    g = random_digraph(40, 160, seed=6)
    first = compare_methods(g, [SamplingMethod.FF], target_nodes=12, seeds=[4])
    second = compare_methods(g, [SamplingMethod.FF], target_nodes=12, seeds=[4])
    assert [row.as_record() for row in first] == [row.as_record() for row in second]


def test_p_sweep_single_point():
    g = random_digraph(50, 200, seed=4)
    points = p_sweep(g, [0.3], target_nodes=15, seeds_per_p=3, seed=7)
    assert len(points) == 1
    point = points[0]
    assert point.p == 0.3 and point.n_seeds == 3
    assert 0.0 <= point.mean_kernel <= 1.0
    assert point.stderr >= 0.0
    assert peak_of(points) == point
    assert p_sweep(g, [0.3], target_nodes=15, seeds_per_p=3, seed=7) == points


def test_p_sweep_explicit_seeds_and_peak_ties():
    g = random_digraph(30, 90, seed=5)
    points = p_sweep(g, [0.0, 0.5], target_nodes=30, seeds_per_p=[1, 2])
    # A full-size sample is the graph itself at every p.
    assert [pt.mean_kernel for pt in points] == [1.0, 1.0]
    assert peak_of(points).p == 0.0


def test_write_comparison_csv(tmp_path):
    g = random_digraph(30, 100, seed=3)
    rows = compare_methods(g, [SamplingMethod.RE], target_nodes=10, seeds=[1, 2])
    path = tmp_path / "compare.csv"
    write_comparison_csv(rows, str(path))
    frame = pd.read_csv(path)
    assert list(frame.columns) == [
        "row_type", "method", "seed", "d_degree", "d_clustering",
        "d_betweenness", "d_closeness", "d_avg", "kernel", "best",
    ]
    assert frame["row_type"].tolist() == ["run", "run", "mean"]
    assert frame["kernel"].isna().all()


def test_write_sweep_csv(tmp_path):
    g = random_digraph(30, 100, seed=3)
    points = p_sweep(g, [0.1, 0.2], target_nodes=10, seeds_per_p=2)
    path = tmp_path / "sweep.csv"
    write_sweep_csv(points, str(path))
    frame = pd.read_csv(path)
    assert list(frame.columns) == ["p", "mean_kernel", "stderr", "n_seeds"]
    assert frame["p"].tolist() == [0.1, 0.2]
    assert frame["n_seeds"].tolist() == [2, 2]


@pytest.mark.slow
def test_walk_samples_keep_degrees_better_than_uniform_nodes():
    g = synthetic_scale_free(3000, 3, seed=11)
    degrees = g.total_degrees()

    def mean_d(method):
        values = []
        for seed in range(3):
            cfg = SamplerConfig(method=method, target_nodes=450, seed=seed)
            values.append(ks_d(degrees, sample(g, cfg).subgraph.total_degrees()))
        return np.mean(values)

    assert mean_d(SamplingMethod.RWFB) < mean_d(SamplingMethod.RN)


def test_compare_methods_stays_within_thread_cap(monkeypatch):
    monkeypatch.setenv("TXNET_THREADS", "2")
    monkeypatch.setattr(metrics_service, "BATCH_CELLS", 200)
    peak = []
    score = evaluation_service.fidelity

    def counting_fidelity(*args, **kwargs):
        result = score(*args, **kwargs)
        peak.append(sum(1 for t in threading.enumerate() if t.name.startswith("txnet-worker")))
        return result

    monkeypatch.setattr(evaluation_service, "fidelity", counting_fidelity)
    g = random_digraph(60, 240, seed=1)
    rows = compare_methods(g, [SamplingMethod.RN, SamplingMethod.FF, SamplingMethod.RWFB], target_nodes=20, seeds=[1, 2])
    assert len(rows) == 9
    assert peak and max(peak) <= 2


def test_path_histogram_is_independent_of_batch_size(monkeypatch):
    g = random_digraph(25, 70, seed=12)
    whole = path_histogram(g)
    monkeypatch.setattr(metrics_service, "BATCH_CELLS", 30)
    batched = path_histogram(g)
    assert batched.same_as(whole)
    assert whole.pair_count == sum(
        1 for u, row in nx.all_pairs_shortest_path_length(to_networkx(g)) for v in row if u != v
    )


def test_default_kernel_reference_is_the_full_graph():
    g = synthetic_scale_free(10_000, 3, seed=1)
    reference = kernel_reference(g)
    assert not reference.subsampled
    assert reference.graph is g


@pytest.mark.slow
def test_sampler_ranking_on_scale_free_graph():
    g = synthetic_scale_free(10_000, 3, seed=2)
    methods = [SamplingMethod.RWFB, SamplingMethod.RN, SamplingMethod.RE]
    rows = compare_methods(g, methods, target_nodes=1_000, seeds=list(range(20)))
    means = {row.method: row.score for row in rows if row.row_type == "mean"}
    assert means["rwfb"].d_avg < means["rn"].d_avg
    assert means["rwfb"].d_avg < means["re"].d_avg
    assert means["rn"].d_degree > means["rwfb"].d_degree


@pytest.mark.slow
def test_flying_back_sweep_peaks_inside_the_grid():
    g = synthetic_scale_free(10_000, 3, seed=3)
    grid = [round(0.1 * i, 1) for i in range(10)]
    points = p_sweep(g, grid, target_nodes=1_000, seeds_per_p=8, seed=1)
    assert peak_of(points).p not in (grid[0], grid[-1])
