"""
Sample fidelity: K-S distances between per-node metric distributions and
the normalized shortest-path graph kernel, plus the method comparison and
the flying-back probability sweep built on them.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.sparse import csgraph
from scipy.stats import ks_2samp

from txnet.config import get_kernel_node_cap, get_reference_seed
from txnet.logging_config import get_logger
from txnet.models.graph import WeightedDigraph
from txnet.models.report import FidelityScore
from txnet.models.sampling import SamplerConfig, SamplingMethod
from txnet.services.metrics_service import (
    BATCH_CELLS,
    Approximation,
    _batches,
    betweenness,
    choose_approximation,
    closeness,
    clustering,
)
from txnet.services.sampling_service import sample, sample_rn
from txnet.utils.errors import ConfigError, EmptySample, GraphTooLarge, IoError
from txnet.utils.helpers import derive_seeds, mean_and_stderr, parallel_map

logger = get_logger(__name__)

METRIC_COLUMNS = ("d_degree", "d_clustering", "d_betweenness", "d_closeness", "d_avg")


def ks_d(sample_a: Sequence[float], sample_b: Sequence[float]) -> float:
    """Two-sample K-S D: the largest gap between the empirical CDFs."""
    a = np.asarray(sample_a, dtype=np.float64)
    b = np.asarray(sample_b, dtype=np.float64)
    if a.size == 0 or b.size == 0:
        raise EmptySample()
    return float(ks_2samp(a, b, method="asymp").statistic)


# -- shortest-path graph kernel ---------------------------------------------


@dataclass(frozen=True)
class BaseKernel:
    """Delta (exact match) or Gaussian comparison of two integers."""

    kind: Literal["delta", "gaussian"] = "delta"
    sigma: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in ("delta", "gaussian"):
            raise ValueError(f"unknown base kernel: {self.kind}")
        if self.kind == "gaussian" and self.sigma <= 0:
            raise ValueError("gaussian kernel needs sigma > 0")

    def pairwise(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        diff = x[:, None].astype(np.float64) - y[None, :].astype(np.float64)
        if self.kind == "delta":
            return (diff == 0).astype(np.float64)
        return np.exp(-(diff**2) / (2.0 * self.sigma**2))


DELTA = BaseKernel()


@dataclass(frozen=True)
class KernelSpec:
    vertex: BaseKernel = DELTA
    length: BaseKernel = DELTA

    @property
    def is_delta(self) -> bool:
        return self.vertex.kind == "delta" and self.length.kind == "delta"


@dataclass(frozen=True)
class PathHistogram:
    """
    Counts of (degree(u), degree(v), d(u, v)) over ordered reachable pairs
    u != v, with cells sorted by key.
    """

    deg_u: np.ndarray
    deg_v: np.ndarray
    dist: np.ndarray
    counts: np.ndarray
    node_count: int

    @property
    def pair_count(self) -> int:
        return int(self.counts.sum())

    def same_as(self, other: "PathHistogram") -> bool:
        return all(
            np.array_equal(x, y)
            for x, y in (
                (self.deg_u, other.deg_u),
                (self.deg_v, other.deg_v),
                (self.dist, other.dist),
                (self.counts, other.counts),
            )
        )


def path_histogram(g: WeightedDigraph, cap: Optional[int] = None) -> PathHistogram:
    """
    Directed hop distances and total degrees of every reachable ordered pair.

    Sources are processed in batches and only cell counts are kept, so memory
    stays at one batch of distance rows.
    """
    cap = get_kernel_node_cap() if cap is None else cap
    n = g.node_count
    if n > cap:
        raise GraphTooLarge(n, cap)
    if n == 0:
        empty = np.empty(0, dtype=np.int64)
        return PathHistogram(empty, empty, empty, empty.astype(np.float64), 0)
    a = g.adjacency
    deg = g.total_degrees().astype(np.int64)
    deg_base = int(deg.max()) + 1
    # hop distances are below n, so (deg_u, deg_v, dist) packs into one sortable key
    dist_base = n

    def _batch_cells(sources: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        dist = csgraph.shortest_path(a, method="D", directed=True, unweighted=True, indices=sources)
        dist[np.arange(sources.size), sources] = np.inf
        rows, cols = np.nonzero(np.isfinite(dist))
        keys = (deg[sources[rows]] * deg_base + deg[cols]) * dist_base + dist[rows, cols].astype(np.int64)
        return np.unique(keys, return_counts=True)

    parts = parallel_map(_batch_cells, _batches(np.arange(n), n))
    keys = np.concatenate([part[0] for part in parts])
    cells, inverse = np.unique(keys, return_inverse=True)
    counts = np.bincount(inverse.ravel(), weights=np.concatenate([part[1] for part in parts]), minlength=cells.size)
    rest, dist = np.divmod(cells, dist_base)
    deg_u, deg_v = np.divmod(rest, deg_base)
    return PathHistogram(deg_u, deg_v, dist, counts.astype(np.float64), n)


def _delta_product(h1: PathHistogram, h2: PathHistogram) -> float:
    if h1.counts.size == 0 or h2.counts.size == 0:
        return 0.0
    k1 = np.stack((h1.deg_u, h1.deg_v, h1.dist), axis=1)
    k2 = np.stack((h2.deg_u, h2.deg_v, h2.dist), axis=1)
    both = np.concatenate((k1, k2))
    _, inverse = np.unique(both, axis=0, return_inverse=True)
    inverse = inverse.ravel()
    left = np.zeros(inverse.max() + 1)
    right = np.zeros(inverse.max() + 1)
    left[inverse[: k1.shape[0]]] = h1.counts
    right[inverse[k1.shape[0]:]] = h2.counts
    return float(np.dot(left, right))


def _smooth_product(h1: PathHistogram, h2: PathHistogram, spec: KernelSpec) -> float:
    if h1.counts.size == 0 or h2.counts.size == 0:
        return 0.0
    chunk = max(1, BATCH_CELLS // h2.counts.size)

    def _block(start: int) -> float:
        end = start + chunk
        weight = (
            spec.vertex.pairwise(h1.deg_u[start:end], h2.deg_u)
            * spec.vertex.pairwise(h1.deg_v[start:end], h2.deg_v)
            * spec.length.pairwise(h1.dist[start:end], h2.dist)
        )
        return float(h1.counts[start:end] @ weight @ h2.counts)

    return float(sum(parallel_map(_block, range(0, h1.counts.size, chunk))))


def histogram_kernel(h1: PathHistogram, h2: PathHistogram, spec: KernelSpec = KernelSpec()) -> float:
    if spec.is_delta:
        return _delta_product(h1, h2)
    return _smooth_product(h1, h2, spec)


def sp_graph_kernel(
    g1: WeightedDigraph, g2: WeightedDigraph, spec: KernelSpec = KernelSpec(), cap: Optional[int] = None
) -> float:
    """
    Shortest-path kernel: the sum over reachable ordered pairs (u, v) of g1
    and (w, z) of g2 of K_D(k_u, k_w) * K_D(k_v, k_z) * K_L(d_uv, d_wz).
    """
    return histogram_kernel(path_histogram(g1, cap), path_histogram(g2, cap), spec)


def normalized_from_histograms(h1: PathHistogram, h2: PathHistogram, spec: KernelSpec = KernelSpec()) -> float:
    self_1 = histogram_kernel(h1, h1, spec)
    self_2 = histogram_kernel(h2, h2, spec)
    if self_1 == 0.0 or self_2 == 0.0:
        return 0.0
    if h1.same_as(h2):
        return 1.0
    value = histogram_kernel(h1, h2, spec) / (np.sqrt(self_1) * np.sqrt(self_2))
    return float(min(max(value, 0.0), 1.0))


def kernel_normalized(
    g1: WeightedDigraph, g2: WeightedDigraph, spec: KernelSpec = KernelSpec(), cap: Optional[int] = None
) -> float:
    """K(g1, g2) / sqrt(K(g1, g1) K(g2, g2)); 0 when either self-kernel is 0."""
    return normalized_from_histograms(path_histogram(g1, cap), path_histogram(g2, cap), spec)


@dataclass(frozen=True)
class KernelReference:
    graph: WeightedDigraph
    cap: int
    seed: int
    subsampled: bool


def kernel_reference(g: WeightedDigraph, cap: Optional[int] = None, seed: Optional[int] = None) -> KernelReference:
    """
    The graph itself when it fits the kernel cap, otherwise a fixed-seed
    uniform node-induced subsample of cap nodes.
    """
    cap = get_kernel_node_cap() if cap is None else cap
    seed = get_reference_seed() if seed is None else seed
    if g.node_count <= cap:
        return KernelReference(g, cap, seed, False)
    picked = sample_rn(g, SamplerConfig(method=SamplingMethod.RN, target_nodes=cap, seed=seed))
    logger.info("Kernel reference subsampled to %d of %d nodes (seed=%d)", cap, g.node_count, seed)
    return KernelReference(picked.subgraph, cap, seed, True)


# -- fidelity ---------------------------------------------------------------


@dataclass
class GraphProfile:
    """Per-node metric vectors of one graph, computed once and reused."""

    graph: WeightedDigraph
    degree: np.ndarray
    clustering: np.ndarray
    betweenness: np.ndarray
    closeness: np.ndarray
    approx: Approximation
    _kernel: Dict[Tuple[int, int, KernelSpec], Tuple[KernelReference, PathHistogram]] = field(
        default_factory=dict, repr=False
    )

    def kernel_side(
        self, spec: KernelSpec, cap: Optional[int] = None, seed: Optional[int] = None
    ) -> Tuple[KernelReference, PathHistogram]:
        cap = get_kernel_node_cap() if cap is None else cap
        seed = get_reference_seed() if seed is None else seed
        key = (cap, seed, spec)
        if key not in self._kernel:
            reference = kernel_reference(self.graph, cap, seed)
            self._kernel[key] = (reference, path_histogram(reference.graph, cap))
        return self._kernel[key]


def profile_graph(g: WeightedDigraph, approx: Optional[Approximation] = None) -> GraphProfile:
    """Total degree, local clustering, betweenness and Wasserman-Faust closeness."""
    approx = choose_approximation(g.node_count) if approx is None else approx
    local, _ = clustering(g)
    return GraphProfile(
        graph=g,
        degree=g.total_degrees().astype(np.float64),
        clustering=local,
        betweenness=betweenness(g, approx),
        closeness=closeness(g, "wasserman_faust", approx),
        approx=approx,
    )


def fidelity(
    original: WeightedDigraph | GraphProfile,
    sampled: WeightedDigraph | GraphProfile,
    approx: Optional[Approximation] = None,
    kernel: Optional[KernelSpec] = None,
    kernel_cap: Optional[int] = None,
    reference_seed: Optional[int] = None,
) -> FidelityScore:
    """
    K-S distances between the four per-node metric distributions of the
    original and the sample; the kernel entry is filled when ``kernel`` is set.

    ``approx`` applies to the original only; samples run exact when they fit.
    """
    if not isinstance(original, GraphProfile):
        original = profile_graph(original, approx)
    if not isinstance(sampled, GraphProfile):
        sampled = profile_graph(sampled)
    for profile in (original, sampled):
        if profile.graph.node_count == 0:
            raise EmptySample()

    extra: Dict[str, object] = {}
    if kernel is not None:
        reference, ref_hist = original.kernel_side(kernel, kernel_cap, reference_seed)
        sample_hist = path_histogram(sampled.graph, reference.cap)
        extra = {
            "kernel_normalized": normalized_from_histograms(ref_hist, sample_hist, kernel),
            "kernel_reference_cap": reference.cap,
            "kernel_reference_seed": reference.seed,
            "kernel_reference_subsampled": reference.subsampled,
        }
    return FidelityScore.from_statistics(
        d_degree=ks_d(original.degree, sampled.degree),
        d_clustering=ks_d(original.clustering, sampled.clustering),
        d_betweenness=ks_d(original.betweenness, sampled.betweenness),
        d_closeness=ks_d(original.closeness, sampled.closeness),
        **extra,
    )


# -- comparison table -------------------------------------------------------


@dataclass
class ComparisonRow:
    row_type: Literal["run", "mean"]
    method: str
    seed: Optional[int]
    score: FidelityScore
    best: List[str] = field(default_factory=list)

    def as_record(self) -> Dict[str, object]:
        s = self.score
        return {
            "row_type": self.row_type,
            "method": self.method,
            "seed": "" if self.seed is None else self.seed,
            "d_degree": s.d_degree,
            "d_clustering": s.d_clustering,
            "d_betweenness": s.d_betweenness,
            "d_closeness": s.d_closeness,
            "d_avg": s.d_avg,
            "kernel": "" if s.kernel_normalized is None else s.kernel_normalized,
            "best": ";".join(self.best),
        }


def _mean_score(scores: List[FidelityScore]) -> FidelityScore:
    kernels = [s.kernel_normalized for s in scores if s.kernel_normalized is not None]
    first = scores[0]
    return FidelityScore.from_statistics(
        d_degree=float(np.mean([s.d_degree for s in scores])),
        d_clustering=float(np.mean([s.d_clustering for s in scores])),
        d_betweenness=float(np.mean([s.d_betweenness for s in scores])),
        d_closeness=float(np.mean([s.d_closeness for s in scores])),
        kernel_normalized=float(np.mean(kernels)) if kernels else None,
        kernel_reference_cap=first.kernel_reference_cap,
        kernel_reference_seed=first.kernel_reference_seed,
        kernel_reference_subsampled=first.kernel_reference_subsampled,
    )


def _mark_best(means: List[ComparisonRow]) -> None:
    for column in METRIC_COLUMNS:
        values = [getattr(row.score, column) for row in means]
        winner = min(values)
        for row, value in zip(means, values):
            if value == winner:
                row.best.append(column)
    kernels = [row.score.kernel_normalized for row in means]
    if all(k is not None for k in kernels) and kernels:
        top = max(kernels)
        for row, value in zip(means, kernels):
            if value == top:
                row.best.append("kernel")


def compare_methods(
    g: WeightedDigraph,
    methods: Sequence[SamplingMethod],
    target_nodes: int,
    seeds: Sequence[int],
    base: Optional[SamplerConfig] = None,
    approx: Optional[Approximation] = None,
    kernel: Optional[KernelSpec] = None,
) -> List[ComparisonRow]:
    """
    One row per (method, seed) followed by one mean row per method.

    The reference profile is computed once. Mean rows carry best-per-column
    marks: lowest D, highest kernel.
    """
    reference = profile_graph(g, approx)
    if kernel is not None:
        reference.kernel_side(kernel)
    base = base or SamplerConfig(target_nodes=target_nodes)
    jobs = [(method, seed) for method in methods for seed in seeds]

    def _run(job: Tuple[SamplingMethod, int]) -> ComparisonRow:
        method, seed = job
        cfg = SamplerConfig.model_validate({**base.model_dump(), "method": method, "seed": seed, "target_nodes": target_nodes})
        result = sample(g, cfg)
        return ComparisonRow("run", method.value, seed, fidelity(reference, result.subgraph, kernel=kernel))

    runs = parallel_map(_run, jobs)
    means: List[ComparisonRow] = []
    for method in methods:
        scores = [row.score for row in runs if row.method == method.value]
        means.append(ComparisonRow("mean", method.value, None, _mean_score(scores)))
    _mark_best(means)
    for row in means:
        logger.info("Method %s: d_avg=%.4f kernel=%s best=%s", row.method, row.score.d_avg,
                    row.score.kernel_normalized, ",".join(row.best) or "-")
    return runs + means


# -- flying-back probability sweep ------------------------------------------


@dataclass(frozen=True)
class SweepPoint:
    p: float
    mean_kernel: float
    stderr: float
    n_seeds: int


def p_sweep(
    g: WeightedDigraph,
    p_values: Sequence[float],
    target_nodes: int,
    seeds_per_p: Union[int, Sequence[int]],
    seed: int = 0,
    kernel: KernelSpec = KernelSpec(),
    base: Optional[SamplerConfig] = None,
    kernel_cap: Optional[int] = None,
    reference_seed: Optional[int] = None,
) -> List[SweepPoint]:
    """
    Mean normalized kernel of RWFB samples against the reference for each p.

    ``seeds_per_p`` is a replicate count (seeds derived from ``seed``) or an
    explicit seed list. The same seeds are used at every p.
    """
    reference = kernel_reference(g, kernel_cap, reference_seed)
    ref_hist = path_histogram(reference.graph, reference.cap)
    run_seeds = derive_seeds(seed, seeds_per_p) if isinstance(seeds_per_p, int) else [int(s) for s in seeds_per_p]
    if not run_seeds:
        raise ConfigError("p sweep needs at least one seed")
    count = len(run_seeds)
    base = base or SamplerConfig(target_nodes=target_nodes)
    jobs = [(p, run_seed) for p in p_values for run_seed in run_seeds]

    def _run(job: Tuple[float, int]) -> float:
        p, run_seed = job
        cfg = SamplerConfig.model_validate(
            {**base.model_dump(), "method": SamplingMethod.RWFB, "p": p, "seed": run_seed, "target_nodes": target_nodes}
        )
        sub = sample(g, cfg).subgraph
        return normalized_from_histograms(ref_hist, path_histogram(sub, reference.cap), kernel)

    values = parallel_map(_run, jobs)
    points: List[SweepPoint] = []
    for i, p in enumerate(p_values):
        mean, stderr = mean_and_stderr(values[i * count: (i + 1) * count])
        points.append(SweepPoint(float(p), mean, stderr, count))
        logger.info("p=%.2f mean kernel=%.4f ± %.4f", p, mean, stderr)
    return points


def peak_of(points: Sequence[SweepPoint]) -> SweepPoint:
    """Point with the highest mean kernel (lowest p on ties)."""
    return max(points, key=lambda point: (point.mean_kernel, -point.p))


# -- CSV output -------------------------------------------------------------


def _write_frame(frame: pd.DataFrame, path: str) -> None:
    try:
        frame.to_csv(path, index=False, lineterminator="\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}", path=path)


def write_comparison_csv(rows: Sequence[ComparisonRow], path: str) -> None:
    columns = ["row_type", "method", "seed", *METRIC_COLUMNS[:4], "d_avg", "kernel", "best"]
    _write_frame(pd.DataFrame([row.as_record() for row in rows], columns=columns), path)


def write_sweep_csv(points: Sequence[SweepPoint], path: str) -> None:
    frame = pd.DataFrame(
        [(pt.p, pt.mean_kernel, pt.stderr, pt.n_seeds) for pt in points],
        columns=["p", "mean_kernel", "stderr", "n_seeds"],
    )
    _write_frame(frame, path)
