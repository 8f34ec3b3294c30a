"""
Complex-network metrics over WeightedDigraph.

Distances are unweighted hop counts. Clustering, path length and rich-club
run on the undirected projection; centralities, assortativity and the
nearest-neighbour curve stay directed. All-pairs work is split into source
batches whose partial results are reduced in batch order, so results do not
depend on thread scheduling.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Literal, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.sparse as sp
from scipy.optimize import minimize_scalar
from scipy.sparse import csgraph
from scipy.special import zeta

from txnet.config import get_default_pivots, get_exact_node_cap
from txnet.logging_config import get_logger
from txnet.models.graph import WeightedDigraph
from txnet.models.report import DegreeDistribution, DegreeMode
from txnet.services.graph_service import degrees, undirected_projection
from txnet.services.reference_service import (
    degree_preserving_rewire,
    er_random,
    lattice_degree_for,
    ring_lattice,
)
from txnet.utils.errors import (
    DegenerateVariance,
    DisconnectedInput,
    EmptyGraph,
    GraphTooLargeForExact,
    InsufficientData,
)
from txnet.utils.helpers import derive_seeds, make_rng, mean_and_stderr, parallel_map

logger = get_logger(__name__)

ClosenessVariant = Literal["standard", "wasserman_faust"]
Series = List[Tuple[float, float]]

# Upper bound on dense (batch x N) work arrays.
BATCH_CELLS = 4_000_000
MIN_TAIL = 50


@dataclass(frozen=True)
class Approximation:
    """
    Exact or pivot-sampled evaluation of all-sources algorithms.

    ``sources`` None means every node; a pivot run with sources >= N is the
    exact computation.
    """

    sources: Optional[int] = None
    seed: int = 0

    @property
    def exact(self) -> bool:
        return self.sources is None

    def pick_sources(self, n: int) -> Tuple[np.ndarray, float]:
        if self.sources is None or self.sources >= n:
            return np.arange(n, dtype=np.int64), 1.0
        picked = make_rng(self.seed).choice(n, size=self.sources, replace=False)
        return np.sort(picked.astype(np.int64)), n / self.sources


EXACT = Approximation()


def _batches(sources: np.ndarray, n: int) -> List[np.ndarray]:
    size = max(1, BATCH_CELLS // max(n, 1))
    return [sources[i: i + size] for i in range(0, sources.size, size)]


def _check_exact(n: int, approx: Approximation) -> None:
    cap = get_exact_node_cap()
    if approx.exact and n > cap:
        raise GraphTooLargeForExact(n, cap)


def choose_approximation(
    n: int, exact: Optional[bool] = None, pivots: Optional[int] = None, seed: int = 0
) -> Approximation:
    """
    Centrality mode for an n-node graph.

    exact=True insists on exact mode (GraphTooLargeForExact above the cap);
    an explicit pivot count wins otherwise; by default graphs within the cap
    run exact and larger ones use TXNET_DEFAULT_PIVOTS pivots.
    """
    if exact:
        _check_exact(n, EXACT)
        return EXACT
    if pivots is not None:
        return Approximation(sources=pivots, seed=seed)
    if exact is None and n <= get_exact_node_cap():
        return EXACT
    return Approximation(sources=get_default_pivots(), seed=seed)


# -- degree distribution and power-law fit ----------------------------------


def degree_distribution(g: WeightedDigraph, mode: DegreeMode = "total") -> DegreeDistribution:
    """Empirical P(k) over all nodes, zero-degree nodes included."""
    if g.node_count == 0:
        raise EmptyGraph()
    support, counts = np.unique(degrees(g, mode), return_counts=True)
    return DegreeDistribution(
        mode=mode,
        support=support.astype(int).tolist(),
        pmf=(counts / g.node_count).tolist(),
        counts=counts.astype(int).tolist(),
    )


class PowerLawFit(NamedTuple):
    alpha: float
    xmin: int
    ks_gof: float
    tail_size: int


def _fit_tail(values: np.ndarray, counts: np.ndarray, xmin: int) -> Tuple[float, float]:
    n_tail = counts.sum()
    log_sum = float(np.dot(counts, np.log(values)))

    def negloglik(alpha: float) -> float:
        return n_tail * np.log(zeta(alpha, xmin)) + alpha * log_sum

    res = minimize_scalar(negloglik, bounds=(1.0 + 1e-6, 20.0), method="bounded", options={"xatol": 1e-7})
    alpha = float(res.x)
    fitted_cdf = 1.0 - zeta(alpha, values + 1.0) / zeta(alpha, xmin)
    empirical_cdf = np.cumsum(counts) / n_tail
    return alpha, float(np.max(np.abs(empirical_cdf - fitted_cdf)))


def fit_power_law(
    data: Union[DegreeDistribution, Sequence[int], np.ndarray],
    min_tail: int = MIN_TAIL,
    max_candidates: int = 50,
) -> PowerLawFit:
    """
    Discrete power-law MLE with xmin chosen by K-S minimization.

    Candidates are the smallest observed values with at least ``min_tail``
    observations at or above them and more than one distinct tail value.
    """
    if isinstance(data, DegreeDistribution):
        values = np.asarray(data.support, dtype=np.float64)
        counts = np.asarray(data.counts, dtype=np.float64)
    else:
        arr = np.asarray(data, dtype=np.float64).ravel()
        values, counts = np.unique(arr, return_counts=True)
        counts = counts.astype(np.float64)
    keep = values >= 1
    values, counts = values[keep], counts[keep]
    if values.size < 2:
        raise InsufficientData("power-law fit needs at least two distinct positive values")

    tail_counts = np.cumsum(counts[::-1])[::-1]
    eligible = np.flatnonzero((tail_counts >= min_tail) & (np.arange(values.size) < values.size - 1))
    if eligible.size == 0:
        raise InsufficientData(
            f"power-law fit needs {min_tail} observations at or above xmin",
            details={"observations": int(counts.sum())},
        )

    best: Optional[PowerLawFit] = None
    for idx in eligible[:max_candidates].tolist():
        xmin = int(values[idx])
        alpha, ks = _fit_tail(values[idx:], counts[idx:], xmin)
        if best is None or ks < best.ks_gof:
            best = PowerLawFit(alpha, xmin, ks, int(tail_counts[idx]))
    logger.debug("Power-law fit alpha=%.4f xmin=%d D=%.4f", best.alpha, best.xmin, best.ks_gof)
    return best


# -- clustering, components, path length -------------------------------------


def _undirected_adjacency(g: WeightedDigraph) -> sp.csr_matrix:
    return undirected_projection(g).adjacency


def clustering(g: WeightedDigraph) -> Tuple[np.ndarray, float]:
    """Local clustering on the undirected projection and its mean over all N nodes."""
    a = _undirected_adjacency(g)
    deg = np.asarray(a.sum(axis=1)).ravel()
    triangles = np.asarray((a @ a).multiply(a).sum(axis=1)).ravel() / 2.0
    pairs = deg * (deg - 1) / 2.0
    local = np.zeros(g.node_count, dtype=np.float64)
    ok = deg >= 2
    local[ok] = triangles[ok] / pairs[ok]
    mean = float(local.mean()) if g.node_count else 0.0
    return local, mean


@dataclass(frozen=True)
class ComponentSummary:
    scc_count: int
    largest_scc_size: int
    wcc_count: int
    largest_wcc_size: int
    scc_membership: np.ndarray
    wcc_membership: np.ndarray


def _canonical_labels(labels: np.ndarray) -> np.ndarray:
    """Renumber components in order of their smallest member id."""
    if labels.size == 0:
        return labels.astype(np.int64)
    _, first = np.unique(labels, return_index=True)
    order = np.argsort(first)
    remap = np.empty(order.size, dtype=np.int64)
    remap[np.unique(labels)[order]] = np.arange(order.size)
    return remap[labels]


def connected_components(g: WeightedDigraph) -> ComponentSummary:
    """Strong components of the digraph and weak components of its projection."""
    n = g.node_count
    if n == 0:
        empty = np.empty(0, dtype=np.int64)
        return ComponentSummary(0, 0, 0, 0, empty, empty)
    _, strong = csgraph.connected_components(g.adjacency, directed=True, connection="strong")
    _, weak = csgraph.connected_components(g.adjacency, directed=True, connection="weak")
    strong, weak = _canonical_labels(strong), _canonical_labels(weak)
    scc_sizes, wcc_sizes = np.bincount(strong), np.bincount(weak)
    return ComponentSummary(
        scc_count=int(scc_sizes.size),
        largest_scc_size=int(scc_sizes.max()),
        wcc_count=int(wcc_sizes.size),
        largest_wcc_size=int(wcc_sizes.max()),
        scc_membership=strong,
        wcc_membership=weak,
    )


def largest_wcc(g: WeightedDigraph) -> WeightedDigraph:
    """Induced subgraph on the largest weak component (lowest id wins ties)."""
    if g.node_count == 0:
        return g
    weak = connected_components(g).wcc_membership
    biggest = int(np.argmax(np.bincount(weak)))
    return g.subgraph(np.flatnonzero(weak == biggest))


@dataclass(frozen=True)
class PathLength:
    value: float
    stderr: float
    exact: bool
    nodes: int
    pairs: int


def avg_shortest_path(
    g: WeightedDigraph,
    mode: Literal["exact", "sampled"] = "exact",
    pairs: int = 10_000,
    seed: int = 0,
    restrict_to_largest_wcc: bool = True,
) -> PathLength:
    """
    Mean hop distance over ordered reachable pairs of the undirected projection.

    By default only the largest weak component is measured. Sampled mode
    draws ``pairs`` ordered pairs uniformly and reports the standard error.
    """
    target = largest_wcc(undirected_projection(g)) if restrict_to_largest_wcc else undirected_projection(g)
    n = target.node_count
    if n < 2:
        raise InsufficientData("average path length needs at least two connected nodes", details={"nodes": n})
    a = target.adjacency

    if mode == "exact":
        _check_exact(n, EXACT)

        def _partial(batch: np.ndarray) -> Tuple[float, int, bool]:
            dist = csgraph.shortest_path(a, method="D", directed=False, unweighted=True, indices=batch)
            finite = np.isfinite(dist)
            return float(dist[finite].sum()), int(finite.sum() - batch.size), bool((~finite).any())

        total, reached, unreachable = 0.0, 0, False
        for part_sum, part_count, part_gap in parallel_map(_partial, _batches(np.arange(n), n)):
            total += part_sum
            reached += part_count
            unreachable = unreachable or part_gap
        if unreachable and not restrict_to_largest_wcc:
            raise DisconnectedInput()
        value = total / reached if reached else 0.0
        logger.info("Average shortest path L=%.4f over %d nodes (exact)", value, n)
        return PathLength(value, 0.0, True, n, reached)

    rng = make_rng(seed)
    u = rng.integers(0, n, size=pairs)
    v = rng.integers(0, n - 1, size=pairs)
    v = v + (v >= u)
    sources, inverse = np.unique(u, return_inverse=True)
    samples = np.empty(pairs, dtype=np.float64)
    for start in range(0, sources.size, max(1, BATCH_CELLS // n)):
        batch = sources[start: start + max(1, BATCH_CELLS // n)]
        dist = csgraph.shortest_path(a, method="D", directed=False, unweighted=True, indices=batch)
        in_batch = (inverse >= start) & (inverse < start + batch.size)
        samples[in_batch] = dist[inverse[in_batch] - start, v[in_batch]]
    if not np.all(np.isfinite(samples)):
        if not restrict_to_largest_wcc:
            raise DisconnectedInput()
        samples = samples[np.isfinite(samples)]
    value, stderr = mean_and_stderr(samples)
    logger.info("Average shortest path L=%.4f ± %.4f from %d sampled pairs", value, stderr, samples.size)
    return PathLength(value, stderr, False, n, int(samples.size))


def _path_length_auto(g: WeightedDigraph, seed: int, pairs: int = 10_000) -> PathLength:
    n = largest_wcc(undirected_projection(g)).node_count
    mode = "exact" if n <= get_exact_node_cap() else "sampled"
    return avg_shortest_path(g, mode=mode, pairs=pairs, seed=seed)


@dataclass(frozen=True)
class SmallWorld:
    omega: float
    L: float
    C: float
    L_rand_mean: float
    C_latt_mean: float
    lattice_degree: int
    replicates: int
    nodes: int
    edges: int


def small_world_omega(g: WeightedDigraph, replicates: int = 5, seed: int = 0) -> SmallWorld:
    """
    omega = L_rand / L - C / C_latt on the largest weak component.

    Null models match its node and undirected edge counts; omega is not clamped.
    """
    core = largest_wcc(undirected_projection(g))
    n, m = core.node_count, core.edge_count // 2
    path = _path_length_auto(core, seed)
    _, c_value = clustering(core)
    k_latt = lattice_degree_for(n, m)
    seeds = derive_seeds(seed, 2 * replicates)

    def _rand_length(rep_seed: int) -> float:
        return _path_length_auto(er_random(n, m, rep_seed), rep_seed).value

    def _latt_clustering(rep_seed: int) -> float:
        return clustering(ring_lattice(n, k_latt, rep_seed))[1]

    l_rand = float(np.mean(parallel_map(_rand_length, seeds[:replicates])))
    c_latt = float(np.mean(parallel_map(_latt_clustering, seeds[replicates:])))
    if c_latt == 0.0:
        raise InsufficientData("equivalent lattice has zero clustering", details={"lattice_degree": k_latt})
    omega = l_rand / path.value - c_value / c_latt
    logger.info(
        "Small-world omega=%.4f (L=%.4f L_rand=%.4f C=%.4f C_latt=%.4f k_latt=%d)",
        omega, path.value, l_rand, c_value, c_latt, k_latt,
    )
    return SmallWorld(omega, path.value, c_value, l_rand, c_latt, k_latt, replicates, n, m)


# -- centrality ---------------------------------------------------------------


def closeness(
    g: WeightedDigraph,
    variant: ClosenessVariant = "standard",
    approx: Approximation = EXACT,
) -> np.ndarray:
    """
    Closeness from incoming distances d(j, i).

    standard: (n-1) / sum d;  wasserman_faust: (n-1)^2 / ((N-1) sum d),
    with n the number of nodes that reach i (i included). Nodes nothing
    reaches score 0.
    """
    n = g.node_count
    _check_exact(n, approx)
    if n == 0:
        return np.empty(0, dtype=np.float64)
    sources, scale = approx.pick_sources(n)
    a = g.adjacency

    def _partial(batch: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        dist = csgraph.shortest_path(a, method="D", directed=True, unweighted=True, indices=batch)
        finite = np.isfinite(dist)
        finite[np.arange(batch.size), batch] = False
        return np.where(finite, dist, 0.0).sum(axis=0), finite.sum(axis=0)

    dist_sum = np.zeros(n, dtype=np.float64)
    reach = np.zeros(n, dtype=np.float64)
    for part_sum, part_reach in parallel_map(_partial, _batches(sources, n)):
        dist_sum += part_sum
        reach += part_reach

    out = np.zeros(n, dtype=np.float64)
    ok = dist_sum > 0
    if variant == "standard":
        out[ok] = reach[ok] / dist_sum[ok]
    elif variant == "wasserman_faust":
        if n > 1:
            out[ok] = reach[ok] ** 2 * scale / ((n - 1) * dist_sum[ok])
    else:
        raise ValueError(f"unknown closeness variant: {variant}")
    return out


def _brandes_batch(a: sp.csr_matrix, a_t: sp.csr_matrix, batch: np.ndarray) -> np.ndarray:
    """Dependency sums of one source batch, level-synchronous over dense rows."""
    b, n = batch.size, a.shape[0]
    rows = np.arange(b)
    sigma = np.zeros((b, n), dtype=np.float64)
    sigma[rows, batch] = 1.0
    dist = np.full((b, n), -1, dtype=np.int64)
    dist[rows, batch] = 0
    frontier = sigma.copy()
    depth = 0
    while True:
        reached = np.asarray(a_t @ frontier.T).T
        reached[dist >= 0] = 0.0
        new = reached > 0
        if not new.any():
            break
        depth += 1
        dist[new] = depth
        sigma[new] = reached[new]
        frontier = np.where(new, reached, 0.0)

    delta = np.zeros((b, n), dtype=np.float64)
    for level in range(depth, 0, -1):
        at_level = dist == level
        coeff = np.zeros((b, n), dtype=np.float64)
        coeff[at_level] = (1.0 + delta[at_level]) / sigma[at_level]
        pulled = np.asarray(a @ coeff.T).T
        parents = dist == level - 1
        delta[parents] += sigma[parents] * pulled[parents]
    delta[rows, batch] = 0.0
    return delta.sum(axis=0)


def betweenness(g: WeightedDigraph, approx: Approximation = EXACT) -> np.ndarray:
    """
    Unnormalized directed betweenness over ordered pairs (hop distances).

    Pivot mode scales the partial sums by N / sources.
    """
    n = g.node_count
    _check_exact(n, approx)
    if n == 0:
        return np.empty(0, dtype=np.float64)
    sources, scale = approx.pick_sources(n)
    a = g.adjacency
    a_t = a.T.tocsr()
    total = np.zeros(n, dtype=np.float64)
    for part in parallel_map(lambda batch: _brandes_batch(a, a_t, batch), _batches(sources, n)):
        total += part
    return total * scale if scale != 1.0 else total


# -- mixing -------------------------------------------------------------------


def pearson_assortativity(g: WeightedDigraph) -> float:
    """
    Degree correlation over edges: source out-degree against target in-degree,
    in the symmetrized Pearson form.
    """
    if g.edge_count < 2:
        raise DegenerateVariance("assortativity needs at least two edges")
    k_i = g.out_degrees()[g.edge_sources].astype(np.float64)
    k_j = g.in_degrees()[g.out_indices].astype(np.float64)
    mean_half = np.mean(0.5 * (k_i + k_j))
    numerator = np.mean(k_i * k_j) - mean_half**2
    denominator = np.mean(0.5 * (k_i**2 + k_j**2)) - mean_half**2
    if abs(denominator) <= 1e-12 * max(1.0, mean_half**2):
        raise DegenerateVariance()
    return float(np.clip(numerator / denominator, -1.0, 1.0))


@dataclass(frozen=True)
class KnnCurve:
    as_printed: Series
    conventional: Series


def knn_in_curve(g: WeightedDigraph) -> KnnCurve:
    """
    Average in-degree of out-neighbours against out-degree.

    ``as_printed`` sums k_i^cn-out / N over nodes of each out-degree and
    multiplies by P(k_out); ``conventional`` is the plain per-class mean.
    Nodes without out-edges are left out. Adjacency is 0/1.
    """
    n = g.node_count
    if n == 0:
        return KnnCurve([], [])
    k_out = g.out_degrees()
    k_in = g.in_degrees().astype(np.float64)
    has_out = k_out > 0
    neighbour_in = np.asarray(g.adjacency @ k_in).ravel()
    knn = np.zeros(n, dtype=np.float64)
    knn[has_out] = neighbour_in[has_out] / k_out[has_out]

    printed: Series = []
    plain: Series = []
    for k in np.unique(k_out[has_out]).tolist():
        members = k_out == k
        p_k = members.sum() / n
        printed.append((float(k), float(knn[members].sum() / n * p_k)))
        plain.append((float(k), float(knn[members].mean())))
    return KnnCurve(printed, plain)


# -- rich club ------------------------------------------------------------------


def _rich_club_counts(projection: WeightedDigraph) -> Tuple[np.ndarray, np.ndarray]:
    deg = projection.out_degrees()
    src, dst = projection.edge_sources, projection.out_indices
    upper = src < dst
    edge_floor = np.minimum(deg[src[upper]], deg[dst[upper]])
    return np.sort(deg), np.sort(edge_floor)


def _phi(sorted_deg: np.ndarray, sorted_floor: np.ndarray, k_values: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    n_above = sorted_deg.size - np.searchsorted(sorted_deg, k_values, side="right")
    e_above = sorted_floor.size - np.searchsorted(sorted_floor, k_values, side="right")
    defined = n_above >= 2
    phi = np.zeros(k_values.size, dtype=np.float64)
    phi[defined] = 2.0 * e_above[defined] / (n_above[defined] * (n_above[defined] - 1.0))
    return phi, defined


def _default_k_values(projection: WeightedDigraph) -> np.ndarray:
    top = int(projection.out_degrees().max()) if projection.node_count else 0
    return np.arange(0, max(top, 0), dtype=np.int64)


def rich_club(g: WeightedDigraph, k_values: Optional[Sequence[int]] = None) -> Series:
    """phi(k) on the undirected projection; points with fewer than two rich nodes are omitted."""
    projection = undirected_projection(g)
    ks = _default_k_values(projection) if k_values is None else np.asarray(k_values, dtype=np.int64)
    phi, defined = _phi(*_rich_club_counts(projection), ks)
    return [(float(k), float(v)) for k, v, ok in zip(ks.tolist(), phi.tolist(), defined.tolist()) if ok]


@dataclass(frozen=True)
class RichClub:
    phi: Series
    phi_rand: Series
    phi_norm: Series
    ordered_k: List[float]


def normalized_rich_club(
    g: WeightedDigraph,
    k_values: Optional[Sequence[int]] = None,
    replicates: int = 5,
    seed: int = 0,
    attempts_per_edge: int = 100,
) -> RichClub:
    """
    phi(k) / phi_rand(k), phi_rand averaged over degree-preserving rewirings
    of the projection. Points with phi_rand = 0 are omitted; ``ordered_k``
    lists the k with phi_norm > 1.
    """
    projection = undirected_projection(g)
    ks = _default_k_values(projection) if k_values is None else np.asarray(k_values, dtype=np.int64)
    phi, defined = _phi(*_rich_club_counts(projection), ks)
    attempts = attempts_per_edge * (projection.edge_count // 2)

    def _replicate(rep_seed: int) -> np.ndarray:
        rewired = degree_preserving_rewire(projection, attempts=attempts, seed=rep_seed)
        return _phi(*_rich_club_counts(rewired), ks)[0]

    phi_rand = np.mean(parallel_map(_replicate, derive_seeds(seed, replicates)), axis=0) if replicates else np.zeros(ks.size)
    keep = defined & (phi_rand > 0)
    norm = np.zeros(ks.size, dtype=np.float64)
    norm[keep] = phi[keep] / phi_rand[keep]
    pick = lambda values, mask: [(float(k), float(v)) for k, v, ok in zip(ks.tolist(), values.tolist(), mask.tolist()) if ok]
    ordered = [float(k) for k, v, ok in zip(ks.tolist(), norm.tolist(), keep.tolist()) if ok and v > 1.0]
    return RichClub(pick(phi, defined), pick(phi_rand, defined), pick(norm, keep), ordered)


def mean_by_degree(values: np.ndarray, degree: np.ndarray) -> Series:
    """Mean of a per-node metric for each realized degree value."""
    series: Series = []
    for k in np.unique(degree).tolist():
        series.append((float(k), float(values[degree == k].mean())))
    return series
