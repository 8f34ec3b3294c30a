"""
Assembly of the full MetricReport and its plot-series CSV export.
"""
from __future__ import annotations

from typing import Callable, Optional, TypeVar

import pandas as pd

from txnet.config import get_exact_node_cap
from txnet.logging_config import get_logger
from txnet.models.graph import WeightedDigraph
from txnet.models.report import MetricReport, ReportOptions
from txnet.services import metrics_service as metrics
from txnet.utils.errors import (
    DegenerateVariance,
    DisconnectedInput,
    EmptyGraph,
    InsufficientData,
    InvalidDegree,
    IoError,
    TooManyEdges,
)
from txnet.utils.helpers import derive_seeds, write_text

logger = get_logger(__name__)

T = TypeVar("T")

# Metrics that may be undefined for a particular graph; anything else propagates.
UNDEFINED_METRIC_ERRORS = (
    InsufficientData,
    DegenerateVariance,
    DisconnectedInput,
    InvalidDegree,
    TooManyEdges,
)


def _attempt(report: MetricReport, name: str, compute: Callable[[], T]) -> Optional[T]:
    try:
        return compute()
    except UNDEFINED_METRIC_ERRORS as exc:
        report.flags[f"{name}_undefined"] = True
        report.notes[f"{name}_undefined"] = exc.message
        logger.info("%s undefined: %s", name, exc.message)
        return None


def build_report(g: WeightedDigraph, options: Optional[ReportOptions] = None) -> MetricReport:
    """
    Every whole-graph, per-node and series metric of one graph.

    Metrics that are undefined for this graph are stored as null with a
    ``<name>_undefined`` flag; size-cap violations still raise.
    """
    options = options or ReportOptions()
    if g.node_count == 0:
        raise EmptyGraph()
    approx = metrics.choose_approximation(g.node_count, options.exact, options.pivots, options.seed)
    omega_seed, path_seed, club_seed = derive_seeds(options.seed, 3)

    report = MetricReport(node_count=g.node_count, edge_count=g.edge_count)
    scalars = report.scalars
    scalars["self_loops"] = float(g.self_loop_count)

    in_deg, out_deg, total_deg = g.in_degrees(), g.out_degrees(), g.total_degrees()
    report.per_node["in_degree"] = in_deg.astype(float).tolist()
    report.per_node["out_degree"] = out_deg.astype(float).tolist()
    report.per_node["total_degree"] = total_deg.astype(float).tolist()
    for mode in ("total", "in", "out"):
        dist = metrics.degree_distribution(g, mode)
        fit = _attempt(report, f"powerlaw_{mode}", lambda: metrics.fit_power_law(dist))
        if fit is not None:
            dist = dist.model_copy(update={"fitted_alpha": fit.alpha, "fitted_xmin": fit.xmin, "ks_gof": fit.ks_gof})
        report.distributions[mode] = dist
        report.series[f"degree_pmf_{mode}"] = [(float(k), float(p)) for k, p in zip(dist.support, dist.pmf)]
        scalars[f"powerlaw_alpha_{mode}"] = fit.alpha if fit else None

    local, c_mean = metrics.clustering(g)
    scalars["clustering"] = c_mean
    report.per_node["clustering"] = local.tolist()

    components = metrics.connected_components(g)
    scalars["scc_count"] = float(components.scc_count)
    scalars["largest_scc_size"] = float(components.largest_scc_size)
    scalars["wcc_count"] = float(components.wcc_count)
    scalars["largest_wcc_size"] = float(components.largest_wcc_size)

    path_mode = "exact" if components.largest_wcc_size <= get_exact_node_cap() else "sampled"
    path = _attempt(
        report, "avg_shortest_path",
        lambda: metrics.avg_shortest_path(g, mode=path_mode, pairs=options.path_pairs, seed=path_seed),
    )
    scalars["avg_shortest_path"] = path.value if path else None
    scalars["avg_shortest_path_stderr"] = path.stderr if path else None
    report.flags["path_length_sampled"] = path is not None and not path.exact
    report.notes["path_length_scope"] = "largest weakly connected component, undirected hops"

    world = _attempt(
        report, "omega", lambda: metrics.small_world_omega(g, options.omega_replicates, omega_seed)
    )
    scalars["omega"] = world.omega if world else None
    scalars["omega_L_rand"] = world.L_rand_mean if world else None
    scalars["omega_C_latt"] = world.C_latt_mean if world else None
    scalars["omega_lattice_degree"] = float(world.lattice_degree) if world else None
    report.flags["omega_in_unit_range"] = world is not None and -1.0 <= world.omega <= 1.0

    rho = _attempt(report, "assortativity", lambda: metrics.pearson_assortativity(g))
    scalars["assortativity"] = rho

    wf = metrics.closeness(g, "wasserman_faust", approx)
    report.per_node["closeness"] = metrics.closeness(g, "standard", approx).tolist()
    report.per_node["wf_closeness"] = wf.tolist()
    between = metrics.betweenness(g, approx)
    report.per_node["betweenness"] = between.tolist()
    report.flags["centrality_pivot"] = not approx.exact
    report.notes["centrality_mode"] = "exact" if approx.exact else f"pivot sources={approx.sources} seed={approx.seed}"
    report.series["closeness_vs_degree"] = metrics.mean_by_degree(wf, total_deg)
    report.series["betweenness_vs_degree"] = metrics.mean_by_degree(between, total_deg)

    knn = metrics.knn_in_curve(g)
    report.series["knn_in"] = knn.as_printed
    report.series["knn_in_conventional"] = knn.conventional

    club = metrics.normalized_rich_club(
        g,
        replicates=options.richclub_replicates,
        seed=club_seed,
        attempts_per_edge=options.richclub_attempts_per_edge,
    )
    report.series["rich_club"] = club.phi
    report.series["rich_club_random"] = club.phi_rand
    report.series["rich_club_normalized"] = club.phi_norm
    report.flags["rich_club_ordering"] = bool(club.ordered_k)

    logger.info(
        "Report for %r: C=%.4f L=%s omega=%s rho=%s",
        g, c_mean, scalars["avg_shortest_path"], scalars["omega"], rho,
    )
    return report


def series_frame(report: MetricReport) -> pd.DataFrame:
    """Long-format name,x,y table of every plot series, in name order."""
    records = [
        (name, x, y)
        for name in sorted(report.series)
        for x, y in report.series[name]
    ]
    return pd.DataFrame(records, columns=["name", "x", "y"])


def write_series_csv(report: MetricReport, path: str) -> None:
    try:
        series_frame(report).to_csv(path, index=False, lineterminator="\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}", path=path)


def write_report_json(report: MetricReport, path: str) -> None:
    write_text(path, report.model_dump_json(indent=2) + "\n")
