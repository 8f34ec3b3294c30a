"""
`txnet metrics`: full metric report of one graph.
"""
from __future__ import annotations

import argparse

from txnet.commands.common import manifest
from txnet.middleware.logging import log_command
from txnet.models.report import ReportOptions
from txnet.services.ingest_service import read_edge_list
from txnet.services.report_service import build_report, write_report_json, write_series_csv
from txnet.utils.errors import EXIT_OK


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("metrics", help="Compute the complex-network metric report")
    parser.add_argument("--graph", required=True, help="Input edge list")
    parser.add_argument("--report", required=True, help="Report JSON to write")
    mode = parser.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", default=None, help="Exact centralities (fails above the size cap)")
    mode.add_argument("--pivots", type=int, help="Pivot sources for sampled centralities")
    parser.add_argument("--omega-replicates", type=int, default=5)
    parser.add_argument("--richclub-replicates", type=int, default=5)
    parser.add_argument("--path-pairs", type=int, default=10_000, help="Pairs drawn when path length is sampled")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--series", help="Also write the plot series as name,x,y CSV")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    options = ReportOptions(
        exact=args.exact,
        pivots=args.pivots,
        seed=args.seed,
        path_pairs=args.path_pairs,
        omega_replicates=args.omega_replicates,
        richclub_replicates=args.richclub_replicates,
    )
    with log_command("metrics", {"graph": args.graph, "seed": args.seed}) as outcome:
        graph = read_edge_list(args.graph)
        report = build_report(graph, options)
        report.manifest = manifest("metrics", args, options=options.model_dump(mode="json"))
        write_report_json(report, args.report)
        if args.series:
            write_series_csv(report, args.series)
        outcome.update(nodes=report.node_count, edges=report.edge_count)
    return EXIT_OK
