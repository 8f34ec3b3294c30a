"""
`txnet compare`: K-S fidelity (and optionally kernel) table across methods and seeds.
"""
from __future__ import annotations

import argparse

from txnet.commands.common import (
    add_sampler_flags,
    list_type,
    manifest,
    sampler_config,
    target_from,
    write_manifest,
)
from txnet.middleware.logging import log_command
from txnet.models.sampling import SamplingMethod
from txnet.services.evaluation_service import BaseKernel, KernelSpec, compare_methods, write_comparison_csv
from txnet.services.ingest_service import read_edge_list
from txnet.services.metrics_service import choose_approximation
from txnet.utils.errors import EXIT_OK, ConfigError


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("compare", help="Score sampling methods against the full graph")
    parser.add_argument("--graph", required=True, help="Input edge list")
    parser.add_argument(
        "--methods",
        type=list_type(SamplingMethod, "method"),
        default=list(SamplingMethod),
        help="Comma-separated methods (default: all six)",
    )
    parser.add_argument("--seeds", type=list_type(int, "seed"), default=[0], help="Comma-separated seeds")
    add_sampler_flags(parser, with_seed=False)
    parser.add_argument("--kernel", action="store_true", help="Add the normalized shortest-path kernel column")
    parser.add_argument("--gaussian", type=float, metavar="SIGMA", help="Gaussian base kernels instead of delta")
    parser.add_argument("--pivots", type=int, help="Pivot sources for centralities of the full graph")
    parser.add_argument("--out", required=True, help="CSV to write; the manifest goes to <out>.manifest.json")
    parser.set_defaults(handler=run)


def kernel_spec(args: argparse.Namespace) -> KernelSpec:
    if args.gaussian is None:
        return KernelSpec()
    if args.gaussian <= 0:
        raise ConfigError(f"--gaussian needs a positive sigma, got {args.gaussian}")
    base = BaseKernel("gaussian", args.gaussian)
    return KernelSpec(vertex=base, length=base)


def run(args: argparse.Namespace) -> int:
    with log_command("compare", {"graph": args.graph, "methods": ",".join(m.value for m in args.methods)}) as outcome:
        graph = read_edge_list(args.graph)
        target = target_from(args, graph.node_count)
        base = sampler_config(args, target, method=SamplingMethod.RWFB, seed=0)
        approx = choose_approximation(graph.node_count, pivots=args.pivots)
        rows = compare_methods(
            graph,
            args.methods,
            target,
            args.seeds,
            base=base,
            approx=approx,
            kernel=kernel_spec(args) if args.kernel or args.gaussian is not None else None,
        )
        write_comparison_csv(rows, args.out)
        means = {row.method: row.score.model_dump(mode="json") for row in rows if row.row_type == "mean"}
        write_manifest(manifest("compare", args, target_nodes=target, means=means), f"{args.out}.manifest.json")
        outcome.update(rows=len(rows))
    return EXIT_OK
