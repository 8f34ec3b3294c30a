"""
`txnet sample`: draw one sample and write it with its manifest.
"""
from __future__ import annotations

import argparse

from txnet.commands.common import add_sampler_flags, manifest, sampler_config, target_from, write_manifest
from txnet.middleware.logging import log_command
from txnet.models.sampling import SamplingMethod
from txnet.services.ingest_service import read_edge_list, write_edge_list
from txnet.services.sampling_service import sample
from txnet.utils.errors import EXIT_OK


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("sample", help="Sample a subgraph")
    parser.add_argument("--graph", required=True, help="Input edge list")
    parser.add_argument("--method", choices=[m.value for m in SamplingMethod], default="rwfb")
    add_sampler_flags(parser)
    parser.add_argument("--out", required=True, help="Sampled edge list; the manifest goes to <out>.manifest.json")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    with log_command("sample", {"graph": args.graph, "method": args.method, "seed": args.seed}) as outcome:
        graph = read_edge_list(args.graph)
        cfg = sampler_config(args, target_from(args, graph.node_count))
        result = sample(graph, cfg)
        write_edge_list(result.subgraph, args.out)
        record = manifest(
            "sample",
            args,
            config=cfg.model_dump(mode="json"),
            nodes=result.subgraph.node_count,
            edges=result.subgraph.edge_count,
            restarts=result.restarts,
            steps_taken=result.steps_taken,
            traversed_edges=result.traversed_edges,
        )
        write_manifest(record, f"{args.out}.manifest.json")
        outcome.update(nodes=result.subgraph.node_count, restarts=result.restarts)
    return EXIT_OK
