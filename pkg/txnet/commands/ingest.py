"""
`txnet ingest`: transactions to a canonical edge list.
"""
from __future__ import annotations

import argparse
import sys

from txnet.logging_config import get_logger
from txnet.middleware.logging import log_command
from txnet.services.ingest_service import ingest_transactions, write_edge_list
from txnet.utils.errors import EXIT_OK

logger = get_logger(__name__)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("ingest", help="Build the address graph from a transaction file")
    parser.add_argument("--tx-file", required=True, help="Transaction file (JSON lines or CSV)")
    parser.add_argument("--format", choices=["jsonl", "csv"], default="jsonl")
    parser.add_argument("--out", required=True, help="Edge list to write")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    with log_command("ingest", {"tx_file": args.tx_file, "format": args.format}) as outcome:
        graph, stats = ingest_transactions(args.tx_file, args.format)
        write_edge_list(graph, args.out)
        outcome.update(nodes=graph.node_count, edges=graph.edge_count, rejected=stats.transactions_rejected)
    sys.stdout.write(stats.model_dump_json() + "\n")
    return EXIT_OK
