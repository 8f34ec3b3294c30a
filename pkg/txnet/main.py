"""
Command-line entry point.
"""
from __future__ import annotations

import argparse
import os
import sys
from typing import List, Optional

from pydantic import ValidationError

from txnet import __version__
from txnet.commands import compare, ingest, metrics, psweep, sample
from txnet.logging_config import get_logger, setup_logging
from txnet.utils.errors import ConfigError, TxnetError, cli_error_handler, generic_error_handler

logger = get_logger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="txnet",
        description="Transaction-graph construction, sampling and complex-network analysis",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="Overrides LOG_LEVEL")
    parser.add_argument("--threads", type=int, help="Worker threads (overrides TXNET_THREADS)")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in (ingest, sample, metrics, compare, psweep):
        command.register(subparsers)
    return parser


def _config_error(exc: ValidationError) -> ConfigError:
    problems = "; ".join(
        f"{'.'.join(str(part) for part in err['loc']) or 'value'}: {err['msg']}" for err in exc.errors()
    )
    return ConfigError(f"invalid configuration: {problems}")


def main(argv: Optional[List[str]] = None) -> int:
    """Run one subcommand and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 for --help/--version
        return int(exc.code or 0)

    setup_logging(log_level=args.log_level)
    if args.threads is not None:
        if args.threads < 1:
            return cli_error_handler(ConfigError(f"--threads must be >= 1, got {args.threads}"))
        os.environ["TXNET_THREADS"] = str(args.threads)

    try:
        return args.handler(args)
    except TxnetError as exc:
        return cli_error_handler(exc)
    except ValidationError as exc:
        return cli_error_handler(_config_error(exc))
    except Exception as exc:
        return generic_error_handler(exc)


def run() -> None:
    sys.exit(main())
