"""
Pieces shared by the subcommands: common flags, manifests and list parsing.
"""
from __future__ import annotations

import argparse
from typing import Any, Callable, Dict, List, Optional, TypeVar

from txnet.models.report import RunManifest
from txnet.models.sampling import SamplerConfig
from txnet.services.sampling_service import target_for_fraction
from txnet.utils.errors import ConfigError
from txnet.utils.helpers import parse_list, rng_identifier, write_text

T = TypeVar("T")


def list_type(cast: Callable[[str], T], name: str) -> Callable[[str], List[T]]:
    """argparse type for comma-separated lists."""

    def _parse(text: str) -> List[T]:
        try:
            values = parse_list(text, cast)
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid {name} list: {text!r}")
        if not values:
            raise argparse.ArgumentTypeError(f"empty {name} list")
        return values

    return _parse


def arguments_of(args: argparse.Namespace) -> Dict[str, Any]:
    """Parsed flags as plain JSON values, without the dispatch hook."""
    return {key: value for key, value in sorted(vars(args).items()) if key != "handler"}


def manifest(command: str, args: argparse.Namespace, **results: Any) -> RunManifest:
    return RunManifest(command=command, rng=rng_identifier(), arguments=arguments_of(args), results=results)


def write_manifest(record: RunManifest, path: str) -> None:
    write_text(path, record.model_dump_json(indent=2) + "\n")


def add_sampler_flags(parser: argparse.ArgumentParser, with_seed: bool = True) -> None:
    size = parser.add_mutually_exclusive_group(required=True)
    size.add_argument("--nodes", type=int, help="Target sample size in nodes")
    size.add_argument("--fraction", type=float, help="Target sample size as a fraction of the graph")
    parser.add_argument("--p", type=float, default=0.3, help="Flying-back probability (RWFB)")
    if with_seed:
        parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--ff-forward-prob", type=float, default=0.7, help="Forest-fire forward burning probability")
    parser.add_argument("--sb-depth", type=int, default=2, help="Snowball depth")
    parser.add_argument(
        "--restart-policy",
        choices=["restart_to_start", "stay_at_current"],
        default="restart_to_start",
        help="Meaning of flying back in RWFB",
    )
    parser.add_argument("--subgraph-mode", choices=["induced", "traversed"], default="induced")


def target_from(args: argparse.Namespace, node_count: int) -> int:
    if args.nodes is not None:
        if args.nodes <= 0:
            raise ConfigError(f"--nodes must be positive, got {args.nodes}")
        return args.nodes
    return target_for_fraction(node_count, args.fraction)


def sampler_config(args: argparse.Namespace, target: int, method: Optional[str] = None, seed: Optional[int] = None) -> SamplerConfig:
    return SamplerConfig(
        method=method or args.method,
        target_nodes=target,
        p=args.p,
        ff_forward_prob=args.ff_forward_prob,
        sb_depth=args.sb_depth,
        seed=args.seed if seed is None else seed,
        restart_policy=args.restart_policy,
        subgraph_mode=args.subgraph_mode,
    )
