"""
Shared error classes and the CLI error handlers.

Each error carries the process exit code the CLI returns for it:
2 usage/config/data, 3 resource/size, 4 I/O.
"""
from __future__ import annotations

import sys
from typing import Any, Dict, Optional

from txnet.logging_config import get_logger

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3
EXIT_IO = 4


class TxnetError(Exception):
    """Base error with exit-code semantics."""

    def __init__(
        self,
        message: str,
        exit_code: int = EXIT_INTERNAL,
        code: str = "INTERNAL_ERROR",
        details: Optional[Dict[str, Any]] = None,
    ) -> None:
        self.message = message
        self.exit_code = exit_code
        self.code = code
        self.details = details or {}
        super().__init__(message)


class ConfigError(TxnetError):
    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None) -> None:
        super().__init__(message, exit_code=EXIT_USAGE, code="CONFIG_ERROR", details=details)


class InputNotFound(TxnetError):
    def __init__(self, path: str) -> None:
        super().__init__(
            f"input file not found: {path}",
            exit_code=EXIT_USAGE,
            code="INPUT_NOT_FOUND",
            details={"path": path},
        )


class IoError(TxnetError):
    def __init__(self, message: str, path: Optional[str] = None) -> None:
        super().__init__(message, exit_code=EXIT_IO, code="IO_ERROR", details={"path": path})


class FormatError(TxnetError):
    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None) -> None:
        super().__init__(message, exit_code=EXIT_USAGE, code="FORMAT_ERROR", details=details)


class MalformedLine(TxnetError):
    def __init__(self, line_no: int, reason: str) -> None:
        self.line_no = line_no
        super().__init__(
            f"malformed line {line_no}: {reason}",
            exit_code=EXIT_USAGE,
            code="MALFORMED_LINE",
            details={"line_no": line_no},
        )


class TransactionError(TxnetError):
    def __init__(self, message: str, code: str, tx_id: Optional[str] = None) -> None:
        super().__init__(message, exit_code=EXIT_USAGE, code=code, details={"tx_id": tx_id})


class ZeroInputSum(TransactionError):
    def __init__(self, tx_id: Optional[str] = None) -> None:
        super().__init__(f"transaction {tx_id}: inputs sum to zero", "ZERO_INPUT_SUM", tx_id)


class EmptySide(TransactionError):
    def __init__(self, tx_id: Optional[str] = None, side: str = "inputs") -> None:
        super().__init__(f"transaction {tx_id}: no {side}", "EMPTY_SIDE", tx_id)


class NodeOutOfRange(TxnetError):
    def __init__(self, node: int, node_count: int) -> None:
        super().__init__(
            f"node {node} outside 0..{node_count - 1}",
            exit_code=EXIT_USAGE,
            code="NODE_OUT_OF_RANGE",
            details={"node": node, "node_count": node_count},
        )


class EmptyGraph(TxnetError):
    def __init__(self, message: str = "graph has no nodes") -> None:
        super().__init__(message, exit_code=EXIT_USAGE, code="EMPTY_GRAPH")


class TargetTooLarge(TxnetError):
    def __init__(self, target: int, node_count: int) -> None:
        super().__init__(
            f"target of {target} nodes exceeds graph size {node_count}",
            exit_code=EXIT_USAGE,
            code="TARGET_TOO_LARGE",
            details={"target": target, "node_count": node_count},
        )


class InsufficientData(TxnetError):
    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None) -> None:
        super().__init__(message, exit_code=EXIT_USAGE, code="INSUFFICIENT_DATA", details=details)


class DegenerateVariance(TxnetError):
    def __init__(self, message: str = "zero variance in endpoint degrees") -> None:
        super().__init__(message, exit_code=EXIT_USAGE, code="DEGENERATE_VARIANCE")


class DisconnectedInput(TxnetError):
    def __init__(self, message: str = "graph has unreachable node pairs") -> None:
        super().__init__(message, exit_code=EXIT_USAGE, code="DISCONNECTED_INPUT")


class TooManyEdges(TxnetError):
    def __init__(self, n: int, m: int) -> None:
        super().__init__(
            f"{m} edges do not fit a simple graph on {n} nodes",
            exit_code=EXIT_USAGE,
            code="TOO_MANY_EDGES",
            details={"n": n, "m": m},
        )


class InvalidDegree(TxnetError):
    def __init__(self, message: str) -> None:
        super().__init__(message, exit_code=EXIT_USAGE, code="INVALID_DEGREE")


class EmptySample(TxnetError):
    def __init__(self) -> None:
        super().__init__("K-S statistic needs two non-empty samples", exit_code=EXIT_USAGE, code="EMPTY_SAMPLE")


class GraphTooLargeForExact(TxnetError):
    def __init__(self, node_count: int, cap: int) -> None:
        super().__init__(
            f"exact mode allows at most {cap} nodes, graph has {node_count}; "
            "use pivot sampling (--pivots K) instead",
            exit_code=EXIT_RESOURCE,
            code="GRAPH_TOO_LARGE_FOR_EXACT",
            details={"node_count": node_count, "cap": cap},
        )


class GraphTooLarge(TxnetError):
    def __init__(self, node_count: int, cap: int) -> None:
        super().__init__(
            f"graph kernel allows at most {cap} nodes, graph has {node_count}; "
            "pre-sample the graph first",
            exit_code=EXIT_RESOURCE,
            code="GRAPH_TOO_LARGE",
            details={"node_count": node_count, "cap": cap},
        )


def cli_error_handler(exc: TxnetError) -> int:
    logger.error("%s: %s", exc.code, exc.message, extra={"details": exc.details})
    print(f"error[{exc.code}]: {exc.message}", file=sys.stderr)
    return exc.exit_code


def generic_error_handler(exc: BaseException) -> int:
    logger.exception("Unhandled exception: %s", exc)
    print(f"error[INTERNAL_ERROR]: {exc}", file=sys.stderr)
    return EXIT_INTERNAL
