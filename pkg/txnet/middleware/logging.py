"""
Command start/finish logging.
"""
from __future__ import annotations

import time
from contextlib import contextmanager
from typing import Any, Dict, Iterator

from txnet.logging_config import get_logger

logger = get_logger(__name__)


@contextmanager
def log_command(name: str, arguments: Dict[str, Any]) -> Iterator[Dict[str, Any]]:
    """
    Log a command invocation with its arguments, outcome and elapsed time.

    The yielded dict collects result fields that are logged on exit.
    """
    start_time = time.perf_counter()
    logger.info("→ %s %s", name, " ".join(f"{k}={v}" for k, v in sorted(arguments.items())))
    outcome: Dict[str, Any] = {}
    try:
        yield outcome
    except Exception as exc:
        duration_ms = (time.perf_counter() - start_time) * 1000
        logger.info("← %s failed: %s (%.2f ms)", name, type(exc).__name__, duration_ms)
        raise
    duration_ms = (time.perf_counter() - start_time) * 1000
    logger.info(
        "← %s ok %s (%.2f ms)",
        name,
        " ".join(f"{k}={v}" for k, v in sorted(outcome.items())),
        duration_ms,
    )
