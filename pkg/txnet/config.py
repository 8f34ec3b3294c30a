"""
Runtime configuration read from the environment (and an optional .env file).
"""
from __future__ import annotations

import os

from dotenv import load_dotenv

from txnet.logging_config import get_logger
from txnet.utils.errors import ConfigError

load_dotenv()
logger = get_logger(__name__)

ENVIRONMENT = os.getenv("ENVIRONMENT", "production").lower()
LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO").upper()

# Smallest currency units per whole unit (satoshi per BTC).
AMOUNT_SCALE = 10**8

# Weights are written with this many significant digits.
WEIGHT_DIGITS = 12

RNG_ALGORITHM = "numpy.PCG64"


def _int_env(name: str, default: int, minimum: int = 1) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got {raw!r}", details={"variable": name})
    if value < minimum:
        raise ConfigError(f"{name} must be >= {minimum}, got {value}", details={"variable": name})
    return value


def get_worker_count() -> int:
    """Worker cap for thread pools; TXNET_THREADS overrides the CPU count."""
    return _int_env("TXNET_THREADS", os.cpu_count() or 1)


def get_exact_node_cap() -> int:
    """Largest graph on which exact all-pairs algorithms are allowed."""
    return _int_env("TXNET_EXACT_NODE_CAP", 20_000)


def get_default_pivots() -> int:
    return _int_env("TXNET_DEFAULT_PIVOTS", 2_000)


def get_kernel_node_cap() -> int:
    """Largest graph accepted by the shortest-path graph kernel."""
    return _int_env("TXNET_KERNEL_NODE_CAP", 20_000, minimum=2)


def get_reference_seed() -> int:
    """Seed of the fixed reference subsample used when a kernel reference is too large."""
    return _int_env("TXNET_REFERENCE_SEED", 0, minimum=0)
