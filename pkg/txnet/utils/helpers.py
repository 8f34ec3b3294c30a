"""
Helper functions for parsing, formatting, seeding and worker pools
"""
from __future__ import annotations

import json
import queue
import threading
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Iterable, Iterator, List, Optional, Sequence, TypeVar

import numpy as np

from txnet.config import RNG_ALGORITHM, WEIGHT_DIGITS, get_worker_count
from txnet.utils.errors import IoError

T = TypeVar("T")
R = TypeVar("R")

_SENTINEL = object()


def parse_json_safely(json_str: str) -> Optional[Any]:
    """Parse one JSON document, returning None on any decoding problem"""
    try:
        return json.loads(json_str)
    except (json.JSONDecodeError, UnicodeDecodeError, RecursionError):
        return None


def format_weight(value: float) -> str:
    """Weight text with a fixed number of significant digits"""
    return f"{value:.{WEIGHT_DIGITS}g}"


def make_rng(seed: int) -> np.random.Generator:
    """Seeded generator; the algorithm name is recorded in manifests"""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))


def derive_seeds(seed: int, count: int) -> List[int]:
    """Independent per-replicate seeds, stable for a given seed"""
    children = np.random.SeedSequence(int(seed)).spawn(count)
    return [int(child.generate_state(1, dtype=np.uint64)[0]) for child in children]


def rng_identifier() -> str:
    return f"{RNG_ALGORITHM}/numpy-{np.__version__}"


def mean_and_stderr(values: Sequence[float]) -> tuple[float, float]:
    """Sample mean and its standard error (0 for fewer than two values)"""
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        return float("nan"), float("nan")
    if arr.size == 1:
        return float(arr[0]), 0.0
    return float(arr.mean()), float(arr.std(ddof=1) / np.sqrt(arr.size))


_pool_state = threading.local()


def _in_pool_worker() -> bool:
    return getattr(_pool_state, "active", False)


def _run_in_worker(fn: Callable[[T], R], item: T) -> R:
    _pool_state.active = True
    try:
        return fn(item)
    finally:
        _pool_state.active = False


def parallel_map(fn: Callable[[T], R], items: Iterable[T], workers: Optional[int] = None) -> List[R]:
    """
    Map over a thread pool and return results in input order.

    Reductions over the returned list are therefore independent of completion order.
    A call made from inside a pool worker runs serially, so nested maps never
    exceed the TXNET_THREADS cap.
    """
    items = list(items)
    workers = min(workers or get_worker_count(), max(1, len(items)))
    if workers <= 1 or _in_pool_worker():
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="txnet-worker") as pool:
        return list(pool.map(lambda item: _run_in_worker(fn, item), items))


def prefetch(iterable: Iterable[T], maxsize: int = 1024) -> Iterator[T]:
    """
    Produce items on a background thread through a bounded queue.

    Items are delivered in the order the source yields them; a producer
    exception is re-raised in the consumer.
    """
    hand_off: "queue.Queue[Any]" = queue.Queue(maxsize=maxsize)
    failure: List[BaseException] = []

    def _produce() -> None:
        try:
            for item in iterable:
                hand_off.put(item)
        except BaseException as exc:  # pragma: no cover - re-raised below
            failure.append(exc)
        finally:
            hand_off.put(_SENTINEL)

    producer = threading.Thread(target=_produce, name="txnet-prefetch", daemon=True)
    producer.start()
    while True:
        item = hand_off.get()
        if item is _SENTINEL:
            break
        yield item
    producer.join()
    if failure:
        raise failure[0]


def parse_list(text: str, cast: Callable[[str], T]) -> List[T]:
    """Comma-separated values, e.g. ``"0.1,0.3,0.5"``; blanks are skipped."""
    return [cast(part.strip()) for part in text.split(",") if part.strip()]


def write_text(path: str, text: str) -> None:
    """Write a UTF-8 document, mapping OS failures to IoError."""
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}", path=path)
