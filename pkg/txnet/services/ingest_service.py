"""
Transaction dump parsing and canonical edge-list persistence.

Transaction files:
  jsonl  one object per line: {"tx": id, "in": [[addr, amount], ...], "out": [...]}
  csv    header tx_id,side,address,amount; rows of one transaction are consecutive

Edge lists are UTF-8 TSV, "src<TAB>dst<TAB>weight", '#' comments ignored.
A line holding a single address declares a node without edges.
"""
from __future__ import annotations

import csv
import errno
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, List, Literal, Optional, Tuple, Union

from pydantic import ValidationError

from txnet.logging_config import get_logger
from txnet.models.graph import WeightedDigraph, WeightedEdge
from txnet.models.transaction import IngestStats, TransactionRecord
from txnet.services.graph_service import build_graph, expand_transaction
from txnet.utils.errors import FormatError, InputNotFound, IoError, MalformedLine, TransactionError
from txnet.utils.helpers import format_weight, parse_json_safely, prefetch

logger = get_logger(__name__)

TxFormat = Literal["jsonl", "csv"]
PathLike = Union[str, Path]

CSV_HEADER = ["tx_id", "side", "address", "amount"]
EDGE_LIST_HEADER = "# txnet edge list: src\\tdst\\tweight"


def _open_input(path: PathLike):
    try:
        return open(path, "rb")
    except FileNotFoundError:
        raise InputNotFound(str(path))
    except OSError as exc:
        if exc.errno == errno.ENOENT:
            raise InputNotFound(str(path))
        raise IoError(f"cannot open {path}: {exc.strerror or exc}", path=str(path))


def _decoded_lines(path: PathLike) -> Iterator[Tuple[int, Optional[str]]]:
    """Numbered lines of a UTF-8 file; None stands for a line that does not decode."""
    with _open_input(path) as handle:
        for line_no, raw in enumerate(handle, start=1):
            try:
                yield line_no, raw.decode("utf-8")
            except UnicodeDecodeError:
                yield line_no, None


def _record_from_json(obj) -> TransactionRecord:
    if not isinstance(obj, dict):
        raise ValueError("record is not an object")
    legs_in, legs_out = obj.get("in"), obj.get("out")
    if not isinstance(legs_in, list) or not isinstance(legs_out, list):
        raise ValueError("record needs 'in' and 'out' lists")
    for leg in (*legs_in, *legs_out):
        if not isinstance(leg, (list, tuple)) or len(leg) != 2:
            raise ValueError("each leg must be an [address, amount] pair")
    return TransactionRecord.from_amounts(obj.get("tx", ""), legs_in, legs_out)


@dataclass(frozen=True)
class Rejected:
    """A transaction that was read but could not be parsed."""

    where: str
    reason: str


ReaderEvent = Union[TransactionRecord, Rejected]


class TransactionReader:
    """
    Iterates the records of a transaction file in file order.

    Malformed records are counted in ``stats.transactions_rejected`` and
    skipped; only an unparseable header or first record raises FormatError.

    ``events()`` only parses; ``account()`` updates the stats. Keeping the two
    apart lets parsing run on a prefetch thread while every stats update
    happens on the consuming thread.
    """

    def __init__(self, path: PathLike, fmt: TxFormat = "jsonl") -> None:
        if fmt not in ("jsonl", "csv"):
            raise FormatError(f"unknown transaction format: {fmt}")
        self.path = Path(path)
        self.fmt = fmt
        self.stats = IngestStats()

    def __iter__(self) -> Iterator[TransactionRecord]:
        for event in self.events():
            record = self.account(event)
            if record is not None:
                yield record

    def events(self) -> Iterator[ReaderEvent]:
        if self.fmt == "jsonl":
            return self._jsonl_events()
        return self._csv_events()

    def account(self, event: ReaderEvent) -> Optional[TransactionRecord]:
        self.stats.transactions_read += 1
        if isinstance(event, Rejected):
            self.reject(event.where, event.reason)
            return None
        return event

    def reject(self, where: str, reason: str) -> None:
        self.stats.transactions_rejected += 1
        self.stats.warn(f"{where}: {reason}")
        logger.warning("Rejected transaction at %s: %s", where, reason)

    def _jsonl_events(self) -> Iterator[ReaderEvent]:
        seen_first = False
        for line_no, text in _decoded_lines(self.path):
            if text is not None and not text.strip():
                continue
            try:
                if text is None:
                    raise ValueError("line is not valid UTF-8")
                obj = parse_json_safely(text)
                if obj is None:
                    raise ValueError("invalid JSON")
                record = _record_from_json(obj)
            except (ValueError, ValidationError) as exc:
                if not seen_first:
                    raise FormatError(
                        f"{self.path}: first record is unparseable ({exc})",
                        details={"line_no": line_no},
                    )
                yield Rejected(f"line {line_no}", str(exc).splitlines()[0])
                continue
            seen_first = True
            yield record

    def _csv_events(self) -> Iterator[ReaderEvent]:
        lines = _decoded_lines(self.path)
        first = next(lines, None)
        if first is None:
            return
        header = next(csv.reader([first[1]]), []) if first[1] is not None else None
        if header is None or [field.strip().lower() for field in header] != CSV_HEADER:
            raise FormatError(
                f"{self.path}: expected header {','.join(CSV_HEADER)}",
                details={"header": header},
            )
        current: Optional[str] = None
        legs: Tuple[List, List] = ([], [])
        problem: Optional[str] = None
        start_line = 2

        def _close() -> ReaderEvent:
            if problem is not None:
                return Rejected(f"line {start_line}", problem)
            try:
                return TransactionRecord.from_amounts(current, legs[0], legs[1])
            except (ValueError, ValidationError) as exc:
                return Rejected(f"line {start_line}", str(exc).splitlines()[0])

        for line_no, text in lines:
            if text is None:
                if current is not None:
                    yield _close()
                    current = None
                yield Rejected(f"line {line_no}", "line is not valid UTF-8")
                continue
            row = next(csv.reader([text]), [])
            if not row or not any(cell.strip() for cell in row):
                continue
            tx_id = row[0].strip()
            if tx_id != current:
                if current is not None:
                    yield _close()
                current, legs, problem, start_line = tx_id, ([], []), None, line_no
            if len(row) != 4:
                problem = problem or f"expected 4 fields, got {len(row)}"
                continue
            side = row[1].strip().lower()
            if side not in ("in", "out"):
                problem = problem or f"side must be 'in' or 'out', got {row[1]!r}"
                continue
            legs[0 if side == "in" else 1].append((row[2].strip(), row[3].strip()))
        if current is not None:
            yield _close()


def parse_transactions(path: PathLike, fmt: TxFormat = "jsonl") -> Tuple[Iterator[TransactionRecord], IngestStats]:
    """
    Stream records from a transaction file.

    The returned stats object is filled in while the stream is consumed.
    """
    reader = TransactionReader(path, fmt)
    return iter(reader), reader.stats


def ingest_transactions(path: PathLike, fmt: TxFormat = "jsonl") -> Tuple[WeightedDigraph, IngestStats]:
    """Parse, expand and build: the full transaction-file to graph pipeline."""
    reader = TransactionReader(path, fmt)
    stats = reader.stats

    def _edges() -> Iterator[WeightedEdge]:
        for event in prefetch(reader.events()):
            record = reader.account(event)
            if record is None:
                continue
            try:
                edges = expand_transaction(record)
            except TransactionError as exc:
                reader.reject(f"tx {record.tx_id}", exc.message)
                continue
            if record.output_sum > record.input_sum:
                stats.warn(f"tx {record.tx_id}: outputs exceed inputs")
            stats.edges_emitted += len(edges)
            yield from edges

    graph = build_graph(_edges())
    stats.distinct_addresses = graph.node_count
    logger.info(
        "Ingested %s: read=%d rejected=%d edges=%d addresses=%d",
        path,
        stats.transactions_read,
        stats.transactions_rejected,
        stats.edges_emitted,
        stats.distinct_addresses,
    )
    return graph, stats


def read_edge_list(path: PathLike) -> WeightedDigraph:
    """Load a TSV edge list; duplicate pairs collapse like build_graph."""
    edges: List[WeightedEdge] = []
    nodes: List[str] = []
    for line_no, raw in _decoded_lines(path):
        if raw is None:
            raise MalformedLine(line_no, "line is not valid UTF-8")
        line = raw.rstrip("\r\n")
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) == 1:
            nodes.append(fields[0])
            continue
        if len(fields) != 3:
            raise MalformedLine(line_no, f"expected 3 tab-separated fields, got {len(fields)}")
        src, dst, weight_text = fields
        if not src or not dst:
            raise MalformedLine(line_no, "empty address")
        try:
            weight = float(weight_text)
        except ValueError:
            raise MalformedLine(line_no, f"weight is not a number: {weight_text!r}")
        if not math.isfinite(weight) or weight < 0:
            raise MalformedLine(line_no, f"weight must be finite and non-negative: {weight_text!r}")
        edges.append(WeightedEdge(src, dst, weight))
    graph = build_graph(edges, nodes=nodes)
    logger.info("Loaded %r from %s", graph, path)
    return graph


def write_edge_list(g: WeightedDigraph, path: PathLike) -> None:
    """
    Write ``g`` deterministically: zero-degree node declarations, then edges
    sorted by (src, dst), weights with 12 significant digits.
    """
    for label in g.labels:
        if "\t" in label or "\n" in label or "\r" in label or label.startswith("#"):
            raise FormatError(f"address cannot be written to an edge list: {label!r}")
    isolated = (g.total_degrees() == 0).tolist()
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(f"{EDGE_LIST_HEADER} nodes={g.node_count} edges={g.edge_count}\n")
            for label, alone in zip(g.labels, isolated):
                if alone:
                    handle.write(f"{label}\n")
            for edge in g.iter_edges():
                handle.write(f"{edge.src}\t{edge.dst}\t{format_weight(edge.weight)}\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc.strerror or exc}", path=str(path))
    logger.info("Wrote %r to %s", g, path)
