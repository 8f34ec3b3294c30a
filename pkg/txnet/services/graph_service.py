"""
Transaction-to-edge expansion and graph construction.
"""
from __future__ import annotations

from array import array
from typing import Dict, Iterable, List, Literal

import numpy as np

from txnet.config import AMOUNT_SCALE
from txnet.logging_config import get_logger
from txnet.models.graph import NodeId, WeightedDigraph, WeightedEdge
from txnet.models.transaction import TransactionRecord
from txnet.utils.errors import EmptySide, ZeroInputSum

logger = get_logger(__name__)

DegreeMode = Literal["in", "out", "total"]


def expand_transaction(tx: TransactionRecord) -> List[WeightedEdge]:
    """
    Expand an x-input, y-output transaction into x*y weighted edges.

    weight(i -> j) = input_i / sum(inputs) * output_j, in whole currency units.
    Integer amounts are only turned into floats inside the formula.
    """
    if not tx.inputs:
        raise EmptySide(tx.tx_id, "inputs")
    if not tx.outputs:
        raise EmptySide(tx.tx_id, "outputs")
    total_in = tx.input_sum
    if total_in == 0:
        raise ZeroInputSum(tx.tx_id)
    if tx.output_sum > total_in:
        logger.warning(
            "Transaction %s pays out more than it takes in (%d > %d units)",
            tx.tx_id,
            tx.output_sum,
            total_in,
        )

    denominator = total_in * AMOUNT_SCALE
    return [
        WeightedEdge(src, dst, (in_amount * out_amount) / denominator)
        for src, in_amount in tx.inputs
        for dst, out_amount in tx.outputs
    ]


def build_graph(edges: Iterable[WeightedEdge], nodes: Iterable[str] = ()) -> WeightedDigraph:
    """
    Stream edges into an immutable graph.

    Parallel (src, dst) pairs are summed and their multiplicity recorded;
    self-loops are kept. ``nodes`` adds labels that carry no edges.
    """
    index: Dict[str, int] = {}
    src_ids = array("q")
    dst_ids = array("q")
    weights = array("d")

    def _id(label: str) -> int:
        node = index.get(label)
        if node is None:
            node = index[label] = len(index)
        return node

    for label in nodes:
        _id(label)
    for edge in edges:
        src_ids.append(_id(edge.src))
        dst_ids.append(_id(edge.dst))
        weights.append(edge.weight)

    labels = [""] * len(index)
    for label, node in index.items():
        labels[node] = label

    graph = WeightedDigraph.from_arrays(
        labels,
        np.frombuffer(src_ids, dtype=np.int64) if src_ids else np.empty(0, dtype=np.int64),
        np.frombuffer(dst_ids, dtype=np.int64) if dst_ids else np.empty(0, dtype=np.int64),
        np.frombuffer(weights, dtype=np.float64) if weights else np.empty(0, dtype=np.float64),
    )
    if graph.self_loop_count:
        logger.debug("Graph keeps %d self-loops", graph.self_loop_count)
    logger.debug("Built %r from %d raw edges", graph, len(src_ids))
    return graph


def degree(g: WeightedDigraph, node: NodeId, mode: DegreeMode = "total") -> int:
    """Collapsed-edge degree; a self-loop counts once as in and once as out."""
    g.check_node(node)
    out_deg = int(g.out_indptr[node + 1] - g.out_indptr[node])
    in_deg = int(g.in_indptr[node + 1] - g.in_indptr[node])
    if mode == "out":
        return out_deg
    if mode == "in":
        return in_deg
    if mode == "total":
        return out_deg + in_deg
    raise ValueError(f"unknown degree mode: {mode}")


def degrees(g: WeightedDigraph, mode: DegreeMode = "total") -> np.ndarray:
    if mode == "out":
        return g.out_degrees()
    if mode == "in":
        return g.in_degrees()
    if mode == "total":
        return g.total_degrees()
    raise ValueError(f"unknown degree mode: {mode}")


def undirected_projection(g: WeightedDigraph) -> WeightedDigraph:
    """
    Symmetric graph with {i, j} present iff i->j or j->i exists.

    The weight of {i, j} is the sum of both directions; self-loops are
    dropped. Projecting an already undirected graph returns it unchanged.
    """
    if g.undirected:
        return g
    src, dst = g.edge_sources, g.out_indices
    keep = src != dst
    src, dst, w = src[keep], dst[keep], g.out_weights[keep]
    mult = g.multiplicity[keep]
    return WeightedDigraph.from_arrays(
        g.labels,
        np.concatenate((src, dst)),
        np.concatenate((dst, src)),
        np.concatenate((w, w)),
        np.concatenate((mult, mult)),
        undirected=True,
    )
