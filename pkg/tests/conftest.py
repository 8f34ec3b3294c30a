"""
Shared fixtures: small hand-checkable graphs, a networkx converter used as
an independent oracle, and hypothesis strategies for random small digraphs.
"""
from __future__ import annotations

import json
from typing import Iterable, List, Sequence, Tuple

import networkx as nx
import numpy as np
import pytest
from hypothesis import strategies as st

from txnet.models.graph import WeightedDigraph, WeightedEdge
from txnet.models.transaction import TransactionRecord
from txnet.services.graph_service import build_graph
from txnet.services.reference_service import node_labels

WORKED_EXAMPLE = {"tx": "t1", "in": [["A", 2], ["B", 8]], "out": [["C", 2], ["D", 3], ["E", 4]]}


def graph_from_pairs(n: int, pairs: Iterable[Tuple[int, int]], weight: float = 1.0) -> WeightedDigraph:
    """Digraph on n integer-labelled nodes; node id i has label node_labels(n)[i]."""
    labels = node_labels(n)
    edges = [WeightedEdge(labels[a], labels[b], weight) for a, b in pairs]
    return build_graph(edges, nodes=labels)


def directed_cycle(n: int) -> WeightedDigraph:
    return graph_from_pairs(n, [(i, (i + 1) % n) for i in range(n)])


def to_networkx(g: WeightedDigraph) -> nx.DiGraph:
    oracle = nx.DiGraph()
    oracle.add_nodes_from(range(g.node_count))
    oracle.add_edges_from(zip(g.edge_sources.tolist(), g.out_indices.tolist()))
    return oracle


def undirected_networkx(g: WeightedDigraph) -> nx.Graph:
    oracle = nx.Graph()
    oracle.add_nodes_from(range(g.node_count))
    oracle.add_edges_from((a, b) for a, b in zip(g.edge_sources.tolist(), g.out_indices.tolist()) if a != b)
    return oracle


@st.composite
def small_digraphs(draw, min_nodes: int = 1, max_nodes: int = 8, self_loops: bool = False) -> WeightedDigraph:
    n = draw(st.integers(min_value=min_nodes, max_value=max_nodes))
    candidates = [(a, b) for a in range(n) for b in range(n) if self_loops or a != b]
    chosen = draw(st.lists(st.sampled_from(candidates), max_size=len(candidates), unique=True)) if candidates else []
    return graph_from_pairs(n, chosen)


def random_digraph(n: int, m: int, seed: int) -> WeightedDigraph:
    """Seeded simple digraph without self-loops, for tests that want fixed graphs."""
    rng = np.random.default_rng(seed)
    pairs = set()
    while len(pairs) < m:
        a, b = (int(x) for x in rng.integers(0, n, size=2))
        if a != b:
            pairs.add((a, b))
    weights = rng.uniform(0.1, 10.0, size=m)
    labels = node_labels(n)
    return build_graph(
        [WeightedEdge(labels[a], labels[b], float(w)) for (a, b), w in zip(sorted(pairs), weights)],
        nodes=labels,
    )


@pytest.fixture
def worked_example_tx() -> TransactionRecord:
    return TransactionRecord.from_amounts(WORKED_EXAMPLE["tx"], WORKED_EXAMPLE["in"], WORKED_EXAMPLE["out"])


@pytest.fixture
def worked_example_file(tmp_path):
    path = tmp_path / "tx.jsonl"
    path.write_text(json.dumps(WORKED_EXAMPLE) + "\n", encoding="utf-8")
    return path


@pytest.fixture
def star_out() -> WeightedDigraph:
    """center (id 0) -> three leaves."""
    return graph_from_pairs(4, [(0, 1), (0, 2), (0, 3)])


@pytest.fixture
def triangle() -> WeightedDigraph:
    return directed_cycle(3)


@pytest.fixture
def write_edges(tmp_path):
    def _write(lines: Sequence[str], name: str = "graph.tsv"):
        path = tmp_path / name
        path.write_text("".join(f"{line}\n" for line in lines), encoding="utf-8")
        return path

    return _write


def labels_of(g: WeightedDigraph, ids: Iterable[int]) -> List[str]:
    return [g.label_of(int(i)) for i in ids]
