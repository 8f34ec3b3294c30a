"""
Immutable weighted directed graph over compact CSR arrays.
"""
from __future__ import annotations

from functools import cached_property
from typing import Iterator, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from txnet.utils.errors import FormatError, NodeOutOfRange

NodeId = int


class WeightedEdge(NamedTuple):
    """One edge between two addresses, before ids are assigned."""

    src: str
    dst: str
    weight: float


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


def _is_strictly_sorted(labels: Sequence[str]) -> bool:
    return all(a < b for a, b in zip(labels, labels[1:]))


class WeightedDigraph:
    """
    Directed graph with collapsed parallel edges.

    Node ids are dense (0..N-1) and follow the sorted order of the node
    labels (addresses), so any two constructions over the same labelled edge
    set produce identical arrays. Forward and reverse adjacency are both kept
    as CSR arrays with neighbours sorted by id. Self-loops are retained.

    ``undirected`` marks a symmetric graph produced by projection or by a
    null-model generator: every edge {i, j} is stored as i->j and j->i.
    """

    def __init__(
        self,
        labels: Tuple[str, ...],
        out_indptr: np.ndarray,
        out_indices: np.ndarray,
        out_weights: np.ndarray,
        multiplicity: np.ndarray,
        undirected: bool = False,
    ) -> None:
        self._labels = labels
        self._out_indptr = _frozen(out_indptr)
        self._out_indices = _frozen(out_indices)
        self._out_weights = _frozen(out_weights)
        self._multiplicity = _frozen(multiplicity)
        self._undirected = undirected

        src = self.edge_sources
        order = np.lexsort((src, out_indices))
        self._in_indptr = _frozen(
            np.concatenate(([0], np.cumsum(np.bincount(out_indices, minlength=len(labels))))).astype(np.int64)
        )
        self._in_indices = _frozen(src[order])
        self._in_weights = _frozen(out_weights[order])

    # -- construction -----------------------------------------------------

    @classmethod
    def empty(cls) -> "WeightedDigraph":
        return cls.from_arrays((), [], [], [])

    @classmethod
    def from_arrays(
        cls,
        labels: Sequence[str],
        src: Sequence[int] | np.ndarray,
        dst: Sequence[int] | np.ndarray,
        weights: Sequence[float] | np.ndarray,
        multiplicity: Optional[Sequence[int] | np.ndarray] = None,
        undirected: bool = False,
    ) -> "WeightedDigraph":
        """
        Build from parallel edge arrays indexed into ``labels``.

        Duplicate (src, dst) pairs are collapsed: weights and multiplicities
        are summed. Ids are re-densified in sorted label order.
        """
        labels = tuple(str(label) for label in labels)
        n = len(labels)
        src = np.asarray(src, dtype=np.int64).ravel()
        dst = np.asarray(dst, dtype=np.int64).ravel()
        weights = np.asarray(weights, dtype=np.float64).ravel()
        if multiplicity is None:
            mult = np.ones(src.size, dtype=np.int64)
        else:
            mult = np.asarray(multiplicity, dtype=np.int64).ravel()
        if not (src.size == dst.size == weights.size == mult.size):
            raise ValueError("edge arrays must have equal length")
        if src.size and (src.min() < 0 or dst.min() < 0 or src.max() >= n or dst.max() >= n):
            raise FormatError("edge references a node outside the label table")
        if weights.size and (not np.all(np.isfinite(weights)) or weights.min() < 0):
            raise FormatError("edge weights must be finite and non-negative")

        if not _is_strictly_sorted(labels):
            if len(set(labels)) != n:
                raise FormatError("node labels must be unique")
            perm = sorted(range(n), key=labels.__getitem__)
            new_id = np.empty(n, dtype=np.int64)
            new_id[np.asarray(perm, dtype=np.int64)] = np.arange(n, dtype=np.int64)
            labels = tuple(labels[i] for i in perm)
            src = new_id[src]
            dst = new_id[dst]

        order = np.lexsort((dst, src))
        src, dst, weights, mult = src[order], dst[order], weights[order], mult[order]
        if src.size:
            starts = np.flatnonzero(np.concatenate(([True], (src[1:] != src[:-1]) | (dst[1:] != dst[:-1]))))
            weights = np.add.reduceat(weights, starts)
            mult = np.add.reduceat(mult, starts)
            src, dst = src[starts], dst[starts]

        indptr = np.concatenate(([0], np.cumsum(np.bincount(src, minlength=n)))).astype(np.int64)
        return cls(labels, indptr, dst.copy(), weights.copy(), mult.copy(), undirected=undirected)

    # -- sizes and labels -------------------------------------------------

    @property
    def node_count(self) -> int:
        return len(self._labels)

    @property
    def edge_count(self) -> int:
        """Distinct directed (src, dst) pairs."""
        return int(self._out_indices.size)

    @property
    def undirected(self) -> bool:
        return self._undirected

    @property
    def labels(self) -> Tuple[str, ...]:
        return self._labels

    @cached_property
    def _label_index(self) -> dict:
        return {label: i for i, label in enumerate(self._labels)}

    def id_of(self, label: str) -> NodeId:
        return self._label_index[label]

    def label_of(self, node: NodeId) -> str:
        self.check_node(node)
        return self._labels[node]

    def check_node(self, node: NodeId) -> None:
        if not 0 <= node < self.node_count:
            raise NodeOutOfRange(node, self.node_count)

    # -- adjacency ---------------------------------------------------------

    @property
    def out_indptr(self) -> np.ndarray:
        return self._out_indptr

    @property
    def out_indices(self) -> np.ndarray:
        return self._out_indices

    @property
    def out_weights(self) -> np.ndarray:
        return self._out_weights

    @property
    def multiplicity(self) -> np.ndarray:
        return self._multiplicity

    @property
    def in_indptr(self) -> np.ndarray:
        return self._in_indptr

    @property
    def in_indices(self) -> np.ndarray:
        return self._in_indices

    @property
    def in_weights(self) -> np.ndarray:
        return self._in_weights

    @cached_property
    def edge_sources(self) -> np.ndarray:
        """Source id of every edge, aligned with ``out_indices``."""
        return _frozen(
            np.repeat(np.arange(self.node_count, dtype=np.int64), np.diff(self._out_indptr))
        )

    def out_neighbors(self, node: NodeId) -> np.ndarray:
        return self._out_indices[self._out_indptr[node]: self._out_indptr[node + 1]]

    def in_neighbors(self, node: NodeId) -> np.ndarray:
        return self._in_indices[self._in_indptr[node]: self._in_indptr[node + 1]]

    def out_degrees(self) -> np.ndarray:
        return np.diff(self._out_indptr)

    def in_degrees(self) -> np.ndarray:
        return np.diff(self._in_indptr)

    def total_degrees(self) -> np.ndarray:
        return self.out_degrees() + self.in_degrees()

    @cached_property
    def self_loop_count(self) -> int:
        return int(np.count_nonzero(self.edge_sources == self._out_indices))

    @property
    def total_weight(self) -> float:
        return float(self._out_weights.sum())

    @cached_property
    def adjacency(self) -> sp.csr_matrix:
        """0/1 adjacency as a scipy CSR matrix (row = source)."""
        n = self.node_count
        data = np.ones(self.edge_count, dtype=np.float64)
        return sp.csr_matrix((data, self._out_indices, self._out_indptr), shape=(n, n))

    def edge_weight(self, src: NodeId, dst: NodeId) -> Optional[float]:
        lo, hi = self._out_indptr[src], self._out_indptr[src + 1]
        pos = lo + int(np.searchsorted(self._out_indices[lo:hi], dst))
        if pos < hi and self._out_indices[pos] == dst:
            return float(self._out_weights[pos])
        return None

    def iter_edges(self) -> Iterator[WeightedEdge]:
        """Labelled edges sorted by (src, dst)."""
        labels = self._labels
        for s, d, w in zip(self.edge_sources.tolist(), self._out_indices.tolist(), self._out_weights.tolist()):
            yield WeightedEdge(labels[s], labels[d], w)

    # -- derived graphs ----------------------------------------------------

    def transpose(self) -> "WeightedDigraph":
        return WeightedDigraph.from_arrays(
            self._labels,
            self._out_indices,
            self.edge_sources,
            self._out_weights,
            self._multiplicity,
            undirected=self._undirected,
        )

    def subgraph(self, nodes: Sequence[int] | np.ndarray, edges: Optional[np.ndarray] = None) -> "WeightedDigraph":
        """
        Subgraph on ``nodes`` (original ids) with original weights.

        Without ``edges`` this is the induced subgraph. With ``edges`` (edge
        positions into ``out_indices``) only those edges are kept.
        """
        keep = np.unique(np.asarray(nodes, dtype=np.int64))
        if keep.size and (keep[0] < 0 or keep[-1] >= self.node_count):
            raise NodeOutOfRange(int(keep[-1] if keep[-1] >= self.node_count else keep[0]), self.node_count)
        member = np.zeros(self.node_count, dtype=bool)
        member[keep] = True
        src, dst = self.edge_sources, self._out_indices
        if edges is None:
            selected = np.flatnonzero(member[src] & member[dst])
            undirected = self._undirected
        else:
            edges = np.unique(np.asarray(edges, dtype=np.int64))
            selected = edges[member[src[edges]] & member[dst[edges]]]
            undirected = False
        new_id = np.searchsorted(keep, np.arange(self.node_count))
        return WeightedDigraph.from_arrays(
            [self._labels[i] for i in keep.tolist()],
            new_id[src[selected]],
            new_id[dst[selected]],
            self._out_weights[selected],
            self._multiplicity[selected],
            undirected=undirected,
        )

    # -- comparison ---------------------------------------------------------

    def equals(self, other: "WeightedDigraph", rel_tol: float = 1e-9) -> bool:
        """
        Same labels and edge set, weights equal within ``rel_tol``.

        Multiplicities and the ``undirected`` flag are not compared: the edge
        list format does not carry them.
        """
        if self._labels != other._labels:
            return False
        if not np.array_equal(self._out_indptr, other._out_indptr):
            return False
        if not np.array_equal(self._out_indices, other._out_indices):
            return False
        return bool(np.allclose(self._out_weights, other._out_weights, rtol=rel_tol, atol=0.0))

    def __repr__(self) -> str:
        kind = "undirected" if self._undirected else "directed"
        return f"WeightedDigraph({kind}, nodes={self.node_count}, edges={self.edge_count})"
