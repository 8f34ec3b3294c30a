"""
Null models and synthetic graphs: equivalent random graphs, ring lattices,
degree-preserving rewiring and preferential-attachment growth.

Every generator is a pure function of its parameters and seed.
"""
from __future__ import annotations

from typing import List, Optional

import numpy as np

from txnet.logging_config import get_logger
from txnet.models.graph import WeightedDigraph
from txnet.utils.errors import InvalidDegree, TooManyEdges
from txnet.utils.helpers import make_rng

logger = get_logger(__name__)

SWAP_BLOCK = 1 << 16


def node_labels(n: int) -> List[str]:
    """Zero-padded numeric labels, so label order equals numeric order."""
    width = len(str(max(n - 1, 0)))
    return [f"{i:0{width}d}" for i in range(n)]


def _undirected_graph(n: int, a: np.ndarray, b: np.ndarray, weights: Optional[np.ndarray] = None) -> WeightedDigraph:
    if weights is None:
        weights = np.ones(a.size, dtype=np.float64)
    return WeightedDigraph.from_arrays(
        node_labels(n),
        np.concatenate((a, b)),
        np.concatenate((b, a)),
        np.concatenate((weights, weights)),
        undirected=True,
    )


def er_random(n: int, m: int, seed: int = 0) -> WeightedDigraph:
    """Uniform simple undirected graph with exactly n nodes and m edges."""
    total = n * (n - 1) // 2
    if n < 0 or m < 0 or m > total:
        raise TooManyEdges(n, m)
    rng = make_rng(seed)
    picks = rng.choice(total, size=m, replace=False) if m else np.empty(0, dtype=np.int64)
    picks = np.asarray(picks, dtype=np.int64)
    # Pair index t enumerates (i, j), i < j, row by row.
    rows = np.arange(n, dtype=np.int64)
    starts = rows * (2 * n - rows - 1) // 2
    i = np.searchsorted(starts, picks, side="right") - 1
    j = picks - starts[i] + i + 1
    return _undirected_graph(n, i, j)


def lattice_degree_for(n: int, m: int) -> int:
    """Nearest even integer to 2m/n, kept inside [2, n-1]."""
    if n < 3:
        raise InvalidDegree(f"a ring lattice needs at least 3 nodes, got {n}")
    k = 2 * int(round(m / n))
    upper = n - 1 if (n - 1) % 2 == 0 else n - 2
    return int(min(max(k, 2), upper))


def ring_lattice(n: int, mean_degree: int, seed: int = 0) -> WeightedDigraph:
    """
    Ring of n nodes, each joined to mean_degree/2 neighbours on either side.

    The construction is deterministic; ``seed`` is accepted so null-model
    replicates share one call signature.
    """
    if mean_degree < 0 or mean_degree % 2 or mean_degree >= n:
        raise InvalidDegree(f"lattice degree must be even and below n={n}, got {mean_degree}")
    half = mean_degree // 2
    base = np.arange(n, dtype=np.int64)
    a = np.tile(base, half)
    b = (a + np.repeat(np.arange(1, half + 1, dtype=np.int64), n)) % n
    return _undirected_graph(n, a, b)


def _swap_directed(src: np.ndarray, dst: np.ndarray, n: int, attempts: int, rng: np.random.Generator) -> int:
    present = set((src * n + dst).tolist())
    src_l, dst_l = src.tolist(), dst.tolist()
    count = len(src_l)
    accepted = 0
    remaining = attempts
    while remaining > 0:
        block = min(remaining, SWAP_BLOCK)
        remaining -= block
        pairs = rng.integers(0, count, size=(block, 2)).tolist()
        for e1, e2 in pairs:
            if e1 == e2:
                continue
            a, b = src_l[e1], dst_l[e1]
            c, d = src_l[e2], dst_l[e2]
            if a == d or c == b or a == c or b == d:
                continue
            ad, cb = a * n + d, c * n + b
            if ad in present or cb in present:
                continue
            present.discard(a * n + b)
            present.discard(c * n + d)
            present.add(ad)
            present.add(cb)
            dst_l[e1], dst_l[e2] = d, b
            accepted += 1
    dst[:] = dst_l
    return accepted


def _swap_undirected(a_arr: np.ndarray, b_arr: np.ndarray, n: int, attempts: int, rng: np.random.Generator) -> int:
    def key(x: int, y: int) -> int:
        return x * n + y if x < y else y * n + x

    a_l, b_l = a_arr.tolist(), b_arr.tolist()
    present = {key(x, y) for x, y in zip(a_l, b_l)}
    count = len(a_l)
    accepted = 0
    remaining = attempts
    while remaining > 0:
        block = min(remaining, SWAP_BLOCK)
        remaining -= block
        pairs = rng.integers(0, count, size=(block, 2)).tolist()
        flips = (rng.random(block) < 0.5).tolist()
        for (e1, e2), flip in zip(pairs, flips):
            if e1 == e2:
                continue
            a, b = a_l[e1], b_l[e1]
            c, d = (b_l[e2], a_l[e2]) if flip else (a_l[e2], b_l[e2])
            if a == d or c == b:
                continue
            ad, cb = key(a, d), key(c, b)
            if ad == cb or ad in present or cb in present:
                continue
            present.discard(key(a, b))
            present.discard(key(c, d))
            present.add(ad)
            present.add(cb)
            a_l[e1], b_l[e1] = a, d
            a_l[e2], b_l[e2] = c, b
            accepted += 1
    a_arr[:] = a_l
    b_arr[:] = b_l
    return accepted


def degree_preserving_rewire(g: WeightedDigraph, attempts: Optional[int] = None, seed: int = 0) -> WeightedDigraph:
    """
    Double-edge swaps that keep every node's degrees.

    Directed graphs keep in- and out-degree of every node; undirected graphs
    keep the undirected degree. Swaps that would create a self-loop or a
    duplicate edge are rejected. Each edge slot keeps its weight.
    """
    rng = make_rng(seed)
    n = g.node_count
    if g.undirected:
        src, dst = g.edge_sources, g.out_indices
        upper = src < dst
        a, b = src[upper].copy(), dst[upper].copy()
        weights = g.out_weights[upper].copy()
        if a.size < 2:
            return g
        attempts = 100 * a.size if attempts is None else attempts
        accepted = _swap_undirected(a, b, n, attempts, rng)
        rewired = WeightedDigraph.from_arrays(
            g.labels,
            np.concatenate((a, b)),
            np.concatenate((b, a)),
            np.concatenate((weights, weights)),
            undirected=True,
        )
    else:
        if g.edge_count < 2:
            return g
        src, dst = g.edge_sources.copy(), g.out_indices.copy()
        attempts = 100 * g.edge_count if attempts is None else attempts
        accepted = _swap_directed(src, dst, n, attempts, rng)
        rewired = WeightedDigraph.from_arrays(g.labels, src, dst, g.out_weights, g.multiplicity)
    logger.debug("Rewired %r: %d of %d swaps accepted", g, accepted, attempts)
    return rewired


def synthetic_scale_free(n: int, attach_m: int, seed: int = 0) -> WeightedDigraph:
    """
    Preferential-attachment growth with random edge orientation.

    The first attach_m+1 nodes form a complete seed graph; each later node
    links to attach_m distinct existing nodes chosen proportionally to degree.
    """
    if attach_m < 1:
        raise InvalidDegree(f"attach_m must be >= 1, got {attach_m}")
    rng = make_rng(seed)
    seed_size = min(n, attach_m + 1)
    a: List[int] = []
    b: List[int] = []
    endpoints: List[int] = []
    for i in range(seed_size):
        for j in range(i + 1, seed_size):
            a.append(i)
            b.append(j)
            endpoints.extend((i, j))
    for node in range(seed_size, n):
        targets: List[int] = []
        chosen = set()
        while len(targets) < attach_m:
            draws = rng.integers(0, len(endpoints), size=2 * attach_m).tolist()
            for pos in draws:
                target = endpoints[pos]
                if target not in chosen:
                    chosen.add(target)
                    targets.append(target)
                    if len(targets) == attach_m:
                        break
        for target in targets:
            a.append(node)
            b.append(target)
            endpoints.extend((node, target))
    a_arr = np.asarray(a, dtype=np.int64)
    b_arr = np.asarray(b, dtype=np.int64)
    flip = rng.random(a_arr.size) < 0.5
    src = np.where(flip, b_arr, a_arr)
    dst = np.where(flip, a_arr, b_arr)
    graph = WeightedDigraph.from_arrays(node_labels(n), src, dst, np.ones(src.size))
    logger.debug("Generated scale-free %r (attach_m=%d)", graph, attach_m)
    return graph

