"""
Graph samplers: random walk with flying back (RWFB) and the RWS, RN, RE,
FF and SB baselines.

Every sampler consumes a single PCG64 stream seeded from the config, so a
(graph, config) pair always yields the same sample.
"""
from __future__ import annotations

from collections import deque
from typing import Callable, Dict, List

import numpy as np

from txnet.logging_config import get_logger
from txnet.models.graph import WeightedDigraph
from txnet.models.sampling import (
    RestartPolicy,
    SampleResult,
    SamplerConfig,
    SamplingMethod,
    SubgraphMode,
)
from txnet.utils.errors import ConfigError, EmptyGraph, TargetTooLarge
from txnet.utils.helpers import make_rng

logger = get_logger(__name__)

UNIFORM_BLOCK = 4096


class _Uniforms:
    """Block-buffered U[0, 1) draws from one generator."""

    def __init__(self, rng: np.random.Generator) -> None:
        self._rng = rng
        self._buffer: List[float] = []
        self._pos = 0

    def next(self) -> float:
        if self._pos == len(self._buffer):
            self._buffer = self._rng.random(UNIFORM_BLOCK).tolist()
            self._pos = 0
        value = self._buffer[self._pos]
        self._pos += 1
        return value


class _Visit:
    """Visited set, discovery order and traversed edge positions of one run."""

    def __init__(self, g: WeightedDigraph, cfg: SamplerConfig) -> None:
        if g.node_count == 0:
            raise EmptyGraph()
        if cfg.target_nodes > g.node_count:
            raise TargetTooLarge(cfg.target_nodes, g.node_count)
        self.g = g
        self.cfg = cfg
        self.target = cfg.target_nodes
        self.rng = make_rng(cfg.seed)
        self.visited = np.zeros(g.node_count, dtype=bool)
        self.order: List[int] = []
        self.traversed: Dict[int, None] = {}
        self.restarts = 0
        self.steps = 0

    @property
    def done(self) -> bool:
        return len(self.order) >= self.target

    def add(self, node: int) -> bool:
        if self.visited[node]:
            return False
        self.visited[node] = True
        self.order.append(node)
        return True

    def fresh(self) -> int:
        """Uniform node among those not yet visited."""
        n = self.g.node_count
        if 2 * len(self.order) < n:
            while True:
                node = int(self.rng.integers(n))
                if not self.visited[node]:
                    return node
        unvisited = np.flatnonzero(~self.visited)
        return int(unvisited[self.rng.integers(unvisited.size)])

    def result(self) -> SampleResult:
        g = self.g
        node_map = np.sort(np.asarray(self.order, dtype=np.int64))
        if self.cfg.subgraph_mode == SubgraphMode.TRAVERSED:
            edges = np.fromiter(self.traversed, dtype=np.int64, count=len(self.traversed))
            subgraph = g.subgraph(node_map, edges=edges)
        else:
            subgraph = g.subgraph(node_map)
        node_map.setflags(write=False)
        logger.info(
            "Sampled %d/%d nodes with %s (edges=%d, restarts=%d, steps=%d)",
            subgraph.node_count,
            g.node_count,
            self.cfg.method.value,
            subgraph.edge_count,
            self.restarts,
            self.steps,
        )
        return SampleResult(
            subgraph=subgraph,
            visited_order=tuple(self.order),
            node_map=node_map,
            restarts=self.restarts,
            steps_taken=self.steps,
            traversed_edges=len(self.traversed),
            config=self.cfg,
        )


def _walk(g: WeightedDigraph, cfg: SamplerConfig, p: float) -> SampleResult:
    run = _Visit(g, cfg)
    uniforms = _Uniforms(run.rng)
    indptr, indices = g.out_indptr, g.out_indices
    restart_to_start = cfg.restart_policy == RestartPolicy.RESTART_TO_START

    origin = current = run.fresh()
    run.add(current)
    since_new = 0
    while not run.done:
        lo = int(indptr[current])
        deg = int(indptr[current + 1]) - lo
        if deg == 0 or since_new >= cfg.stall_limit:
            # Deadlock: continue from a fresh node, which becomes the new origin.
            origin = current = run.fresh()
            run.add(current)
            run.restarts += 1
            since_new = 0
            continue
        run.steps += 1
        u = uniforms.next()
        if u < p:
            if restart_to_start:
                current = origin
            since_new += 1
            continue
        offset = min(int((u - p) / (1.0 - p) * deg), deg - 1)
        pos = lo + offset
        run.traversed[pos] = None
        current = int(indices[pos])
        if run.add(current):
            since_new = 0
        else:
            since_new += 1
    return run.result()


def sample_rwfb(g: WeightedDigraph, cfg: SamplerConfig) -> SampleResult:
    """
    Directed walk that flies back with probability p, otherwise steps to a
    uniform out-neighbour.

    Flying back returns to the walk origin (restart_to_start) or stays put
    (stay_at_current). A node without out-neighbours, or a walk that finds
    nothing new for stall_limit steps, continues from a fresh random node.
    """
    return _walk(g, cfg, cfg.p)


def sample_rws(g: WeightedDigraph, cfg: SamplerConfig) -> SampleResult:
    """Plain random walk: RWFB with p = 0, keeping the deadlock restarts."""
    return _walk(g, cfg, 0.0)


def sample_rn(g: WeightedDigraph, cfg: SamplerConfig) -> SampleResult:
    run = _Visit(g, cfg)
    for node in run.rng.choice(g.node_count, size=run.target, replace=False).tolist():
        run.add(int(node))
    return run.result()


def sample_re(g: WeightedDigraph, cfg: SamplerConfig) -> SampleResult:
    """
    Uniform edges without replacement until their endpoints cover the target.

    If the edges run out first the rest is filled with uniform nodes.
    """
    run = _Visit(g, cfg)
    sources, targets = g.edge_sources, g.out_indices
    for pos in run.rng.permutation(g.edge_count).tolist():
        if run.done:
            break
        run.steps += 1
        run.traversed[pos] = None
        run.add(int(sources[pos]))
        if not run.done:
            run.add(int(targets[pos]))
    while not run.done:
        run.add(run.fresh())
    return run.result()


def sample_ff(g: WeightedDigraph, cfg: SamplerConfig) -> SampleResult:
    """
    Forest fire: each burning node lights a geometric number (mean
    pf / (1 - pf)) of its unburned out-neighbours. A fire that dies out is
    re-seeded at a fresh node.
    """
    run = _Visit(g, cfg)
    indptr, indices = g.out_indptr, g.out_indices
    success = 1.0 - cfg.ff_forward_prob
    first = True
    while not run.done:
        seed_node = run.fresh()
        run.add(seed_node)
        if not first:
            run.restarts += 1
        first = False
        burning = deque([seed_node])
        while burning and not run.done:
            node = burning.popleft()
            run.steps += 1
            lo, hi = int(indptr[node]), int(indptr[node + 1])
            candidates = np.arange(lo, hi)[~run.visited[indices[lo:hi]]]
            burn = int(run.rng.geometric(success)) - 1
            if burn <= 0 or candidates.size == 0:
                continue
            picked = run.rng.choice(candidates, size=min(burn, candidates.size), replace=False)
            for pos in picked.tolist():
                neighbour = int(indices[pos])
                if run.add(neighbour):
                    run.traversed[pos] = None
                    burning.append(neighbour)
                    if run.done:
                        break
    return run.result()


def sample_sb(g: WeightedDigraph, cfg: SamplerConfig) -> SampleResult:
    """
    Snowball: breadth-first over out-neighbours up to sb_depth levels from a
    random seed, re-seeding until the target is met. A level that would
    overshoot is cut down to a uniform subset.
    """
    run = _Visit(g, cfg)
    indptr, indices = g.out_indptr, g.out_indices
    first = True
    while not run.done:
        seed_node = run.fresh()
        run.add(seed_node)
        if not first:
            run.restarts += 1
        first = False
        frontier = [seed_node]
        depth = 0
        while frontier and depth < cfg.sb_depth and not run.done:
            discovered: Dict[int, int] = {}
            for node in frontier:
                for pos in range(int(indptr[node]), int(indptr[node + 1])):
                    neighbour = int(indices[pos])
                    if not run.visited[neighbour] and neighbour not in discovered:
                        discovered[neighbour] = pos
            level = sorted(discovered)
            need = run.target - len(run.order)
            if len(level) > need:
                level = sorted(run.rng.choice(level, size=need, replace=False).tolist())
            for neighbour in level:
                run.add(neighbour)
                run.traversed[discovered[neighbour]] = None
            run.steps += 1
            frontier = level
            depth += 1
    return run.result()


_SAMPLERS: Dict[SamplingMethod, Callable[[WeightedDigraph, SamplerConfig], SampleResult]] = {
    SamplingMethod.RWFB: sample_rwfb,
    SamplingMethod.RWS: sample_rws,
    SamplingMethod.RN: sample_rn,
    SamplingMethod.RE: sample_re,
    SamplingMethod.FF: sample_ff,
    SamplingMethod.SB: sample_sb,
}


def sample(g: WeightedDigraph, cfg: SamplerConfig) -> SampleResult:
    """Draw a sample of exactly cfg.target_nodes nodes with the configured method."""
    return _SAMPLERS[cfg.method](g, cfg)


def target_for_fraction(node_count: int, fraction: float) -> int:
    """Target size for a sampling fraction, at least one node."""
    if not 0.0 < fraction <= 1.0:
        raise ConfigError(f"fraction must be in (0, 1], got {fraction}")
    return max(1, int(round(fraction * node_count)))

