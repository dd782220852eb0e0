"""Decentralized greedy routing over a (scaled) base-graph."""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

import numpy as np

from .base_graph import BaseGraph, ScaledBaseGraph, embed_overlay, l1_distance
from .errors import MeasurementError, RoutingFailure, TTLExceeded
from .overlay import GeneratorConfig, generate_network
from .rng import stream


@dataclass(frozen=True)
class Route:
    nodes: tuple
    edges: tuple = ()
    total_cost: float = 0.0

    @property
    def steps(self) -> int:
        return len(self.nodes) - 1

    @property
    def source(self) -> int:
        return self.nodes[0]

    @property
    def target(self) -> int:
        return self.nodes[-1]

    @property
    def interior(self) -> frozenset:
        return frozenset(self.nodes[1:-1])

    def arcs(self) -> list[tuple[int, int, int]]:
        """(edge, tail, head) triples in travel order."""
        return [(h, self.nodes[i], self.nodes[i + 1]) for i, h in enumerate(self.edges)]

    def with_cost(self, costs: Mapping[int, float]) -> Route:
        return Route(self.nodes, self.edges, float(sum(costs[h] for h in self.edges)))

    def to_dict(self) -> dict:
        return {"nodes": list(self.nodes), "edges": list(self.edges), "steps": self.steps, "cost": self.total_cost}


def route_from_nodes(g: BaseGraph, nodes) -> Route:
    nodes = tuple(nodes)
    edges = []
    for x, y in zip(nodes, nodes[1:]):
        edges.append(g.between(x, y)[0].h)
    return Route(nodes, tuple(edges))


class LocalView:
    """What a node may consult while routing: its own incident edges and positions.

    For a plain base-graph the edge length is the lattice distance; for a
    scaled base-graph it is the effective (inverted) distance, and edges with
    infinite effective distance are withheld.
    """

    def __init__(self, graph: BaseGraph | ScaledBaseGraph):
        self.scaled = isinstance(graph, ScaledBaseGraph)
        self.base = graph.base if self.scaled else graph
        self._graph = graph

    def incident(self, node: int) -> list[tuple[int, int, float]]:
        out = []
        for h, nb in self.base.adjacency.get(node, ()):
            length = self._graph.target_distance[h] if self.scaled else float(self.base.edges[h].distance)
            if not math.isinf(length):
                out.append((h, nb, length))
        return out

    def position(self, node: int) -> tuple:
        return self.base.position(node)


def ttl_for(n: int) -> int:
    return max(1, math.ceil(4 * math.log2(max(n, 1)) ** 2))


def greedy_route(
    graph: BaseGraph | ScaledBaseGraph,
    source: int,
    target: int,
    forbidden: Iterable[int] = (),
    view: LocalView | None = None,
) -> Route:
    """Route by always moving to the unvisited neighbour closest (L1) to the target.

    Each move must strictly reduce the lattice distance to the target. Ties
    go to the shorter edge on scaled graphs, then to the lowest node id.
    """
    view = view or LocalView(graph)
    forbidden = frozenset(forbidden)
    if source in forbidden or target in forbidden:
        raise ValueError("source and target may not be forbidden")
    tpos = view.position(target)
    view.position(source)
    if source == target:
        return Route((source,))
    ttl = ttl_for((graph.base if isinstance(graph, ScaledBaseGraph) else graph).n)
    nodes, edges = [source], []
    visited = {source}
    cur = source
    cur_d = l1_distance(view.position(source), tpos)
    while cur != target:
        best = None
        for h, nb, length in view.incident(cur):
            if nb in visited or nb in forbidden:
                continue
            d = l1_distance(view.position(nb), tpos)
            if d >= cur_d:
                continue
            key = (d, length if view.scaled else 0.0, nb, h)
            if best is None or key < best:
                best = key
        if best is None:
            raise RoutingFailure(cur)
        if len(edges) >= ttl:
            raise TTLExceeded(cur, ttl)
        cur_d, _, cur, h = best
        visited.add(cur)
        nodes.append(cur)
        edges.append(h)
    return Route(tuple(nodes), tuple(edges))


@dataclass
class StepStats:
    mean: float
    trials: int
    failures: int
    steps: list = field(default_factory=list)

    @property
    def failure_fraction(self) -> float:
        return self.failures / self.trials


def measure_steps(config: GeneratorConfig, trials: int, seed: int) -> StepStats:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    net = generate_network(config, seed)
    g = embed_overlay(net, k=config.k, seed=seed)
    rng = stream(seed, "trials")
    nodes = np.asarray(g.nodes)
    steps, failures = [], 0
    for _ in range(trials):
        s, t = rng.choice(nodes, size=2, replace=False)
        try:
            steps.append(greedy_route(g, int(s), int(t)).steps)
        except RoutingFailure:
            failures += 1
    if not steps:
        raise MeasurementError(1.0)
    return StepStats(float(np.mean(steps)), trials, failures, steps)


def average_step_count(config: GeneratorConfig, trials: int, seed: int) -> float:
    return measure_steps(config, trials, seed).mean

