"""Dijkstra-based comparison schemes, operation counters and the closed-form
complexity envelopes of the compared methods."""

from __future__ import annotations

import heapq
import itertools
import math
import time
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

from .base_graph import BaseGraph, embed_overlay
from .costs import CostModel, build_cost_model
from .disjoint import (
    BUDGET_EXHAUSTED,
    COMPLETE,
    DisjointPathSet,
    GreedyFinder,
    penalty_disjoint_paths,
)
from .errors import ConfigError, NoMainPathError, NoPathError
from .overlay import Demand, GeneratorConfig, generate_network
from .rng import stream
from .routing import Route

SCHEMES = ("proposed", "kpa", "kpi", "ksp")


@dataclass
class OpCounter:
    relaxations: int = 0
    queue_ops: int = 0
    greedy_steps: int = 0
    N_O: int = 0

    def add(self, other: OpCounter) -> None:
        self.relaxations += other.relaxations
        self.queue_ops += other.queue_ops
        self.greedy_steps += other.greedy_steps
        self.N_O += other.N_O


def dijkstra(
    g: BaseGraph,
    source: int,
    target: int,
    costs: Mapping[int, float],
    forbidden: Iterable[int] = (),
    removed: Iterable[int] = (),
    counter: OpCounter | None = None,
) -> Route:
    """Exact minimum-cost path; raises NoPathError when the target is unreachable."""
    counter = counter if counter is not None else OpCounter()
    forbidden = frozenset(forbidden)
    removed = frozenset(removed)
    dist = {source: 0.0}
    prev: dict[int, tuple[int, int]] = {}
    done = set()
    tie = itertools.count()
    heap = [(0.0, source, next(tie))]
    counter.queue_ops += 1
    while heap:
        d, v, _ = heapq.heappop(heap)
        counter.queue_ops += 1
        if v in done:
            continue
        done.add(v)
        if v == target:
            break
        for h, nb in sorted(g.adjacency[v], key=lambda x: (x[1], x[0])):
            if h in removed or nb in forbidden or nb in done:
                continue
            w = costs[h]
            if w < 0:
                raise ValueError(f"negative cost on edge {h}")
            counter.relaxations += 1
            nd = d + w
            if nd < dist.get(nb, math.inf):
                dist[nb] = nd
                prev[nb] = (v, h)
                heapq.heappush(heap, (nd, nb, next(tie)))
                counter.queue_ops += 1
    if target not in done:
        raise NoPathError(source, target)
    nodes, edges = [target], []
    while nodes[-1] != source:
        v, h = prev[nodes[-1]]
        nodes.append(v)
        edges.append(h)
    return Route(tuple(reversed(nodes)), tuple(reversed(edges)), dist[target])


def shortest_path_dijkstra(g: BaseGraph, source: int, target: int, costs: Mapping[int, float]):
    counter = OpCounter()
    route = dijkstra(g, source, target, costs, counter=counter)
    counter.N_O = counter.relaxations
    return route, counter


class DijkstraFinder:
    def __init__(self, g: BaseGraph):
        self.g = g
        self.counter = OpCounter()

    def __call__(self, costs, source, target, forbidden) -> Route:
        return dijkstra(self.g, source, target, costs, forbidden, counter=self.counter)


def kpa_kpi_disjoint(
    g: BaseGraph,
    cm: CostModel,
    demand: Demand,
    z: int,
    max_concurrences: int,
    initial_matrix: Mapping[int, float] | None = None,
) -> tuple[DisjointPathSet, OpCounter]:
    """Same penalty loop as the proposed method, paths found by Dijkstra.

    With ``initial_matrix`` (KPI) the per-path costs start from the given
    per-edge values instead of gamma/tau.
    """
    finder = DijkstraFinder(g)
    dps = penalty_disjoint_paths(
        g, cm, demand.source, demand.target, z, max_concurrences, finder, initial_costs=initial_matrix
    )
    finder.counter.N_O = finder.counter.relaxations
    return dps, finder.counter


def ksp_disjoint(g: BaseGraph, demand: Demand, z: int, costs: Mapping[int, float]) -> tuple[DisjointPathSet, OpCounter]:
    """Successive shortest paths, deleting the links of each path before the next search."""
    if z < 1:
        raise ValueError("z must be >= 1")
    counter = OpCounter()
    removed: set = set()
    paths = []
    for _ in range(z):
        try:
            route = dijkstra(g, demand.source, demand.target, costs, removed=removed, counter=counter)
        except NoPathError:
            break
        paths.append(route)
        removed |= set(route.edges)
    counter.N_O = counter.relaxations
    dps = DisjointPathSet(
        source=demand.source,
        target=demand.target,
        paths=paths,
        per_path_cost=[r.total_cost for r in paths],
        edge_costs=[{h: costs[h] for h in r.edges} for r in paths],
        requested=z,
        status=COMPLETE if len(paths) == z else BUDGET_EXHAUSTED,
    )
    return dps, counter


def proposed_disjoint(g: BaseGraph, cm: CostModel, demand: Demand, z: int, max_concurrences: int):
    finder = GreedyFinder(g)
    dps = penalty_disjoint_paths(g, cm, demand.source, demand.target, z, max_concurrences, finder)
    counter = OpCounter(relaxations=finder.inspections, greedy_steps=finder.steps, N_O=finder.steps)
    return dps, counter


def complexity_envelope(scheme: str, n: float, bound: float) -> float:
    """Operation-count envelope N_O; ``bound`` is the concurrence budget, or z for ksp."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if scheme == "proposed":
        return (bound * math.log10(n)) ** 2
    if scheme in ("kpa", "kpi"):
        return bound * n**2
    if scheme == "ksp":
        return bound * n * math.log10(n)
    raise ValueError(f"unknown scheme {scheme!r}")


def envelope_grid(n_values: Sequence[int], bounds: Sequence[int]) -> dict:
    """Plot-ready envelope series: one list of (n, bound, N_O) triples per scheme."""
    return {
        scheme: [[n, b, complexity_envelope(scheme, n, b)] for b in bounds for n in n_values]
        for scheme in ("proposed", "kpa", "ksp")
    }


@dataclass
class BenchConfig:
    n: list = field(default_factory=lambda: [100])
    max_concurrences: list = field(default_factory=lambda: [10])
    z: list = field(default_factory=lambda: [10])
    paths: int = 2
    demands: int = 3
    family: str = "kleinberg"
    k: int = 2
    mean_degree: float = 4.0

    @classmethod
    def from_dict(cls, d: Mapping) -> BenchConfig:
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"bench: unknown keys {sorted(unknown)}")
        out = cls(**d)
        for key in ("n", "max_concurrences", "z"):
            val = getattr(out, key)
            if isinstance(val, (int, float)):
                setattr(out, key, [val])
        if any(n < 2 for n in out.n):
            raise ConfigError("bench: every n must be >= 2")
        if any(b < 1 for b in out.max_concurrences + out.z) or out.paths < 1 or out.demands < 1:
            raise ConfigError("bench: budgets, z, paths and demands must be >= 1")
        return out


BENCH_COLUMNS = [
    "scheme",
    "n",
    "bound_or_z",
    "N_O_envelope",
    "N_O_measured",
    "success",
    "psi_total",
    "wall_time_ms",
]


def _instance(cfg: BenchConfig, n: int, seed: int):
    net = generate_network(GeneratorConfig(n=n, family=cfg.family, k=cfg.k, mean_degree=cfg.mean_degree), seed)
    g = embed_overlay(net, k=cfg.k, seed=seed)
    cm = build_cost_model(g)
    rng = stream(seed, f"bench-demands-{n}")
    demands = []
    for i in range(cfg.demands):
        s, t = rng.choice(n, size=2, replace=False)
        demands.append(Demand(user=i, source=int(s), target=int(t), demand_id=i))
    return g, cm, demands


def _run(scheme, g, cm, demand, z, budget):
    if scheme == "proposed":
        return proposed_disjoint(g, cm, demand, z, budget)
    if scheme == "kpa":
        return kpa_kpi_disjoint(g, cm, demand, z, budget)
    if scheme == "kpi":
        # initial matrix: lattice distance per connection, a cost known before any routing
        init = {h: float(e.distance) for h, e in g.edges.items()}
        return kpa_kpi_disjoint(g, cm, demand, z, budget, initial_matrix=init)
    return ksp_disjoint(g, demand, z, cm.tau)


def bench_campaign(cfg: BenchConfig, seed: int) -> list[dict]:
    """One row per (scheme, n, bound) cell; solver failures are recorded, not raised."""
    rows = []
    instances = {}
    for n in cfg.n:
        instances[n] = _instance(cfg, n, seed)
    for n, budget, z_ksp in itertools.product(cfg.n, cfg.max_concurrences, cfg.z):
        g, cm, demands = instances[n]
        for scheme in SCHEMES:
            bound = z_ksp if scheme == "ksp" else budget
            z = z_ksp if scheme == "ksp" else cfg.paths
            total = OpCounter()
            ok, psis = 0, []
            start = time.perf_counter()
            for d in demands:
                try:
                    dps, counter = _run(scheme, g, cm, d, z, budget)
                except NoMainPathError:
                    continue
                total.add(counter)
                if dps.complete:
                    ok += 1
                    psis.append(dps.total_cost)
            elapsed = (time.perf_counter() - start) * 1000.0
            rows.append(
                {
                    "scheme": scheme,
                    "n": n,
                    "bound_or_z": bound,
                    "N_O_envelope": complexity_envelope(scheme, n, bound),
                    "N_O_measured": total.N_O / len(demands),
                    "success": ok / len(demands),
                    "psi_total": sum(psis) / len(psis) if psis else None,
                    "wall_time_ms": elapsed,
                    "relaxations": total.relaxations / len(demands),
                    "greedy_steps": total.greedy_steps / len(demands),
                }
            )
    return rows
