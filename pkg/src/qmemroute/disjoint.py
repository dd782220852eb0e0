"""Penalty-based discovery of a main path plus node-disjoint replacement paths,
with the min-sum objective, its constraint validators and a brute-force oracle."""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

from .base_graph import BaseGraph, build_scaled_graph
from .costs import MAIN, REPLACEMENT, CostModel
from .errors import NoMainPathError, RoutingFailure
from .overlay import Demand, OverlayNetwork, high_degree_nodes
from .routing import LocalView, Route, greedy_route

COMPLETE = "complete"
BUDGET_EXHAUSTED = "budget_exhausted"


@dataclass
class DisjointPathSet:
    source: int
    target: int
    paths: list = field(default_factory=list)
    per_path_cost: list = field(default_factory=list)
    edge_costs: list = field(default_factory=list)
    concurrence_count: int = 1
    max_concurrences: int = 1
    requested: int = 1
    status: str = COMPLETE
    trace: list = field(default_factory=list)
    aux: AuxiliaryCosts | None = field(default=None, repr=False, compare=False)

    @property
    def complete(self) -> bool:
        return self.status == COMPLETE

    @property
    def total_cost(self) -> float:
        return float(sum(self.per_path_cost))

    @property
    def total_replacement_cost(self) -> float:
        return float(sum(self.per_path_cost[1:]))

    @property
    def main(self) -> Route | None:
        return self.paths[0] if self.paths else None

    def to_solution(self, user: int = 0) -> Solution:
        if not self.paths:
            return Solution()
        return Solution(
            C={user: _arcs(self.paths[0])},
            Z={user: tuple(_arcs(p) for p in self.paths[1:])},
        )

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "target": self.target,
            "status": self.status,
            "requested": self.requested,
            "paths": [p.to_dict() for p in self.paths],
            "omega": list(self.per_path_cost),
            "psi_total": self.total_cost,
            "psi_replacement": self.total_replacement_cost,
            "kappa": self.concurrence_count,
            "max_concurrences": self.max_concurrences,
            "trace": self.trace,
        }


@dataclass
class AuxiliaryCosts:
    """Working state of the penalty loop.

    ``per_path[p][h]`` is delta^(p) for edge h, ``penalty[h]`` the accumulated
    prohibition surcharge; zeta for path j is their sum.
    """

    per_path: list
    penalty: dict

    @classmethod
    def initial(cls, cm: CostModel, edges, z: int, first_membership: str = MAIN, initial_costs=None) -> AuxiliaryCosts:
        per_path = []
        for p in range(z):
            membership = first_membership if p == 0 else REPLACEMENT
            costs = {h: (cm.gamma[h] if membership == MAIN else cm.tau[h]) for h in edges}
            if initial_costs is not None:
                costs.update({h: float(initial_costs[h]) for h in edges if h in initial_costs})
            per_path.append(costs)
        return cls(per_path, dict.fromkeys(edges, 0.0))

    def zeta(self, j: int) -> dict:
        return {h: c + self.penalty[h] for h, c in self.per_path[j].items()}

    def copy(self) -> AuxiliaryCosts:
        return AuxiliaryCosts([dict(c) for c in self.per_path], dict(self.penalty))


@dataclass(frozen=True)
class Arc:
    edge: int
    tail: int
    head: int


def _arcs(route: Route) -> frozenset:
    return frozenset(Arc(h, u, v) for h, u, v in route.arcs())


@dataclass
class Solution:
    """Per-user edge usage: ``C`` for the main path, ``Z`` one arc set per replacement path."""

    C: dict = field(default_factory=dict)
    Z: dict = field(default_factory=dict)

    def users(self) -> list:
        return sorted(set(self.C) | set(self.Z))

    def main_usage(self) -> dict:
        return {(k, a.edge): 1 for k, arcs in self.C.items() for a in arcs}

    def replacement_usage(self) -> dict:
        return {(k, a.edge): 1 for k, layers in self.Z.items() for arcs in layers for a in arcs}


class _CountingView(LocalView):
    def __init__(self, graph, finder):
        super().__init__(graph)
        self.finder = finder

    def incident(self, node):
        out = super().incident(node)
        self.finder.inspections += len(out)
        return out


class GreedyFinder:
    """Runs the greedy router on the scaled base-graph built from the working costs."""

    scaling = "reciprocal"
    # how strongly a cost gap lowers the scaled coefficient
    sensitivity = 0.1

    def __init__(self, g: BaseGraph):
        self.g = g
        self.calls = 0
        self.steps = 0
        self.inspections = 0

    def __call__(self, costs, source, target, forbidden) -> Route:
        self.calls += 1
        sg = build_scaled_graph(self.g, costs, scaling=self.scaling, exponent=self.sensitivity)
        route = greedy_route(sg, source, target, forbidden, view=_CountingView(sg, self))
        self.steps += route.steps
        return route


def penalty_disjoint_paths(
    g: BaseGraph,
    cm: CostModel,
    source: int,
    target: int,
    z: int,
    max_concurrences: int,
    finder,
    forbidden: Iterable[int] = (),
    main_avoids_hubs: bool = True,
    first_membership: str = MAIN,
    initial_costs: Mapping[int, float] | None = None,
) -> DisjointPathSet:
    """Main path then z-1 replacements, penalising prohibited and concurring connections.

    ``finder(costs, source, target, forbidden)`` returns a Route or raises
    RoutingFailure. Prohibition penalties persist across restarts; per-path
    costs only grow. When the concurrence budget runs out, the largest path
    set assembled before any restart is returned (earliest on ties).
    """
    if source == target:
        raise ValueError("source and target must differ")
    if z < 1 or max_concurrences < 1:
        raise ValueError("z and max_concurrences must be >= 1")
    edges = sorted(g.edges)
    if not edges:
        raise NoMainPathError(f"no connections available between {source} and {target}")
    aux = AuxiliaryCosts.initial(cm, edges, z, first_membership, initial_costs)
    delta, penalty = aux.per_path, aux.penalty
    base_forbidden = frozenset(forbidden) - {source, target}
    hubs = (high_degree_nodes(g.network) & set(g.positions)) - {source, target} if main_avoids_hubs else frozenset()

    kappa = 1
    discovered: list[tuple[Route, float, dict]] = []
    best: list[tuple[Route, float, dict]] = []
    trace: list[dict] = []
    j = 0
    while True:
        zeta = aux.zeta(j)
        forb = base_forbidden | (hubs if j == 0 else frozenset())
        try:
            cand = finder(zeta, source, target, forb)
        except RoutingFailure as exc:
            if j == 0 and kappa == 1:
                raise NoMainPathError(f"no main path from {source} to {target}: {exc}") from exc
            cand, stuck = None, exc.node
        shared_nodes: set = set()
        shared_edges: set = set()
        if cand is not None:
            for route, _, _ in discovered:
                shared_nodes |= cand.interior & route.interior
                shared_edges |= set(cand.edges) & set(route.edges)
        if cand is not None and not shared_nodes and not shared_edges:
            own = {h: delta[j][h] for h in cand.edges}
            omega = sum(own[h] for h in cand.edges)
            discovered.append((Route(cand.nodes, cand.edges, omega), omega, own))
            prohibited = {h for v in cand.interior for h, _ in g.adjacency[v]}
            for h in prohibited:
                penalty[h] += omega
            j += 1
            if j == z:
                return _result(source, target, discovered, kappa, max_concurrences, z, COMPLETE, trace, aux)
            continue

        concurring = {h for v in shared_nodes for h, _ in g.adjacency[v]} | shared_edges
        c_j = sum(delta[j][h] for h in cand.edges) if cand is not None else 0.0
        for p in range(z):
            for h in concurring:
                delta[p][h] += c_j
        kappa += 1
        trace.append(
            {
                "kappa": kappa,
                "path_index": j + 1,
                "candidate": list(cand.nodes) if cand is not None else None,
                "dead_end": None if cand is not None else stuck,
                "shared_nodes": sorted(shared_nodes),
                "shared_edges": sorted(shared_edges),
                "penalty": c_j,
            }
        )
        if len(discovered) > len(best):
            best = list(discovered)
        if kappa > max_concurrences:
            return _result(source, target, best, kappa, max_concurrences, z, BUDGET_EXHAUSTED, trace, aux)
        discovered = []
        j = 0


def _result(source, target, discovered, kappa, budget, z, status, trace, aux) -> DisjointPathSet:
    return DisjointPathSet(
        source=source,
        target=target,
        paths=[r for r, _, _ in discovered],
        per_path_cost=[o for _, o, _ in discovered],
        edge_costs=[c for _, _, c in discovered],
        concurrence_count=kappa,
        max_concurrences=budget,
        requested=z,
        status=status,
        trace=trace,
        aux=aux,
    )


def find_disjoint_paths(
    g: BaseGraph,
    cm: CostModel,
    demand: Demand,
    z: int,
    max_concurrences: int,
    forbidden: Iterable[int] = (),
    main_avoids_hubs: bool = True,
    first_membership: str = MAIN,
    finder=None,
) -> DisjointPathSet:
    return penalty_disjoint_paths(
        g,
        cm,
        demand.source,
        demand.target,
        z,
        max_concurrences,
        finder or GreedyFinder(g),
        forbidden=forbidden,
        main_avoids_hubs=main_avoids_hubs,
        first_membership=first_membership,
    )


# objective and constraints


def objective_phi(sol: Solution, cm: CostModel) -> float:
    main = sum(cm.gamma[h] for (_, h) in sol.main_usage())
    repl = sum(cm.tau[h] for (_, h) in sol.replacement_usage())
    return float(main + repl)


@dataclass
class FlowReport:
    ok: bool
    deltas: dict
    replacement_deltas: list
    violations: list

    def to_dict(self) -> dict:
        return {"ok": self.ok, "violations": [list(v) for v in self.violations]}


def _flow_deltas(arcs, nodes) -> dict:
    delta = dict.fromkeys(nodes, 0)
    for a in arcs:
        delta[a.tail] = delta.get(a.tail, 0) + 1
        delta[a.head] = delta.get(a.head, 0) - 1
    return delta


def validate_flow_conservation(sol: Solution, demand: Demand, g: BaseGraph) -> FlowReport:
    """Egress minus ingress per node: +1 at the source, -1 at the target, 0 elsewhere.

    The main path and every replacement path are checked as separate unit flows.
    """
    k = demand.user
    layers = [("C", sol.C.get(k, frozenset()))]
    layers += [(f"Z{i + 2}", arcs) for i, arcs in enumerate(sol.Z.get(k, ()))]
    nodes = g.nodes
    violations = []
    computed = []
    for name, arcs in layers:
        for a in arcs:
            e = g.edges.get(a.edge)
            if e is None or {a.tail, a.head} != {e.a, e.b}:
                raise ValueError(f"arc {a} does not match an edge of the base-graph")
        d = _flow_deltas(arcs, nodes)
        computed.append(d)
        for v in sorted(d):
            want = 1 if v == demand.source else -1 if v == demand.target else 0
            if d[v] != want:
                violations.append((name, v, d[v], want))
    return FlowReport(not violations, computed[0], computed[1:], violations)


@dataclass
class ThroughputReport:
    ok: bool
    loads: dict
    violations: list

    def to_dict(self) -> dict:
        return {"ok": self.ok, "violations": [list(v) for v in self.violations]}


def validate_throughput(sol: Solution, demands: Sequence[Demand], net: OverlayNetwork) -> ThroughputReport:
    """Requested throughput routed over each connection must not exceed its capacity."""
    need = {}
    for d in demands:
        if d.user in need:
            raise ValueError(f"user {d.user} has more than one demand in this solution")
        need[d.user] = d.required_throughput
    loads: dict[int, float] = {}
    usage = list(sol.main_usage()) + list(sol.replacement_usage())
    for k, h in usage:
        loads[h] = loads.get(h, 0.0) + need.get(k, 0.0)
    violations = [
        (h, load, net.connections[h].q_f) for h, load in sorted(loads.items()) if load > net.connections[h].q_f
    ]
    return ThroughputReport(not violations, loads, violations)


def validate_disjointness(dps: DisjointPathSet) -> tuple[bool, dict | None]:
    paths = dps.paths
    for i in range(len(paths)):
        for j in range(i + 1, len(paths)):
            common = paths[i].interior & paths[j].interior
            if common:
                return False, {"node": min(common), "paths": (i + 1, j + 1)}
            shared = set(paths[i].edges) & set(paths[j].edges)
            if shared:
                return False, {"edge": min(shared), "paths": (i + 1, j + 1)}
    sol = dps.to_solution()
    main, repl = sol.main_usage(), sol.replacement_usage()
    both = set(main) & set(repl)
    if both:
        return False, {"edge": min(h for _, h in both)}
    return True, None


# exhaustive oracle


def enumerate_simple_paths(g: BaseGraph, source: int, target: int, limit: int = 200_000) -> list[Route]:
    """All simple source-target paths, distinguishing parallel connections."""
    out: list[Route] = []
    nodes, edges, on_path = [source], [], {source}

    def walk(v):
        if len(out) > limit:
            raise RuntimeError("path enumeration limit exceeded")
        if v == target:
            out.append(Route(tuple(nodes), tuple(edges)))
            return
        for h, nb in sorted(g.adjacency[v], key=lambda x: (x[1], x[0])):
            if nb in on_path:
                continue
            on_path.add(nb)
            nodes.append(nb)
            edges.append(h)
            walk(nb)
            edges.pop()
            nodes.pop()
            on_path.discard(nb)

    walk(source)
    return out


def optimal_disjoint_cost(
    g: BaseGraph, cm: CostModel, source: int, target: int, z: int, main_avoids_hubs: bool = True
) -> tuple[float | None, list]:
    """Minimum of gamma(main) + sum tau(replacements) over feasible z-tuples, or None."""
    paths = enumerate_simple_paths(g, source, target)
    hubs = (high_degree_nodes(g.network) - {source, target}) if main_avoids_hubs else frozenset()
    repl = sorted(((sum(cm.tau[h] for h in p.edges), i) for i, p in enumerate(paths)))
    mains = sorted(
        (sum(cm.gamma[h] for h in p.edges), i) for i, p in enumerate(paths) if not (p.interior & hubs)
    )
    best = [math.inf, None]

    def compatible(a: Route, b: Route) -> bool:
        return not (a.interior & b.interior) and not (set(a.edges) & set(b.edges))

    def extend(chosen, cost, start):
        if len(chosen) == z:
            if cost < best[0]:
                best[0], best[1] = cost, list(chosen)
            return
        for pos in range(start, len(repl)):
            c, i = repl[pos]
            if cost + c >= best[0]:
                break
            p = paths[i]
            if any(q is p or not compatible(p, q) for q in chosen):
                continue
            chosen.append(p)
            extend(chosen, cost + c, pos + 1)
            chosen.pop()

    for c, i in mains:
        if c >= best[0]:
            break
        extend([paths[i]], c, 0)
    if best[1] is None:
        return None, []
    return best[0], best[1]


@dataclass
class GapResult:
    heuristic_psi: float | None
    optimal_psi: float | None
    gap: float | None
    status: str
    heuristic: DisjointPathSet | None = None


def base_cost(dps: DisjointPathSet, cm: CostModel) -> float:
    """Objective value of a path set: gamma on the main path, tau on replacements."""
    total = sum(cm.gamma[h] for h in dps.paths[0].edges)
    for p in dps.paths[1:]:
        total += sum(cm.tau[h] for h in p.edges)
    return float(total)


def optimality_gap(g: BaseGraph, cm: CostModel, demand: Demand, z: int, max_concurrences: int = 10) -> GapResult:
    if len(g.positions) > 10:
        raise ValueError("enumeration oracle limited to 10 nodes")
    optimum, _ = optimal_disjoint_cost(g, cm, demand.source, demand.target, z)
    try:
        heur = find_disjoint_paths(g, cm, demand, z, max_concurrences)
    except NoMainPathError:
        heur = None
    if heur is None or not heur.complete:
        status = "infeasible" if optimum is None else "heuristic_incomplete"
        return GapResult(None, optimum, None, status, heur)
    if optimum is None:
        raise AssertionError("heuristic returned a complete set where the oracle found none")
    value = base_cost(heur, cm)
    gap = value - optimum
    return GapResult(value, optimum, gap, "optimal" if abs(gap) <= 1e-12 else "suboptimal", heur)
