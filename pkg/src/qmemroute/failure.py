"""Quantum-memory failure injection, switchover planning and restoration."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

from .base_graph import BaseGraph, embed_overlay
from .costs import REPLACEMENT, CostModel, build_cost_model
from .disjoint import DisjointPathSet, find_disjoint_paths
from .errors import NoMainPathError, SwitchoverFailed
from .overlay import Demand, OverlayNetwork, Placement
from .routing import Route

ACTIVE = "active"
RESTORED = "restored"


@dataclass(frozen=True)
class FailureEvent:
    failed_node: int
    destroyed_connections: frozenset
    affected_nodes: frozenset
    tick: int = 0


def inject_failure(net: OverlayNetwork, node: int, tick: int = 0) -> tuple[FailureEvent, OverlayNetwork]:
    """Destroy every active connection stored at ``node``; the input network is untouched."""
    net.check_node(node)
    destroyed = frozenset(h for h, _ in net.adjacency[node])
    affected = frozenset(nb for _, nb in net.adjacency[node]) - {node}
    return FailureEvent(node, destroyed, affected, tick), net.without(destroyed)


def loss_count(net: OverlayNetwork, node: int) -> int:
    net.check_node(node)
    return len(net.adjacency[node])


@dataclass(frozen=True)
class SwitchoverPlan:
    main_path: Route
    failure: FailureEvent
    view: OverlayNetwork
    replacement_source: int | None = None
    replacement_target: int | None = None
    replacement_paths: DisjointPathSet | None = None
    status: str = ACTIVE

    def to_dict(self) -> dict:
        return {
            "failed_node": self.failure.failed_node,
            "destroyed": sorted(self.failure.destroyed_connections),
            "replacement_source": self.replacement_source,
            "replacement_target": self.replacement_target,
            "status": self.status,
            "replacement": self.replacement_paths.to_dict() if self.replacement_paths else None,
        }


def switchover_endpoints(main: Route, event: FailureEvent) -> tuple[int, int]:
    """Main-path nodes bracketing every main-path node that lost a contact."""
    hit = [i for i, v in enumerate(main.nodes) if v == event.failed_node or v in event.affected_nodes]
    lo, hi = min(hit), max(hit)
    if main.nodes[lo] == event.failed_node:
        lo -= 1
    if main.nodes[hi] == event.failed_node:
        hi += 1
    if lo < 0 or hi >= len(main.nodes):
        raise SwitchoverFailed(
            f"failed node {event.failed_node} is a path endpoint; no replacement span exists",
            {"failed_node": event.failed_node},
        )
    return main.nodes[lo], main.nodes[hi]


def plan_switchover(
    main: Route,
    event: FailureEvent,
    g: BaseGraph,
    view: OverlayNetwork,
    z: int = 1,
    max_concurrences: int = 3,
    forbid_affected: bool = False,
    cm: CostModel | None = None,
) -> SwitchoverPlan:
    """Replacement paths around a failed main-path node.

    ``g`` is the pre-failure base-graph; the replacement search runs on the
    post-failure view embedded at the same positions, with costs recomputed
    there (``cm`` overrides that). Replacement paths may use high-degree nodes.
    """
    if event.failed_node not in main.nodes:
        return SwitchoverPlan(main, event, view, status=RESTORED)
    src, dst = switchover_endpoints(main, event)
    post = embed_overlay(view, k=g.k, n=g.n, placement=Placement(g.k, g.n, g.positions))
    cm = cm or build_cost_model(post)
    forbidden = {event.failed_node}
    if forbid_affected:
        forbidden |= set(event.affected_nodes) - {src, dst}
    try:
        paths = find_disjoint_paths(
            post,
            cm,
            Demand(user=0, source=src, target=dst),
            z,
            max_concurrences,
            forbidden=forbidden,
            main_avoids_hubs=False,
            first_membership=REPLACEMENT,
        )
    except (NoMainPathError, ValueError) as exc:
        raise SwitchoverFailed(
            f"no replacement path from {src} to {dst}: {exc}",
            {"source": src, "target": dst, "failed_node": event.failed_node},
        ) from exc
    if not paths.paths:
        raise SwitchoverFailed(
            f"concurrence budget exhausted between {src} and {dst}",
            {"source": src, "target": dst, "kappa": paths.concurrence_count, "trace": paths.trace},
        )
    return SwitchoverPlan(main, event, view, src, dst, paths, ACTIVE)


def restore(plan: SwitchoverPlan) -> SwitchoverPlan:
    if plan.status == RESTORED:
        return plan
    return dataclasses.replace(
        plan, view=plan.view.with_restored(plan.failure.destroyed_connections), status=RESTORED
    )


def active_route(plan: SwitchoverPlan) -> Route:
    """Route carrying traffic under the plan: main path once restored, else the spliced replacement."""
    if plan.status == RESTORED or plan.replacement_paths is None:
        return plan.main_path
    nodes = list(plan.main_path.nodes)
    edges = list(plan.main_path.edges)
    i, j = nodes.index(plan.replacement_source), nodes.index(plan.replacement_target)
    rep = plan.replacement_paths.paths[0]
    return Route(tuple(nodes[:i] + list(rep.nodes) + nodes[j + 1 :]), tuple(edges[:i] + list(rep.edges) + edges[j:]))
