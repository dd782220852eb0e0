"""Betweenness-derived edge coefficients for main and replacement paths."""

from __future__ import annotations

from collections import deque
from collections.abc import Mapping
from dataclasses import dataclass, field
from fractions import Fraction

MAIN = "main"
REPLACEMENT = "replacement"


def _neighbour_sets(g) -> dict[int, set]:
    # parallel connections at different levels count as one hop
    return {v: {nb for _, nb in nbrs} for v, nbrs in g.adjacency.items()}


def _edge_endpoints(g) -> dict[int, tuple[int, int]]:
    if hasattr(g, "edges") and isinstance(g.edges, Mapping):
        return {h: (e.a, e.b) for h, e in g.edges.items()}
    return {h: (c.a, c.b) for h, c in g.active()}


def _bfs(adj, source):
    dist = {source: 0}
    sigma = {source: 1}
    order = []
    preds = {source: []}
    queue = deque([source])
    while queue:
        v = queue.popleft()
        order.append(v)
        for w in sorted(adj[v]):
            if w not in dist:
                dist[w] = dist[v] + 1
                sigma[w] = 0
                preds[w] = []
                queue.append(w)
            if dist[w] == dist[v] + 1:
                sigma[w] += sigma[v]
                preds[w].append(v)
    return dist, sigma, order, preds


def shortest_path_counts(g, p: int, q: int) -> tuple[int, dict[int, int]]:
    """Number of minimum-hop p-q paths, and how many of them pass through each transit node."""
    if p == q:
        raise ValueError("p and q must differ")
    adj = _neighbour_sets(g)
    dp, sp, _, _ = _bfs(adj, p)
    if q not in dp:
        return 0, {}
    dq, sq, _, _ = _bfs(adj, q)
    total = sp[q]
    through = {}
    for n, d in dp.items():
        if n in (p, q) or n not in dq:
            continue
        if d + dq[n] == dp[q]:
            through[n] = sp[n] * sq[n]
    return total, through


def compute_chi_exact(g) -> dict[int, Fraction]:
    """Sum over unordered pairs {p, q} of the share of p-q geodesics transiting each node."""
    adj = _neighbour_sets(g)
    chi = {v: Fraction(0) for v in adj}
    for s in adj:
        _, sigma, order, preds = _bfs(adj, s)
        dep = {v: Fraction(0) for v in order}
        for w in reversed(order):
            for v in preds[w]:
                dep[v] += Fraction(sigma[v], sigma[w]) * (1 + dep[w])
            if w != s:
                chi[w] += dep[w]
    # every unordered pair was visited from both ends
    return {v: x / 2 for v, x in chi.items()}


def _normalize(values: Mapping) -> dict:
    top = max(values.values(), default=0)
    if top <= 0:
        return {k: Fraction(0) if isinstance(v, Fraction) else 0.0 for k, v in values.items()}
    return {k: v / top for k, v in values.items()}


def compute_chi_beta(g) -> tuple[dict[int, float], dict[int, float]]:
    chi = compute_chi_exact(g)
    beta = _normalize(chi)
    return {v: float(x) for v, x in chi.items()}, {v: float(x) for v, x in beta.items()}


@dataclass(frozen=True)
class CostModel:
    chi: Mapping[int, float]
    beta: Mapping[int, float]
    gamma: Mapping[int, float]
    tau: Mapping[int, float]
    chi_exact: Mapping[int, Fraction] = field(default_factory=dict, repr=False, compare=False)

    def delta(self, h: int, membership: str = MAIN) -> float:
        return delta(h, membership, self)

    def to_rows(self) -> tuple[list[dict], list[dict]]:
        nodes = [{"node": v, "chi": self.chi[v], "beta": self.beta[v]} for v in sorted(self.chi)]
        edges = [{"edge": h, "gamma": self.gamma[h], "tau": self.tau[h]} for h in sorted(self.gamma)]
        return nodes, edges


def cost_model_from_chi(chi: Mapping[int, Fraction | float], endpoints: Mapping[int, tuple[int, int]]) -> CostModel:
    chi = dict(chi)
    beta = _normalize(chi)
    gamma = {h: (beta[x] + beta[y]) / 2 for h, (x, y) in endpoints.items()}
    tau = _normalize(gamma)
    return CostModel(
        chi={v: float(x) for v, x in chi.items()},
        beta={v: float(x) for v, x in beta.items()},
        gamma={h: float(x) for h, x in gamma.items()},
        tau={h: float(x) for h, x in tau.items()},
        chi_exact={v: Fraction(x) for v, x in chi.items()},
    )


def build_cost_model(g) -> CostModel:
    """chi, beta, gamma and tau for every node and active edge of ``g``."""
    return cost_model_from_chi(compute_chi_exact(g), _edge_endpoints(g))


def gamma(cm: CostModel, edge: int) -> float:
    return cm.gamma[edge]


def tau(cm: CostModel, edge: int) -> float:
    return cm.tau[edge]


def delta(edge: int, membership: str, cm: CostModel) -> float:
    if membership == MAIN:
        return cm.gamma[edge]
    if membership == REPLACEMENT:
        return cm.tau[edge]
    raise ValueError(f"membership must be {MAIN!r} or {REPLACEMENT!r}, got {membership!r}")
