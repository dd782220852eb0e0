"""Lattice base-graph: embedding, L1 geometry, the power-law probability law
and the distance inversion used to build scaled base-graphs."""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from .errors import (
    CapacityError,
    DomainError,
    EdgeNotFound,
    EmbeddingError,
    GeometryError,
    NodeNotFound,
    SingularityError,
)
from .overlay import OverlayNetwork, Placement, hop_distance
from .rng import stream

SINGULARITY_EPS = 1e-12


def l1_distance(a, b) -> int:
    if len(a) != len(b):
        raise GeometryError(f"dimension mismatch: {len(a)} vs {len(b)}")
    return sum(abs(int(x) - int(y)) for x, y in zip(a, b))


@dataclass(frozen=True)
class Edge:
    """One embedded connection, anchored at endpoint ``a``.

    ``power_term`` is d^-k / H_n(a) and ``c = prob - power_term``, so that
    ``p = power_term + c`` reproduces the overlay probability.

    The float ``c`` pins the power term only to about 1e-16 absolute, which
    is too coarse to invert long edges with tiny power terms; ``c_exact``
    and ``p_exact`` keep the same quantities as rationals.
    """

    h: int
    a: int
    b: int
    level: int
    prob: float
    distance: int
    normalizer: float
    power_term: float
    c: float
    k: int = 2

    @property
    def p(self) -> float:
        return self.power_term + self.c

    @cached_property
    def power_term_exact(self) -> Fraction:
        return Fraction(1, self.distance**self.k) / Fraction(self.normalizer)

    @cached_property
    def c_exact(self) -> Fraction:
        return Fraction(self.prob) - self.power_term_exact

    @property
    def p_exact(self) -> Fraction:
        return self.power_term_exact + self.c_exact

    def other(self, node: int) -> int:
        return self.b if node == self.a else self.a


@dataclass(frozen=True)
class BaseGraph:
    k: int
    n: int
    side: int
    positions: Mapping[int, tuple]
    edges: Mapping[int, Edge]
    normalizers: Mapping[int, float]
    network: OverlayNetwork = field(repr=False)
    warnings: tuple = ()

    @cached_property
    def adjacency(self) -> dict[int, list[tuple[int, int]]]:
        adj = {v: [] for v in self.positions}
        for h, e in self.edges.items():
            adj[e.a].append((h, e.b))
            adj[e.b].append((h, e.a))
        return adj

    @property
    def nodes(self):
        return sorted(self.positions)

    def position(self, node: int) -> tuple:
        try:
            return self.positions[node]
        except KeyError:
            raise NodeNotFound(f"node {node} is not placed in the base-graph") from None

    def distance(self, x: int, y: int) -> int:
        return l1_distance(self.position(x), self.position(y))

    def between(self, x: int, y: int, level: int | None = None) -> list[Edge]:
        found = [
            self.edges[h]
            for h, nb in self.adjacency.get(x, ())
            if nb == y and (level is None or self.edges[h].level == level)
        ]
        if not found:
            raise EdgeNotFound(f"no edge between {x} and {y}" + (f" at level {level}" if level else ""))
        return sorted(found, key=lambda e: e.h)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "n": self.n,
            "placements": {str(v): list(p) for v, p in sorted(self.positions.items())},
            "edges": [
                {
                    "h": e.h,
                    "a": e.a,
                    "b": e.b,
                    "level": e.level,
                    "d": e.distance,
                    "H_n": e.normalizer,
                    "c": e.c,
                    "p": e.p,
                }
                for _, e in sorted(self.edges.items())
            ],
            "warnings": list(self.warnings),
        }


def embed_overlay(
    net: OverlayNetwork,
    k: int = 2,
    n: int | None = None,
    placement=None,
    seed: int = 0,
    strict_levels: bool = False,
) -> BaseGraph:
    """Map the overlay into a k-dimensional lattice with n cells.

    ``placement`` may be a mapping node -> coordinates, a :class:`Placement`,
    the string ``"random"``, or None (use the network's attached placement if
    any, else random under ``seed``).
    """
    if placement is None and net.placement is not None:
        placement = net.placement
    if isinstance(placement, Placement):
        k, n = placement.k, placement.n if n is None else n
        placement = placement.positions
    if k < 1:
        raise GeometryError("dimension k must be >= 1")
    if n is None:
        n = _smallest_lattice(net.n_nodes, k)
    side = round(n ** (1.0 / k))
    if side**k != n:
        side = next((s for s in (side - 1, side + 1) if s >= 1 and s**k == n), None)
        if side is None:
            raise GeometryError(f"lattice size n={n} is not a perfect {k}-th power")
    if n < net.n_nodes:
        raise CapacityError(f"lattice of size {n} cannot hold {net.n_nodes} nodes")

    if placement is None or placement == "random":
        rng = stream(seed, "placement")
        cells = rng.choice(n, size=net.n_nodes, replace=False)
        positions = {
            v: tuple(int(x) for x in np.unravel_index(int(cell), (side,) * k)) for v, cell in enumerate(cells)
        }
    else:
        positions = {}
        taken = {}
        for v in net.nodes:
            if v not in placement:
                raise EmbeddingError(f"explicit placement misses node {v}")
            pos = tuple(int(x) for x in placement[v])
            if len(pos) != k:
                raise GeometryError(f"node {v}: position {pos} has dimension {len(pos)}, expected {k}")
            if any(not 0 <= x < side for x in pos):
                raise EmbeddingError(f"node {v}: position {pos} outside lattice of side {side}")
            if pos in taken:
                raise EmbeddingError(f"placement collision: nodes {taken[pos]} and {v} at {pos}")
            taken[pos] = v
            positions[v] = pos

    active = net.active()
    normalizers: dict[int, float] = {}
    for _, c in active:
        d = l1_distance(positions[c.a], positions[c.b])
        normalizers[c.a] = normalizers.get(c.a, 0.0) + d
        normalizers[c.b] = normalizers.get(c.b, 0.0) + d

    edges = {}
    warnings = []
    for h, c in active:
        d = l1_distance(positions[c.a], positions[c.b])
        expected = hop_distance(c.level)
        if d != expected:
            msg = f"connection {h} ({c.a}-{c.b}) level {c.level} expects lattice distance {expected}, placed at {d}"
            if strict_levels:
                raise EmbeddingError(msg)
            warnings.append(msg)
        hn = normalizers[c.a]
        term = d ** (-k) / hn
        edges[h] = Edge(
            h=h,
            a=c.a,
            b=c.b,
            level=c.level,
            prob=c.prob,
            distance=d,
            normalizer=hn,
            power_term=term,
            c=c.prob - term,
            k=k,
        )
    return BaseGraph(
        k=k,
        n=n,
        side=side,
        positions=positions,
        edges=edges,
        normalizers=normalizers,
        network=net,
        warnings=tuple(warnings),
    )


def _smallest_lattice(nodes: int, k: int) -> int:
    side = max(1, math.ceil(nodes ** (1.0 / k) - 1e-9))
    while side**k < nodes:
        side += 1
    return side**k


def connection_probability(g: BaseGraph, x: int, y: int, level: int | None = None) -> float:
    e = g.between(x, y, level)[0]
    return e.p


def distance_from_probability(p, c, normalizer: float, k: int) -> float:
    """Invert the probability law: lattice distance that yields probability ``p``.

    Floats or Fractions; with a Fraction ``p`` or ``c`` the difference p - c
    and the reciprocal are formed exactly and only the final root is rounded.
    """
    if normalizer <= 0:
        raise DomainError(f"normalizer must be positive, got {normalizer}")
    if k < 1:
        raise DomainError(f"dimension must be >= 1, got {k}")
    if isinstance(p, Fraction) or isinstance(c, Fraction):
        gap = Fraction(p) - Fraction(c)
        if gap < SINGULARITY_EPS:
            raise SingularityError(f"p - c = {float(gap):.3e}: power-law term is not positive")
        return float(1 / (Fraction(normalizer) * gap)) ** (1.0 / k)
    gap = p - c
    if gap < SINGULARITY_EPS:
        raise SingularityError(f"p - c = {gap:.3e}: power-law term is not positive")
    return (1.0 / (normalizer * gap)) ** (1.0 / k)


@dataclass(frozen=True)
class ScaledBaseGraph:
    """Base-graph variant carrying per-edge effective distances.

    ``target_distance[h]`` is +inf for edges whose scaled coefficient does not
    exceed their constant ``c``; those edges are never offered to the router.
    """

    base: BaseGraph
    scaled_cost: Mapping[int, float]
    target_distance: Mapping[int, float]

    @property
    def k(self) -> int:
        return self.base.k

    @property
    def unreachable(self) -> frozenset:
        return frozenset(h for h, d in self.target_distance.items() if math.isinf(d))


def scale_costs(costs: Mapping[int, float], scaling: str = "max", exponent: float = 1.0) -> dict[int, float]:
    """Map non-negative costs into [0, 1].

    ``max``: zeta / max zeta. ``inverse``: (max - zeta) / (max - min), so the
    cheapest edge gets 1 and the most expensive 0. ``reciprocal``:
    ((1 + min) / (1 + zeta)) ** exponent, cheapest 1 and decaying with the
    cost gap; a small exponent keeps ordinary edges near 1 so that only
    edges carrying large penalties fall below their constant c and drop out.
    Constant costs map to 1.
    """
    if not costs:
        return {}
    vals = list(costs.values())
    if any(v < 0 or math.isnan(v) for v in vals):
        raise DomainError("costs must be non-negative")
    lo, hi = min(vals), max(vals)
    if scaling == "max":
        if hi <= 0:
            return {h: 1.0 for h in costs}
        return {h: v / hi for h, v in costs.items()}
    if scaling == "inverse":
        if hi - lo <= 0:
            return {h: 1.0 for h in costs}
        return {h: (hi - v) / (hi - lo) for h, v in costs.items()}
    if scaling == "reciprocal":
        if exponent <= 0:
            raise DomainError(f"exponent must be positive, got {exponent}")
        return {h: ((1.0 + lo) / (1.0 + v)) ** exponent for h, v in costs.items()}
    raise ValueError(f"unknown scaling rule {scaling!r}")


def build_scaled_graph(
    g: BaseGraph, costs: Mapping[int, float], scaling: str = "max", exponent: float = 1.0
) -> ScaledBaseGraph:
    if not g.edges:
        raise DomainError("cannot scale a base-graph without edges")
    missing = set(g.edges) - set(costs)
    if missing:
        raise EdgeNotFound(f"no cost given for edges {sorted(missing)[:5]}")
    s = scale_costs({h: float(costs[h]) for h in g.edges}, scaling, exponent)
    target = {}
    for h, e in g.edges.items():
        gap = s[h] - e.c
        target[h] = math.inf if gap < SINGULARITY_EPS else (1.0 / (e.normalizer * gap)) ** (1.0 / g.k)
    return ScaledBaseGraph(base=g, scaled_cost=s, target_distance=target)
