"""Entangled overlay network: nodes, multi-level connections, degrees, demands."""

from __future__ import annotations

import dataclasses
import json
import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import ConfigError, InvalidLevelError, NodeNotFound
from .rng import stream

DEFAULT_LEVEL_THRESHOLD = 0.5
DEFAULT_DEGREE_QUANTILE = 0.9


def hop_distance(level: int) -> int:
    """Hop distance spanned by an entangled connection of the given level."""
    if isinstance(level, bool) or not isinstance(level, (int, np.integer)) or level < 1:
        raise InvalidLevelError(f"level must be an integer >= 1, got {level!r}")
    return 2 ** (int(level) - 1)


@dataclass(frozen=True)
class Connection:
    a: int
    b: int
    level: int
    prob: float
    q_f: float = 1.0
    fidelity: float = 1.0

    @property
    def pair(self) -> frozenset:
        return frozenset((self.a, self.b))

    def other(self, node: int) -> int:
        if node == self.a:
            return self.b
        if node == self.b:
            return self.a
        raise NodeNotFound(f"node {node} is not an endpoint of {self.a}-{self.b}")


@dataclass(frozen=True)
class DegreeRule:
    """How the high-degree cutoff deg'(V) is chosen: fixed integer or degree quantile."""

    quantile: float | None = DEFAULT_DEGREE_QUANTILE
    absolute: int | None = None

    def __post_init__(self):
        if (self.quantile is None) == (self.absolute is None):
            raise ConfigError("degree_threshold needs exactly one of 'quantile' or 'absolute'")
        if self.quantile is not None and not 0.0 <= self.quantile <= 1.0:
            raise ConfigError(f"degree_threshold.quantile must lie in [0, 1], got {self.quantile}")
        if self.absolute is not None and self.absolute < 0:
            raise ConfigError(f"degree_threshold.absolute must be >= 0, got {self.absolute}")

    def resolve(self, degrees) -> int:
        if self.absolute is not None:
            return int(self.absolute)
        if len(degrees) == 0:
            return 0
        # "nearest" keeps the cutoff an observed degree value
        return int(np.quantile(np.asarray(degrees), self.quantile, method="nearest"))

    def to_dict(self) -> dict:
        if self.absolute is not None:
            return {"absolute": int(self.absolute)}
        return {"quantile": float(self.quantile)}


@dataclass(frozen=True)
class Placement:
    """Explicit lattice positions for (some of) the overlay nodes."""

    k: int
    n: int
    positions: Mapping[int, tuple]

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "n": self.n,
            "positions": {str(v): list(p) for v, p in sorted(self.positions.items())},
        }


@dataclass(frozen=True)
class Demand:
    user: int
    source: int
    target: int
    required_throughput: float = 0.0
    demand_id: int = 0

    def __post_init__(self):
        if self.source == self.target:
            raise ConfigError(f"demand {self.demand_id}: source equals target ({self.source})")
        if self.required_throughput < 0:
            raise ConfigError(f"demand {self.demand_id}: negative required throughput")


@dataclass(frozen=True)
class OverlayNetwork:
    """Immutable overlay network.

    Connections are addressed by their index ``h`` in ``connections``. Views
    produced after a failure keep the same connection tuple and mark destroyed
    connections in ``disabled`` so edge identities stay stable.
    """

    n_nodes: int
    connections: tuple = ()
    level_thresholds: Mapping[int, float] = field(default_factory=dict)
    degree_rule: DegreeRule = field(default_factory=DegreeRule)
    disabled: frozenset = frozenset()
    placement: Placement | None = None
    # cutoff inherited by failure views, deg'(V) is fixed at load time
    cutoff_override: int | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "connections", tuple(self.connections))
        object.__setattr__(self, "disabled", frozenset(self.disabled))
        object.__setattr__(
            self, "level_thresholds", {int(l): float(t) for l, t in self.level_thresholds.items()}
        )
        self._validate()

    def _validate(self):
        if self.n_nodes < 0:
            raise ConfigError("n_nodes must be >= 0")
        seen = {}
        for h, c in enumerate(self.connections):
            where = f"connections[{h}]"
            for end in ("a", "b"):
                v = getattr(c, end)
                if not 0 <= v < self.n_nodes:
                    raise ConfigError(f"{where}.{end}: unknown node {v}")
            if c.a == c.b:
                raise ConfigError(f"{where}: self-loop on node {c.a}")
            if isinstance(c.level, bool) or c.level < 1:
                raise ConfigError(f"{where}.level: must be >= 1, got {c.level}")
            if not 0.0 < c.prob <= 1.0:
                raise ConfigError(f"{where}.prob: must lie in (0, 1], got {c.prob}")
            thr = self.threshold(c.level)
            if c.prob < thr:
                raise ConfigError(f"{where}.prob: {c.prob} below level-{c.level} threshold {thr}")
            if c.q_f < 0:
                raise ConfigError(f"{where}.q_f: must be >= 0, got {c.q_f}")
            if not 0.0 < c.fidelity <= 1.0:
                raise ConfigError(f"{where}.fidelity: must lie in (0, 1], got {c.fidelity}")
            key = (c.pair, c.level)
            if key in seen:
                raise ConfigError(
                    f"{where}: duplicate level-{c.level} connection {c.a}-{c.b} "
                    f"(first at connections[{seen[key]}])"
                )
            seen[key] = h
        for h in self.disabled:
            if not 0 <= h < len(self.connections):
                raise ConfigError(f"disabled connection {h} does not exist")

    def threshold(self, level: int) -> float:
        return self.level_thresholds.get(level, DEFAULT_LEVEL_THRESHOLD)

    @property
    def nodes(self) -> range:
        return range(self.n_nodes)

    def active(self) -> list[tuple[int, Connection]]:
        return [(h, c) for h, c in enumerate(self.connections) if h not in self.disabled]

    @cached_property
    def adjacency(self) -> dict[int, list[tuple[int, int]]]:
        """node -> [(connection index, neighbour)] over active connections."""
        adj = {v: [] for v in self.nodes}
        for h, c in self.active():
            adj[c.a].append((h, c.b))
            adj[c.b].append((h, c.a))
        return adj

    @cached_property
    def degree_cutoff(self) -> int:
        if self.cutoff_override is not None:
            return self.cutoff_override
        return self.degree_rule.resolve([len(self.adjacency[v]) for v in self.nodes])

    def check_node(self, node: int):
        if not isinstance(node, (int, np.integer)) or not 0 <= node < self.n_nodes:
            raise NodeNotFound(f"unknown node {node}")

    def without(self, edge_ids: Iterable[int]) -> OverlayNetwork:
        return dataclasses.replace(
            self, disabled=self.disabled | frozenset(edge_ids), cutoff_override=self.degree_cutoff
        )

    def with_restored(self, edge_ids: Iterable[int]) -> OverlayNetwork:
        return dataclasses.replace(
            self, disabled=self.disabled - frozenset(edge_ids), cutoff_override=self.degree_cutoff
        )

    def active_pairs(self) -> set:
        return {(c.pair, c.level) for _, c in self.active()}

    # serialization

    def to_dict(self) -> dict:
        d = {
            "nodes": list(self.nodes),
            "connections": [
                {"a": c.a, "b": c.b, "level": c.level, "prob": c.prob, "q_f": c.q_f, "fidelity": c.fidelity}
                for c in self.connections
            ],
            "level_thresholds": {str(l): t for l, t in sorted(self.level_thresholds.items())},
            "degree_threshold": self.degree_rule.to_dict(),
        }
        if self.disabled:
            d["disabled"] = sorted(self.disabled)
        if self.placement is not None:
            d["placement"] = self.placement.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> OverlayNetwork:
        if not isinstance(d, Mapping):
            raise ConfigError("network: expected a JSON object")
        nodes = _field(d, "nodes", list)
        for i, v in enumerate(nodes):
            if isinstance(v, bool) or not isinstance(v, int):
                raise ConfigError(f"nodes[{i}]: expected integer id, got {v!r}")
        if sorted(nodes) != list(range(len(nodes))):
            raise ConfigError("nodes: ids must be dense 0..|V|-1 without repeats")
        conns = []
        for h, raw in enumerate(_field(d, "connections", list, default=[])):
            where = f"connections[{h}]"
            if not isinstance(raw, Mapping):
                raise ConfigError(f"{where}: expected object")
            try:
                conns.append(
                    Connection(
                        a=_num(raw, "a", where, int),
                        b=_num(raw, "b", where, int),
                        level=_num(raw, "level", where, int),
                        prob=_num(raw, "prob", where, float),
                        q_f=_num(raw, "q_f", where, float, default=1.0),
                        fidelity=_num(raw, "fidelity", where, float, default=1.0),
                    )
                )
            except TypeError as exc:
                raise ConfigError(f"{where}: {exc}") from None
        thresholds = {}
        for key, val in _field(d, "level_thresholds", Mapping, default={}).items():
            try:
                lvl = int(key)
            except ValueError:
                raise ConfigError(f"level_thresholds.{key}: level key must be an integer") from None
            if isinstance(val, bool) or not isinstance(val, (int, float)) or not 0.0 <= val <= 1.0:
                raise ConfigError(f"level_thresholds.{key}: expected probability in [0, 1], got {val!r}")
            thresholds[lvl] = float(val)
        rule_raw = _field(d, "degree_threshold", Mapping, default={"quantile": DEFAULT_DEGREE_QUANTILE})
        unknown = set(rule_raw) - {"quantile", "absolute"}
        if unknown:
            raise ConfigError(f"degree_threshold: unknown keys {sorted(unknown)}")
        rule = DegreeRule(quantile=rule_raw.get("quantile"), absolute=rule_raw.get("absolute"))
        placement = None
        if "placement" in d:
            p = _field(d, "placement", Mapping)
            try:
                placement = Placement(
                    k=int(p["k"]),
                    n=int(p["n"]),
                    positions={int(v): tuple(int(x) for x in pos) for v, pos in p["positions"].items()},
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise ConfigError(f"placement: malformed ({exc})") from None
        return cls(
            n_nodes=len(nodes),
            connections=conns,
            level_thresholds=thresholds,
            degree_rule=rule,
            disabled=frozenset(_field(d, "disabled", list, default=[])),
            placement=placement,
        )

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False) + "\n"

    @classmethod
    def loads(cls, text: str) -> OverlayNetwork:
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"network JSON: {exc.msg} at line {exc.lineno} column {exc.colno}") from None
        return cls.from_dict(raw)

    @classmethod
    def load(cls, path) -> OverlayNetwork:
        return cls.loads(Path(path).read_text())

    def save(self, path):
        Path(path).write_text(self.dumps())


def _field(d, key, typ, default=...):
    if key not in d:
        if default is ...:
            raise ConfigError(f"{key}: missing required field")
        return default
    val = d[key]
    if not isinstance(val, typ):
        raise ConfigError(f"{key}: expected {getattr(typ, '__name__', typ)}, got {type(val).__name__}")
    return val


def _num(raw, key, where, typ, default=...):
    if key not in raw:
        if default is ...:
            raise ConfigError(f"{where}.{key}: missing required field")
        return default
    val = raw[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(f"{where}.{key}: expected number, got {val!r}")
    if typ is int and (not isinstance(val, int)):
        raise ConfigError(f"{where}.{key}: expected integer, got {val!r}")
    return typ(val)


def node_degree(net: OverlayNetwork, node: int) -> int:
    net.check_node(node)
    return len(net.adjacency[node])


def is_high_degree(net: OverlayNetwork, node: int) -> bool:
    return node_degree(net, node) > net.degree_cutoff


def high_degree_nodes(net: OverlayNetwork) -> frozenset:
    cut = net.degree_cutoff
    return frozenset(v for v in net.nodes if len(net.adjacency[v]) > cut)


# generation


@dataclass
class GeneratorConfig:
    """Parameters for synthetic overlay networks.

    ``family`` is one of ``random`` (exactly round(n*mean_degree/2) connections,
    connected when that many edges allow it), ``kleinberg`` (k-dimensional
    lattice plus ``long_range`` contacts per node drawn with probability
    proportional to d^-k, placement attached) or ``complete``.
    """

    n: int
    mean_degree: float = 4.0
    family: str = "random"
    k: int = 2
    long_range: int = 1
    level_weights: tuple = (1.0,)
    prob_range: tuple = (0.5, 1.0)
    q_range: tuple = (1.0, 10.0)
    fidelity: float = 0.9
    level_thresholds: Mapping[int, float] = field(default_factory=dict)
    degree_rule: DegreeRule = field(default_factory=DegreeRule)

    @classmethod
    def from_dict(cls, d: Mapping) -> GeneratorConfig:
        d = dict(d)
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"generator: unknown keys {sorted(unknown)}")
        for key in ("level_weights", "prob_range", "q_range"):
            if key in d:
                d[key] = tuple(d[key])
        if "level_thresholds" in d:
            d["level_thresholds"] = {int(k): float(v) for k, v in d["level_thresholds"].items()}
        if "degree_rule" in d and isinstance(d["degree_rule"], Mapping):
            d["degree_rule"] = DegreeRule(**d["degree_rule"])
        if "n" not in d:
            raise ConfigError("generator: missing n")
        return cls(**d)


FAMILIES = ("random", "kleinberg", "complete")


def _lattice_side(n: int, k: int) -> int:
    side = round(n ** (1.0 / k))
    for s in (side - 1, side, side + 1):
        if s >= 1 and s**k == n:
            return s
    raise ConfigError(f"n={n} is not a perfect {k}-th power")


def lattice_positions(side: int, k: int) -> list[tuple]:
    """Row-major lattice coordinates, node i at index i."""
    return [tuple(int(x) for x in np.unravel_index(i, (side,) * k)) for i in range(side**k)]


def generate_network(params: GeneratorConfig, seed: int) -> OverlayNetwork:
    n = params.n
    if n < 1:
        raise ConfigError("generator: n must be >= 1")
    lo, hi = params.prob_range
    if not 0.0 < lo <= hi <= 1.0:
        raise ConfigError(f"generator: bad prob_range {params.prob_range}")
    weights = np.asarray(params.level_weights, dtype=float)
    if weights.size == 0 or (weights < 0).any() or weights.sum() <= 0:
        raise ConfigError("generator: level_weights must be non-negative with positive sum")
    if params.family not in FAMILIES:
        raise ConfigError(f"generator: unknown family {params.family!r}")
    rng = stream(seed, "generation")

    if n == 1:
        # a lone node has nothing to connect to, whatever the family
        pairs, levels, placement = [], [], None
    elif params.family == "random":
        if params.mean_degree < 0 or params.mean_degree > n - 1:
            raise ConfigError(f"generator: mean degree {params.mean_degree} impossible with n={n}")
        pairs = _random_pairs(n, int(math.floor(n * params.mean_degree / 2 + 0.5)), rng)
        levels = rng.choice(np.arange(1, weights.size + 1), size=len(pairs), p=weights / weights.sum())
        placement = None
    elif params.family == "kleinberg":
        pairs, levels, placement = _kleinberg(n, params.k, params.long_range, rng)
    elif params.family == "complete":
        pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
        levels = [1] * len(pairs)
        placement = None
        try:
            side = _lattice_side(n, params.k)
            placement = Placement(params.k, n, dict(enumerate(lattice_positions(side, params.k))))
        except ConfigError:
            pass
    else:
        raise ConfigError(f"generator: unknown family {params.family!r}")

    conns = []
    for (a, b), lvl in zip(pairs, levels):
        lvl = int(lvl)
        floor_p = max(lo, params.level_thresholds.get(lvl, DEFAULT_LEVEL_THRESHOLD))
        if floor_p > hi:
            raise ConfigError(f"generator: level {lvl} threshold exceeds prob_range upper bound")
        conns.append(
            Connection(
                a=int(a),
                b=int(b),
                level=lvl,
                prob=float(rng.uniform(floor_p, hi)),
                q_f=float(rng.uniform(*params.q_range)),
                fidelity=float(params.fidelity),
            )
        )
    return OverlayNetwork(
        n_nodes=n,
        connections=conns,
        level_thresholds=dict(params.level_thresholds),
        degree_rule=params.degree_rule,
        placement=placement,
    )


def _random_pairs(n: int, m: int, rng) -> list[tuple[int, int]]:
    total = n * (n - 1) // 2
    if m > total:
        raise ConfigError(f"generator: {m} connections exceed the {total} possible pairs")
    chosen: list[tuple[int, int]] = []
    used = set()
    if m >= n - 1 and n > 1:
        # random spanning tree first so the network is connected
        order = rng.permutation(n)
        for i in range(1, n):
            a, b = int(order[i]), int(order[rng.integers(0, i)])
            p = (min(a, b), max(a, b))
            used.add(p)
            chosen.append(p)
    remaining = m - len(chosen)
    if remaining > (total - len(used)) // 2:
        pool = [(a, b) for a in range(n) for b in range(a + 1, n) if (a, b) not in used]
        idx = rng.choice(len(pool), size=remaining, replace=False)
        chosen.extend(pool[i] for i in sorted(idx))
    else:
        while remaining:
            a, b = rng.integers(0, n, size=2)
            p = (int(min(a, b)), int(max(a, b)))
            if a == b or p in used:
                continue
            used.add(p)
            chosen.append(p)
            remaining -= 1
    return chosen


def _kleinberg(n: int, k: int, long_range: int, rng):
    side = _lattice_side(n, k)
    pos = np.asarray(lattice_positions(side, k)).reshape(n, k)
    pairs, levels, seen = [], [], set()
    for i in range(n):
        for axis in range(k):
            nb = pos[i].copy()
            nb[axis] += 1
            if nb[axis] < side:
                j = int(np.ravel_multi_index(tuple(nb), (side,) * k))
                pairs.append((i, j))
                levels.append(1)
                seen.add((i, j))
    for i in range(n):
        d = np.abs(pos - pos[i]).sum(axis=1).astype(float)
        w = np.zeros(n)
        far = d >= 2
        w[far] = d[far] ** (-k)
        if w.sum() == 0:
            continue
        targets = rng.choice(n, size=min(long_range, int(far.sum())), replace=False, p=w / w.sum())
        for j in targets:
            p = (min(i, int(j)), max(i, int(j)))
            if p in seen:
                continue
            seen.add(p)
            pairs.append(p)
            levels.append(int(math.floor(math.log2(d[j]))) + 1)
    placement = Placement(k, n, {i: tuple(int(x) for x in pos[i]) for i in range(n)})
    return pairs, levels, placement
