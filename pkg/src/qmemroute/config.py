"""Scenario configuration shared by the command-line entry points."""

from __future__ import annotations

import json
from collections.abc import Mapping
from dataclasses import dataclass, field
from pathlib import Path

from .baselines import BenchConfig
from .errors import ConfigError
from .overlay import Demand, GeneratorConfig, OverlayNetwork, generate_network

RANDOM = "random"


@dataclass
class EmbeddingConfig:
    k: int = 2
    n: int | None = None
    # None: the network's own placement if it has one, else random
    placement: str | dict | None = None
    strict_levels: bool = False

    @classmethod
    def from_dict(cls, d: Mapping) -> EmbeddingConfig:
        _no_unknown("embedding", d, cls)
        out = cls(**d)
        if not isinstance(out.k, int) or out.k < 1:
            raise ConfigError(f"embedding.k: must be an integer >= 1, got {out.k!r}")
        if out.n is not None and (not isinstance(out.n, int) or out.n < 1):
            raise ConfigError(f"embedding.n: must be a positive integer, got {out.n!r}")
        if isinstance(out.placement, str) and out.placement != RANDOM:
            raise ConfigError(f"embedding.placement: unknown mode {out.placement!r}")
        if isinstance(out.placement, Mapping):
            try:
                out.placement = {int(v): tuple(int(x) for x in pos) for v, pos in out.placement.items()}
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"embedding.placement: {exc}") from exc
        return out

    def to_dict(self) -> dict:
        placement = self.placement
        if isinstance(placement, Mapping):
            placement = {str(v): list(p) for v, p in sorted(placement.items())}
        return {"k": self.k, "n": self.n, "placement": placement, "strict_levels": self.strict_levels}


@dataclass(frozen=True)
class CampaignEvent:
    tick: int
    node: int | str

    @classmethod
    def from_dict(cls, d: Mapping, i: int) -> CampaignEvent:
        if not isinstance(d, Mapping) or "node" not in d:
            raise ConfigError(f"campaign[{i}]: expected an object with a 'node' key")
        node = d["node"]
        if node != RANDOM and (isinstance(node, bool) or not isinstance(node, int)):
            raise ConfigError(f"campaign[{i}].node: expected a node id or 'random', got {node!r}")
        tick = d.get("tick", i)
        if isinstance(tick, bool) or not isinstance(tick, int) or tick < 0:
            raise ConfigError(f"campaign[{i}].tick: expected a non-negative integer, got {tick!r}")
        return cls(tick, node)


@dataclass
class ScenarioConfig:
    seed: int
    network: OverlayNetwork | None = None
    network_file: str | None = None
    generator: GeneratorConfig | None = None
    embedding: EmbeddingConfig = field(default_factory=EmbeddingConfig)
    demands: list = field(default_factory=list)
    z: int = 2
    max_concurrences: int = 10
    switchover_z: int = 1
    campaign: list = field(default_factory=list)
    forbid_affected: bool = False
    bench: BenchConfig = field(default_factory=BenchConfig)
    out_dir: str = "out"

    @classmethod
    def from_dict(cls, d: Mapping, base_dir: Path | str = ".") -> ScenarioConfig:
        if not isinstance(d, Mapping):
            raise ConfigError("config: top level must be a JSON object")
        known = {
            "seed", "network", "generator", "embedding", "demands", "z", "max_concurrences",
            "switchover_z", "campaign", "forbid_affected", "bench", "out_dir",
        }
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"config: unknown keys {sorted(unknown)}")
        seed = d.get("seed")
        if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
            raise ConfigError(f"config.seed: a non-negative integer seed is required, got {seed!r}")
        out = cls(seed=seed)
        net = d.get("network")
        if isinstance(net, str):
            path = Path(base_dir) / net
            out.network_file = str(net)
            # missing files surface as OSError (I/O exit code)
            out.network = OverlayNetwork.loads(path.read_text())
        elif isinstance(net, Mapping):
            out.network = OverlayNetwork.from_dict(net)
        elif net is not None:
            raise ConfigError("config.network: expected a file path or an inline network object")
        if "generator" in d:
            if out.network is not None:
                raise ConfigError("config: give either 'network' or 'generator', not both")
            out.generator = GeneratorConfig.from_dict(d["generator"])
        out.embedding = EmbeddingConfig.from_dict(d.get("embedding", {}))
        for key in ("z", "max_concurrences", "switchover_z"):
            val = d.get(key, getattr(out, key))
            if isinstance(val, bool) or not isinstance(val, int) or val < 1:
                raise ConfigError(f"config.{key}: must be an integer >= 1, got {val!r}")
            setattr(out, key, val)
        raw = d.get("demands", [])
        if not isinstance(raw, list):
            raise ConfigError("config.demands: expected a list")
        for i, dem in enumerate(raw):
            if not isinstance(dem, Mapping) or not {"source", "target"} <= set(dem):
                raise ConfigError(f"demands[{i}]: needs 'source' and 'target'")
            out.demands.append(
                Demand(
                    user=int(dem.get("user", i)),
                    source=int(dem["source"]),
                    target=int(dem["target"]),
                    required_throughput=float(dem.get("required_throughput", 0.0)),
                    demand_id=i,
                )
            )
        raw = d.get("campaign", [])
        if not isinstance(raw, list):
            raise ConfigError("config.campaign: expected a list")
        out.campaign = [CampaignEvent.from_dict(e, i) for i, e in enumerate(raw)]
        out.forbid_affected = bool(d.get("forbid_affected", False))
        out.bench = BenchConfig.from_dict(d.get("bench", {}))
        out.out_dir = str(d.get("out_dir", out.out_dir))
        return out

    @classmethod
    def load(cls, path) -> ScenarioConfig:
        path = Path(path)
        text = path.read_text()
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
        return cls.from_dict(raw, path.parent)

    def resolve_network(self) -> OverlayNetwork:
        if self.network is not None:
            return self.network
        if self.generator is not None:
            self.network = generate_network(self.generator, self.seed)
            return self.network
        raise ConfigError("config: no 'network' or 'generator' given")

    def check_demands(self, net: OverlayNetwork) -> None:
        for dem in self.demands:
            for end in ("source", "target"):
                v = getattr(dem, end)
                if not 0 <= v < net.n_nodes:
                    raise ConfigError(f"demands[{dem.demand_id}].{end}: unknown node {v}")
        for i, ev in enumerate(self.campaign):
            if ev.node != RANDOM and not 0 <= ev.node < net.n_nodes:
                raise ConfigError(f"campaign[{i}].node: unknown node {ev.node}")

    def to_dict(self) -> dict:
        """Echo of the effective configuration (network shown by reference or size)."""
        return {
            "seed": self.seed,
            "network": self.network_file,
            "generator": _generator_dict(self.generator),
            "embedding": self.embedding.to_dict(),
            "demands": [
                {
                    "user": d.user,
                    "source": d.source,
                    "target": d.target,
                    "required_throughput": d.required_throughput,
                }
                for d in self.demands
            ],
            "z": self.z,
            "max_concurrences": self.max_concurrences,
            "switchover_z": self.switchover_z,
            "campaign": [{"tick": e.tick, "node": e.node} for e in self.campaign],
            "forbid_affected": self.forbid_affected,
            "bench": {
                "n": list(self.bench.n),
                "max_concurrences": list(self.bench.max_concurrences),
                "z": list(self.bench.z),
                "paths": self.bench.paths,
                "demands": self.bench.demands,
                "family": self.bench.family,
                "k": self.bench.k,
                "mean_degree": self.bench.mean_degree,
            },
        }


def _generator_dict(gen: GeneratorConfig | None) -> dict | None:
    if gen is None:
        return None
    return {
        "n": gen.n,
        "mean_degree": gen.mean_degree,
        "family": gen.family,
        "k": gen.k,
        "long_range": gen.long_range,
        "level_weights": list(gen.level_weights),
        "prob_range": list(gen.prob_range),
        "q_range": list(gen.q_range),
        "fidelity": gen.fidelity,
        "level_thresholds": {str(k): v for k, v in sorted(gen.level_thresholds.items())},
        "degree_rule": gen.degree_rule.to_dict(),
    }


def _no_unknown(where: str, d: Mapping, cls) -> None:
    if not isinstance(d, Mapping):
        raise ConfigError(f"{where}: expected an object")
    unknown = set(d) - set(cls.__dataclass_fields__)
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
