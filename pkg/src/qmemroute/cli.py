"""Command-line entry point: generate, inspect, costs, route, fail, bench.

Exit codes: 0 success (solver failures are recorded, not fatal), 2 bad
configuration, 3 file-system trouble.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from collections import Counter
from pathlib import Path

from . import __version__
from .base_graph import BaseGraph, embed_overlay
from .baselines import BENCH_COLUMNS, bench_campaign, complexity_envelope
from .config import RANDOM, ScenarioConfig
from .costs import build_cost_model
from .disjoint import (
    find_disjoint_paths,
    objective_phi,
    validate_disjointness,
    validate_flow_conservation,
    validate_throughput,
)
from .errors import ConfigError, NoMainPathError, QRouteError, SwitchoverFailed
from .failure import inject_failure, plan_switchover
from .overlay import GeneratorConfig, OverlayNetwork, generate_network, high_degree_nodes, node_degree
from .rng import stream

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 2, 3

ROUTE_COLUMNS = [
    "demand_id", "user", "source", "target", "status", "kappa",
    "path_index", "role", "nodes", "steps", "omega",
]
COST_COLUMNS = ["edge", "a", "b", "level", "prob", "distance", "H_n", "c", "p", "gamma", "tau"]
CAMPAIGN_COLUMNS = [
    "tick", "demand_id", "failed_node", "destroyed_count", "affected_count", "on_main",
    "replacement_source", "replacement_target", "psi_replacement", "switchover_success",
    "steps_used", "status", "diagnostics",
]

# envelope surfaces for plotting: bounds 0..10, n 2..100
ENVELOPE_N = list(range(2, 101))
ENVELOPE_BOUNDS = list(range(0, 11))


def _write_json(path: Path, data) -> None:
    path.write_text(json.dumps(data, indent=2, sort_keys=True, allow_nan=False) + "\n")


def _write_csv(path: Path, columns, rows) -> None:
    with path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: ("" if row.get(k) is None else row.get(k)) for k in columns})


def _scenario(args) -> ScenarioConfig:
    if args.config:
        cfg = ScenarioConfig.load(args.config)
    else:
        if args.seed is None:
            raise ConfigError("a seed is required: pass --seed or give 'seed' in --config")
        cfg = ScenarioConfig(seed=args.seed)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.out_dir is not None:
        cfg.out_dir = args.out_dir
    if args.strict_levels:
        cfg.embedding.strict_levels = True
    if args.forbid_affected:
        cfg.forbid_affected = True
    return cfg


def _network(cfg: ScenarioConfig, args) -> OverlayNetwork:
    if getattr(args, "network", None):
        cfg.network = OverlayNetwork.load(args.network)
        cfg.network_file = str(args.network)
    net = cfg.resolve_network()
    cfg.check_demands(net)
    return net


def _embed(cfg: ScenarioConfig, net: OverlayNetwork) -> BaseGraph:
    e = cfg.embedding
    return embed_overlay(net, k=e.k, n=e.n, placement=e.placement, seed=cfg.seed, strict_levels=e.strict_levels)


def _out(cfg: ScenarioConfig) -> Path:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _network_summary(net: OverlayNetwork) -> dict:
    degrees = [node_degree(net, v) for v in net.nodes]
    levels = Counter(c.level for _, c in net.active())
    return {
        "n_nodes": net.n_nodes,
        "connections": len(net.connections),
        "active_connections": len(net.active()),
        "levels": {str(l): levels[l] for l in sorted(levels)},
        "max_degree": max(degrees, default=0),
        "mean_degree": sum(degrees) / len(degrees) if degrees else 0.0,
        "degree_cutoff": net.degree_cutoff,
        "high_degree_nodes": sorted(high_degree_nodes(net)),
    }


# commands


def cmd_generate(args, cfg: ScenarioConfig) -> int:
    gen = cfg.generator or GeneratorConfig(n=10)
    overrides = {k: v for k, v in (("n", args.n), ("mean_degree", args.mean_degree), ("family", args.family), ("k", args.k)) if v is not None}
    if overrides:
        gen = GeneratorConfig.from_dict({**_gen_fields(gen), **overrides})
    net = generate_network(gen, cfg.seed)
    path = Path(args.output) if args.output else _out(cfg) / "network.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    net.save(path)
    print(f"wrote {path} ({net.n_nodes} nodes, {len(net.connections)} connections)")
    return EXIT_OK


def _gen_fields(gen: GeneratorConfig) -> dict:
    return {f: getattr(gen, f) for f in gen.__dataclass_fields__}


def cmd_inspect(args, cfg: ScenarioConfig) -> int:
    net = _network(cfg, args)
    report = {"command": "inspect", "seed": cfg.seed, "network": _network_summary(net)}
    if net.n_nodes:
        g = _embed(cfg, net)
        report["embedding"] = g.to_dict()
    out = _out(cfg)
    _write_json(out / "report.json", report)
    print(json.dumps(report["network"], sort_keys=True))
    return EXIT_OK


def cmd_costs(args, cfg: ScenarioConfig) -> int:
    net = _network(cfg, args)
    g = _embed(cfg, net)
    cm = build_cost_model(g)
    rows = []
    for h, e in sorted(g.edges.items()):
        rows.append(
            {
                "edge": h, "a": e.a, "b": e.b, "level": e.level, "prob": e.prob, "distance": e.distance,
                "H_n": e.normalizer, "c": e.c, "p": e.p, "gamma": cm.gamma[h], "tau": cm.tau[h],
            }
        )
    nodes, _ = cm.to_rows()
    out = _out(cfg)
    _write_csv(out / "costs.csv", COST_COLUMNS, rows)
    _write_json(
        out / "report.json",
        {
            "command": "costs",
            "seed": cfg.seed,
            "config": cfg.to_dict(),
            "network": _network_summary(net),
            "nodes": nodes,
            "embedding": {"k": g.k, "n": g.n, "warnings": list(g.warnings)},
        },
    )
    print(f"wrote {out / 'costs.csv'} ({len(rows)} edges)")
    return EXIT_OK


def solve_demands(cfg: ScenarioConfig, net: OverlayNetwork, g: BaseGraph, cm) -> tuple[list[dict], list[dict], dict]:
    """Per-demand results, CSV rows, and the main path of each solved demand."""
    results, rows, mains = [], [], {}
    for dem in cfg.demands:
        entry = {"demand_id": dem.demand_id, "user": dem.user, "source": dem.source, "target": dem.target}
        try:
            dps = find_disjoint_paths(g, cm, dem, cfg.z, cfg.max_concurrences)
        except NoMainPathError as exc:
            entry.update(status="no_main_path", error=str(exc), result=None, validators=None)
            results.append(entry)
            rows.append({**entry, "kappa": None})
            continue
        sol = dps.to_solution(dem.user)
        ok, witness = validate_disjointness(dps)
        flow = validate_flow_conservation(sol, dem, g)
        thr = validate_throughput(sol, [dem], net)
        entry.update(
            status=dps.status,
            result=dps.to_dict(),
            phi=objective_phi(sol, cm),
            validators={
                "disjointness": {"ok": ok, "witness": _jsonable(witness)},
                "flow_conservation": flow.to_dict(),
                "throughput": thr.to_dict(),
            },
        )
        results.append(entry)
        if dps.paths:
            mains[dem.demand_id] = dps.paths[0]
        for i, (route, omega) in enumerate(zip(dps.paths, dps.per_path_cost)):
            rows.append(
                {
                    **entry,
                    "kappa": dps.concurrence_count,
                    "path_index": i + 1,
                    "role": "main" if i == 0 else "replacement",
                    "nodes": " ".join(map(str, route.nodes)),
                    "steps": route.steps,
                    "omega": omega,
                }
            )
    return results, rows, mains


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def cmd_route(args, cfg: ScenarioConfig) -> int:
    net = _network(cfg, args)
    g = _embed(cfg, net)
    cm = build_cost_model(g)
    results, rows, _ = solve_demands(cfg, net, g, cm)
    out = _out(cfg)
    _write_csv(out / "routes.csv", ROUTE_COLUMNS, rows)
    _write_json(
        out / "report.json",
        {
            "command": "route",
            "seed": cfg.seed,
            "config": cfg.to_dict(),
            "network": _network_summary(net),
            "embedding": {"k": g.k, "n": g.n, "warnings": list(g.warnings)},
            "demands": results,
        },
    )
    done = sum(r["status"] == "complete" for r in results)
    print(f"{done}/{len(results)} demands complete; wrote {out / 'report.json'}")
    return EXIT_OK


def run_campaign(cfg: ScenarioConfig, net: OverlayNetwork, g: BaseGraph, mains: dict) -> tuple[list[dict], OverlayNetwork]:
    rng = stream(cfg.seed, "campaign")
    view = net
    rows = []
    for ev in sorted(cfg.campaign, key=lambda e: e.tick):
        node = int(rng.integers(0, net.n_nodes)) if ev.node == RANDOM else ev.node
        event, failed_view = inject_failure(view, node, ev.tick)
        for dem in cfg.demands:
            row = {
                "tick": ev.tick,
                "demand_id": dem.demand_id,
                "failed_node": node,
                "destroyed_count": len(event.destroyed_connections),
                "affected_count": len(event.affected_nodes),
            }
            main = mains.get(dem.demand_id)
            if main is None:
                rows.append({**row, "status": "no_main_path", "switchover_success": False})
                continue
            row["on_main"] = node in main.nodes
            try:
                plan = plan_switchover(
                    main,
                    event,
                    g,
                    failed_view,
                    z=cfg.switchover_z,
                    max_concurrences=cfg.max_concurrences,
                    forbid_affected=cfg.forbid_affected,
                )
            except SwitchoverFailed as exc:
                rows.append(
                    {**row, "status": "failed", "switchover_success": False,
                     "diagnostics": json.dumps(_jsonable(exc.diagnostics), sort_keys=True)}
                )
                continue
            reps = plan.replacement_paths
            row.update(
                replacement_source=plan.replacement_source,
                replacement_target=plan.replacement_target,
                psi_replacement=reps.total_cost if reps else 0.0,
                switchover_success=reps is None or reps.complete,
                steps_used=sum(p.steps for p in reps.paths) if reps else 0,
                status=plan.status if reps is None else reps.status,
            )
            rows.append(row)
        view = failed_view.with_restored(event.destroyed_connections)
    return rows, view


def cmd_fail(args, cfg: ScenarioConfig) -> int:
    net = _network(cfg, args)
    g = _embed(cfg, net)
    cm = build_cost_model(g)
    results, _, mains = solve_demands(cfg, net, g, cm)
    rows, final = run_campaign(cfg, net, g, mains)
    diff = sorted(
        [sorted(p), l] for p, l in net.active_pairs() ^ final.active_pairs()
    )
    out = _out(cfg)
    _write_csv(out / "campaign.csv", CAMPAIGN_COLUMNS, rows)
    _write_json(
        out / "report.json",
        {
            "command": "fail",
            "seed": cfg.seed,
            "config": cfg.to_dict(),
            "network": _network_summary(net),
            "demands": results,
            "campaign": rows,
            "post_campaign_diff": diff,
        },
    )
    ok = sum(bool(r.get("switchover_success")) for r in rows)
    print(f"{ok}/{len(rows)} campaign rows switched over; wrote {out / 'campaign.csv'}")
    return EXIT_OK


def plot_data(rows: list[dict]) -> dict:
    envelopes = {
        scheme: [{"n": n, "bound": b, "N_O": complexity_envelope(scheme, n, b)} for b in ENVELOPE_BOUNDS for n in ENVELOPE_N]
        for scheme in ("proposed", "kpa", "kpi", "ksp")
    }
    measured: dict = {}
    for r in rows:
        measured.setdefault(r["scheme"], []).append(
            {"n": r["n"], "bound": r["bound_or_z"], "N_O": r["N_O_measured"], "success": r["success"]}
        )
    return {"x": "n", "y": "N_O", "envelopes": envelopes, "measured": measured}


def cmd_bench(args, cfg: ScenarioConfig) -> int:
    rows = bench_campaign(cfg.bench, cfg.seed)
    out = _out(cfg)
    columns = BENCH_COLUMNS + ["relaxations", "greedy_steps"]
    _write_csv(out / "bench.csv", columns, rows)
    _write_json(out / "plotdata.json", plot_data(rows))
    _write_json(
        out / "report.json",
        {
            "command": "bench",
            "seed": cfg.seed,
            "config": cfg.to_dict(),
            "bench": [{k: v for k, v in r.items() if k != "wall_time_ms"} for r in rows],
        },
    )
    print(f"wrote {out / 'bench.csv'} ({len(rows)} rows)")
    return EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "inspect": cmd_inspect,
    "costs": cmd_costs,
    "route": cmd_route,
    "fail": cmd_fail,
    "bench": cmd_bench,
}


def _global_flags(p: argparse.ArgumentParser, suppress: bool) -> None:
    # on subcommands the defaults are suppressed so flags given before the
    # subcommand are not overwritten
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--seed", type=int, default=d(None), help="master seed for every random stream")
    p.add_argument("--config", default=d(None), help="scenario JSON file")
    p.add_argument("--out-dir", default=d(None), help="directory for report/CSV outputs")
    p.add_argument("--strict-levels", action="store_true", default=d(False), help="reject level/distance mismatches")
    p.add_argument("--forbid-affected", action="store_true", default=d(False), help="keep replacement paths off nodes that lost a contact")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qmemroute", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        _global_flags(p, suppress=True)
        if name == "generate":
            p.add_argument("--n", type=int)
            p.add_argument("--mean-degree", type=float)
            p.add_argument("--family", choices=["random", "kleinberg", "complete"])
            p.add_argument("--k", type=int)
            p.add_argument("--output", "-o", help="network file (default <out-dir>/network.json)")
        elif name != "bench":
            p.add_argument("--network", help="network JSON file (overrides the config)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _scenario(args)
        return COMMANDS[args.command](args, cfg)
    except (QRouteError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
