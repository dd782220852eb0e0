import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _builders import bridge, diamond, embedded, min_cost_by_enumeration
from qmemroute.base_graph import embed_overlay
from qmemroute.baselines import (
    BENCH_COLUMNS,
    BenchConfig,
    bench_campaign,
    complexity_envelope,
    dijkstra,
    envelope_grid,
    kpa_kpi_disjoint,
    ksp_disjoint,
    proposed_disjoint,
    shortest_path_dijkstra,
)
from qmemroute.costs import build_cost_model
from qmemroute.errors import ConfigError, NoPathError
from qmemroute.overlay import Demand, GeneratorConfig, generate_network


def test_envelopes_at_reference_point():
    assert complexity_envelope("proposed", 100, 10) == 400
    assert complexity_envelope("kpa", 100, 10) == 100000
    assert complexity_envelope("kpi", 100, 10) == 100000
    assert complexity_envelope("ksp", 100, 10) == 2000
    with pytest.raises(ValueError):
        complexity_envelope("ospf", 100, 10)
    with pytest.raises(ValueError):
        complexity_envelope("kpa", 1, 10)


def test_envelope_grid_shape():
    grid = envelope_grid([10, 100], [1, 10])
    assert set(grid) == {"proposed", "kpa", "ksp"}
    assert [10, 1, 1.0] in grid["proposed"]
    assert len(grid["ksp"]) == 4


def triangle():
    return embedded(3, [(0, 1), (1, 2), (0, 2)], {0: (0, 0), 1: (1, 0), 2: (1, 1)}, 2)


def test_dijkstra_prefers_cheaper_two_hop():
    g = triangle()
    r = dijkstra(g, 0, 2, {0: 1.0, 1: 1.0, 2: 3.0})
    assert r.nodes == (0, 1, 2) and r.total_cost == 2.0
    r = dijkstra(g, 0, 2, {0: 1.0, 1: 1.0, 2: 1.5})
    assert r.nodes == (0, 2)
    route, counter = shortest_path_dijkstra(g, 0, 2, {0: 1.0, 1: 1.0, 2: 3.0})
    assert counter.N_O == counter.relaxations > 0


def test_dijkstra_unreachable_and_forbidden():
    g = embedded(3, [(0, 1)], {0: (0, 0), 1: (1, 0), 2: (1, 1)}, 2)
    with pytest.raises(NoPathError):
        dijkstra(g, 0, 2, {0: 1.0})
    with pytest.raises(NoPathError):
        dijkstra(triangle(), 0, 2, {0: 1.0, 1: 1.0, 2: 1.0}, removed=[2], forbidden=[1])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 8), st.data())
def test_dijkstra_matches_enumeration(seed, n, data):
    net = generate_network(GeneratorConfig(n=n, mean_degree=min(2.5, n - 1)), seed)
    g = embed_overlay(net, seed=seed)
    costs = {h: data.draw(st.floats(0.0, 10.0)) for h in sorted(g.edges)}
    s, t = data.draw(st.integers(0, n - 1)), data.draw(st.integers(0, n - 1))
    if s == t:
        return
    want = min_cost_by_enumeration(g, s, t, costs)
    if want is None:
        with pytest.raises(NoPathError):
            dijkstra(g, s, t, costs)
    else:
        assert dijkstra(g, s, t, costs).total_cost == pytest.approx(want, abs=1e-9)


def test_kpa_on_diamond_and_bridge():
    g = diamond()
    dps, counter = kpa_kpi_disjoint(g, build_cost_model(g), Demand(0, 0, 3), 2, 5)
    assert dps.complete and [p.nodes for p in dps.paths] == [(0, 1, 3), (0, 2, 3)]
    assert counter.N_O == counter.relaxations > 0
    g = bridge()
    dps, _ = kpa_kpi_disjoint(g, build_cost_model(g), Demand(0, 0, 2), 2, 3)
    assert not dps.complete and len(dps.paths) == 1


def test_kpi_initial_matrix_steers_main_path():
    g = diamond()
    cm = build_cost_model(g)
    # inflate the 0-1 arm so the first path takes the other one
    dps, _ = kpa_kpi_disjoint(g, cm, Demand(0, 0, 3), 1, 3, initial_matrix={0: 5.0, 1: 1.0, 2: 1.0, 3: 1.0})
    assert dps.paths[0].nodes == (0, 2, 3)
    assert dps.per_path_cost == [2.0]


def test_ksp_successive_removal():
    g = diamond()
    cm = build_cost_model(g)
    dps, _ = ksp_disjoint(g, Demand(0, 0, 3), 2, cm.tau)
    assert dps.complete and [p.nodes for p in dps.paths] == [(0, 1, 3), (0, 2, 3)]
    dps, _ = ksp_disjoint(g, Demand(0, 0, 3), 1, cm.tau)
    assert len(dps.paths) == 1
    dps, _ = ksp_disjoint(g, Demand(0, 0, 3), 3, cm.tau)
    assert not dps.complete and len(dps.paths) == 2
    # link-disjoint only: a shared transit node is allowed
    bow = embedded(
        5, [(0, 1), (0, 2), (1, 4), (2, 4), (4, 3), (4, 3, 2)], {0: (0, 0), 1: (1, 0), 2: (0, 1), 4: (1, 1), 3: (1, 3)}, 4
    )
    costs = {h: 1.0 for h in bow.edges}
    dps, _ = ksp_disjoint(bow, Demand(0, 0, 3), 2, costs)
    assert dps.complete and all(4 in p.nodes for p in dps.paths)
    with pytest.raises(ValueError):
        ksp_disjoint(g, Demand(0, 0, 3), 0, cm.tau)


def test_proposed_counter():
    g = diamond()
    dps, counter = proposed_disjoint(g, build_cost_model(g), Demand(0, 0, 3), 2, 5)
    assert dps.complete
    assert counter.greedy_steps == counter.N_O == 4


def test_bench_config_validation():
    assert BenchConfig.from_dict({"n": 16}).n == [16]
    with pytest.raises(ConfigError):
        BenchConfig.from_dict({"n": [1]})
    with pytest.raises(ConfigError):
        BenchConfig.from_dict({"rounds": 3})
    with pytest.raises(ConfigError):
        BenchConfig.from_dict({"z": [0]})


def test_bench_single_cell():
    cfg = BenchConfig(n=[16], max_concurrences=[3], z=[2], demands=2)
    rows = bench_campaign(cfg, seed=5)
    assert [r["scheme"] for r in rows] == ["proposed", "kpa", "kpi", "ksp"]
    for r in rows:
        assert set(BENCH_COLUMNS) <= set(r)
        assert 0.0 <= r["success"] <= 1.0
        assert r["N_O_envelope"] == complexity_envelope(r["scheme"], 16, r["bound_or_z"])
        assert not math.isnan(r["N_O_measured"])
    again = bench_campaign(cfg, seed=5)
    strip = lambda rs: [{k: v for k, v in r.items() if k != "wall_time_ms"} for r in rs]
    assert strip(rows) == strip(again)
