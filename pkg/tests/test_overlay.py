import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _builders import hub_detour_network, hub_star_network, network
from qmemroute.errors import ConfigError, InvalidLevelError, NodeNotFound
from qmemroute.overlay import (
    Connection,
    DegreeRule,
    Demand,
    GeneratorConfig,
    OverlayNetwork,
    generate_network,
    high_degree_nodes,
    hop_distance,
    is_high_degree,
    node_degree,
)


@pytest.mark.parametrize("level,expected", [(1, 1), (2, 2), (3, 4)])
def test_hop_distance_examples(level, expected):
    assert hop_distance(level) == expected


@pytest.mark.parametrize("bad", [0, -1, 1.5, True, "2"])
def test_hop_distance_rejects_bad_levels(bad):
    with pytest.raises(InvalidLevelError):
        hop_distance(bad)


@given(st.integers(min_value=1, max_value=40))
def test_hop_distance_doubles(level):
    assert hop_distance(level + 1) == 2 * hop_distance(level)
    # intermediate nodes spanned
    assert hop_distance(level) - 1 == 2 ** (level - 1) - 1


def test_node_degree_examples():
    iso = network(3, [(0, 1)])
    assert node_degree(iso, 2) == 0
    tri = network(3, [(0, 1), (1, 2), (0, 2)])
    assert node_degree(tri, 1) == 2
    star = network(6, [(0, i) for i in range(1, 6)])
    assert node_degree(star, 0) == 5
    with pytest.raises(NodeNotFound):
        node_degree(tri, 7)


def test_is_high_degree_is_strict():
    star = network(6, [(0, i) for i in range(1, 6)], rule=DegreeRule(quantile=None, absolute=3))
    assert is_high_degree(star, 0)
    four = network(5, [(0, 1), (0, 2), (0, 3), (1, 2)], rule=DegreeRule(quantile=None, absolute=3))
    assert node_degree(four, 0) == 3
    assert not is_high_degree(four, 0)


def test_hub_among_path_nodes_is_high_degree():
    net = hub_star_network()
    degrees = sorted(node_degree(net, v) for v in net.nodes)
    assert degrees[-1] == 6 and degrees[-2] <= 3
    # 90th percentile of [1,2,3,3,3,3,3,6] with nearest rank is 3
    assert net.degree_cutoff == 3
    assert is_high_degree(net, 7)
    assert high_degree_nodes(net) == {7}


def test_hub_detour_degree_cutoff():
    net = hub_detour_network()
    assert net.degree_cutoff == 4
    assert high_degree_nodes(net) == {8, 9}


def test_parallel_levels_allowed_duplicates_rejected():
    network(2, [(0, 1, 1), (0, 1, 2)])
    with pytest.raises(ConfigError, match=r"connections\[1\].*duplicate"):
        network(2, [(0, 1, 1), (1, 0, 1)])


@pytest.mark.parametrize(
    "conn,field",
    [
        (Connection(0, 0, 1, 0.9), "self-loop"),
        (Connection(0, 1, 1, 0.2), r"connections\[0\]\.prob"),
        (Connection(0, 1, 1, 1.2), r"connections\[0\]\.prob"),
        (Connection(0, 1, 0, 0.9), r"connections\[0\]\.level"),
        (Connection(0, 5, 1, 0.9), r"connections\[0\]\.b"),
    ],
)
def test_invalid_connections(conn, field):
    with pytest.raises(ConfigError, match=field):
        OverlayNetwork(n_nodes=2, connections=[conn])


def test_level_threshold_override():
    OverlayNetwork(2, [Connection(0, 1, 2, 0.3)], level_thresholds={2: 0.25})
    with pytest.raises(ConfigError):
        OverlayNetwork(2, [Connection(0, 1, 2, 0.3)])


def test_demand_invariants():
    with pytest.raises(ConfigError):
        Demand(user=0, source=1, target=1)
    with pytest.raises(ConfigError):
        Demand(user=0, source=1, target=2, required_throughput=-1)


def test_generate_single_node():
    net = generate_network(GeneratorConfig(n=1), seed=3)
    assert net.n_nodes == 1 and net.connections == ()


def test_generate_deterministic():
    cfg = GeneratorConfig(n=30, mean_degree=3)
    assert generate_network(cfg, 5).dumps() == generate_network(cfg, 5).dumps()
    assert generate_network(cfg, 5).dumps() != generate_network(cfg, 6).dumps()


def test_generate_edge_count():
    net = generate_network(GeneratorConfig(n=50, mean_degree=4), seed=7)
    assert net.n_nodes == 50
    assert len(net.connections) == 100


def test_generate_rejects_impossible_degree():
    with pytest.raises(ConfigError):
        generate_network(GeneratorConfig(n=4, mean_degree=5), seed=0)
    with pytest.raises(ConfigError):
        generate_network(GeneratorConfig(n=4, family="scale-free"), seed=0)


@settings(max_examples=30, deadline=None)
@given(
    n=st.integers(2, 40),
    md=st.floats(0.5, 4.0),
    seed=st.integers(0, 2**16),
    lo=st.floats(0.5, 0.95),
)
def test_generated_networks_meet_invariants(n, md, seed, lo):
    md = min(md, n - 1)
    net = generate_network(GeneratorConfig(n=n, mean_degree=md, prob_range=(lo, 1.0)), seed)
    pairs = set()
    for c in net.connections:
        assert 0.0 < c.prob <= 1.0
        assert c.prob >= net.threshold(c.level)
        assert c.a != c.b
        assert (c.pair, c.level) not in pairs
        pairs.add((c.pair, c.level))
    hubs = high_degree_nodes(net)
    assert hubs == {v for v in net.nodes if node_degree(net, v) > net.degree_cutoff}


def test_kleinberg_family_has_lattice_and_levels():
    net = generate_network(GeneratorConfig(n=16, family="kleinberg"), seed=1)
    assert net.placement is not None and len(net.placement.positions) == 16
    for c in net.connections:
        pa, pb = net.placement.positions[c.a], net.placement.positions[c.b]
        d = sum(abs(x - y) for x, y in zip(pa, pb))
        # a level-l contact spans between 2^(l-1) and 2^l - 1 lattice steps
        assert hop_distance(c.level) <= d < 2 * hop_distance(c.level)


def test_json_roundtrip_and_format():
    net = network(3, [(0, 1, 1, 0.8), (1, 2, 2, 0.7)], rule=DegreeRule(quantile=None, absolute=2))
    text = net.dumps()
    raw = json.loads(text)
    assert raw["nodes"] == [0, 1, 2]
    assert raw["connections"][1] == {"a": 1, "b": 2, "level": 2, "prob": 0.7, "q_f": 10.0, "fidelity": 1.0}
    assert raw["degree_threshold"] == {"absolute": 2}
    again = OverlayNetwork.loads(text)
    assert again == net
    assert again.dumps() == text


def test_loader_errors_are_precise():
    with pytest.raises(ConfigError, match="line 1 column"):
        OverlayNetwork.loads("{oops")
    bad = {"nodes": [0, 1], "connections": [{"a": 0, "b": 1, "level": 1, "prob": "x"}]}
    with pytest.raises(ConfigError, match=r"connections\[0\]"):
        OverlayNetwork.from_dict(bad)
    with pytest.raises(ConfigError, match="nodes"):
        OverlayNetwork.from_dict({"nodes": [0, 2], "connections": []})
    with pytest.raises(ConfigError, match="degree_threshold"):
        OverlayNetwork.from_dict({"nodes": [0], "degree_threshold": {"median": 1}})


def test_cutoff_fixed_at_load_survives_failure_views():
    net = hub_star_network()
    cut = net.degree_cutoff
    view = net.without([h for h, _ in net.adjacency[7]])
    assert view.degree_cutoff == cut
    assert node_degree(view, 7) == 0
