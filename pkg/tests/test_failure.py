import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _builders import A, B, H1, H2, R1, R2, R3, R4, R5, R6, embedded, hub_detour_network, hub_star_network, network
from qmemroute.base_graph import embed_overlay
from qmemroute.costs import build_cost_model
from qmemroute.disjoint import find_disjoint_paths
from qmemroute.errors import NodeNotFound, NoMainPathError, SwitchoverFailed
from qmemroute.failure import (
    ACTIVE,
    RESTORED,
    active_route,
    inject_failure,
    loss_count,
    plan_switchover,
    restore,
    switchover_endpoints,
)
from qmemroute.overlay import Demand, GeneratorConfig, generate_network
from qmemroute.routing import Route


def hub_detour_main():
    net = hub_detour_network()
    g = embed_overlay(net)
    main = find_disjoint_paths(g, build_cost_model(g), Demand(0, A, B), 1, 10).paths[0]
    return net, g, main


def line(n):
    pos = {i: (0, i) for i in range(n)}
    return embedded(n, [(i, i + 1) for i in range(n - 1)], pos, n)


def test_isolated_node_failure():
    net = network(3, [(0, 1)])
    ev, view = inject_failure(net, 2)
    assert ev.destroyed_connections == frozenset() and ev.affected_nodes == frozenset()
    assert view.active_pairs() == net.active_pairs()


def test_star_center_failure():
    net = network(6, [(0, i) for i in range(1, 6)])
    ev, view = inject_failure(net, 0, tick=4)
    assert ev.destroyed_connections == frozenset(range(5))
    assert ev.affected_nodes == frozenset(range(1, 6))
    assert ev.tick == 4
    assert view.active() == []
    # the input network is not touched
    assert len(net.active()) == 5
    with pytest.raises(NodeNotFound):
        inject_failure(net, 6)


def test_hub_detour_failure_and_switchover():
    net, g, main = hub_detour_main()
    assert main.nodes == (A, R1, R2, R4, R6, B)
    ev, view = inject_failure(net, R4)
    # R3-R4, R4-R5 and the two level-2 contacts of R4
    assert ev.destroyed_connections == {3, 4, 7, 8}
    assert ev.affected_nodes == {R2, R3, R5, R6}
    assert switchover_endpoints(main, ev) == (R2, R6)
    plan = plan_switchover(main, ev, g, view)
    assert plan.status == ACTIVE
    assert (plan.replacement_source, plan.replacement_target) == (R2, R6)
    # only the hub detour survives; replacements may use hubs
    assert plan.replacement_paths.paths[0].nodes == (R2, H1, H2, R6)
    assert active_route(plan).nodes == (A, R1, R2, H1, H2, R6, B)


def test_linear_path_endpoints():
    g = line(5)
    main = Route((0, 1, 2, 3, 4), (0, 1, 2, 3))
    ev, _ = inject_failure(g.network, 2)
    assert switchover_endpoints(main, ev) == (1, 3)


def test_linear_path_has_no_replacement():
    g = line(5)
    main = Route((0, 1, 2, 3, 4), (0, 1, 2, 3))
    ev, view = inject_failure(g.network, 2)
    with pytest.raises(SwitchoverFailed) as exc:
        plan_switchover(main, ev, g, view)
    assert exc.value.diagnostics["source"] == 1


def test_endpoint_failure_cannot_switch_over():
    g = line(4)
    main = Route((0, 1, 2, 3), (0, 1, 2))
    ev, view = inject_failure(g.network, 0)
    with pytest.raises(SwitchoverFailed):
        plan_switchover(main, ev, g, view)


def test_failure_off_main_path():
    net, g, main = hub_detour_main()
    ev, view = inject_failure(net, R5)
    plan = plan_switchover(main, ev, g, view)
    assert plan.status == RESTORED and plan.replacement_paths is None
    assert active_route(plan) == main


def test_restore_conserves_network():
    net, g, main = hub_detour_main()
    ev, view = inject_failure(net, R4)
    plan = plan_switchover(main, ev, g, view)
    back = restore(plan)
    assert back.status == RESTORED
    assert back.view == net
    assert back.view.active_pairs() == net.active_pairs()
    assert restore(back) is back
    assert active_route(back) == main


def test_loss_count_hub_versus_path_node():
    net = hub_star_network()
    assert loss_count(net, 7) == 6
    assert loss_count(net, 3) == 3
    ev, _ = inject_failure(net, 7)
    assert len(ev.destroyed_connections) == loss_count(net, 7)


def test_forbid_affected():
    net, g, main = hub_detour_main()
    ev, view = inject_failure(net, R4)
    plan = plan_switchover(main, ev, g, view, forbid_affected=True)
    rep = plan.replacement_paths.paths[0]
    assert not (rep.interior & {R3, R5})


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.data())
def test_failure_properties(seed, data):
    net = generate_network(GeneratorConfig(n=25, family="kleinberg", long_range=2), seed)
    g = embed_overlay(net)
    node = data.draw(st.integers(0, 24))
    ev, view = inject_failure(net, node)
    want = {h for h, c in net.active() if node in (c.a, c.b)}
    assert ev.destroyed_connections == want
    assert view.adjacency[node] == []
    assert view.with_restored(ev.destroyed_connections) == net
    try:
        main = find_disjoint_paths(g, build_cost_model(g), Demand(0, 0, 24), 1, 5).paths[0]
    except NoMainPathError:
        return
    try:
        plan = plan_switchover(main, ev, g, view, z=2)
    except SwitchoverFailed:
        return
    if plan.replacement_paths is None:
        assert node not in main.nodes
        return
    for rep in plan.replacement_paths.paths:
        assert node not in rep.nodes
        assert not (set(rep.edges) & ev.destroyed_connections)
    spliced = active_route(plan)
    assert spliced.source == 0 and spliced.target == 24
    assert node not in spliced.nodes
