"""Walk through a memory failure on a small hand-built overlay: main path,
destroyed contacts, switchover span, replacement and restoration."""

import sys

from qmemroute import (
    Connection,
    Demand,
    OverlayNetwork,
    Placement,
    build_cost_model,
    embed_overlay,
    find_disjoint_paths,
    inject_failure,
    plan_switchover,
    restore,
)
from qmemroute.failure import active_route

NAMES = ["A", "R1", "R2", "R3", "R4", "R5", "R6", "B", "H1", "H2"]


def build():
    pos = {i: (i, 1) for i in range(8)}
    pos[8], pos[9] = (5, 2), (6, 2)
    edges = [(i, i + 1, 1) for i in range(7)]
    # R4 bridges to R2 and R6; R2 reaches hub H1, the hubs link through to R6
    edges += [(4, 2, 2), (4, 6, 2), (2, 8, 3), (8, 9, 1), (9, 6, 1)]
    v = 10
    for hub, cells in ((8, [(4, 2), (5, 3), (3, 2), (4, 3)]), (9, [(7, 2), (6, 3), (7, 3), (6, 4)])):
        for cell in cells:
            pos[v] = cell
            d = abs(cell[0] - pos[hub][0]) + abs(cell[1] - pos[hub][1])
            edges.append((hub, v, d.bit_length()))
            v += 1
    conns = [Connection(a, b, lvl, 0.9, q_f=10.0) for a, b, lvl in edges]
    return OverlayNetwork(n_nodes=v, connections=conns, placement=Placement(2, 64, pos))


def name(v):
    return NAMES[v] if v < len(NAMES) else f"L{v}"


def show(nodes):
    return " - ".join(name(v) for v in nodes)


def main():
    net = build()
    g = embed_overlay(net)
    cm = build_cost_model(g)
    main_path = find_disjoint_paths(g, cm, Demand(0, 0, 7), z=1, max_concurrences=10).paths[0]
    print("main path:     ", show(main_path.nodes))

    event, view = inject_failure(net, 4)
    print("failed node:   ", name(event.failed_node))
    print("destroyed:     ", sorted(event.destroyed_connections))
    print("affected:      ", ", ".join(name(v) for v in sorted(event.affected_nodes)))

    plan = plan_switchover(main_path, event, g, view)
    print("switchover:    ", name(plan.replacement_source), "->", name(plan.replacement_target))
    print("replacement:   ", show(plan.replacement_paths.paths[0].nodes))
    print("active route:  ", show(active_route(plan).nodes))

    back = restore(plan)
    print("restored:      ", back.view == net, "/ route", show(active_route(back).nodes))
    return 0


if __name__ == "__main__":
    sys.exit(main())
