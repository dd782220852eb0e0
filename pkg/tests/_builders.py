"""Hand-built fixture networks and independent oracles used across the suite."""

from __future__ import annotations

import itertools
from fractions import Fraction

import networkx as nx

from qmemroute.base_graph import embed_overlay
from qmemroute.overlay import Connection, DegreeRule, OverlayNetwork, Placement


def network(n, edges, prob=0.9, rule=None, placement=None):
    """edges: (a, b) or (a, b, level) or (a, b, level, prob)."""
    conns = []
    for e in edges:
        a, b = e[0], e[1]
        level = e[2] if len(e) > 2 else 1
        p = e[3] if len(e) > 3 else prob
        conns.append(Connection(a, b, level, p, q_f=10.0))
    return OverlayNetwork(n_nodes=n, connections=conns, degree_rule=rule or DegreeRule(), placement=placement)


def embedded(n, edges, positions, side, prob=0.9, rule=None, k=2):
    net = network(n, edges, prob=prob, rule=rule)
    return embed_overlay(net, k=k, n=side**k, placement=positions)


def diamond():
    # s=0, a=1, b=2, t=3 on the corners of a unit square
    return embedded(4, [(0, 1), (0, 2), (1, 3), (2, 3)], {0: (0, 0), 1: (1, 0), 2: (0, 1), 3: (1, 1)}, 2)


def bridge():
    # s=0 - m=1 - t=2, no alternative
    return embedded(3, [(0, 1), (1, 2)], {0: (0, 0), 1: (1, 0), 2: (1, 1)}, 2)


def lattice(side):
    """side x side grid with all nearest-neighbour edges, node i at row-major position."""
    pos = {i: (i // side, i % side) for i in range(side * side)}
    edges = []
    for i, (x, y) in pos.items():
        if x + 1 < side:
            edges.append((i, i + side))
        if y + 1 < side:
            edges.append((i, i + 1))
    return embedded(side * side, edges, pos, side)


# Failure scenario: a row A, R1..R6, B on y=1 where R4 holds level-2 contacts
# to R2 and R6, plus two hubs H1, H2 with four leaves each; H1 is reachable
# from R2 through a level-3 contact, H2 links to R6.
A, R1, R2, R3, R4, R5, R6, B, H1, H2 = range(10)
NODE_NAMES = {A: "A", R1: "R1", R2: "R2", R3: "R3", R4: "R4", R5: "R5", R6: "R6", B: "B", H1: "H1", H2: "H2"}


def hub_detour_network():
    pos = {i: (i, 1) for i in range(8)}
    pos[H1] = (5, 2)
    pos[H2] = (6, 2)
    leaves = {H1: [(4, 2), (5, 3), (3, 2), (4, 3)], H2: [(7, 2), (6, 3), (7, 3), (6, 4)]}
    edges = [(i, i + 1, 1) for i in range(7)]
    edges += [(R4, R2, 2), (R4, R6, 2), (R2, H1, 3), (H1, H2, 1), (H2, R6, 1)]
    v = 10
    for hub, cells in leaves.items():
        for cell in cells:
            pos[v] = cell
            d = abs(cell[0] - pos[hub][0]) + abs(cell[1] - pos[hub][1])
            edges.append((hub, v, d.bit_length()))
            v += 1
    net = network(v, edges, placement=Placement(2, 64, pos))
    return net


def hub_star_network():
    # path 0..6 plus hub 7 linked to nodes 0..5: hub degree 6, everyone else <= 3
    edges = [(i, i + 1) for i in range(6)] + [(7, i) for i in range(6)]
    return network(8, edges)


# oracles


def to_nx(g) -> nx.Graph:
    """Simple graph view (parallel connections collapsed)."""
    G = nx.Graph()
    G.add_nodes_from(g.positions if hasattr(g, "positions") else g.nodes)
    edges = g.edges.values() if hasattr(g, "positions") else [c for _, c in g.active()]
    G.add_edges_from((e.a, e.b) for e in edges)
    return G


def to_multi(g) -> nx.MultiGraph:
    G = nx.MultiGraph()
    G.add_nodes_from(g.positions)
    for h, e in g.edges.items():
        G.add_edge(e.a, e.b, key=h)
    return G


def chi_by_enumeration(G: nx.Graph) -> dict:
    """Sum over unordered connected pairs of the fraction of minimal paths transiting each node."""
    chi = {v: Fraction(0) for v in G}
    for p, q in itertools.combinations(sorted(G), 2):
        if not nx.has_path(G, p, q):
            continue
        paths = list(nx.all_shortest_paths(G, p, q))
        for v in G:
            if v in (p, q):
                continue
            chi[v] += Fraction(sum(v in path for path in paths), len(paths))
    return chi


def min_cost_by_enumeration(g, s, t, costs):
    best = None
    for path in nx.all_simple_edge_paths(to_multi(g), s, t):
        c = sum(costs[key] for _, _, key in path)
        if best is None or c < best:
            best = c
    return best
