"""Failure-resilient routing over entangled quantum overlay networks.

Overlay networks are embedded into a k-dimensional lattice base-graph, routed
greedily, and protected by node-disjoint replacement paths that are switched
in when a quantum memory fails.
"""

__version__ = "0.1.0"

from .base_graph import (
    BaseGraph,
    ScaledBaseGraph,
    build_scaled_graph,
    connection_probability,
    distance_from_probability,
    embed_overlay,
    l1_distance,
)
from .baselines import (
    BenchConfig,
    OpCounter,
    bench_campaign,
    complexity_envelope,
    kpa_kpi_disjoint,
    ksp_disjoint,
    shortest_path_dijkstra,
)
from .costs import CostModel, build_cost_model, compute_chi_beta, compute_chi_exact
from .disjoint import (
    DisjointPathSet,
    Solution,
    find_disjoint_paths,
    objective_phi,
    optimality_gap,
    validate_disjointness,
    validate_flow_conservation,
    validate_throughput,
)
from .errors import *  # noqa: F403
from .failure import FailureEvent, SwitchoverPlan, inject_failure, loss_count, plan_switchover, restore
from .overlay import (
    Connection,
    DegreeRule,
    Demand,
    GeneratorConfig,
    OverlayNetwork,
    Placement,
    generate_network,
    hop_distance,
    is_high_degree,
    node_degree,
)
from .routing import LocalView, Route, average_step_count, greedy_route
