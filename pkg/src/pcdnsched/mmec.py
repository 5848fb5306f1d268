"""MMEC: the optimal two-phase solver.

Phase 1 routes every (user, video) request through the virtual-node flow
network at minimum total cost; phase 2 edge-colors the resulting
user/replica multigraph to place each routed request into a concrete
time slot.  Mapping replicas back to their physical nodes yields a
feasible schedule whose cost equals the flow objective, which is the
global optimum of the joint ordering + assignment problem.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional

from . import coloring as coloring_mod
from . import flow as flow_mod
from .flow import VirtualNode
from .kernels import resolve_backend
from .model import (
    CostBreakdown,
    Scenario,
    Schedule,
    evaluate_cost,
    validate_scenario,
)


class ScenarioError(ValueError):
    def __init__(self, violations: list[str]):
        super().__init__(f"invalid scenario: {violations[:5]}"
                         + (" ..." if len(violations) > 5 else ""))
        self.violations = violations


@dataclass(frozen=True)
class Diagnostics:
    method: str
    backend: str
    aggregated: bool
    augmentations: int
    path_costs: tuple[Fraction, ...]
    build_ms: float
    flow_ms: float
    coloring_ms: float
    total_ms: float


@dataclass(frozen=True)
class MmecResult:
    schedule: Schedule
    cost: CostBreakdown
    flow_objective: Fraction
    diagnostics: Diagnostics


def virtual_to_physical(
    virtual_schedule: Mapping[tuple[int, int], tuple[int, VirtualNode]]
) -> Schedule:
    """Collapse replicas back to their physical nodes.

    Per-slot physical loads stay within capacity: a node has exactly
    `capacity` replicas and each replica serves at most one user per slot.
    """
    return Schedule(
        {
            (u, t): (video, vnode.physical)
            for (u, t), (video, vnode) in virtual_schedule.items()
        }
    )


def run_detailed(
    scenario: Scenario,
    method: str = "bellman-ford",
    aggregate: bool = False,
    backend: Optional[str] = None,
) -> MmecResult:
    violations = validate_scenario(scenario)
    if violations:
        raise ScenarioError(violations)

    t0 = time.perf_counter()
    network = flow_mod.build_network(scenario, aggregate=aggregate)
    t1 = time.perf_counter()
    solution = flow_mod.solve_mcmf(network, method=method, backend=backend)
    t2 = time.perf_counter()

    graph = coloring_mod.build_multigraph(solution)
    edge_colors = coloring_mod.kempe_color(graph, scenario.num_slots)
    playlists = coloring_mod.coloring_to_slots(graph, edge_colors)
    virtual_schedule = {
        (u, t): playlists[u][t]
        for u in range(scenario.num_users)
        for t in range(scenario.num_slots)
    }
    schedule = virtual_to_physical(virtual_schedule)
    t3 = time.perf_counter()

    cost = evaluate_cost(scenario, schedule)
    if cost.total != solution.objective:
        raise flow_mod.FlowError(
            f"coloring changed the cost: flow {solution.objective}, "
            f"schedule {cost.total}"
        )

    diagnostics = Diagnostics(
        method=method,
        backend=resolve_backend(backend),
        aggregated=aggregate,
        augmentations=solution.augmentations,
        path_costs=solution.path_costs,
        build_ms=(t1 - t0) * 1e3,
        flow_ms=(t2 - t1) * 1e3,
        coloring_ms=(t3 - t2) * 1e3,
        total_ms=(t3 - t0) * 1e3,
    )
    return MmecResult(
        schedule=schedule,
        cost=cost,
        flow_objective=solution.objective,
        diagnostics=diagnostics,
    )


def run(
    scenario: Scenario,
    method: str = "bellman-ford",
    aggregate: bool = False,
    backend: Optional[str] = None,
) -> tuple[Schedule, CostBreakdown]:
    """Solve a scenario to optimality; returns (schedule, cost breakdown)."""
    result = run_detailed(scenario, method=method, aggregate=aggregate,
                          backend=backend)
    return result.schedule, result.cost
