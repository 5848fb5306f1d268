"""Flow-network reduction of the joint ordering/scheduling problem.

Every physical node of capacity ``d`` is split into ``d`` unit-capacity
virtual replicas.  The network then routes one unit per (user, video)
request:

    source -> demand(u, v)      capacity 1,  cost 0       (one per request)
    demand(u, v) -> virtual n'  capacity 1,  cost c(n')   (iff n' caches v)
    virtual n' -> sink          capacity T,  cost 0

An integral min-cost flow of value U*T assigns every request to a
replica while never overcommitting a replica beyond one user per slot in
aggregate; the coloring phase later spreads each replica's units across
distinct slots.

``aggregate=True`` solves an equivalent, much smaller network in which
the replicas of one physical node are merged (sink capacity d*T) and the
resulting per-node flow is split back across replicas round-robin; the
optimum is unchanged and the equivalence is asserted in tests.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import kernels
from .model import Scenario, cost_scale


class FlowError(RuntimeError):
    pass


class InfeasibleFlowError(FlowError):
    """Fewer than U*T units could be routed: the network is corrupted
    (valid scenarios are always feasible via the CDN replicas)."""


@dataclass(frozen=True)
class VirtualNode:
    """Replica `replica` (0-based) of physical node `physical`."""

    physical: int
    replica: int


def split_nodes(scenario: Scenario) -> list[VirtualNode]:
    """Expand each physical node into capacity-many unit replicas,
    ordered by (physical, replica)."""
    return [
        VirtualNode(n, r)
        for n, spec in enumerate(scenario.nodes)
        for r in range(spec.capacity)
    ]


class FlowNetwork:
    """The auxiliary graph in array form, ready for the kernels.

    Vertex numbering: 0 = source; 1..U*T = demand vertices ordered by
    (user, video); then one vertex per right-side node (virtual replicas,
    or physical nodes when aggregated); sink last.  Arcs are stored as
    parallel tail/head/capacity/cost lists, costs pre-scaled to integers
    by the scenario-wide denominator ``scale``.
    """

    def __init__(self, scenario: Scenario, aggregate: bool = False):
        self.scenario = scenario
        self.aggregated = aggregate
        self.scale, scaled_costs = cost_scale(scenario)
        self.virtual_nodes = split_nodes(scenario)
        T = scenario.num_slots

        self.demand_pairs: list[tuple[int, int]] = [
            (u, v)
            for u in range(scenario.num_users)
            for v in sorted(scenario.recommendations[u])
        ]
        self.required_flow = len(self.demand_pairs)  # == U * T

        if aggregate:
            right_count = len(scenario.nodes)
            right_cost = scaled_costs
            right_storage = [spec.storage for spec in scenario.nodes]
            right_sink_cap = [spec.capacity * T for spec in scenario.nodes]
        else:
            right_count = len(self.virtual_nodes)
            right_cost = [scaled_costs[vn.physical] for vn in self.virtual_nodes]
            right_storage = [
                scenario.nodes[vn.physical].storage for vn in self.virtual_nodes
            ]
            right_sink_cap = [T] * right_count

        self.right_count = right_count
        self.source = 0
        self.first_right = 1 + self.required_flow
        self.sink = self.first_right + right_count
        self.num_vertices = self.sink + 1

        tails: list[int] = []
        heads: list[int] = []
        caps: list[int] = []
        costs: list[int] = []

        for i in range(self.required_flow):
            tails.append(self.source)
            heads.append(1 + i)
            caps.append(1)
            costs.append(0)

        # transmission arcs; remember (demand index, right index) per arc
        self.trans_arcs: list[tuple[int, int]] = []
        for i, (_, v) in enumerate(self.demand_pairs):
            for r in range(right_count):
                if v in right_storage[r]:
                    tails.append(1 + i)
                    heads.append(self.first_right + r)
                    caps.append(1)
                    costs.append(right_cost[r])
                    self.trans_arcs.append((i, r))
        self.first_trans_arc = self.required_flow

        for r in range(right_count):
            tails.append(self.first_right + r)
            heads.append(self.sink)
            caps.append(right_sink_cap[r])
            costs.append(0)

        self.tails, self.heads = tails, heads
        self.caps, self.costs_scaled = caps, costs

    @property
    def num_arcs(self) -> int:
        return len(self.tails)

    def arcs(self) -> list[tuple[int, int, int, Fraction]]:
        """(tail, head, capacity, cost) for every forward arc."""
        return [
            (t, h, c, Fraction(w, self.scale))
            for t, h, c, w in zip(self.tails, self.heads, self.caps, self.costs_scaled)
        ]

    def python_solver(self, method: str):
        return kernels.python_solver(
            self.num_vertices, self.source, self.sink,
            self.tails, self.heads, self.caps, self.costs_scaled, method,
        )


def build_network(scenario: Scenario, aggregate: bool = False) -> FlowNetwork:
    return FlowNetwork(scenario, aggregate=aggregate)


@dataclass(frozen=True)
class FlowUnit:
    user: int
    video: int
    node: VirtualNode


@dataclass(frozen=True)
class FlowSolution:
    """Unit-path decomposition of an optimal flow."""

    units: tuple[FlowUnit, ...]
    objective: Fraction
    num_users: int
    num_slots: int
    virtual_nodes: tuple[VirtualNode, ...]
    augmentations: int
    path_costs: tuple[Fraction, ...]


def solve_mcmf(
    network: FlowNetwork,
    method: str = "bellman-ford",
    backend: Optional[str] = None,
) -> FlowSolution:
    """Route all U*T request units at minimum total cost."""
    pushed, objective, path_costs, flows = kernels.solve_min_cost_flow(
        network.num_vertices,
        network.source,
        network.sink,
        network.tails,
        network.heads,
        network.caps,
        network.costs_scaled,
        network.required_flow,
        method=method,
        backend=backend,
    )
    if pushed < network.required_flow:
        raise InfeasibleFlowError(
            f"routed {pushed} of {network.required_flow} units; network corrupted"
        )

    scenario = network.scenario
    units: list[FlowUnit] = []
    if network.aggregated:
        # Split each physical node's units across its replicas round-robin;
        # totals are bounded by d*T, so every replica carries at most T.
        next_replica = [0] * len(scenario.nodes)
        for k, (i, r) in enumerate(network.trans_arcs):
            if flows[network.first_trans_arc + k] > 0:
                u, v = network.demand_pairs[i]
                cap = scenario.nodes[r].capacity
                units.append(FlowUnit(u, v, VirtualNode(r, next_replica[r] % cap)))
                next_replica[r] += 1
    else:
        for k, (i, r) in enumerate(network.trans_arcs):
            if flows[network.first_trans_arc + k] > 0:
                u, v = network.demand_pairs[i]
                units.append(FlowUnit(u, v, network.virtual_nodes[r]))

    scale = network.scale
    return FlowSolution(
        units=tuple(units),
        objective=Fraction(objective, scale),
        num_users=scenario.num_users,
        num_slots=scenario.num_slots,
        virtual_nodes=tuple(network.virtual_nodes),
        augmentations=pushed,
        path_costs=tuple(Fraction(c, scale) for c in path_costs),
    )


@dataclass(frozen=True)
class AugmentingPath:
    arcs: tuple[int, ...]       # residual arc ids, source -> sink
    vertices: tuple[int, ...]   # visited vertices, source first
    cost: Fraction


class SuccessiveShortestPaths:
    """Step-by-step solver over a network's residual state.

    ``find_path`` returns a minimum-cost source->sink path in the current
    residual graph (correct in the presence of negative reverse-arc
    costs) without mutating anything; ``augment`` pushes one unit along
    the path found last.  Used for verification and tests; bulk solves go
    through :func:`solve_mcmf`.
    """

    def __init__(self, network: FlowNetwork, method: str = "bellman-ford"):
        self.network = network
        self._solver = network.python_solver(method)

    @property
    def objective(self) -> Fraction:
        return Fraction(self._solver.objective, self.network.scale)

    @property
    def path_costs(self) -> list[Fraction]:
        scale = self.network.scale
        return [Fraction(c, scale) for c in self._solver.path_costs]

    def find_path(self) -> Optional[AugmentingPath]:
        found = self._solver.find_path()
        if found is None:
            return None
        path, cost = found
        vertices = [self.network.source]
        for arc in path:
            vertices.append(self._solver.res_head[arc])
        self._last = (path, cost)
        return AugmentingPath(
            arcs=tuple(path),
            vertices=tuple(vertices),
            cost=Fraction(cost, self.network.scale),
        )

    def augment(self, path: AugmentingPath) -> None:
        self._solver.augment(list(path.arcs), int(path.cost * self.network.scale))

    def forward_flows(self) -> list[int]:
        return self._solver.forward_flows()


def dump_network(network: FlowNetwork, fp=None) -> str:
    """Write the instance in DIMACS min-cost-flow exchange format.

    1-based vertex ids; arc lines are `a tail head low cap cost` with
    integer costs at the network's scale (recorded in a comment).
    """
    out = fp if fp is not None else io.StringIO()
    out.write(f"c min-cost flow instance, cost scale {network.scale}\n")
    out.write(f"p min {network.num_vertices} {network.num_arcs}\n")
    out.write(f"n {network.source + 1} {network.required_flow}\n")
    out.write(f"n {network.sink + 1} {-network.required_flow}\n")
    for t, h, cap, cost in zip(
        network.tails, network.heads, network.caps, network.costs_scaled
    ):
        out.write(f"a {t + 1} {h + 1} 0 {cap} {cost}\n")
    return out.getvalue() if fp is None else ""
