"""Comparison schedulers: RORS, ROOS and SAO.

All three keep the user's recommended set intact and only differ in how
they pick playback order and serving nodes:

* rors - random playback order, random feasible node per request.
* roos - the same random orders, but node assignment solved exactly
  (slots are independent once orders are fixed, so each slot is a small
  min-cost assignment).
* sao  - simulated annealing over the joint space, starting from random
  orders with greedy cheapest-node assignment and perturbing by slot
  swaps with greedy repair.

Paired seeds share playback orders across rors/roos/sao: every generator
draws the orders first, with the same calls, from the same stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .model import Scenario, Schedule, cost_scale


@dataclass(frozen=True)
class SaoParams:
    """Annealing knobs.

    `max_iters` is the total perturbation budget, consumed in batches of
    `inner_moves` per temperature step (so the default anneals for
    1000/20 = 50 steps).  `repair` picks how a displaced request gets its
    new node: "random" draws uniformly among available caching nodes (the
    CDN included), "cheapest" takes the lowest-cost available one."""

    t_init: float = 1000.0
    gamma: float = 0.95
    max_iters: int = 1000
    inner_moves: int = 20
    repair: str = "cheapest"

    def __post_init__(self):
        if self.t_init <= 0:
            raise ValueError("t_init must be positive")
        if not 0 < self.gamma < 1:
            raise ValueError("gamma must be in (0, 1)")
        if self.max_iters < 0 or self.inner_moves < 1:
            raise ValueError("max_iters must be >= 0 and inner_moves >= 1")
        if self.repair not in ("random", "cheapest"):
            raise ValueError("repair must be 'random' or 'cheapest'")


def random_orders(scenario: Scenario, rng: np.random.Generator) -> list[list[int]]:
    """A uniform random playlist permutation per user.  Shared by every
    baseline so equal seeds give equal orders."""
    return [
        [int(v) for v in rng.permutation(sorted(rec))]
        for rec in scenario.recommendations
    ]


def _peer_candidates(scenario: Scenario) -> list[list[int]]:
    """Peers caching each video, ascending node id."""
    candidates: list[list[int]] = [[] for _ in range(scenario.num_videos)]
    for n, spec in enumerate(scenario.peers):
        for v in spec.storage:
            candidates[v].append(n)
    return candidates


def _cheapest_candidates(scenario: Scenario) -> list[list[int]]:
    """All nodes caching each video, cheapest first (ties: lowest id)."""
    order = sorted(
        range(len(scenario.nodes)),
        key=lambda n: (scenario.nodes[n].unit_cost, n),
    )
    candidates: list[list[int]] = [[] for _ in range(scenario.num_videos)]
    for n in order:
        for v in scenario.nodes[n].storage:
            candidates[v].append(n)
    return candidates


def rors(scenario: Scenario, seed: int) -> Schedule:
    """Random orders; per slot, users arrive in random order and each takes
    a uniformly random node among those caching the video with remaining
    per-slot capacity.  The CDN competes on equal footing (and is the
    fallback once every caching peer is saturated), which is what makes
    this the fully unoptimized baseline."""
    rng = np.random.default_rng(seed)
    orders = random_orders(scenario, rng)
    peers_of = _peer_candidates(scenario)
    caps = [spec.capacity for spec in scenario.nodes]
    cdn = scenario.cdn_index

    assignment = {}
    for t in range(scenario.num_slots):
        load = [0] * len(scenario.nodes)
        for u in (int(x) for x in rng.permutation(scenario.num_users)):
            v = orders[u][t]
            available = [n for n in peers_of[v] if load[n] < caps[n]]
            if load[cdn] < caps[cdn]:
                available.append(cdn)
            if not available:
                raise RuntimeError("no node available; CDN capacity exhausted")
            n = available[int(rng.integers(len(available)))] \
                if len(available) > 1 else available[0]
            load[n] += 1
            assignment[(u, t)] = (v, n)
    return Schedule(assignment)


def optimal_assignment_for_orders(
    scenario: Scenario, orders: list[list[int]], backend=None
) -> Schedule:
    """Exact minimum-cost node assignment for fixed playback orders.

    With orders fixed, capacity constraints do not couple slots, so each
    slot is solved as an independent min-cost assignment (requests ->
    physical nodes, CDN always available).
    """
    scale, costs = cost_scale(scenario)
    U = scenario.num_users
    N1 = len(scenario.nodes)
    source = 0
    first_node = 1 + U
    sink = first_node + N1
    num_vertices = sink + 1

    assignment = {}
    for t in range(scenario.num_slots):
        tails, heads, caps, arc_costs = [], [], [], []
        for u in range(U):
            tails.append(source)
            heads.append(1 + u)
            caps.append(1)
            arc_costs.append(0)
        trans = []
        for u in range(U):
            v = orders[u][t]
            for n in scenario.caching_nodes(v):
                tails.append(1 + u)
                heads.append(first_node + n)
                caps.append(1)
                arc_costs.append(costs[n])
                trans.append((u, n))
        first_trans = U
        for n, spec in enumerate(scenario.nodes):
            tails.append(first_node + n)
            heads.append(sink)
            caps.append(spec.capacity)
            arc_costs.append(0)

        pushed, _, _, flows = kernels.solve_min_cost_flow(
            num_vertices, source, sink, tails, heads, caps, arc_costs,
            required_flow=U, method="dijkstra", backend=backend,
        )
        if pushed < U:
            raise RuntimeError(f"slot {t}: only {pushed} of {U} requests assignable")
        for k, (u, n) in enumerate(trans):
            if flows[first_trans + k] > 0:
                assignment[(u, t)] = (orders[u][t], n)
    return Schedule(assignment)


def roos(scenario: Scenario, seed: int, backend=None) -> Schedule:
    """Random orders (same stream discipline as rors), optimal assignment."""
    rng = np.random.default_rng(seed)
    orders = random_orders(scenario, rng)
    return optimal_assignment_for_orders(scenario, orders, backend=backend)


def _greedy_assign(scenario, orders, cheapest_of, caps, costs):
    """Cheapest available node per request, slot by slot, users in index
    order; returns (assign[u][t], load[n][t], total scaled cost)."""
    U, T = scenario.num_users, scenario.num_slots
    N1 = len(scenario.nodes)
    assign = [[-1] * T for _ in range(U)]
    load = [[0] * T for _ in range(N1)]
    total = 0
    for t in range(T):
        for u in range(U):
            v = orders[u][t]
            for n in cheapest_of[v]:
                if load[n][t] < caps[n]:
                    assign[u][t] = n
                    load[n][t] += 1
                    total += costs[n]
                    break
    return assign, load, total


def sao(scenario: Scenario, seed: int, params: SaoParams | None = None) -> Schedule:
    schedule, _ = sao_detailed(scenario, seed, params)
    return schedule


def sao_detailed(
    scenario: Scenario, seed: int, params: SaoParams | None = None
) -> tuple[Schedule, list[Fraction]]:
    """Simulated annealing; returns the best schedule seen and the
    best-cost trace per temperature step."""
    p = params or SaoParams()
    rng = np.random.default_rng(seed)
    orders = random_orders(scenario, rng)

    scale, costs = cost_scale(scenario)
    caps = [spec.capacity for spec in scenario.nodes]
    cheapest_of = _cheapest_candidates(scenario)
    U, T = scenario.num_users, scenario.num_slots

    playlists = [list(row) for row in orders]
    assign, load, current = _greedy_assign(scenario, playlists, cheapest_of,
                                           caps, costs)

    best = current
    best_playlists = [row[:] for row in playlists]
    best_assign = [row[:] for row in assign]
    trace = [Fraction(best, scale)]

    def pick(video: int, t: int, draw: float) -> int:
        candidates = [n for n in cheapest_of[video] if load[n][t] < caps[n]]
        if not candidates:
            raise RuntimeError("no node available; CDN capacity exhausted")
        if p.repair == "cheapest":
            return candidates[0]
        return candidates[min(int(draw * len(candidates)), len(candidates) - 1)]

    temperature = p.t_init
    remaining = p.max_iters if U >= 1 and T >= 2 else 0
    while remaining > 0:
        batch = min(p.inner_moves, remaining)
        remaining -= batch
        move_users = rng.integers(0, U, size=batch)
        move_slots = rng.integers(0, T, size=(batch, 2))
        repair_draws = rng.random((batch, 2))
        accept_draws = rng.random(batch)
        for i in range(batch):
            u = int(move_users[i])
            t1, t2 = int(move_slots[i, 0]), int(move_slots[i, 1])
            if t1 == t2:
                continue
            v1, v2 = playlists[u][t1], playlists[u][t2]
            n1_old, n2_old = assign[u][t1], assign[u][t2]
            load[n1_old][t1] -= 1
            load[n2_old][t2] -= 1
            n1_new = pick(v2, t1, float(repair_draws[i, 0]))
            n2_new = pick(v1, t2, float(repair_draws[i, 1]))
            delta = costs[n1_new] + costs[n2_new] - costs[n1_old] - costs[n2_old]

            accept = delta <= 0
            if not accept and temperature > 0:
                accept = accept_draws[i] < math.exp(-(delta / scale) / temperature)
            if accept:
                playlists[u][t1], playlists[u][t2] = v2, v1
                assign[u][t1], assign[u][t2] = n1_new, n2_new
                load[n1_new][t1] += 1
                load[n2_new][t2] += 1
                current += delta
                if current < best:
                    best = current
                    best_playlists = [row[:] for row in playlists]
                    best_assign = [row[:] for row in assign]
            else:
                load[n1_old][t1] += 1
                load[n2_old][t2] += 1
        temperature *= p.gamma
        trace.append(Fraction(best, scale))

    assignment = {
        (u, t): (best_playlists[u][t], best_assign[u][t])
        for u in range(U)
        for t in range(T)
    }
    return Schedule(assignment), trace
