"""Independent exhaustive search for tiny instances.

Ground truth for optimality checks: enumerates every joint choice of
per-user playback permutations and, for each fixed ordering, finds the
exact cheapest node assignment by per-slot brute force (slots do not
interact once orders are fixed).  Deliberately shares no code with the
flow-based solver.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .model import NodeSpec, Scenario, Schedule, cost_scale


class InstanceTooLargeError(ValueError):
    pass


def _slot_assignment_search(
    videos: Sequence[int],
    caching: list[list[int]],
    caps: list[int],
    costs: list[int],
    min_cost_suffix: list[int],
    best_bound: int,
) -> tuple[int, tuple[int, ...]] | None:
    """DFS over per-request node choices for one slot; returns the
    cheapest (cost, nodes) or None if nothing beats `best_bound`."""
    k = len(videos)
    best: list[int] = [best_bound]
    best_nodes: list[tuple[int, ...] | None] = [None]
    load = [0] * len(caps)
    chosen = [0] * k

    def dfs(i: int, acc: int) -> None:
        if acc + min_cost_suffix[i] >= best[0] and best_nodes[0] is not None:
            return
        if i == k:
            if acc < best[0] or best_nodes[0] is None:
                best[0] = acc
                best_nodes[0] = tuple(chosen[:k])
            return
        for n in caching[videos[i]]:
            if load[n] < caps[n]:
                load[n] += 1
                chosen[i] = n
                dfs(i + 1, acc + costs[n])
                load[n] -= 1

    dfs(0, 0)
    if best_nodes[0] is None:
        return None
    return best[0], best_nodes[0]


def optimal_slot_assignment(
    scenario: Scenario, videos: Sequence[int]
) -> tuple[Fraction, tuple[int, ...]]:
    """Exact cheapest node-per-request assignment for one slot's requests
    (brute force with pruning; independent of the flow solver)."""
    scale, costs = cost_scale(scenario)
    caching = [
        sorted(scenario.caching_nodes(v), key=lambda n: (costs[n], n))
        for v in range(scenario.num_videos)
    ]
    caps = [spec.capacity for spec in scenario.nodes]
    min_cost = [min((costs[n] for n in caching[v]), default=0)
                for v in range(scenario.num_videos)]
    suffix = [0] * (len(videos) + 1)
    for i in range(len(videos) - 1, -1, -1):
        suffix[i] = suffix[i + 1] + min_cost[videos[i]]

    found = _slot_assignment_search(
        list(videos), caching, caps, costs, suffix, best_bound=1 << 62
    )
    if found is None:
        raise ValueError("slot has no feasible assignment")
    cost, nodes = found
    return Fraction(cost, scale), nodes


def search_space_bound(scenario: Scenario) -> int:
    """Crude upper bound on the enumeration size used by the size guard."""
    T, U = scenario.num_slots, scenario.num_users
    orderings = math.factorial(T) ** U
    max_caching = max(
        (len(scenario.caching_nodes(v)) for v in range(scenario.num_videos)),
        default=1,
    )
    return orderings * (max_caching ** U) * max(T, 1)


def exhaustive_optimal(
    scenario: Scenario, node_budget: int = 10_000_000
) -> tuple[Fraction, Schedule]:
    """Globally minimal cost plus one witness schedule.

    Guarded: raises InstanceTooLargeError when the enumeration bound
    exceeds `node_budget`.
    """
    if search_space_bound(scenario) > node_budget:
        raise InstanceTooLargeError(
            f"instance too large: bound {search_space_bound(scenario)} "
            f"> budget {node_budget}"
        )

    scale, costs = cost_scale(scenario)
    caching = [
        sorted(scenario.caching_nodes(v), key=lambda n: (costs[n], n))
        for v in range(scenario.num_videos)
    ]
    caps = [spec.capacity for spec in scenario.nodes]
    min_cost = [min((costs[n] for n in caching[v]), default=0)
                for v in range(scenario.num_videos)]

    U, T = scenario.num_users, scenario.num_slots
    if T == 0:
        return Fraction(0), Schedule({})

    @lru_cache(maxsize=None)
    def slot_cost(video_key: tuple[int, ...]) -> tuple[int, tuple[int, ...]]:
        """Cheapest assignment for one slot's request multiset (sorted)."""
        videos = list(video_key)
        suffix = [0] * (len(videos) + 1)
        for i in range(len(videos) - 1, -1, -1):
            suffix[i] = suffix[i + 1] + min_cost[videos[i]]
        found = _slot_assignment_search(
            videos, caching, caps, costs, suffix, best_bound=1 << 62
        )
        if found is None:
            raise ValueError("slot has no feasible assignment")
        return found

    per_user_perms = [
        list(itertools.permutations(sorted(rec)))
        for rec in scenario.recommendations
    ]

    best_cost = None
    best_ordering = None
    for ordering in itertools.product(*per_user_perms):
        total = 0
        ok = True
        for t in range(T):
            key = tuple(sorted(ordering[u][t] for u in range(U)))
            total += slot_cost(key)[0]
            if best_cost is not None and total >= best_cost:
                ok = False
                break
        if ok and (best_cost is None or total < best_cost):
            best_cost = total
            best_ordering = ordering

    assert best_cost is not None and best_ordering is not None
    assignment = {}
    for t in range(T):
        requests = sorted(
            (best_ordering[u][t], u) for u in range(U)
        )
        key = tuple(v for v, _ in requests)
        nodes = slot_cost(key)[1]
        for (v, u), n in zip(requests, nodes):
            assignment[(u, t)] = (v, n)
    return Fraction(best_cost, scale), Schedule(assignment)


def random_tiny_scenario(rng) -> Scenario:
    """A random oracle-sized instance: up to 3 users/slots/peers, up to 5
    videos, peer capacities 1-2, arbitrary peer storage subsets (videos
    may be CDN-only), small heterogeneous peer costs."""
    num_slots = int(rng.integers(1, 4))
    num_users = int(rng.integers(1, 4))
    num_videos = int(rng.integers(num_slots, 6))
    num_peers = int(rng.integers(0, 4))

    recommendations = [
        [int(v) for v in rng.choice(num_videos, size=num_slots, replace=False)]
        for _ in range(num_users)
    ]
    nodes = []
    for _ in range(num_peers):
        size = int(rng.integers(1, num_videos + 1))
        storage = [int(v) for v in rng.choice(num_videos, size=size, replace=False)]
        cost = int(rng.integers(1, 4))
        capacity = int(rng.integers(1, 3))
        nodes.append(NodeSpec(storage, cost, capacity))
    nodes.append(NodeSpec(range(num_videos), 5, num_users))
    return Scenario(num_users, num_videos, num_slots, recommendations, nodes)
