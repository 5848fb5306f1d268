import itertools
from fractions import Fraction

import numpy as np
import pytest

from pcdnsched import baselines
from pcdnsched.model import (
    NodeSpec,
    Scenario,
    evaluate_cost,
    validate_schedule,
)
from pcdnsched.oracle import (
    InstanceTooLargeError,
    exhaustive_optimal,
    optimal_slot_assignment,
    random_tiny_scenario,
    search_space_bound,
)

from conftest import make_cdn_only


def independent_minimum(scenario: Scenario) -> Fraction:
    """Plain nested-loop optimum: all joint orderings x all per-slot node
    assignments, no pruning, no memoization, no shared code."""
    U, T = scenario.num_users, scenario.num_slots
    caps = [spec.capacity for spec in scenario.nodes]
    best = None
    per_user = [list(itertools.permutations(sorted(r)))
                for r in scenario.recommendations]
    for ordering in itertools.product(*per_user):
        total = Fraction(0)
        for t in range(T):
            slot_best = None
            choices = [
                [n for n in range(len(scenario.nodes))
                 if ordering[u][t] in scenario.nodes[n].storage]
                for u in range(U)
            ]
            for combo in itertools.product(*choices):
                loads = {}
                for n in combo:
                    loads[n] = loads.get(n, 0) + 1
                if any(loads[n] > caps[n] for n in loads):
                    continue
                cost = sum((scenario.nodes[n].unit_cost for n in combo),
                           Fraction(0))
                if slot_best is None or cost < slot_best:
                    slot_best = cost
            total += slot_best
        if best is None or total < best:
            best = total
    return best


def test_fig3_optimum_cross_checked(fig3):
    cost, witness = exhaustive_optimal(fig3)
    assert cost == 6
    assert validate_schedule(fig3, witness) == []
    assert evaluate_cost(fig3, witness).total == 6
    # hand enumeration over the 36 joint orderings
    assert independent_minimum(fig3) == 6


def test_cdn_only():
    s = make_cdn_only(num_users=2, num_slots=2, cdn_cost=5)
    cost, witness = exhaustive_optimal(s)
    assert cost == 2 * 2 * 5
    assert validate_schedule(s, witness) == []


def test_single_user_sums_cheapest_nodes():
    s = Scenario(
        1, 3, 3, [[0, 1, 2]],
        [NodeSpec([0], 1, 1), NodeSpec([1], 2, 1), NodeSpec([0, 1, 2], 5, 1)],
    )
    cost, _ = exhaustive_optimal(s)
    assert cost == 1 + 2 + 5  # video 2 only on the CDN


def test_matches_independent_enumeration():
    rng = np.random.default_rng(55)
    for _ in range(25):
        s = random_tiny_scenario(rng)
        cost, witness = exhaustive_optimal(s)
        assert validate_schedule(s, witness) == []
        assert cost == independent_minimum(s)


def test_lower_bounds_random_feasible_schedules():
    rng = np.random.default_rng(60)
    for _ in range(5):
        s = random_tiny_scenario(rng)
        cost, _ = exhaustive_optimal(s)
        for seed in range(200):
            feasible = baselines.rors(s, seed)
            assert cost <= evaluate_cost(s, feasible).total


def test_size_guard():
    s = Scenario(
        5, 5, 5,
        [[0, 1, 2, 3, 4]] * 5,
        [NodeSpec([0, 1, 2, 3, 4], 5, 5)],
    )
    assert search_space_bound(s) > 10_000_000
    with pytest.raises(InstanceTooLargeError):
        exhaustive_optimal(s)


def test_empty_horizon():
    s = Scenario(1, 1, 0, [[]], [NodeSpec([0], 5, 1)])
    cost, witness = exhaustive_optimal(s)
    assert cost == 0 and witness.assignment == {}


class TestOptimalSlotAssignment:
    def test_matches_exhaustive_product(self):
        rng = np.random.default_rng(77)
        for _ in range(20):
            s = random_tiny_scenario(rng)
            videos = [
                int(rng.choice(sorted(s.recommendations[u])))
                for u in range(s.num_users)
            ]
            cost, nodes = optimal_slot_assignment(s, videos)
            # independent check
            caps = [spec.capacity for spec in s.nodes]
            best = None
            choices = [
                [n for n in range(len(s.nodes)) if v in s.nodes[n].storage]
                for v in videos
            ]
            for combo in itertools.product(*choices):
                loads = {}
                for n in combo:
                    loads[n] = loads.get(n, 0) + 1
                if any(loads[n] > caps[n] for n in loads):
                    continue
                total = sum((s.nodes[n].unit_cost for n in combo), Fraction(0))
                if best is None or total < best:
                    best = total
            assert cost == best
            assert len(nodes) == len(videos)

    def test_respects_capacity(self, fig3):
        cost, nodes = optimal_slot_assignment(fig3, [0, 0])
        # video 0 is only on peer 0 (capacity 1): second copy goes to the CDN
        assert cost == 1 + 5
        assert sorted(nodes) == [0, 2]
