"""Problem instances, schedules, constraint checking and cost accounting.

A Scenario describes one scheduling problem: a set of users, each with a
set of exactly ``num_slots`` recommended videos, and an ordered list of
delivery nodes.  The last node is always the origin CDN: it stores the
whole library, has capacity for every user at once, and is (typically)
far more expensive per download than the peer nodes before it.

A Schedule is the joint decision: for every (user, slot) pair, which
video is played and which node serves it.  ``validate_schedule`` checks
the five feasibility constraint families; ``evaluate_cost`` prices a
feasible schedule exactly (rational arithmetic, no float drift).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

CostLike = Union[int, str, Fraction]


def as_cost(value: CostLike) -> Fraction:
    """Normalize a cost to an exact Fraction ("7/2" and 3 both work)."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, str)):
        return Fraction(value)
    raise TypeError(f"cost must be int, str or Fraction, got {type(value).__name__}")


@dataclass(frozen=True)
class NodeSpec:
    """One delivery node: cached video ids, cost per download, and the
    maximum number of users it can serve within a single slot."""

    storage: frozenset[int]
    unit_cost: Fraction
    capacity: int

    def __init__(self, storage: Iterable[int], unit_cost: CostLike, capacity: int):
        object.__setattr__(self, "storage", frozenset(int(v) for v in storage))
        object.__setattr__(self, "unit_cost", as_cost(unit_cost))
        object.__setattr__(self, "capacity", int(capacity))


@dataclass(frozen=True)
class Scenario:
    """A full problem instance.  ``nodes[-1]`` is the CDN node."""

    num_users: int
    num_videos: int
    num_slots: int
    recommendations: tuple[frozenset[int], ...]
    nodes: tuple[NodeSpec, ...]

    def __init__(
        self,
        num_users: int,
        num_videos: int,
        num_slots: int,
        recommendations: Sequence[Iterable[int]],
        nodes: Sequence[NodeSpec],
    ):
        if num_users < 1:
            raise ValueError("num_users must be >= 1")
        if num_videos < 1:
            raise ValueError("num_videos must be >= 1")
        if num_slots < 0:
            raise ValueError("num_slots must be >= 0")
        recs = tuple(frozenset(int(v) for v in r) for r in recommendations)
        if len(recs) != num_users:
            raise ValueError(f"expected {num_users} recommendation sets, got {len(recs)}")
        if not nodes:
            raise ValueError("at least the CDN node is required")
        object.__setattr__(self, "num_users", int(num_users))
        object.__setattr__(self, "num_videos", int(num_videos))
        object.__setattr__(self, "num_slots", int(num_slots))
        object.__setattr__(self, "recommendations", recs)
        object.__setattr__(self, "nodes", tuple(nodes))

    @property
    def cdn_index(self) -> int:
        return len(self.nodes) - 1

    @property
    def cdn(self) -> NodeSpec:
        return self.nodes[-1]

    @property
    def peers(self) -> tuple[NodeSpec, ...]:
        return self.nodes[:-1]

    def caching_nodes(self, video: int) -> list[int]:
        """Node ids storing `video`, ascending (the CDN is normally last)."""
        return [n for n, spec in enumerate(self.nodes) if video in spec.storage]


@dataclass(frozen=True)
class Schedule:
    """Dense decision matrix: (user, slot) -> (video, node)."""

    assignment: Mapping[tuple[int, int], tuple[int, int]]

    def __init__(self, assignment: Mapping[tuple[int, int], tuple[int, int]]):
        normalized = {
            (int(u), int(t)): (int(v), int(n)) for (u, t), (v, n) in assignment.items()
        }
        object.__setattr__(self, "assignment", normalized)

    def entry(self, user: int, slot: int) -> tuple[int, int]:
        return self.assignment[(user, slot)]

    def entries(self) -> list[tuple[int, int, int, int]]:
        """(user, slot, video, node) rows sorted by (user, slot)."""
        return sorted((u, t, v, n) for (u, t), (v, n) in self.assignment.items())


@dataclass(frozen=True)
class CostBreakdown:
    """Total delivery cost and its split across nodes / peer-vs-CDN."""

    total: Fraction
    per_node: Mapping[int, Fraction]
    peer_total: Fraction
    cdn_total: Fraction


class InfeasibleScheduleError(ValueError):
    """Raised when a cost evaluation is requested for an invalid schedule."""

    def __init__(self, violations: list[str]):
        super().__init__(f"schedule violates constraints: {violations[:5]}"
                         + (" ..." if len(violations) > 5 else ""))
        self.violations = violations


def validate_scenario(scenario: Scenario) -> list[str]:
    """Return one entry per violated instance invariant (empty == valid).

    Ordering is deterministic: by invariant id, then by the indices in the
    message.
    """
    found: list[tuple[str, tuple[int, ...], str]] = []
    s = scenario
    U, V, T = s.num_users, s.num_videos, s.num_slots

    for u, rec in enumerate(s.recommendations):
        if len(rec) != T:
            found.append(("recset-size", (u,), f"recset-size:user {u}"))
        for v in sorted(rec):
            if not 0 <= v < V:
                found.append(("video-range", (u, v), f"video-range:user {u},video {v}"))

    cdn = s.cdn
    for v in range(V):
        if v not in cdn.storage:
            found.append(("cdn-missing-video", (v,), f"cdn-missing-video:{v}"))
    if cdn.capacity != U:
        found.append(("cdn-capacity", (), f"cdn-capacity:got {cdn.capacity},want {U}"))

    for n, spec in enumerate(s.nodes):
        for v in sorted(spec.storage):
            if not 0 <= v < V:
                found.append(("storage-range", (n, v), f"storage-range:node {n},video {v}"))
        if spec.capacity < 1:
            found.append(("node-capacity", (n,), f"node-capacity:node {n}"))
        if spec.unit_cost < 0:
            found.append(("node-cost", (n,), f"node-cost:node {n}"))

    found.sort(key=lambda item: (item[0], item[1]))
    return [msg for _, _, msg in found]


def validate_schedule(scenario: Scenario, schedule: Schedule) -> list[str]:
    """Check the five feasibility constraint families of a schedule.

    Returns one entry per violation, naming the constraint and the
    user/node/slot involved; empty list means the schedule is feasible.
    Duplicated videos are reported via ``once:``; missing videos are then
    implied (a dense schedule with no duplicates and only recommended
    videos plays each exactly once).
    """
    found: list[tuple[str, tuple[int, ...], str]] = []
    s = scenario
    U, T, N = s.num_users, s.num_slots, len(s.nodes)
    asg = schedule.assignment

    expected = {(u, t) for u in range(U) for t in range(T)}
    for u, t in sorted(expected - set(asg)):
        found.append(("one-per-slot", (u, t), f"one-per-slot:user {u},slot {t}"))
    for u, t in sorted(set(asg) - expected):
        found.append(("one-per-slot", (u, t), f"one-per-slot:user {u},slot {t}"))

    per_user_counts: dict[tuple[int, int], int] = {}
    loads: dict[tuple[int, int], int] = {}
    for (u, t), (v, n) in asg.items():
        if (u, t) not in expected:
            continue
        if v not in s.recommendations[u]:
            found.append(("recommended", (u, v), f"recommended:user {u},video {v}"))
        per_user_counts[(u, v)] = per_user_counts.get((u, v), 0) + 1
        if not 0 <= n < N:
            found.append(("node-range", (u, t), f"node-range:user {u},slot {t}"))
            continue
        if v not in s.nodes[n].storage:
            found.append(("storage", (u, t, n), f"storage:user {u},slot {t},node {n}"))
        loads[(n, t)] = loads.get((n, t), 0) + 1

    for (u, v), count in per_user_counts.items():
        if count > 1:
            found.append(("once", (u, v), f"once:user {u},video {v}"))

    for (n, t), load in loads.items():
        if load > s.nodes[n].capacity:
            found.append(("capacity", (n, t), f"capacity:node {n},slot {t}"))

    found.sort(key=lambda item: (item[0], item[1]))
    return [msg for _, _, msg in found]


def evaluate_cost(scenario: Scenario, schedule: Schedule) -> CostBreakdown:
    """Price a feasible schedule: one ``unit_cost`` per (user, slot) download."""
    violations = validate_schedule(scenario, schedule)
    if violations:
        raise InfeasibleScheduleError(violations)

    per_node = {n: Fraction(0) for n in range(len(scenario.nodes))}
    for (_, _), (_, n) in schedule.assignment.items():
        per_node[n] += scenario.nodes[n].unit_cost
    total = sum(per_node.values(), Fraction(0))
    cdn_total = per_node[scenario.cdn_index]
    return CostBreakdown(
        total=total,
        per_node=per_node,
        peer_total=total - cdn_total,
        cdn_total=cdn_total,
    )


def cost_scale(scenario: Scenario) -> tuple[int, list[int]]:
    """Common denominator and integer-scaled per-node costs.

    Solvers work on exact integer costs: ``scaled[n] = unit_cost[n] * L``
    where L is the lcm of all cost denominators.  Dividing an integer
    objective by L recovers the exact rational value.
    """
    denoms = [spec.unit_cost.denominator for spec in scenario.nodes]
    scale = math.lcm(*denoms) if denoms else 1
    scaled = [int(spec.unit_cost * scale) for spec in scenario.nodes]
    return scale, scaled


# --- plain-text serialization ------------------------------------------------
#
# Header line "U V T N" (N = number of peer nodes), then N+1 node lines
# "cost capacity k v1 ... vk" (peers first, CDN last), then U recommendation
# lines "v1 ... vT".  Video ids are written ascending so fixtures diff
# cleanly.


def scenario_to_text(scenario: Scenario) -> str:
    s = scenario
    lines = [f"{s.num_users} {s.num_videos} {s.num_slots} {len(s.peers)}"]
    for spec in s.nodes:
        videos = " ".join(str(v) for v in sorted(spec.storage))
        line = f"{spec.unit_cost} {spec.capacity} {len(spec.storage)}"
        lines.append(f"{line} {videos}".rstrip())
    for rec in s.recommendations:
        lines.append(" ".join(str(v) for v in sorted(rec)))
    return "\n".join(lines) + "\n"


def scenario_from_text(text: str) -> Scenario:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty scenario text")
    header = lines[0].split()
    if len(header) != 4:
        raise ValueError(f"bad header line: {lines[0]!r}")
    num_users, num_videos, num_slots, num_peers = (int(x) for x in header)
    expected = 1 + num_peers + 1 + num_users
    if len(lines) != expected:
        raise ValueError(f"expected {expected} lines, got {len(lines)}")

    nodes = []
    for i in range(num_peers + 1):
        tokens = lines[1 + i].split()
        cost, capacity, k = Fraction(tokens[0]), int(tokens[1]), int(tokens[2])
        videos = [int(v) for v in tokens[3:]]
        if len(videos) != k:
            raise ValueError(f"node line {i}: expected {k} videos, got {len(videos)}")
        nodes.append(NodeSpec(videos, cost, capacity))

    recommendations = []
    for u in range(num_users):
        recommendations.append([int(v) for v in lines[2 + num_peers + u].split()])
    return Scenario(num_users, num_videos, num_slots, recommendations, nodes)


def schedule_to_text(schedule: Schedule) -> str:
    """One "user slot video node" line per entry, sorted by (user, slot)."""
    return "\n".join(f"{u} {t} {v} {n}" for u, t, v, n in schedule.entries()) + "\n"


def schedule_from_text(text: str) -> Schedule:
    assignment = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        u, t, v, n = (int(x) for x in line.split())
        assignment[(u, t)] = (v, n)
    return Schedule(assignment)
