"""Synthetic problem-instance generation.

Demand: each user samples a fixed number of distinct videos, weighted by
a Zipf popularity law over the library (video 0 is the most popular).
Supply: peers get storage either by the default popularity-sorted cyclic
placement, or by per-peer independent sampling (popularity-weighted or
uniform); per-peer storage/capacity sizes can be uniform or drawn as a
random composition with the same total, for heterogeneity studies.
The CDN node always stores the whole library at capacity num_users.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from fractions import Fraction
from typing import Optional

import numpy as np

from .model import CostLike, NodeSpec, Scenario, as_cost

PLACEMENTS = ("cyclic", "popularity", "random")
ALLOCATIONS = ("uniform", "random")


@dataclass(frozen=True)
class GenConfig:
    """Generator knobs; the defaults are the standard experiment setting."""

    users: int = 100
    videos: int = 300
    peers: int = 50
    slots: int = 10
    storage: int = 6
    capacity: int = 2
    alpha: float = 0.6
    peer_cost: CostLike = 1
    cdn_cost: CostLike = 5
    placement: str = "cyclic"
    storage_alloc: str = "uniform"
    capacity_alloc: str = "uniform"
    storage_total: Optional[int] = None   # overrides storage * peers
    capacity_total: Optional[int] = None  # overrides capacity * peers
    seed: int = 0

    def __post_init__(self):
        if self.users < 1 or self.videos < 1 or self.peers < 0:
            raise ValueError("users/videos must be >= 1 and peers >= 0")
        if self.slots < 0 or self.slots > self.videos:
            raise ValueError("slots must be in [0, videos]")
        if self.peers > 0 and (self.storage < 1 or self.capacity < 1):
            raise ValueError("per-peer storage and capacity must be >= 1")
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        if self.placement not in PLACEMENTS:
            raise ValueError(f"placement must be one of {PLACEMENTS}")
        if self.storage_alloc not in ALLOCATIONS:
            raise ValueError(f"storage_alloc must be one of {ALLOCATIONS}")
        if self.capacity_alloc not in ALLOCATIONS:
            raise ValueError(f"capacity_alloc must be one of {ALLOCATIONS}")
        if as_cost(self.peer_cost) < 0 or as_cost(self.cdn_cost) < 0:
            raise ValueError("costs must be nonnegative")


def zipf_weights(num_videos: int, alpha: float) -> np.ndarray:
    """Probability of rank k (1-based): k^-alpha, normalized."""
    if num_videos < 1:
        raise ValueError("num_videos must be >= 1")
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    ranks = np.arange(1, num_videos + 1, dtype=np.float64)
    weights = ranks ** (-alpha)
    return weights / weights.sum()


def _sample_distinct(
    count: int,
    num_videos: int,
    cdf: Optional[np.ndarray],
    rng: np.random.Generator,
) -> frozenset[int]:
    """`count` distinct videos: i.i.d. draws, duplicates rejected, redrawn.

    Draws come in growing batches (the first `count` distinct values of
    the stream are kept, the unused tail discarded), which keeps heavily
    skewed weights from degenerating into one rejected draw at a time.
    """
    if count > num_videos:
        raise ValueError(f"cannot draw {count} distinct of {num_videos} videos")
    chosen: list[int] = []
    have: set[int] = set()
    batch = max(count, 1)
    while len(chosen) < count:
        if cdf is None:
            draws = rng.integers(0, num_videos, size=batch)
        else:
            draws = np.searchsorted(cdf, rng.random(batch), side="right")
        values, first_pos = np.unique(draws, return_index=True)
        for idx in np.argsort(first_pos, kind="stable"):
            v = int(values[idx])
            if v not in have:
                have.add(v)
                chosen.append(v)
                if len(chosen) == count:
                    break
        batch = min(batch * 4, 1 << 16)
    return frozenset(chosen)


def gen_recommendations(
    num_users: int,
    num_slots: int,
    weights: np.ndarray,
    rng: np.random.Generator,
) -> list[frozenset[int]]:
    """Per-user sets of exactly `num_slots` distinct videos, sampled with
    popularity weights (without replacement via rejection)."""
    num_videos = len(weights)
    cdf = np.cumsum(weights)
    cdf[-1] = 1.0
    return [
        _sample_distinct(num_slots, num_videos, cdf, rng)
        for _ in range(num_users)
    ]


def place_cyclic(num_videos: int, sizes: list[int]) -> list[frozenset[int]]:
    """Popularity-sorted cyclic placement.

    Videos in popularity order (id 0 first) are dealt to peers round
    robin until every peer holds its quota.  If the library is smaller
    than the total quota the deal wraps around, duplicating videos across
    peers (never within one); videos beyond the total quota stay
    CDN-only.  A peer already holding the video (or full) passes to the
    next peer in the cycle.
    """
    num_peers = len(sizes)
    storage: list[set[int]] = [set() for _ in range(num_peers)]
    if num_peers == 0 or num_videos == 0:
        return [frozenset(s) for s in storage]

    pointer = 0
    while True:
        placed_any = False
        for v in range(num_videos):
            if all(len(storage[p]) >= sizes[p] for p in range(num_peers)):
                break
            for offset in range(num_peers):
                p = (pointer + offset) % num_peers
                if len(storage[p]) < sizes[p] and v not in storage[p]:
                    storage[p].add(v)
                    pointer = (p + 1) % num_peers
                    placed_any = True
                    break
        if not placed_any or all(
            len(storage[p]) >= sizes[p] for p in range(num_peers)
        ):
            break
    return [frozenset(s) for s in storage]


def place_popularity(
    num_videos: int,
    sizes: list[int],
    weights: np.ndarray,
    rng: np.random.Generator,
) -> list[frozenset[int]]:
    """Each peer independently samples its quota of distinct videos with
    popularity weights; videos may end up cached nowhere."""
    cdf = np.cumsum(weights)
    cdf[-1] = 1.0
    return [_sample_distinct(s, num_videos, cdf, rng) for s in sizes]


def place_random(
    num_videos: int, sizes: list[int], rng: np.random.Generator
) -> list[frozenset[int]]:
    """Each peer independently samples its quota uniformly at random."""
    return [_sample_distinct(s, num_videos, None, rng) for s in sizes]


def random_composition(
    total: int, parts: int, min_per_part: int, rng: np.random.Generator
) -> list[int]:
    """Uniformly random composition of `total` into `parts` parts, each at
    least `min_per_part` (stars and bars via sorted distinct cut points)."""
    if parts < 1:
        raise ValueError("parts must be >= 1")
    if total < parts * min_per_part:
        raise ValueError(
            f"total {total} < parts {parts} * min_per_part {min_per_part}"
        )
    if parts == 1:
        return [total]
    stars = total - parts * min_per_part
    positions = np.sort(rng.choice(stars + parts - 1, size=parts - 1, replace=False))
    bounds = np.concatenate(([-1], positions, [stars + parts - 1]))
    return [int(b - a - 1) + min_per_part for a, b in zip(bounds[:-1], bounds[1:])]


def _sizes(
    mode: str,
    per_peer: int,
    total_override: Optional[int],
    peers: int,
    max_size: int,
    rng: np.random.Generator,
) -> list[int]:
    """Per-peer sizes with an exact total: balanced split for `uniform`,
    uniformly random composition (each part in [1, max_size]) for `random`."""
    if peers == 0:
        return []
    total = total_override if total_override is not None else per_peer * peers
    if total < peers:
        raise ValueError("total must allow at least 1 per peer")
    if mode == "uniform":
        base, extra = divmod(total, peers)
        return [base + (1 if p < extra else 0) for p in range(peers)]
    for _ in range(1000):
        parts = random_composition(total, peers, 1, rng)
        if max(parts) <= max_size:
            return parts
    raise RuntimeError("could not draw a composition within the size cap")


def generate(config: GenConfig) -> Scenario:
    """Build a Scenario from a GenConfig, deterministically per seed.

    Demand, placement and size allocations use independent child streams
    of the seed, so e.g. changing the per-peer storage quota leaves every
    user's recommendation set untouched.
    """
    cfg = config
    demand_rng, placement_rng, alloc_rng = (
        np.random.default_rng(s) for s in np.random.SeedSequence(cfg.seed).spawn(3)
    )

    weights = zipf_weights(cfg.videos, cfg.alpha)
    recommendations = gen_recommendations(cfg.users, cfg.slots, weights, demand_rng)

    storage_sizes = _sizes(cfg.storage_alloc, cfg.storage, cfg.storage_total,
                           cfg.peers, cfg.videos, alloc_rng)
    capacity_sizes = _sizes(cfg.capacity_alloc, cfg.capacity, cfg.capacity_total,
                            cfg.peers, cfg.users * cfg.slots + 1, alloc_rng)

    if cfg.placement == "cyclic":
        storage_sets = place_cyclic(cfg.videos, storage_sizes)
    elif cfg.placement == "popularity":
        storage_sets = place_popularity(cfg.videos, storage_sizes, weights,
                                        placement_rng)
    else:
        storage_sets = place_random(cfg.videos, storage_sizes, placement_rng)

    peer_cost = as_cost(cfg.peer_cost)
    nodes = [
        NodeSpec(storage_sets[p], peer_cost, capacity_sizes[p])
        for p in range(cfg.peers)
    ]
    nodes.append(NodeSpec(range(cfg.videos), as_cost(cfg.cdn_cost), cfg.users))
    return Scenario(cfg.users, cfg.videos, cfg.slots, recommendations, nodes)


# --- flat "key = value" config text ------------------------------------------

_FIELD_TYPES = {f.name: f.type for f in fields(GenConfig)}
_INT_FIELDS = {"users", "videos", "peers", "slots", "storage", "capacity", "seed",
               "storage_total", "capacity_total"}
_COST_FIELDS = {"peer_cost", "cdn_cost"}
_STR_FIELDS = {"placement", "storage_alloc", "capacity_alloc"}


def config_to_text(config: GenConfig) -> str:
    lines = []
    for f in fields(GenConfig):
        value = getattr(config, f.name)
        if value is None:
            continue
        if f.name in _COST_FIELDS:
            value = as_cost(value)
        lines.append(f"{f.name} = {value}")
    return "\n".join(lines) + "\n"


def config_from_text(text: str, base: GenConfig | None = None) -> GenConfig:
    """Parse `key = value` lines ('#' comments allowed) over `base`."""
    overrides = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _FIELD_TYPES:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        if key in _INT_FIELDS:
            overrides[key] = int(value)
        elif key in _COST_FIELDS:
            overrides[key] = Fraction(value)
        elif key in _STR_FIELDS:
            overrides[key] = value
        else:  # alpha
            overrides[key] = float(value)
    return replace(base or GenConfig(), **overrides)
