import pytest

from pcdnsched.model import NodeSpec, Scenario


@pytest.fixture
def fig3() -> Scenario:
    """Two users, both recommended videos {0,1,2}; peer 0 caches {0,1},
    peer 1 caches {1,2}, both unit cost 1 and capacity 1; CDN cost 5.

    Identical playback orders force two CDN fallbacks (cost 14); staggered
    orders serve everything from peers (cost 6, the analytic floor).
    """
    return Scenario(
        num_users=2,
        num_videos=3,
        num_slots=3,
        recommendations=[[0, 1, 2], [0, 1, 2]],
        nodes=[
            NodeSpec([0, 1], 1, 1),
            NodeSpec([1, 2], 1, 1),
            NodeSpec([0, 1, 2], 5, 2),
        ],
    )


def make_uncontended(num_users=3, num_slots=2, peer_capacity=2, num_peers=2,
                     peer_cost=1, cdn_cost=5) -> Scenario:
    """Every video on every peer and enough aggregate per-slot capacity:
    the optimum serves everything from peers."""
    num_videos = num_slots
    assert num_peers * peer_capacity >= num_users
    videos = range(num_videos)
    nodes = [NodeSpec(videos, peer_cost, peer_capacity) for _ in range(num_peers)]
    nodes.append(NodeSpec(videos, cdn_cost, num_users))
    return Scenario(num_users, num_videos, num_slots,
                    [list(videos)] * num_users, nodes)


def make_cdn_only(num_users=2, num_slots=2, cdn_cost=5) -> Scenario:
    num_videos = num_slots
    return Scenario(
        num_users, num_videos, num_slots,
        [list(range(num_videos))] * num_users,
        [NodeSpec(range(num_videos), cdn_cost, num_users)],
    )
