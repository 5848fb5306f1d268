import numpy as np
import pytest

from pcdnsched.coloring import (
    BipartiteMultigraph,
    ColoringError,
    EdgeColoring,
    MultiEdge,
    build_multigraph,
    coloring_to_slots,
    kempe_color,
    verify_coloring,
)
from pcdnsched.flow import FlowSolution, FlowUnit, VirtualNode, build_network, solve_mcmf


def make_graph(num_users, num_nodes, edges, num_slots):
    nodes = tuple(VirtualNode(i, 0) for i in range(num_nodes))
    return BipartiteMultigraph(
        num_users=num_users,
        nodes=nodes,
        edges=tuple(MultiEdge(u, r, v) for u, r, v in edges),
        num_slots=num_slots,
    )


def make_solution(num_users, num_slots, virtual_nodes, units):
    return FlowSolution(
        units=tuple(FlowUnit(u, v, vn) for u, v, vn in units),
        objective=0,
        num_users=num_users,
        num_slots=num_slots,
        virtual_nodes=tuple(virtual_nodes),
        augmentations=len(units),
        path_costs=(),
    )


def recheck_proper(graph, coloring, num_colors):
    """Second, test-local properness check (set-based)."""
    assert len(coloring.colors) == len(graph.edges)
    seen = {}
    for edge, c in zip(graph.edges, coloring.colors):
        assert 0 <= c < num_colors
        for key in (("u", edge.user), ("n", edge.right)):
            assert (key, c) not in seen
            seen[(key, c)] = True


class TestBuildMultigraph:
    def test_fig3_flow(self, fig3):
        solution = solve_mcmf(build_network(fig3))
        graph = build_multigraph(solution)
        assert len(graph.edges) == 6
        assert graph.user_degree(0) == 3 and graph.user_degree(1) == 3
        # both peer replicas carry 3 units; the CDN replicas none
        degrees = [graph.node_degree(r) for r in range(len(graph.nodes))]
        assert degrees == [3, 3, 0, 0]

    def test_single_user_star(self):
        vn = [VirtualNode(0, 0), VirtualNode(1, 0), VirtualNode(2, 0)]
        solution = make_solution(1, 3, vn, [(0, v, vn[v]) for v in range(3)])
        graph = build_multigraph(solution)
        assert graph.user_degree(0) == 3
        assert graph.max_degree() == 3

    def test_rejects_overloaded_node(self):
        vn = [VirtualNode(0, 0)]
        units = [(u, u, vn[0]) for u in range(4)]  # 4 units, T = 3
        with pytest.raises(ColoringError):
            build_multigraph(make_solution(4, 3, vn, units))

    def test_rejects_duplicate_request(self):
        vn = [VirtualNode(0, 0), VirtualNode(1, 0)]
        units = [(0, 0, vn[0]), (0, 0, vn[1])]
        with pytest.raises(ColoringError):
            build_multigraph(make_solution(1, 2, vn, units))

    def test_rejects_wrong_unit_count(self):
        vn = [VirtualNode(0, 0)]
        with pytest.raises(ColoringError):
            build_multigraph(make_solution(2, 2, vn, [(0, 0, vn[0])]))


class TestKempeColor:
    def test_perfect_matching_single_color(self):
        graph = make_graph(4, 4, [(u, u, u) for u in range(4)], num_slots=1)
        coloring = kempe_color(graph, 1)
        assert coloring.colors == (0, 0, 0, 0)

    @pytest.mark.parametrize("t", [2, 3, 5, 8])
    def test_complete_bipartite_uses_exactly_t_colors(self, t):
        edges = [(u, r, u * t + r) for u in range(t) for r in range(t)]
        graph = make_graph(t, t, edges, num_slots=t)
        coloring = kempe_color(graph, t)
        assert verify_coloring(graph, coloring, t) == []
        recheck_proper(graph, coloring, t)
        assert len(set(coloring.colors)) == t

    def test_fig3_deterministic_colors(self, fig3):
        solution = solve_mcmf(build_network(fig3))
        graph = build_multigraph(solution)
        coloring = kempe_color(graph, 3)
        assert verify_coloring(graph, coloring, 3) == []
        # regression pin of the deterministic smallest-free-color outcome
        assert coloring.colors == (0, 1, 2, 2, 0, 1)

    def test_kempe_chain_swap(self):
        # Edge 6 finds no shared free color: color 2 is free at its user,
        # color 1 at its node, so the alternating 2/1 chain (edges 3 and 1)
        # swaps before edge 6 takes color 2.
        edges = [
            (0, 0, 0), (0, 1, 1), (1, 2, 2), (0, 2, 3),
            (2, 3, 4), (2, 4, 5), (2, 2, 6),
        ]
        graph = make_graph(3, 5, edges, num_slots=3)
        coloring = kempe_color(graph, 3)
        assert verify_coloring(graph, coloring, 3) == []
        assert coloring.colors == (0, 2, 0, 1, 0, 1, 2)

    def test_degree_bound_violation_raises(self):
        graph = make_graph(1, 2, [(0, 0, 0), (0, 1, 1)], num_slots=1)
        with pytest.raises(ColoringError):
            kempe_color(graph, 1)

    def test_fuzz_1000_degree_bounded_multigraphs(self):
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            t = int(rng.integers(1, 13))
            num_users = int(rng.integers(1, 9))
            num_nodes = int(rng.integers(1, 11))
            max_edges = min(num_users, num_nodes) * t
            num_edges = int(rng.integers(0, max_edges + 1))
            left = rng.choice(num_users * t, size=num_edges, replace=False)
            right = rng.choice(num_nodes * t, size=num_edges, replace=False)
            edges = [
                (int(l) // t, int(r) // t, i)
                for i, (l, r) in enumerate(zip(left, right))
            ]
            graph = make_graph(num_users, num_nodes, edges, num_slots=t)
            assert graph.max_degree() <= t
            coloring = kempe_color(graph, t)
            assert verify_coloring(graph, coloring, t) == []
            recheck_proper(graph, coloring, t)


class TestVerifyColoring:
    def test_detects_out_of_range(self):
        graph = make_graph(1, 1, [(0, 0, 0)], num_slots=1)
        assert verify_coloring(graph, EdgeColoring((5,)), 1) != []

    def test_detects_conflict(self):
        graph = make_graph(1, 2, [(0, 0, 0), (0, 1, 1)], num_slots=2)
        assert verify_coloring(graph, EdgeColoring((0, 0)), 2) != []

    def test_detects_wrong_length(self):
        graph = make_graph(1, 1, [(0, 0, 0)], num_slots=1)
        assert verify_coloring(graph, EdgeColoring(()), 1) != []


class TestColoringToSlots:
    def test_fig3_playlists(self, fig3):
        solution = solve_mcmf(build_network(fig3))
        graph = build_multigraph(solution)
        playlists = coloring_to_slots(graph, kempe_color(graph, 3))
        assert len(playlists) == 2
        for playlist in playlists:
            assert sorted(video for video, _ in playlist) == [0, 1, 2]
        for t in range(3):
            nodes_in_slot = [playlists[u][t][1] for u in range(2)]
            assert len(set(nodes_in_slot)) == 2

    def test_single_user_identity(self):
        vn = [VirtualNode(0, 0), VirtualNode(1, 0), VirtualNode(2, 0)]
        solution = make_solution(1, 3, vn, [(0, v, vn[v]) for v in range(3)])
        graph = build_multigraph(solution)
        playlists = coloring_to_slots(graph, kempe_color(graph, 3))
        # smallest-free-color order follows edge insertion order
        assert [v for v, _ in playlists[0]] == [0, 1, 2]

    def test_shared_node_gets_distinct_slots(self):
        edges = [(0, 0, 0), (0, 1, 1), (1, 0, 2), (1, 1, 3)]
        graph = make_graph(2, 2, edges, num_slots=2)
        playlists = coloring_to_slots(graph, kempe_color(graph, 2))
        shared = [
            t for u in range(2) for t in range(2)
            if playlists[u][t][1] == VirtualNode(0, 0)
        ]
        assert len(shared) == 2 and shared[0] != shared[1]

    def test_rejects_improper_coloring(self):
        edges = [(0, 0, 0), (0, 1, 1)]
        graph = make_graph(1, 2, edges, num_slots=2)
        with pytest.raises(ColoringError):
            coloring_to_slots(graph, EdgeColoring((0, 0)))
