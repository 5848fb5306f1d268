"""Slot assignment via bipartite multigraph edge coloring.

Each flow unit becomes an edge between its user and its virtual node.
User degrees are exactly T and virtual-node degrees at most T, so the
multigraph is T-edge-colorable; a proper coloring read as "color ==
slot" gives every user one video per slot and every replica at most one
user per slot, at unchanged cost.

Coloring is the constructive argument run literally: take edges in
insertion order and give each the smallest color free at both endpoints;
when no common color exists, swap an alternating two-color chain starting
at the node side to free one up (in a bipartite graph the chain can never
wrap around to the user side).
"""

from __future__ import annotations

from dataclasses import dataclass

from .flow import FlowSolution, VirtualNode


class ColoringError(RuntimeError):
    pass


@dataclass(frozen=True)
class MultiEdge:
    user: int
    right: int      # index into `nodes` of the multigraph
    video: int


@dataclass(frozen=True)
class BipartiteMultigraph:
    num_users: int
    nodes: tuple[VirtualNode, ...]
    edges: tuple[MultiEdge, ...]
    num_slots: int

    def user_degree(self, u: int) -> int:
        return sum(1 for e in self.edges if e.user == u)

    def node_degree(self, r: int) -> int:
        return sum(1 for e in self.edges if e.right == r)

    def max_degree(self) -> int:
        degrees = [0] * (self.num_users + len(self.nodes))
        for e in self.edges:
            degrees[e.user] += 1
            degrees[self.num_users + e.right] += 1
        return max(degrees, default=0)


@dataclass(frozen=True)
class EdgeColoring:
    """colors[i] is the slot of edges[i]."""

    colors: tuple[int, ...]


def build_multigraph(solution: FlowSolution) -> BipartiteMultigraph:
    """One edge per flow unit; rejects unit sets that cannot come from a
    feasible flow (duplicate (user, video) or an overloaded node)."""
    T = solution.num_slots
    node_index = {vn: i for i, vn in enumerate(solution.virtual_nodes)}
    edges = []
    seen_pairs = set()
    load = [0] * len(solution.virtual_nodes)
    for unit in solution.units:
        pair = (unit.user, unit.video)
        if pair in seen_pairs:
            raise ColoringError(f"duplicate flow unit for user {unit.user}, "
                                f"video {unit.video}")
        seen_pairs.add(pair)
        r = node_index[unit.node]
        load[r] += 1
        if load[r] > T:
            raise ColoringError(
                f"virtual node {unit.node} carries more than {T} units"
            )
        edges.append(MultiEdge(unit.user, r, unit.video))
    if len(edges) != solution.num_users * T:
        raise ColoringError(
            f"expected {solution.num_users * T} units, got {len(edges)}"
        )
    return BipartiteMultigraph(
        num_users=solution.num_users,
        nodes=solution.virtual_nodes,
        edges=tuple(edges),
        num_slots=T,
    )


def kempe_color(graph: BipartiteMultigraph, num_colors: int) -> EdgeColoring:
    """Proper edge coloring with at most `num_colors` colors.

    Requires max degree <= num_colors; always succeeds under that bound.
    """
    if graph.max_degree() > num_colors:
        raise ColoringError(
            f"degree bound violated: max degree {graph.max_degree()} "
            f"> {num_colors} colors"
        )

    U = graph.num_users
    R = len(graph.nodes)
    # edge_at[vertex][color] -> edge id (users first, then right vertices)
    edge_at = [[-1] * num_colors for _ in range(U + R)]
    colors = [-1] * len(graph.edges)

    for eid, edge in enumerate(graph.edges):
        left = edge.user
        right = U + edge.right

        shared = -1
        for c in range(num_colors):
            if edge_at[left][c] == -1 and edge_at[right][c] == -1:
                shared = c
                break
        if shared >= 0:
            colors[eid] = shared
            edge_at[left][shared] = eid
            edge_at[right][shared] = eid
            continue

        a = next(c for c in range(num_colors) if edge_at[left][c] == -1)
        b = next(c for c in range(num_colors) if edge_at[right][c] == -1)

        # Walk the a/b alternating chain from the right endpoint and swap.
        chain = []
        vertex, want = right, a
        while True:
            nxt = edge_at[vertex][want]
            if nxt == -1:
                break
            chain.append(nxt)
            e = graph.edges[nxt]
            other_left, other_right = e.user, U + e.right
            vertex = other_right if vertex == other_left else other_left
            if vertex == left:
                raise ColoringError("alternating chain returned to the "
                                    "uncolored edge's endpoint")
            want = b if want == a else a

        for ce in chain:
            old = colors[ce]
            new = b if old == a else a
            e = graph.edges[ce]
            for vtx in (e.user, U + e.right):
                if edge_at[vtx][old] == ce:
                    edge_at[vtx][old] = -1
                edge_at[vtx][new] = ce
            colors[ce] = new

        colors[eid] = a
        edge_at[left][a] = eid
        edge_at[right][a] = eid

    return EdgeColoring(colors=tuple(colors))


def verify_coloring(
    graph: BipartiteMultigraph, coloring: EdgeColoring, num_colors: int
) -> list[str]:
    """Independent properness check: every edge colored in range, no two
    edges sharing an endpoint sharing a color.  Empty list == proper."""
    problems = []
    if len(coloring.colors) != len(graph.edges):
        problems.append(
            f"colored {len(coloring.colors)} of {len(graph.edges)} edges"
        )
        return problems
    seen_left: dict[tuple[int, int], int] = {}
    seen_right: dict[tuple[int, int], int] = {}
    for eid, (edge, c) in enumerate(zip(graph.edges, coloring.colors)):
        if not 0 <= c < num_colors:
            problems.append(f"edge {eid}: color {c} out of range")
            continue
        if (edge.user, c) in seen_left:
            problems.append(f"user {edge.user}: color {c} reused")
        seen_left[(edge.user, c)] = eid
        if (edge.right, c) in seen_right:
            problems.append(f"node {edge.right}: color {c} reused")
        seen_right[(edge.right, c)] = eid
    return problems


def coloring_to_slots(
    graph: BipartiteMultigraph, coloring: EdgeColoring
) -> list[list[tuple[int, VirtualNode]]]:
    """Per-user playlist: position t holds the (video, virtual node) pair
    whose edge got color t."""
    problems = verify_coloring(graph, coloring, graph.num_slots)
    if problems:
        raise ColoringError(f"improper coloring: {problems[:3]}")
    playlists: list[list[tuple[int, VirtualNode]]] = [
        [None] * graph.num_slots for _ in range(graph.num_users)  # type: ignore
    ]
    for edge, c in zip(graph.edges, coloring.colors):
        playlists[edge.user][c] = (edge.video, graph.nodes[edge.right])
    for u, playlist in enumerate(playlists):
        if any(entry is None for entry in playlist):
            raise ColoringError(f"user {u} has an unfilled slot")
    return playlists
