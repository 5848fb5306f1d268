"""Pure-Python min-cost flow kernel (successive shortest paths).

Fallback for the compiled extension in ``_mcmf_cy.pyx``; both implement
the same algorithm with the same deterministic tie-breaking (arc ids are
scanned in insertion order, heap entries compare as (distance, vertex)),
so the two backends produce identical augmenting paths, not just equal
objectives.

Residual layout shared with the compiled kernel: forward arc ``j`` becomes
residual arcs ``2j`` (capacity ``cap[j]``, cost ``+c``) and ``2j + 1``
(capacity 0, cost ``-c``); ``arc ^ 1`` is the paired reverse arc, and the
tail of ``arc`` is the head of ``arc ^ 1``.
"""

from __future__ import annotations

import heapq
from collections import deque

INF = 1 << 62

METHOD_BELLMAN_FORD = 0
METHOD_DIJKSTRA = 1


class NegativeCycleError(RuntimeError):
    """A negative-cost residual cycle was detected (internal inconsistency:
    successive shortest paths from a zero flow never create one)."""


class Solver:
    """Mutable residual state plus path search / augmentation steps.

    ``find_path`` is read-only; ``augment`` applies the most recent path
    and (for the potential-based method) folds the last distance labels
    into the vertex potentials.
    """

    def __init__(
        self,
        num_vertices: int,
        source: int,
        sink: int,
        res_head: list[int],
        res_cost: list[int],
        res_cap: list[int],
        adj_start: list[int],
        adj_arcs: list[int],
        method: int = METHOD_BELLMAN_FORD,
    ):
        self.num_vertices = num_vertices
        self.source = source
        self.sink = sink
        self.res_head = res_head
        self.res_cost = res_cost
        self.res_cap = res_cap
        self.adj_start = adj_start
        self.adj_arcs = adj_arcs
        self.method = method
        self.potential = [0] * num_vertices
        self.objective = 0
        self.path_costs: list[int] = []
        self._dist: list[int] | None = None
        self._parent: list[int] | None = None

    # -- search -----------------------------------------------------------

    def find_path(self):
        """Return (arc ids source->sink, real cost) of a minimum-cost
        augmenting path, or None if the sink is unreachable."""
        if self.method == METHOD_BELLMAN_FORD:
            found = self._search_spfa()
        else:
            found = self._search_dijkstra()
        if not found:
            return None
        dist, parent = self._dist, self._parent
        if self.method == METHOD_BELLMAN_FORD:
            real_cost = dist[self.sink]
        else:
            real_cost = dist[self.sink] + self.potential[self.sink]
        path = []
        v = self.sink
        while v != self.source:
            arc = parent[v]
            path.append(arc)
            v = self.res_head[arc ^ 1]
        path.reverse()
        return path, real_cost

    def _search_spfa(self) -> bool:
        n = self.num_vertices
        res_cap, res_cost, res_head = self.res_cap, self.res_cost, self.res_head
        adj_start, adj_arcs = self.adj_start, self.adj_arcs
        dist = [INF] * n
        parent = [-1] * n
        in_queue = [False] * n
        enqueues = [0] * n
        dist[self.source] = 0
        queue = deque([self.source])
        in_queue[self.source] = True
        enqueues[self.source] = 1
        while queue:
            u = queue.popleft()
            in_queue[u] = False
            du = dist[u]
            for i in range(adj_start[u], adj_start[u + 1]):
                arc = adj_arcs[i]
                if res_cap[arc] <= 0:
                    continue
                w = res_head[arc]
                nd = du + res_cost[arc]
                if nd < dist[w]:
                    dist[w] = nd
                    parent[w] = arc
                    if not in_queue[w]:
                        enqueues[w] += 1
                        if enqueues[w] > n:
                            raise NegativeCycleError(
                                "vertex requeued more than |V| times"
                            )
                        queue.append(w)
                        in_queue[w] = True
        self._dist, self._parent = dist, parent
        return dist[self.sink] < INF

    def _search_dijkstra(self) -> bool:
        n = self.num_vertices
        res_cap, res_cost, res_head = self.res_cap, self.res_cost, self.res_head
        adj_start, adj_arcs = self.adj_start, self.adj_arcs
        pot = self.potential
        dist = [INF] * n
        parent = [-1] * n
        visited = [False] * n
        dist[self.source] = 0
        heap = [(0, self.source)]
        while heap:
            d, u = heapq.heappop(heap)
            if visited[u]:
                continue
            visited[u] = True
            if u == self.sink:
                break
            pu = pot[u]
            for i in range(adj_start[u], adj_start[u + 1]):
                arc = adj_arcs[i]
                if res_cap[arc] <= 0:
                    continue
                w = res_head[arc]
                nd = d + res_cost[arc] + pu - pot[w]
                if nd < dist[w]:
                    dist[w] = nd
                    parent[w] = arc
                    heapq.heappush(heap, (nd, w))
        self._dist, self._parent = dist, parent
        return visited[self.sink]

    # -- mutation ----------------------------------------------------------

    def augment(self, path: list[int], real_cost: int) -> None:
        """Push one unit along `path` (arc ids from the latest find_path)."""
        if self.method == METHOD_DIJKSTRA:
            # Fold distance labels into potentials, clamped at the sink
            # label so unreached vertices keep nonnegative reduced costs.
            dist = self._dist
            d_sink = dist[self.sink]
            pot = self.potential
            for v in range(self.num_vertices):
                dv = dist[v]
                pot[v] += dv if dv < d_sink else d_sink
        res_cap = self.res_cap
        for arc in path:
            res_cap[arc] -= 1
            res_cap[arc ^ 1] += 1
        self.objective += real_cost
        self.path_costs.append(real_cost)

    def solve(self, required_flow: int) -> int:
        """Augment unit paths until `required_flow` units are routed or the
        sink becomes unreachable; returns the number of units pushed."""
        pushed = 0
        while pushed < required_flow:
            found = self.find_path()
            if found is None:
                break
            path, cost = found
            self.augment(path, cost)
            pushed += 1
        return pushed

    def forward_flows(self) -> list[int]:
        """Net flow on each forward arc (reverse residual capacity)."""
        return [self.res_cap[i] for i in range(1, len(self.res_cap), 2)]


def solve(
    num_vertices: int,
    source: int,
    sink: int,
    res_head: list[int],
    res_cost: list[int],
    res_cap: list[int],
    adj_start: list[int],
    adj_arcs: list[int],
    required_flow: int,
    method: int,
):
    """Full solve; returns (units pushed, objective, path costs, flows)."""
    solver = Solver(
        num_vertices, source, sink, res_head, res_cost, res_cap,
        adj_start, adj_arcs, method,
    )
    pushed = solver.solve(required_flow)
    return pushed, solver.objective, solver.path_costs, solver.forward_flows()
