"""Kernel backend selection and the shared residual-graph layout.

The hot loop (successive shortest paths over the residual graph) exists
twice: a compiled Cython extension (``_mcmf_cy``) and a pure-Python
fallback (``_mcmf_py``).  The compiled kernel is picked at import time
when present; set ``PCDNSCHED_KERNEL=python`` to force the fallback or
``PCDNSCHED_KERNEL=compiled`` to fail fast when the extension is missing.
Both backends follow identical tie-breaking, so results match exactly.
"""

from __future__ import annotations

import os
from typing import Optional, Sequence

import numpy as np

from . import _mcmf_py
from ._mcmf_py import INF, METHOD_BELLMAN_FORD, METHOD_DIJKSTRA, NegativeCycleError

try:
    from . import _mcmf_cy
except ImportError:
    _mcmf_cy = None

_forced = os.environ.get("PCDNSCHED_KERNEL", "auto").strip().lower() or "auto"
if _forced == "compiled" and _mcmf_cy is None:
    raise ImportError(
        "PCDNSCHED_KERNEL=compiled but the pcdnsched._mcmf_cy extension is not built"
    )
if _forced == "python":
    DEFAULT_BACKEND = "python"
elif _forced == "compiled":
    DEFAULT_BACKEND = "compiled"
elif _forced == "auto":
    DEFAULT_BACKEND = "compiled" if _mcmf_cy is not None else "python"
else:
    raise ValueError(f"unknown PCDNSCHED_KERNEL value: {_forced!r}")

METHOD_CODES = {"bellman-ford": METHOD_BELLMAN_FORD, "dijkstra": METHOD_DIJKSTRA}


def available_backends() -> tuple[str, ...]:
    return ("python", "compiled") if _mcmf_cy is not None else ("python",)


def resolve_backend(backend: Optional[str]) -> str:
    name = DEFAULT_BACKEND if backend in (None, "auto") else backend
    if name not in ("python", "compiled"):
        raise ValueError(f"unknown kernel backend: {backend!r}")
    if name == "compiled" and _mcmf_cy is None:
        raise RuntimeError("compiled kernel requested but extension not built")
    return name


class ResidualGraph:
    """Residual arrays for a forward arc list.

    Forward arc ``j`` expands to residual arcs ``2j`` / ``2j + 1``; the
    adjacency is CSR-ordered by tail with arcs in insertion order, which
    fixes the deterministic tie-breaking both kernels rely on.
    """

    def __init__(
        self,
        num_vertices: int,
        tails: Sequence[int],
        heads: Sequence[int],
        caps: Sequence[int],
        costs: Sequence[int],
    ):
        tails = np.asarray(tails, dtype=np.int32)
        heads = np.asarray(heads, dtype=np.int32)
        caps = np.asarray(caps, dtype=np.int64)
        costs = np.asarray(costs, dtype=np.int64)
        num_arcs = len(tails)

        res_head = np.empty(2 * num_arcs, dtype=np.int32)
        res_head[0::2] = heads
        res_head[1::2] = tails
        res_cost = np.empty(2 * num_arcs, dtype=np.int64)
        res_cost[0::2] = costs
        res_cost[1::2] = -costs
        res_cap = np.empty(2 * num_arcs, dtype=np.int64)
        res_cap[0::2] = caps
        res_cap[1::2] = 0
        res_tail = np.empty(2 * num_arcs, dtype=np.int32)
        res_tail[0::2] = tails
        res_tail[1::2] = heads

        adj_arcs = np.argsort(res_tail, kind="stable").astype(np.int32)
        counts = np.bincount(res_tail, minlength=num_vertices)
        adj_start = np.zeros(num_vertices + 1, dtype=np.int64)
        np.cumsum(counts, out=adj_start[1:])

        self.num_vertices = num_vertices
        self.num_arcs = num_arcs
        self.res_head = res_head
        self.res_cost = res_cost
        self.res_cap = res_cap
        self.adj_start = adj_start
        self.adj_arcs = adj_arcs


def python_solver(
    num_vertices: int,
    source: int,
    sink: int,
    tails: Sequence[int],
    heads: Sequence[int],
    caps: Sequence[int],
    costs: Sequence[int],
    method: str,
) -> _mcmf_py.Solver:
    """A pure-Python stepping solver (list-based, arbitrary-precision
    costs); adjacency order matches :class:`ResidualGraph` exactly."""
    res_head: list[int] = []
    res_cost: list[int] = []
    res_cap: list[int] = []
    for tail, head, cap, cost in zip(tails, heads, caps, costs):
        res_head += [head, tail]
        res_cost += [cost, -cost]
        res_cap += [cap, 0]
    per_tail: list[list[int]] = [[] for _ in range(num_vertices)]
    for arc in range(len(res_head)):
        per_tail[res_head[arc ^ 1]].append(arc)
    adj_arcs: list[int] = []
    adj_start = [0]
    for arcs in per_tail:
        adj_arcs.extend(arcs)
        adj_start.append(len(adj_arcs))
    return _mcmf_py.Solver(
        num_vertices, source, sink, res_head, res_cost, res_cap,
        adj_start, adj_arcs, METHOD_CODES[method],
    )


def solve_min_cost_flow(
    num_vertices: int,
    source: int,
    sink: int,
    tails: Sequence[int],
    heads: Sequence[int],
    caps: Sequence[int],
    costs: Sequence[int],
    required_flow: int,
    method: str = "bellman-ford",
    backend: Optional[str] = None,
):
    """Route `required_flow` units at minimum cost, one unit per path.

    Returns (units pushed, integer objective, per-path integer costs,
    per-forward-arc flows).  Callers check ``pushed == required_flow``.
    """
    if method not in METHOD_CODES:
        raise ValueError(f"unknown method: {method!r}")
    chosen = resolve_backend(backend)
    if method == "dijkstra" and any(int(c) < 0 for c in costs):
        raise ValueError("dijkstra method requires nonnegative initial arc costs")

    # The compiled kernel works in int64; distances/potentials stay below
    # max|cost| * |V| * (flow + 1).  Oversized scaled costs (huge rational
    # denominators) fall back to the arbitrary-precision Python kernel.
    max_cost = max((abs(int(c)) for c in costs), default=0)
    if max_cost * num_vertices * (required_flow + 1) >= 1 << 61:
        if backend == "compiled":
            raise ValueError("scaled costs too large for the compiled kernel")
        chosen = "python"

    if chosen == "python":
        solver = python_solver(num_vertices, source, sink, tails, heads,
                               caps, costs, method)
        pushed = solver.solve(required_flow)
        return pushed, solver.objective, list(solver.path_costs), solver.forward_flows()

    graph = ResidualGraph(num_vertices, tails, heads, caps, costs)
    status, pushed, objective, path_costs = _mcmf_cy.solve(
        graph.num_vertices,
        source,
        sink,
        graph.res_head,
        graph.res_cost,
        graph.res_cap,
        graph.adj_start,
        graph.adj_arcs,
        required_flow,
        METHOD_CODES[method],
    )
    if status == _mcmf_cy.STATUS_NEGATIVE_CYCLE:
        raise NegativeCycleError("vertex requeued more than |V| times")
    flows = graph.res_cap[1::2].tolist()
    return int(pushed), int(objective), path_costs.tolist(), flows
