# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled min-cost flow kernel (successive shortest paths).

Mirrors ``_mcmf_py`` exactly: same residual layout, same relaxation and
queue/heap ordering, so both backends trace identical augmenting paths.
Heap entries compare as (distance, vertex), matching heapq tuples.
"""

import numpy as np

cdef long long INF = <long long>1 << 62

DEF METHOD_BELLMAN_FORD = 0
DEF METHOD_DIJKSTRA = 1

STATUS_OK = 0
STATUS_NEGATIVE_CYCLE = 1


cdef inline void heap_push(long long* hkey, int* hval, Py_ssize_t* hsize,
                           long long key, int val) nogil:
    cdef Py_ssize_t i = hsize[0]
    cdef Py_ssize_t parent
    hsize[0] += 1
    while i > 0:
        parent = (i - 1) >> 1
        if hkey[parent] < key or (hkey[parent] == key and hval[parent] <= val):
            break
        hkey[i] = hkey[parent]
        hval[i] = hval[parent]
        i = parent
    hkey[i] = key
    hval[i] = val


cdef inline void heap_pop(long long* hkey, int* hval, Py_ssize_t* hsize) nogil:
    cdef Py_ssize_t n = hsize[0] - 1
    cdef long long key = hkey[n]
    cdef int val = hval[n]
    cdef Py_ssize_t i = 0, child
    hsize[0] = n
    while True:
        child = 2 * i + 1
        if child >= n:
            break
        if child + 1 < n and (hkey[child + 1] < hkey[child] or
                              (hkey[child + 1] == hkey[child] and
                               hval[child + 1] < hval[child])):
            child += 1
        if hkey[child] < key or (hkey[child] == key and hval[child] < val):
            hkey[i] = hkey[child]
            hval[i] = hval[child]
            i = child
        else:
            break
    hkey[i] = key
    hval[i] = val


def solve(int num_vertices,
          int source,
          int sink,
          int[::1] res_head,
          long long[::1] res_cost,
          long long[::1] res_cap,
          long long[::1] adj_start,
          int[::1] adj_arcs,
          long long required_flow,
          int method):
    """Full solve on the shared residual layout.

    Returns (status, units pushed, objective, path_costs array); `res_cap`
    is mutated in place (reverse capacities carry the forward flows).
    """
    cdef Py_ssize_t n = num_vertices
    cdef Py_ssize_t num_res = res_head.shape[0]

    dist_arr = np.empty(n, dtype=np.int64)
    parent_arr = np.empty(n, dtype=np.int32)
    pot_arr = np.zeros(n, dtype=np.int64)
    flag_arr = np.zeros(n, dtype=np.uint8)
    enq_arr = np.zeros(n, dtype=np.int32)
    ring_arr = np.empty(n + 1, dtype=np.int32)
    hkey_arr = np.empty(num_res + 16, dtype=np.int64)
    hval_arr = np.empty(num_res + 16, dtype=np.int32)
    path_costs_arr = np.empty(max(required_flow, 1), dtype=np.int64)

    cdef long long[::1] dist = dist_arr
    cdef int[::1] parent = parent_arr
    cdef long long[::1] pot = pot_arr
    cdef unsigned char[::1] flag = flag_arr   # SPFA in-queue / Dijkstra visited
    cdef int[::1] enq = enq_arr
    cdef int[::1] ring = ring_arr
    cdef long long[::1] hkey_mv = hkey_arr
    cdef int[::1] hval_mv = hval_arr
    cdef long long[::1] path_costs = path_costs_arr

    cdef long long* hkey = &hkey_mv[0]
    cdef int* hval = &hval_mv[0]
    cdef Py_ssize_t hsize = 0

    cdef long long pushed = 0, objective = 0
    cdef long long du, nd, d_sink, real_cost, dv
    cdef Py_ssize_t i, qhead, qtail, ring_size = n + 1
    cdef int u, w, arc, v
    cdef bint found
    cdef long long d
    cdef Py_ssize_t k

    while pushed < required_flow:
        # ---- search ----
        for i in range(n):
            dist[i] = INF
            parent[i] = -1
            flag[i] = 0
        dist[source] = 0
        found = False

        if method == METHOD_BELLMAN_FORD:
            for i in range(n):
                enq[i] = 0
            qhead = 0
            qtail = 0
            ring[qtail] = source
            qtail = (qtail + 1) % ring_size
            flag[source] = 1
            enq[source] = 1
            while qhead != qtail:
                u = ring[qhead]
                qhead = (qhead + 1) % ring_size
                flag[u] = 0
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
                        if not flag[w]:
                            enq[w] += 1
                            if enq[w] > n:
                                return (STATUS_NEGATIVE_CYCLE, pushed, objective,
                                        path_costs_arr[:pushed].copy())
                            ring[qtail] = w
                            qtail = (qtail + 1) % ring_size
                            flag[w] = 1
            found = dist[sink] < INF
            real_cost = dist[sink]
        else:
            hsize = 0
            heap_push(hkey, hval, &hsize, 0, source)
            while hsize > 0:
                d = hkey[0]
                u = hval[0]
                heap_pop(hkey, hval, &hsize)
                if flag[u]:
                    continue
                flag[u] = 1
                if u == sink:
                    break
                du = pot[u]
                for i in range(adj_start[u], adj_start[u + 1]):
                    arc = adj_arcs[i]
                    if res_cap[arc] <= 0:
                        continue
                    w = res_head[arc]
                    nd = d + res_cost[arc] + du - pot[w]
                    if nd < dist[w]:
                        dist[w] = nd
                        parent[w] = arc
                        heap_push(hkey, hval, &hsize, nd, w)
            found = flag[sink] != 0
            real_cost = dist[sink] + pot[sink]

        if not found:
            break

        # ---- augment ----
        if method == METHOD_DIJKSTRA:
            d_sink = dist[sink]
            for k in range(n):
                dv = dist[k]
                pot[k] += dv if dv < d_sink else d_sink
        v = sink
        while v != source:
            arc = parent[v]
            res_cap[arc] -= 1
            res_cap[arc ^ 1] += 1
            v = res_head[arc ^ 1]
        objective += real_cost
        path_costs[pushed] = real_cost
        pushed += 1

    return (STATUS_OK, pushed, objective, path_costs_arr[:pushed].copy())
