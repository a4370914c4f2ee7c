"""Network simplex kernel for the N x M transportation problem.

The basis is a spanning tree of the bipartite graph with N + M - 1 cells.
Node ids: rows are ``0..N-1``, columns ``N..N+M-1``; the last column is the
root, whose potential is pinned to zero.
"""

import numpy as np
from numba import njit

# consecutive degenerate pivots tolerated before switching to Bland's rule
DEGENERATE_RUN = 50


@njit(cache=True)
def _northwest_corner(a, b, bi, bj, bf):
    n, m = a.shape[0], b.shape[0]
    supply = a.copy()
    demand = b.copy()
    i = 0
    j = 0
    k = 0
    while True:
        x = min(supply[i], demand[j])
        bi[k] = i
        bj[k] = j
        bf[k] = x
        k += 1
        supply[i] -= x
        demand[j] -= x
        if i == n - 1 and j == m - 1:
            break
        if i == n - 1:
            j += 1
        elif j == m - 1:
            i += 1
        elif supply[i] <= demand[j]:
            i += 1
        else:
            j += 1
    return k


@njit(cache=True)
def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


@njit(cache=True)
def _least_cost_basis(a, b, C, order, bi, bj, bf):
    """Greedy allocation in increasing cost order, completed to a spanning
    tree with zero-flow cells. Each allocation exhausts a row or a column,
    so the allocated cells never close a cycle."""
    n, m = a.shape[0], b.shape[0]
    supply = a.copy()
    demand = b.copy()
    parent = np.arange(n + m)
    k = 0
    for cell in order:
        i = cell // m
        j = cell - i * m
        if supply[i] <= 0.0 or demand[j] <= 0.0:
            continue
        x = min(supply[i], demand[j])
        supply[i] -= x
        demand[j] -= x
        ri = _find(parent, i)
        rj = _find(parent, n + j)
        parent[ri] = rj
        bi[k] = i
        bj[k] = j
        bf[k] = x
        k += 1
        if k == n + m - 1:
            break
    if k < n + m - 1:
        for cell in order:
            i = cell // m
            j = cell - i * m
            ri = _find(parent, i)
            rj = _find(parent, n + j)
            if ri != rj:
                parent[ri] = rj
                bi[k] = i
                bj[k] = j
                bf[k] = 0.0
                k += 1
                if k == n + m - 1:
                    break
    return k


@njit(cache=True)
def _build_tree(n, m, bi, bj, C, parent, parent_edge, depth, pot, order, head, nxt, adj_edge, adj_node):
    """BFS from the root column; fills parent links, depths and potentials."""
    nn = n + m
    nb = bi.shape[0]
    for v in range(nn):
        head[v] = -1
    slot = 0
    for e in range(nb):
        r = bi[e]
        c = n + bj[e]
        adj_edge[slot] = e
        adj_node[slot] = c
        nxt[slot] = head[r]
        head[r] = slot
        slot += 1
        adj_edge[slot] = e
        adj_node[slot] = r
        nxt[slot] = head[c]
        head[c] = slot
        slot += 1
    for v in range(nn):
        parent[v] = -2
    root = nn - 1
    parent[root] = -1
    parent_edge[root] = -1
    depth[root] = 0
    pot[root] = 0.0
    order[0] = root
    qh = 0
    qt = 1
    while qh < qt:
        v = order[qh]
        qh += 1
        s = head[v]
        while s != -1:
            w = adj_node[s]
            if parent[w] == -2:
                e = adj_edge[s]
                parent[w] = v
                parent_edge[w] = e
                depth[w] = depth[v] + 1
                # row potential + column potential = C on basic cells
                pot[w] = C[bi[e], bj[e]] - pot[v]
                order[qt] = w
                qt += 1
            s = nxt[s]
    return qt


@njit(cache=True)
def network_simplex(a, b, C, order, tol, max_pivots):
    """Solve min <C, pi> over couplings of ``a`` and ``b``.

    ``order`` lists cells by increasing cost for the greedy start basis;
    an empty array selects the northwest-corner start instead.

    Returns ``(bi, bj, bf, u, v, pivots, status)`` where the first three give
    the basic cells and their flows, ``u``/``v`` are row/column potentials
    with ``v[-1] == 0``, and ``status`` is 0 on optimality, 1 if the pivot
    budget ran out.
    """
    n, m = a.shape[0], b.shape[0]
    nb = n + m - 1
    nn = n + m
    bi = np.empty(nb, dtype=np.int64)
    bj = np.empty(nb, dtype=np.int64)
    bf = np.empty(nb, dtype=np.float64)
    if order.shape[0] == 0:
        _northwest_corner(a, b, bi, bj, bf)
    else:
        _least_cost_basis(a, b, C, order, bi, bj, bf)

    parent = np.empty(nn, dtype=np.int64)
    parent_edge = np.empty(nn, dtype=np.int64)
    depth = np.empty(nn, dtype=np.int64)
    pot = np.empty(nn, dtype=np.float64)
    order = np.empty(nn, dtype=np.int64)
    head = np.empty(nn, dtype=np.int64)
    nxt = np.empty(2 * nb, dtype=np.int64)
    adj_edge = np.empty(2 * nb, dtype=np.int64)
    adj_node = np.empty(2 * nb, dtype=np.int64)
    cyc_edge = np.empty(nn, dtype=np.int64)
    cyc_sign = np.empty(nn, dtype=np.int64)
    side_i = np.empty(nn, dtype=np.int64)

    ncells = n * m
    block = max(int(np.sqrt(ncells)), min(ncells, 10))
    cursor = 0
    degenerate_run = 0
    pivots = 0
    status = 0
    while True:
        _build_tree(n, m, bi, bj, C, parent, parent_edge, depth, pot, order, head, nxt, adj_edge, adj_node)

        # pricing
        enter = -1
        bland = degenerate_run >= DEGENERATE_RUN
        if bland:
            for cell in range(ncells):
                i = cell // m
                j = cell - i * m
                if C[i, j] - pot[i] - pot[n + j] < -tol:
                    enter = cell
                    break
        else:
            best = -tol
            scanned = 0
            in_block = 0
            while scanned < ncells:
                cell = cursor
                i = cell // m
                j = cell - i * m
                r = C[i, j] - pot[i] - pot[n + j]
                if r < best:
                    best = r
                    enter = cell
                cursor += 1
                if cursor == ncells:
                    cursor = 0
                scanned += 1
                in_block += 1
                if in_block == block:
                    if enter >= 0:
                        break
                    in_block = 0
        if enter < 0:
            break
        if pivots >= max_pivots:
            status = 1
            break
        pivots += 1

        ei = enter // m
        ej = enter - ei * m
        # tree path between column node n+ej and row node ei
        x = n + ej
        y = ei
        nx = 0
        ny = 0
        while depth[x] > depth[y]:
            cyc_edge[nx] = parent_edge[x]
            nx += 1
            x = parent[x]
        while depth[y] > depth[x]:
            side_i[ny] = parent_edge[y]
            ny += 1
            y = parent[y]
        while x != y:
            cyc_edge[nx] = parent_edge[x]
            nx += 1
            x = parent[x]
            side_i[ny] = parent_edge[y]
            ny += 1
            y = parent[y]
        for t in range(ny):
            cyc_edge[nx + t] = side_i[ny - 1 - t]
        length = nx + ny
        # edges alternate -, +, -, ... starting at the entering column
        theta = np.inf
        leave = -1
        for t in range(length):
            if t % 2 == 0:
                cyc_sign[t] = -1
                e = cyc_edge[t]
                f = bf[e]
                if f < theta:
                    theta = f
                    leave = t
                elif f == theta:
                    # ties: smallest cell index
                    e_best = cyc_edge[leave]
                    if bi[e] * m + bj[e] < bi[e_best] * m + bj[e_best]:
                        leave = t
            else:
                cyc_sign[t] = 1
        if theta > 0.0:
            degenerate_run = 0
            for t in range(length):
                e = cyc_edge[t]
                if cyc_sign[t] < 0:
                    bf[e] = bf[e] - theta
                    if bf[e] < 0.0:
                        bf[e] = 0.0
                else:
                    bf[e] = bf[e] + theta
        else:
            degenerate_run += 1
        e_out = cyc_edge[leave]
        bi[e_out] = ei
        bj[e_out] = ej
        bf[e_out] = theta

    u = pot[:n].copy()
    v = pot[n:].copy()
    return bi, bj, bf, u, v, pivots, status
