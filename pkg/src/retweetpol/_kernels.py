"""Numba kernels for the hot graph loops.

Everything here works on CSR arrays (indptr/indices/weights) and plain numpy
vectors so the partitioning ensemble and centrality sweeps run at native
speed.  All kernels are single-threaded, release the GIL, and are exactly
deterministic for a given seed, which lets callers parallelize across runs
with threads while keeping bit-identical outputs.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


@njit(cache=True, nogil=True, inline="always")
def _mix64(z):
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


@njit(cache=True, nogil=True, inline="always")
def _next_u64(state):
    state = state + _GAMMA
    return _mix64(state), state


@njit(cache=True, nogil=True)
def seeded_permutation(n, seed):
    """Fisher-Yates permutation of 0..n-1 driven by a SplitMix64 stream."""
    state = np.uint64(seed)
    perm = np.arange(n, dtype=np.int64)
    for i in range(n - 1, 0, -1):
        r, state = _next_u64(state)
        j = int(r % np.uint64(i + 1))
        t = perm[i]
        perm[i] = perm[j]
        perm[j] = t
    return perm


@njit(cache=True, nogil=True)
def heavy_edge_matching(indptr, indices, weights, order):
    """Greedy matching: each unmatched node pairs with its unmatched
    neighbor of maximal edge weight (ties: smallest index).  Nodes with no
    unmatched neighbor become singletons (partner == self)."""
    n = order.shape[0]
    partner = np.full(n, -1, np.int64)
    for k in range(n):
        v = order[k]
        if partner[v] >= 0:
            continue
        best = -1
        bestw = np.int64(0)
        for e in range(indptr[v], indptr[v + 1]):
            u = indices[e]
            if u == v or partner[u] >= 0:
                continue
            w = weights[e]
            if w > bestw:  # adjacency sorted: first max has smallest index
                bestw = w
                best = u
        if best >= 0:
            partner[v] = best
            partner[best] = v
        else:
            partner[v] = v
    return partner


@njit(cache=True, nogil=True)
def contract_matching(indptr, indices, weights, node_w, partner):
    """Collapse matched pairs into supernodes, merging parallel edges by
    weight addition and dropping intra-pair edges."""
    n = indptr.shape[0] - 1
    fine2coarse = np.full(n, -1, np.int64)
    nc = 0
    for v in range(n):
        if partner[v] >= v:
            fine2coarse[v] = nc
            if partner[v] != v:
                fine2coarse[partner[v]] = nc
            nc += 1
    new_nw = np.zeros(nc, np.int64)
    for v in range(n):
        new_nw[fine2coarse[v]] += node_w[v]

    m_dir = indices.shape[0]
    keys = np.empty(m_dir, np.int64)
    ws = np.empty(m_dir, np.int64)
    cnt = 0
    for v in range(n):
        cv = fine2coarse[v]
        for e in range(indptr[v], indptr[v + 1]):
            cu = fine2coarse[indices[e]]
            if cu == cv:
                continue
            keys[cnt] = cv * nc + cu
            ws[cnt] = weights[e]
            cnt += 1
    order = np.argsort(keys[:cnt])

    new_indices = np.empty(cnt, np.int64)
    new_weights = np.empty(cnt, np.int64)
    row_counts = np.zeros(nc, np.int64)
    un = 0
    i = 0
    while i < cnt:
        k = keys[order[i]]
        wsum = np.int64(0)
        while i < cnt and keys[order[i]] == k:
            wsum += ws[order[i]]
            i += 1
        new_indices[un] = k % nc
        new_weights[un] = wsum
        row_counts[k // nc] += 1
        un += 1
    new_indptr = np.zeros(nc + 1, np.int64)
    for c in range(nc):
        new_indptr[c + 1] = new_indptr[c] + row_counts[c]
    return (
        fine2coarse,
        new_indptr,
        new_indices[:un].copy(),
        new_weights[:un].copy(),
        new_nw,
    )


@njit(cache=True, nogil=True)
def grow_region(indptr, indices, node_w, start, target_w):
    """BFS from ``start`` absorbing nodes into side 0 until the absorbed
    node weight reaches ``target_w``.  Remaining nodes stay on side 1."""
    n = indptr.shape[0] - 1
    side = np.ones(n, np.uint8)
    seen = np.zeros(n, np.uint8)
    queue = np.empty(n, np.int64)
    head = 0
    tail = 0
    queue[tail] = start
    tail += 1
    seen[start] = 1
    acc = 0.0
    while head < tail and acc < target_w:
        v = queue[head]
        head += 1
        side[v] = 0
        acc += node_w[v]
        for e in range(indptr[v], indptr[v + 1]):
            u = indices[e]
            if seen[u] == 0:
                seen[u] = 1
                queue[tail] = u
                tail += 1
    return side


@njit(cache=True, nogil=True)
def cut_weight(indptr, indices, weights, side):
    """Sum of weights of edges whose endpoints lie on different sides."""
    n = indptr.shape[0] - 1
    total = np.int64(0)
    for v in range(n):
        sv = side[v]
        for e in range(indptr[v], indptr[v + 1]):
            u = indices[e]
            if u > v and side[u] != sv:
                total += weights[e]
    return total


@njit(cache=True, nogil=True, inline="always")
def _heap_better(g1, v1, g2, v2):
    return g1 > g2 or (g1 == g2 and v1 < v2)


@njit(cache=True, nogil=True)
def _heap_push(hg, hv, size, g, v):
    i = size
    hg[i] = g
    hv[i] = v
    while i > 0:
        p = (i - 1) >> 1
        if _heap_better(hg[i], hv[i], hg[p], hv[p]):
            hg[i], hg[p] = hg[p], hg[i]
            hv[i], hv[p] = hv[p], hv[i]
            i = p
        else:
            break
    return size + 1


@njit(cache=True, nogil=True)
def _heap_pop(hg, hv, size):
    g = hg[0]
    v = hv[0]
    size -= 1
    if size > 0:
        hg[0] = hg[size]
        hv[0] = hv[size]
        i = 0
        while True:
            l = 2 * i + 1
            r = l + 1
            best = i
            if l < size and _heap_better(hg[l], hv[l], hg[best], hv[best]):
                best = l
            if r < size and _heap_better(hg[r], hv[r], hg[best], hv[best]):
                best = r
            if best == i:
                break
            hg[i], hg[best] = hg[best], hg[i]
            hv[i], hv[best] = hv[best], hv[i]
            i = best
    return g, v, size


@njit(cache=True, nogil=True)
def _positive_gain_phase(indptr, indices, weights, node_w, side, idw, edw, sw, floor_w):
    """Greedily apply the highest positive-gain move that keeps both sides
    at or above ``floor_w`` (ties: smallest node index) until none remains."""
    n = indptr.shape[0] - 1
    cap = 4 * n + 64
    hg = np.empty(cap, np.int64)
    hv = np.empty(cap, np.int64)
    hsize = 0
    for v in range(n):
        g = edw[v] - idw[v]
        if g > 0:
            hsize = _heap_push(hg, hv, hsize, g, v)
    blocked = np.empty(n, np.int64)
    is_blocked = np.zeros(n, np.uint8)  # dedupe: duplicate heap entries exist
    nblocked = 0
    moves = 0
    while hsize > 0:
        g, v, hsize = _heap_pop(hg, hv, hsize)
        cur = edw[v] - idw[v]
        if g != cur or cur <= 0:
            continue  # stale entry
        s = side[v]
        if sw[s] - node_w[v] < floor_w:
            if is_blocked[v] == 0:
                is_blocked[v] = 1
                blocked[nblocked] = v
                nblocked += 1
            continue
        _apply_move(indptr, indices, weights, node_w, side, idw, edw, sw, v)
        moves += 1
        for e in range(indptr[v], indptr[v + 1]):
            u = indices[e]
            gu = edw[u] - idw[u]
            if gu > 0:
                if hsize >= cap:
                    hg, hv, cap = _heap_grow(hg, hv, cap)
                hsize = _heap_push(hg, hv, hsize, gu, u)
        for i in range(nblocked):
            b = blocked[i]
            is_blocked[b] = 0
            gb = edw[b] - idw[b]
            if gb > 0:
                if hsize >= cap:
                    hg, hv, cap = _heap_grow(hg, hv, cap)
                hsize = _heap_push(hg, hv, hsize, gb, b)
        nblocked = 0
    return moves


@njit(cache=True, nogil=True)
def _fm_pass(indptr, indices, weights, node_w, side, idw, edw, sw, floor_w, stall_limit,
             forced_first):
    """One tentative-move pass with rollback to the best balanced prefix.

    Nodes move at most once per pass; a move may transiently dip one side
    below the floor by at most the heaviest node weight.  Rolls back to the
    prefix with the lowest cut among balanced states; returns the achieved
    cut decrease (0 when the pass found no strict improvement).  When
    ``forced_first`` >= 0 that node is moved first (escape restarts on small
    levels).
    """
    n = indptr.shape[0] - 1
    wmax = np.int64(0)
    for v in range(n):
        if node_w[v] > wmax:
            wmax = node_w[v]
    transient_floor = floor_w - wmax
    locked = np.zeros(n, np.uint8)
    cap = 4 * n + 64
    hg = np.empty(cap, np.int64)
    hv = np.empty(cap, np.int64)
    hsize = 0
    for v in range(n):
        hsize = _heap_push(hg, hv, hsize, edw[v] - idw[v], v)
    moved = np.empty(n, np.int64)
    steps = 0
    cur_rel = np.int64(0)
    best_rel = np.int64(0)
    best_step = 0
    deferred = np.empty(cap, np.int64)
    while steps < n and steps - best_step <= stall_limit:
        must_move_from = -1
        if sw[0] < floor_w:
            must_move_from = 1
        elif sw[1] < floor_w:
            must_move_from = 0
        chosen = np.int64(-1)
        ndeferred = 0
        if steps == 0 and forced_first >= 0:
            s = side[forced_first]
            if sw[s] - node_w[forced_first] < transient_floor:
                return 0
            chosen = np.int64(forced_first)
        while chosen < 0 and hsize > 0:
            g, v, hsize = _heap_pop(hg, hv, hsize)
            if locked[v] == 1 or g != edw[v] - idw[v]:
                continue  # stale entry
            s = side[v]
            if must_move_from >= 0 and s != must_move_from:
                if ndeferred >= deferred.shape[0]:
                    deferred = _grow_i64(deferred)
                deferred[ndeferred] = v
                ndeferred += 1
                continue
            if sw[s] - node_w[v] < transient_floor:
                if ndeferred >= deferred.shape[0]:
                    deferred = _grow_i64(deferred)
                deferred[ndeferred] = v
                ndeferred += 1
                continue
            chosen = v
            break
        for i in range(ndeferred):
            d = deferred[i]
            hsize = _heap_push(hg, hv, hsize, edw[d] - idw[d], d)
        if chosen < 0:
            break
        cur_rel -= edw[chosen] - idw[chosen]
        _apply_move(indptr, indices, weights, node_w, side, idw, edw, sw, chosen)
        locked[chosen] = 1
        moved[steps] = chosen
        steps += 1
        if cur_rel < best_rel and min(sw[0], sw[1]) >= floor_w:
            best_rel = cur_rel
            best_step = steps
        for e in range(indptr[chosen], indptr[chosen + 1]):
            u = indices[e]
            if locked[u] == 0:
                if hsize >= cap:
                    hg, hv, cap = _heap_grow(hg, hv, cap)
                hsize = _heap_push(hg, hv, hsize, edw[u] - idw[u], u)
    for k in range(steps - 1, best_step - 1, -1):  # roll back past the best prefix
        _apply_move(indptr, indices, weights, node_w, side, idw, edw, sw, moved[k])
    return -best_rel


@njit(cache=True, nogil=True)
def refine_side(indptr, indices, weights, node_w, side, floor_w):
    """Boundary refinement at one level, in place.

    Repairs the balance floor if violated (best-gain moves from the heavy
    side, negative gains allowed), then alternates a positive-gain phase
    with tentative-move passes until neither improves the cut.  Returns the
    number of positive-phase moves applied.
    """
    n = indptr.shape[0] - 1
    if n < 2:
        return 0
    idw = np.zeros(n, np.int64)
    edw = np.zeros(n, np.int64)
    sw = np.zeros(2, np.int64)
    for v in range(n):
        sw[side[v]] += node_w[v]
        for e in range(indptr[v], indptr[v + 1]):
            u = indices[e]
            if side[u] == side[v]:
                idw[v] += weights[e]
            else:
                edw[v] += weights[e]
    moves = 0

    # Repair.  Each successful move strictly grows the light side, so this
    # terminates; at unit node weights it always reaches the floor.
    while min(sw[0], sw[1]) < floor_w:
        heavy = 0 if sw[0] >= sw[1] else 1
        best = np.int64(-1)
        bestg = np.int64(-(2**62))
        for v in range(n):
            if side[v] != heavy:
                continue
            if sw[heavy] - node_w[v] < floor_w:
                continue
            g = edw[v] - idw[v]
            if g > bestg or (g == bestg and (best < 0 or v < best)):
                bestg = g
                best = v
        if best < 0:
            break  # not repairable at this granularity; finer level will be
        _apply_move(indptr, indices, weights, node_w, side, idw, edw, sw, best)
        moves += 1

    stall_limit = n if n <= 512 else 64
    for _pass in range(16):
        moves += _positive_gain_phase(
            indptr, indices, weights, node_w, side, idw, edw, sw, floor_w
        )
        if min(sw[0], sw[1]) < floor_w:
            break  # unbalanced at this granularity: tentative passes skipped
        gained = _fm_pass(
            indptr, indices, weights, node_w, side, idw, edw, sw, floor_w,
            stall_limit, -1
        )
        if gained <= 0 and n <= 64:
            for v in range(n):
                gained = _fm_pass(
                    indptr, indices, weights, node_w, side, idw, edw, sw,
                    floor_w, stall_limit, v
                )
                if gained > 0:
                    break
        if gained <= 0:
            break
    return moves


@njit(cache=True, nogil=True)
def _heap_grow(hg, hv, cap):
    ncap = cap * 2
    ng = np.empty(ncap, np.int64)
    nv = np.empty(ncap, np.int64)
    ng[:cap] = hg
    nv[:cap] = hv
    return ng, nv, ncap


@njit(cache=True, nogil=True)
def _grow_i64(arr):
    out = np.empty(arr.shape[0] * 2, np.int64)
    out[: arr.shape[0]] = arr
    return out


@njit(cache=True, nogil=True, inline="always")
def _apply_move(indptr, indices, weights, node_w, side, idw, edw, sw, v):
    s = side[v]
    t = 1 - s
    sw[s] -= node_w[v]
    sw[t] += node_w[v]
    side[v] = t
    tmp = idw[v]
    idw[v] = edw[v]
    edw[v] = tmp
    for e in range(indptr[v], indptr[v + 1]):
        u = indices[e]
        w = weights[e]
        if side[u] == t:
            idw[u] += w
            edw[u] -= w
        else:
            idw[u] -= w
            edw[u] += w


@njit(cache=True, nogil=True)
def connected_components(indptr, indices):
    """Label nodes by connected component (0-based, order of discovery)."""
    n = indptr.shape[0] - 1
    comp = np.full(n, -1, np.int64)
    queue = np.empty(n, np.int64)
    c = 0
    for s in range(n):
        if comp[s] >= 0:
            continue
        comp[s] = c
        queue[0] = s
        head = 0
        tail = 1
        while head < tail:
            v = queue[head]
            head += 1
            for e in range(indptr[v], indptr[v + 1]):
                u = indices[e]
                if comp[u] < 0:
                    comp[u] = c
                    queue[tail] = u
                    tail += 1
        c += 1
    return comp


@njit(cache=True, nogil=True)
def triangles_per_node(indptr, indices):
    """Exact per-node triangle counts on the unweighted graph.

    Each triangle v<u<w is found once by intersecting the sorted neighbor
    lists of v and u above u.
    """
    n = indptr.shape[0] - 1
    tri = np.zeros(n, np.int64)
    for v in range(n):
        for e in range(indptr[v], indptr[v + 1]):
            u = indices[e]
            if u <= v:
                continue
            i = indptr[v]
            j = indptr[u]
            iend = indptr[v + 1]
            jend = indptr[u + 1]
            while i < iend and indices[i] <= u:
                i += 1
            while j < jend and indices[j] <= u:
                j += 1
            while i < iend and j < jend:
                a = indices[i]
                b = indices[j]
                if a == b:
                    tri[v] += 1
                    tri[u] += 1
                    tri[a] += 1
                    i += 1
                    j += 1
                elif a < b:
                    i += 1
                else:
                    j += 1
    return tri


@njit(cache=True, nogil=True)
def betweenness_values(indptr, indices):
    """Brandes betweenness on the unweighted graph, unordered-pair counts
    (each dependency halved), endpoints excluded."""
    n = indptr.shape[0] - 1
    bet = np.zeros(n, np.float64)
    dist = np.empty(n, np.int64)
    sigma = np.empty(n, np.float64)
    delta = np.empty(n, np.float64)
    order = np.empty(n, np.int64)
    for s in range(n):
        dist[:] = -1
        sigma[:] = 0.0
        delta[:] = 0.0
        dist[s] = 0
        sigma[s] = 1.0
        order[0] = s
        head = 0
        tail = 1
        while head < tail:
            v = order[head]
            head += 1
            dv = dist[v]
            for e in range(indptr[v], indptr[v + 1]):
                u = indices[e]
                if dist[u] < 0:
                    dist[u] = dv + 1
                    order[tail] = u
                    tail += 1
                if dist[u] == dv + 1:
                    sigma[u] += sigma[v]
        for k in range(tail - 1, 0, -1):
            w = order[k]
            coeff = (1.0 + delta[w]) / sigma[w]
            dw = dist[w]
            for e in range(indptr[w], indptr[w + 1]):
                u = indices[e]
                if dist[u] == dw - 1:
                    delta[u] += sigma[u] * coeff
        for v in range(n):
            if v != s:
                bet[v] += delta[v]
    return bet * 0.5


def warmup():
    """Force-compile every kernel on tiny inputs (used by tests/benchmarks)."""
    indptr = np.array([0, 1, 2], np.int64)
    indices = np.array([1, 0], np.int64)
    weights = np.array([1, 1], np.int64)
    node_w = np.array([1, 1], np.int64)
    order = seeded_permutation(2, 1)
    partner = heavy_edge_matching(indptr, indices, weights, order)
    contract_matching(indptr, indices, weights, node_w, partner)
    side = grow_region(indptr, indices, node_w, 0, 1.0)
    cut_weight(indptr, indices, weights, side)
    refine_side(indptr, indices, weights, node_w, side.copy(), 1)
    connected_components(indptr, indices)
    triangles_per_node(indptr, indices)
    betweenness_values(indptr, indices)
