"""Hot numeric kernels, numba-compiled when numba is available.

Every kernel is written as plain array code so the pure-Python fallback
(used when numba is missing) produces bit-identical results, just slower.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def deco(f):
            return f

        return deco


_MASK64 = np.uint64(0xFFFFFFFFFFFFFFFF)


@njit(cache=True)
def _xorshift64(state):
    state = np.uint64(state)
    state ^= (state << np.uint64(13)) & _MASK64
    state ^= state >> np.uint64(7)
    state ^= (state << np.uint64(17)) & _MASK64
    return state


@njit(cache=True)
def _shuffle(order, state):
    """In-place Fisher-Yates; returns the advanced RNG state."""
    n = order.shape[0]
    for i in range(n - 1, 0, -1):
        state = _xorshift64(state)
        j = int(state % np.uint64(i + 1))
        tmp = order[i]
        order[i] = order[j]
        order[j] = tmp
    return state


# -- cycle breaking -----------------------------------------------------------

@njit(cache=True)
def _dfs_remove_back_edges(indptr, nbr, eid, roots, keep):
    n = indptr.shape[0] - 1
    color = np.zeros(n, dtype=np.uint8)  # 0 white, 1 gray, 2 black
    ptr = np.zeros(n, dtype=np.int64)
    stack = np.empty(n, dtype=np.int64)
    for ri in range(roots.shape[0]):
        root = roots[ri]
        if color[root] != 0:
            continue
        color[root] = 1
        ptr[root] = indptr[root]
        stack[0] = root
        sp = 1
        while sp > 0:
            u = stack[sp - 1]
            p = ptr[u]
            if p < indptr[u + 1]:
                ptr[u] = p + 1
                v = nbr[p]
                if color[v] == 1:
                    keep[eid[p]] = False  # back edge closes a cycle
                elif color[v] == 0:
                    color[v] = 1
                    ptr[v] = indptr[v]
                    stack[sp] = v
                    sp += 1
            else:
                color[u] = 2
                sp -= 1


def break_cycles_idx(n: int, citing: np.ndarray, cited: np.ndarray, rank: np.ndarray) -> np.ndarray:
    """Mask of edges to keep so the result is acyclic.

    Publications are visited in ``rank`` order (lowest first) and
    out-neighbors in rank order, so the removal is deterministic.  Only
    back edges of the traversal are dropped, which guarantees no removed
    edge can be re-added without recreating a cycle.
    """
    m = citing.shape[0]
    keep = np.ones(m, dtype=bool)
    if m == 0:
        return keep
    order = np.lexsort((rank[cited], citing))
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(citing, minlength=n), out=indptr[1:])
    nbr = np.ascontiguousarray(cited[order].astype(np.int64))
    eid = np.ascontiguousarray(order.astype(np.int64))
    roots = np.argsort(rank, kind="stable").astype(np.int64)
    _dfs_remove_back_edges(indptr, nbr, eid, roots, keep)
    return keep


# -- topological order ---------------------------------------------------------

@njit(cache=True)
def _kahn(indptr, nbr, indeg):
    n = indptr.shape[0] - 1
    order = np.empty(n, dtype=np.int64)
    deg = indeg.copy()
    tail = 0
    for v in range(n):
        if deg[v] == 0:
            order[tail] = v
            tail += 1
    head = 0
    while head < tail:
        u = order[head]
        head += 1
        for p in range(indptr[u], indptr[u + 1]):
            v = nbr[p]
            deg[v] -= 1
            if deg[v] == 0:
                order[tail] = v
                tail += 1
    return order, tail


def topological_order(n: int, citing: np.ndarray, cited: np.ndarray) -> np.ndarray | None:
    """Topological order (citing before cited), or None if cyclic."""
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(citing, minlength=n), out=indptr[1:])
    nbr = np.ascontiguousarray(cited[np.argsort(citing, kind="stable")].astype(np.int64))
    indeg = np.bincount(cited, minlength=n).astype(np.int64)
    order, done = _kahn(indptr, nbr, indeg)
    if done != n:
        return None
    return order


# -- transitive reduction (large-graph search) ----------------------------------

@njit(cache=True)
def _tr_mark_nonessential(indptr, nbr, rank, essential):
    """For each source, mark out-edges reachable through another out-neighbor.

    ``nbr`` must be rank-sorted within each row.  A depth-first search from
    the out-neighbors shares visit stamps per source and prunes nodes whose
    rank is past the last still-unmarked target; in citation networks, where
    references cluster in recent years, this keeps searches local.
    """
    n = indptr.shape[0] - 1
    stamp = np.full(n, -1, dtype=np.int64)
    tpos = np.full(n, -1, dtype=np.int64)
    tstamp = np.full(n, -1, dtype=np.int64)
    stack = np.empty(n, dtype=np.int64)
    maxdeg = 0
    for u in range(n):
        d = indptr[u + 1] - indptr[u]
        if d > maxdeg:
            maxdeg = d
    marked = np.empty(maxdeg, dtype=np.bool_)

    for u in range(n):
        b = indptr[u]
        e = indptr[u + 1]
        d = e - b
        if d <= 1:
            continue
        for t in range(d):
            v = nbr[b + t]
            tstamp[v] = u
            tpos[v] = t
            marked[t] = False
        unmarked = d
        maxpos = d - 1
        rmax = rank[nbr[b + maxpos]]
        for t in range(d):
            w = nbr[b + t]
            if unmarked <= 1:
                break  # the rank-minimal target can never be marked
            if stamp[w] == u:
                continue  # already swept from an earlier neighbor
            stamp[w] = u
            sp = 0
            stack[sp] = w
            sp += 1
            while sp > 0 and unmarked > 1:
                x = stack[sp - 1]
                sp -= 1
                if rank[x] >= rmax:
                    continue
                for p in range(indptr[x], indptr[x + 1]):
                    y = nbr[p]
                    if tstamp[y] == u:
                        t2 = tpos[y]
                        if not marked[t2]:
                            marked[t2] = True
                            essential[b + t2] = False
                            unmarked -= 1
                            if unmarked <= 1:
                                break
                            while marked[maxpos]:
                                maxpos -= 1
                            rmax = rank[nbr[b + maxpos]]
                    if stamp[y] != u:
                        stamp[y] = u
                        if rank[y] < rmax:
                            stack[sp] = y
                            sp += 1


def reduction_mask_search(n: int, citing: np.ndarray, cited: np.ndarray, rank: np.ndarray) -> np.ndarray:
    """Essential-edge mask via per-source pruned search (large graphs)."""
    m = citing.shape[0]
    essential = np.ones(m, dtype=bool)
    if m == 0:
        return essential
    order = np.lexsort((rank[cited], citing))
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(citing, minlength=n), out=indptr[1:])
    nbr = np.ascontiguousarray(cited[order].astype(np.int64))
    ess_csr = np.ones(m, dtype=bool)
    _tr_mark_nonessential(indptr, nbr, rank.astype(np.int64), ess_csr)
    essential[order] = ess_csr
    return essential


# -- local moving (clustering) ---------------------------------------------------

@njit(cache=True)
def _consider_node(i, indptr, nbr, w, size, comm, csize, cw, seen, touched, free, nfree, counter, r):
    """Best single-node move for i, applied in place.

    Gain of joining cluster d from a detached position is
    w_i(d) - 2 r S_d s_i on the symmetrized weights; an empty cluster scores
    0; ties keep the current cluster.  Returns (moved, nfree).
    """
    c0 = comm[i]
    nt = 0
    for p in range(indptr[i], indptr[i + 1]):
        j = nbr[p]
        if j == i:
            continue
        c = comm[j]
        if seen[c] != counter:
            seen[c] = counter
            cw[c] = 0.0
            touched[nt] = c
            nt += 1
        cw[c] += w[p]
    si = size[i]
    csize[c0] -= si
    if seen[c0] == counter:
        stay = cw[c0] - 2.0 * r * csize[c0] * si
    else:
        stay = -2.0 * r * csize[c0] * si
    best_gain = stay
    best_c = c0
    for t in range(nt):
        c = touched[t]
        if c == c0:
            continue
        g = cw[c] - 2.0 * r * csize[c] * si
        if g > best_gain + 1e-12:
            best_gain = g
            best_c = c
    if 0.0 > best_gain + 1e-12:
        # a fresh singleton beats every candidate
        best_c = free[nfree - 1]
        nfree -= 1
    comm[i] = best_c
    csize[best_c] += si
    if best_c != c0 and csize[c0] == 0.0:
        free[nfree] = c0
        nfree += 1
    return best_c != c0, nfree


@njit(cache=True)
def _local_move(indptr, nbr, w, size, comm, r, state):
    """Local moving until no single-node move improves quality.

    Queue-driven: after a move, the mover's neighbors outside its new
    cluster are revisited.  A full shuffled verification sweep runs once the
    queue drains, so the returned partition is a true fixed point of
    single-node moves.  ``comm`` is modified in place; returns
    (moves, state).
    """
    n = size.shape[0]
    csize = np.zeros(n, dtype=np.float64)
    for i in range(n):
        csize[comm[i]] += size[i]
    used = np.zeros(n, dtype=np.uint8)
    for i in range(n):
        used[comm[i]] = 1
    free = np.empty(n, dtype=np.int64)
    nfree = 0
    for c in range(n):
        if used[c] == 0:
            free[nfree] = c
            nfree += 1
    cw = np.zeros(n, dtype=np.float64)
    seen = np.full(n, -1, dtype=np.int64)
    touched = np.empty(n, dtype=np.int64)
    order = np.arange(n)
    in_queue = np.zeros(n, dtype=np.bool_)
    queue = np.empty(n, dtype=np.int64)
    counter = 0
    total_moves = 0

    state = _shuffle(order, state)
    for k in range(n):
        queue[k] = order[k]
        in_queue[k] = True
    head = 0
    count = n

    while True:
        while count > 0:
            i = queue[head]
            head = (head + 1) % n
            count -= 1
            in_queue[i] = False
            counter += 1
            moved, nfree = _consider_node(i, indptr, nbr, w, size, comm, csize,
                                          cw, seen, touched, free, nfree, counter, r)
            if moved:
                total_moves += 1
                ci = comm[i]
                for p in range(indptr[i], indptr[i + 1]):
                    j = nbr[p]
                    if j != i and comm[j] != ci and not in_queue[j]:
                        in_queue[j] = True
                        queue[(head + count) % n] = j
                        count += 1
        # verification sweep: guards against gains that shifted through
        # cluster-size changes at nodes the queue never revisited
        state = _shuffle(order, state)
        sweep_moves = 0
        for oi in range(n):
            i = order[oi]
            counter += 1
            moved, nfree = _consider_node(i, indptr, nbr, w, size, comm, csize,
                                          cw, seen, touched, free, nfree, counter, r)
            if moved:
                sweep_moves += 1
                total_moves += 1
                ci = comm[i]
                for p in range(indptr[i], indptr[i + 1]):
                    j = nbr[p]
                    if j != i and comm[j] != ci and not in_queue[j]:
                        in_queue[j] = True
                        queue[(head + count) % n] = j
                        count += 1
        if sweep_moves == 0 and count == 0:
            break
    return total_moves, state


def local_move(indptr: np.ndarray, nbr: np.ndarray, w: np.ndarray, size: np.ndarray,
               comm: np.ndarray, resolution: float, state: int) -> tuple[int, int]:
    moves, new_state = _local_move(
        indptr, nbr, w, size.astype(np.float64), comm, float(resolution), np.uint64(state)
    )
    return int(moves), int(new_state)
