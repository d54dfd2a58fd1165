"""Network analysis: components, clustering, core publications, paths.

Clustering maximizes a resolution-parameterized quality function over
cluster assignments,

    Q(u_1..u_n) = sum_ij delta(u_i, u_j) (a_ij - gamma / (2n)),

where the relatedness a_ij of a citing publication i to a cited publication
j is 1 / (number of publications cited by i), and 0 otherwise.  The
optimizer is a smart local moving scheme: local moving on the whole
network, then a refinement that re-runs local moving inside every cluster,
aggregates the sub-clusters into a reduced network, and iterates.  It works
on the symmetrized weights a_ij + a_ji, which leaves the quality value
unchanged.

Components, clustering and core extraction ignore edge direction; path
queries follow the citing -> cited direction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from . import _kernels
from .errors import ContractError, UnknownIdError
from .model import CitationNetwork, NetworkView, Subnet, as_subnet

_MIN_IMPROVEMENT = 1e-12


# -- connected components ---------------------------------------------------------

def connected_components(target: "CitationNetwork | NetworkView") -> dict[str, int]:
    """Component id per publication, ignoring edge direction.

    Components are numbered from 1 by decreasing size; ties broken by the
    smallest contained network index.
    """
    sub = as_subnet(target)
    comp = np.full(sub.n, -1, dtype=np.int64)
    raw = 0
    for start in range(sub.n):
        if comp[start] >= 0:
            continue
        comp[start] = raw
        frontier = [start]
        while frontier:
            nxt = []
            for u in frontier:
                for v in np.concatenate((sub.out_neighbors(u), sub.in_neighbors(u))).tolist():
                    if comp[v] < 0:
                        comp[v] = raw
                        nxt.append(v)
            frontier = nxt
        raw += 1
    sizes = np.bincount(comp, minlength=raw)
    # first member index per raw component = tie-break key
    first = np.full(raw, sub.n, dtype=np.int64)
    for i in range(sub.n - 1, -1, -1):
        first[comp[i]] = i
    order = sorted(range(raw), key=lambda c: (-int(sizes[c]), int(first[c])))
    relabel = {c: k + 1 for k, c in enumerate(order)}
    return {sub.node_ids[i]: relabel[int(comp[i])] for i in range(sub.n)}


def largest_component_members(target: "CitationNetwork | NetworkView") -> set[str]:
    comp = connected_components(target)
    return {pid for pid, c in comp.items() if c == 1}


# -- relatedness ---------------------------------------------------------------------

@dataclass(frozen=True)
class RelatednessMatrix:
    """Sparse citing-row-normalized relatedness; rows of publications with
    no outgoing citations are zero."""

    node_ids: tuple[str, ...]
    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray

    def value(self, citing_id: str, cited_id: str) -> float:
        index = {pid: i for i, pid in enumerate(self.node_ids)}
        i = index[citing_id]
        j = index[cited_id]
        row = self.indices[self.indptr[i]:self.indptr[i + 1]]
        hit = np.flatnonzero(row == j)
        if hit.size == 0:
            return 0.0
        return float(self.data[self.indptr[i] + hit[0]])

    def row_sum(self, citing_id: str) -> float:
        index = {pid: i for i, pid in enumerate(self.node_ids)}
        i = index[citing_id]
        return float(self.data[self.indptr[i]:self.indptr[i + 1]].sum())


def relatedness(target: "CitationNetwork | NetworkView") -> RelatednessMatrix:
    sub = as_subnet(target)
    outdeg = np.bincount(sub.citing, minlength=sub.n).astype(np.float64)
    order = np.argsort(sub.citing, kind="stable")
    indptr = np.zeros(sub.n + 1, dtype=np.int64)
    np.cumsum(np.bincount(sub.citing, minlength=sub.n), out=indptr[1:])
    indices = sub.cited[order].astype(np.int64)
    data = 1.0 / outdeg[sub.citing[order]]
    return RelatednessMatrix(node_ids=sub.node_ids, indptr=indptr, indices=indices, data=data)


# -- clustering quality --------------------------------------------------------------

@dataclass(frozen=True)
class Partition:
    """Cluster assignment per publication.

    ``assignment`` holds contiguous cluster ids starting at 1; publications
    discarded by the small-cluster policy hold None.  ``quality`` is the
    quality-function value of the complete partition the optimizer settled
    on (for the merge policy that is the returned assignment; for discard it
    is the pre-discard assignment).
    """

    node_ids: tuple[str, ...]
    assignment: tuple["int | None", ...]
    resolution: float
    quality: float
    min_cluster_size: int
    small_cluster_policy: str

    def as_dict(self) -> dict[str, "int | None"]:
        return dict(zip(self.node_ids, self.assignment))

    @property
    def n_clusters(self) -> int:
        return max((c for c in self.assignment if c is not None), default=0)

    def members(self, cluster_id: int) -> set[str]:
        return {pid for pid, c in zip(self.node_ids, self.assignment) if c == cluster_id}

    def sizes(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for c in self.assignment:
            if c is not None:
                out[c] = out.get(c, 0) + 1
        return out


def quality(
    target: "CitationNetwork | NetworkView",
    partition: "Partition | Mapping[str, int]",
    resolution: float = 1.0,
) -> float:
    """Literal quality-function evaluation over all ordered pairs.

    The diagonal is included: a_ii = 0, so each publication contributes
    -resolution/(2n) regardless of the partition.
    """
    sub = as_subnet(target)
    if isinstance(partition, Partition):
        mapping = partition.as_dict()
    else:
        mapping = dict(partition)
    labels = np.empty(sub.n, dtype=np.int64)
    for i, pid in enumerate(sub.node_ids):
        c = mapping.get(pid)
        if c is None:
            raise ContractError(f"partition does not cover publication {pid!r}")
        labels[i] = c
    return _quality_idx(sub, labels, resolution)


def _quality_idx(sub: Subnet, labels: np.ndarray, resolution: float) -> float:
    n = sub.n
    if n == 0:
        return 0.0
    r = resolution / (2.0 * n)
    outdeg = np.bincount(sub.citing, minlength=n).astype(np.float64)
    same = labels[sub.citing] == labels[sub.cited]
    edge_part = float((1.0 / outdeg[sub.citing[same]]).sum()) if same.any() else 0.0
    _, inv = np.unique(labels, return_inverse=True)
    csize = np.bincount(inv).astype(np.float64)
    return edge_part - r * float((csize * csize).sum())


# -- clustering (smart local moving) ---------------------------------------------------

def cluster(
    target: "CitationNetwork | NetworkView",
    resolution: float = 1.0,
    min_cluster_size: int = 1,
    small_cluster_policy: str = "merge",
    seed: int = 0,
) -> Partition:
    """Cluster publications by maximizing the quality function.

    Deterministic for a given seed.  Clusters smaller than
    ``min_cluster_size`` are merged into the neighboring cluster with the
    largest total relatedness (ties to the smaller cluster id) or discarded,
    per ``small_cluster_policy``.  Returned cluster ids are contiguous from
    1, ordered by decreasing size.
    """
    if resolution <= 0:
        raise ContractError("resolution must be > 0")
    if min_cluster_size < 1:
        raise ContractError("min_cluster_size must be >= 1")
    if small_cluster_policy not in ("merge", "discard"):
        raise ContractError(f"unknown small-cluster policy: {small_cluster_policy!r}")
    sub = as_subnet(target)
    n = sub.n
    if n == 0:
        return Partition((), (), resolution, 0.0, min_cluster_size, small_cluster_policy)

    src, dst, w = _symmetrized(sub)
    r = resolution / (2.0 * n)
    comm = _smart_local_moving(n, src, dst, w, r, seed, sub)

    # the optimizer must dominate (or match) both trivial partitions
    q_opt = _quality_idx(sub, comm, resolution)
    q_single = _quality_idx(sub, np.arange(n, dtype=np.int64), resolution)
    q_one = _quality_idx(sub, np.zeros(n, dtype=np.int64), resolution)
    if q_single > q_opt and q_single >= q_one:
        comm, q_opt = np.arange(n, dtype=np.int64), q_single
    elif q_one > q_opt:
        comm, q_opt = np.zeros(n, dtype=np.int64), q_one

    comm = _relabel_by_size(comm)
    if min_cluster_size > 1:
        comm, discarded = _apply_small_cluster_policy(
            sub, src, dst, w, comm, min_cluster_size, small_cluster_policy
        )
        if small_cluster_policy == "merge":
            q_opt = _quality_idx(sub, comm, resolution)
        comm = _relabel_by_size(comm, ignore=discarded)
    else:
        discarded = np.zeros(n, dtype=bool)

    assignment = tuple(
        None if discarded[i] else int(comm[i]) + 1 for i in range(n)
    )
    return Partition(
        node_ids=sub.node_ids,
        assignment=assignment,
        resolution=resolution,
        quality=q_opt,
        min_cluster_size=min_cluster_size,
        small_cluster_policy=small_cluster_policy,
    )


def _symmetrized(sub: Subnet) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """COO of a'_ij = a_ij + a_ji; acyclicity rules out reciprocal pairs,
    so this is just each edge stored in both directions."""
    outdeg = np.bincount(sub.citing, minlength=sub.n).astype(np.float64)
    w_edge = 1.0 / outdeg[sub.citing]
    src = np.concatenate((sub.citing, sub.cited)).astype(np.int64)
    dst = np.concatenate((sub.cited, sub.citing)).astype(np.int64)
    w = np.concatenate((w_edge, w_edge))
    return src, dst, w


def _coo_to_csr(n: int, src: np.ndarray, dst: np.ndarray, w: np.ndarray):
    order = np.argsort(src, kind="stable")
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
    return indptr, np.ascontiguousarray(dst[order]), np.ascontiguousarray(w[order])


def _smart_local_moving(
    n: int, src: np.ndarray, dst: np.ndarray, w: np.ndarray, r: float, seed: int, sub: Subnet
) -> np.ndarray:
    state = (((seed & 0xFFFFFFFFFFFFFFFF) * 0x9E3779B97F4A7C15 + 0x1D872B41) & 0xFFFFFFFFFFFFFFFF) | 1
    size = np.ones(n, dtype=np.int64)
    comm = np.arange(n, dtype=np.int64)
    comm, state = _slm_level(n, src, dst, w, size, comm, r, state)
    best_q = _sym_quality(src, dst, w, size, comm, r)

    # repeat whole passes while they still pay: the cutoff is relative so
    # large networks stop once gains drop below a part per million
    for _ in range(20):
        new_comm, state = _slm_level(n, src, dst, w, size, comm.copy(), r, state)
        new_q = _sym_quality(src, dst, w, size, new_comm, r)
        if new_q > best_q:
            comm = new_comm
        if new_q - best_q <= _MIN_IMPROVEMENT + 1e-6 * abs(best_q):
            break
        best_q = new_q
    return _compact_labels(comm)


def _slm_level(n, src, dst, w, size, comm, r, state) -> tuple[np.ndarray, int]:
    """One smart-local-moving level: local moving, then per-cluster
    refinement from singletons, aggregation by sub-cluster, and recursion on
    the reduced network (whose initial partition groups sub-clusters by the
    cluster they came from)."""
    indptr, nbr, wcsr = _coo_to_csr(n, src, dst, w)
    _, state = _kernels.local_move(indptr, nbr, wcsr, size, comm, r, state)
    if np.unique(comm).shape[0] == n:
        return comm, state
    sub_assign, nsub, state = _split_clusters(n, src, dst, w, comm, r, state)
    if nsub >= n:
        return comm, state
    agg_src, agg_dst, agg_w, agg_size = _aggregate(src, dst, w, size, sub_assign, nsub)
    agg_comm = _compact_labels(_first_value_per_group(comm, sub_assign, nsub))
    agg_comm, state = _slm_level(nsub, agg_src, agg_dst, agg_w, agg_size, agg_comm, r, state)
    return agg_comm[sub_assign], state


def _sym_quality(src, dst, w, size, comm, r) -> float:
    same = comm[src] == comm[dst]
    edge_part = 0.5 * float(w[same].sum())
    csize = np.bincount(comm, weights=size.astype(np.float64))
    return edge_part - r * float((csize * csize).sum())


def _split_clusters(n, src, dst, w, comm, r, state) -> tuple[np.ndarray, int, int]:
    """Local moving from singletons inside every cluster; returns a compact
    sub-cluster id per node."""
    sub_assign = np.empty(n, dtype=np.int64)
    local = np.empty(n, dtype=np.int64)
    nodes_by_comm = np.argsort(comm, kind="stable")
    comm_sorted = comm[nodes_by_comm]
    starts = np.flatnonzero(np.r_[True, comm_sorted[1:] != comm_sorted[:-1]])
    ends = np.r_[starts[1:], n]

    same = comm[src] == comm[dst]
    es, ed, ew = src[same], dst[same], w[same]
    ecl = comm[es]
    eorder = np.argsort(ecl, kind="stable")
    es, ed, ew = es[eorder], ed[eorder], ew[eorder]
    ecl_sorted = ecl[eorder]

    next_id = 0
    for s, e in zip(starts.tolist(), ends.tolist()):
        members = nodes_by_comm[s:e]
        k = members.shape[0]
        if k == 1:
            sub_assign[members[0]] = next_id
            next_id += 1
            continue
        c = comm_sorted[s]
        lo = np.searchsorted(ecl_sorted, c, side="left")
        hi = np.searchsorted(ecl_sorted, c, side="right")
        local[members] = np.arange(k)
        lsrc = local[es[lo:hi]]
        ldst = local[ed[lo:hi]]
        lw = ew[lo:hi]
        indptr, nbr, wcsr = _coo_to_csr(k, lsrc, ldst, lw)
        lcomm = np.arange(k, dtype=np.int64)
        _, state = _kernels.local_move(indptr, nbr, wcsr, np.ones(k, dtype=np.int64), lcomm, r, state)
        lcomm = _compact_labels(lcomm)
        sub_assign[members] = next_id + lcomm
        next_id += int(lcomm.max()) + 1
    return sub_assign, next_id, state


def _aggregate(src, dst, w, size, sub_assign, nsub):
    a = sub_assign[src]
    b = sub_assign[dst]
    off = a != b
    if off.any():
        keys = a[off] * np.int64(nsub) + b[off]
        uk, inv = np.unique(keys, return_inverse=True)
        agg_w = np.bincount(inv, weights=w[off])
        agg_src = (uk // nsub).astype(np.int64)
        agg_dst = (uk % nsub).astype(np.int64)
    else:
        agg_src = np.empty(0, dtype=np.int64)
        agg_dst = np.empty(0, dtype=np.int64)
        agg_w = np.empty(0, dtype=np.float64)
    agg_size = np.bincount(sub_assign, weights=size.astype(np.float64), minlength=nsub)
    return agg_src, agg_dst, agg_w, np.round(agg_size).astype(np.int64)


def _first_value_per_group(values: np.ndarray, groups: np.ndarray, ngroups: int) -> np.ndarray:
    out = np.empty(ngroups, dtype=np.int64)
    seen = np.zeros(ngroups, dtype=bool)
    for i in range(groups.shape[0]):
        g = groups[i]
        if not seen[g]:
            seen[g] = True
            out[g] = values[i]
    return out


def _compact_labels(labels: np.ndarray) -> np.ndarray:
    """Relabel to 0..k-1 in order of first appearance."""
    mapping: dict[int, int] = {}
    out = np.empty(labels.shape[0], dtype=np.int64)
    for i, v in enumerate(labels.tolist()):
        out[i] = mapping.setdefault(v, len(mapping))
    return out


def _relabel_by_size(comm: np.ndarray, ignore: "np.ndarray | None" = None) -> np.ndarray:
    """Relabel to 0..k-1 by decreasing size, ties to the smallest member index."""
    active = np.ones(comm.shape[0], dtype=bool) if ignore is None else ~ignore
    labels = np.unique(comm[active]) if active.any() else np.empty(0, dtype=np.int64)
    sizes = {int(c): 0 for c in labels}
    first = {}
    for i in np.flatnonzero(active).tolist():
        c = int(comm[i])
        sizes[c] += 1
        first.setdefault(c, i)
    order = sorted(sizes, key=lambda c: (-sizes[c], first[c]))
    mapping = {c: k for k, c in enumerate(order)}
    out = comm.copy()
    for i in np.flatnonzero(active).tolist():
        out[i] = mapping[int(comm[i])]
    return out


def _apply_small_cluster_policy(sub, src, dst, w, comm, min_size, policy):
    n = comm.shape[0]
    discarded = np.zeros(n, dtype=bool)
    unmergeable: set[int] = set()
    while True:
        sizes = np.bincount(comm[~discarded]) if (~discarded).any() else np.empty(0, dtype=np.int64)
        small = [c for c in range(sizes.shape[0]) if 0 < sizes[c] < min_size and c not in unmergeable]
        if not small:
            break
        if policy == "discard":
            for c in small:
                discarded[(comm == c) & ~discarded] = True
            break
        # merge the smallest offender into the neighbor cluster with the
        # largest total relatedness; ties broken by the smaller cluster id
        small.sort(key=lambda c: (sizes[c], c))
        c = small[0]
        mask = comm == c
        weights: dict[int, float] = {}
        for s, d, ww in zip(src.tolist(), dst.tolist(), w.tolist()):
            if mask[s] and not mask[d]:
                weights[int(comm[d])] = weights.get(int(comm[d]), 0.0) + ww
        if not weights:
            unmergeable.add(c)  # no neighboring cluster; left as is
            continue
        target = max(sorted(weights), key=lambda cc: (weights[cc], -cc))
        comm[mask] = target
    return comm, discarded


# -- core publications (k-core) ----------------------------------------------------

def core_publications(target: "CitationNetwork | NetworkView", k: int) -> set[str]:
    """The maximal set in which every publication keeps at least k citation
    relations (incoming or outgoing) with other members, via iterative
    peeling.  May be empty."""
    if k < 1:
        raise ContractError("k must be >= 1")
    sub = as_subnet(target)
    deg = (np.bincount(sub.citing, minlength=sub.n) + np.bincount(sub.cited, minlength=sub.n)).astype(np.int64)
    alive = np.ones(sub.n, dtype=bool)
    queue = [i for i in range(sub.n) if deg[i] < k]
    for i in queue:
        alive[i] = False
    while queue:
        nxt: list[int] = []
        for u in queue:
            for v in np.concatenate((sub.out_neighbors(u), sub.in_neighbors(u))).tolist():
                if alive[v]:
                    deg[v] -= 1
                    if deg[v] < k:
                        alive[v] = False
                        nxt.append(v)
        queue = nxt
    return {sub.node_ids[i] for i in np.flatnonzero(alive).tolist()}


# -- shortest / longest paths --------------------------------------------------------

@dataclass(frozen=True)
class PathQueryResult:
    """All extremal directed citation paths between two publications."""

    paths: tuple[tuple[str, ...], ...]
    length: "int | None"
    reachable: bool
    truncated: bool = False


def extreme_path(
    target: "CitationNetwork | NetworkView",
    from_id: str,
    to_id: str,
    kind: str = "shortest",
    max_paths: int = 100,
) -> PathQueryResult:
    """Shortest or longest directed path(s) from the citing side toward the
    cited side.  Returns every extremal path, up to ``max_paths``."""
    if kind not in ("shortest", "longest"):
        raise ContractError(f"unknown path kind: {kind!r}")
    sub = as_subnet(target)
    for pid in (from_id, to_id):
        if pid not in sub.index:
            raise UnknownIdError(pid, "path endpoint")
    s = sub.index[from_id]
    t = sub.index[to_id]

    fwd = _reach_idx(sub, s, forward=True)
    bwd = _reach_idx(sub, t, forward=False)
    allowed = fwd & bwd
    if s not in allowed or t not in allowed:
        return PathQueryResult(paths=(), length=None, reachable=False)

    if kind == "shortest":
        goal = _bfs_dist(sub, s, allowed)
        length = goal.get(t)
        next_ok = lambda x, y: goal.get(y) == goal[x] + 1  # noqa: E731
    else:
        order = _kernels.topological_order(sub.n, sub.citing, sub.cited)
        if order is None:
            raise ContractError("longest path requires an acyclic network")
        longest: dict[int, int] = {t: 0}
        rank = np.empty(sub.n, dtype=np.int64)
        rank[order] = np.arange(sub.n)
        for x in sorted(allowed, key=lambda v: -int(rank[v])):
            if x == t:
                continue
            best = -1
            for y in sub.out_neighbors(x).tolist():
                if y in allowed and y in longest:
                    best = max(best, longest[y])
            longest[x] = best + 1
        length = longest[s]
        next_ok = lambda x, y: y in allowed and longest.get(y) == longest[x] - 1  # noqa: E731

    paths: list[tuple[str, ...]] = []
    truncated = False
    stack: list[tuple[int, list[int]]] = [(s, [s])]
    while stack:
        x, trail = stack.pop()
        if x == t and (kind == "longest" or len(trail) - 1 == length):
            if len(paths) >= max_paths:
                truncated = True
                break
            if kind == "longest" and len(trail) - 1 != length:
                continue
            paths.append(tuple(sub.node_ids[i] for i in trail))
            continue
        for y in sorted(sub.out_neighbors(x).tolist(), reverse=True):
            if y in allowed and next_ok(x, y):
                stack.append((y, trail + [y]))
    paths.sort()
    return PathQueryResult(paths=tuple(paths), length=length, reachable=True, truncated=truncated)


def _reach_idx(sub: Subnet, root: int, forward: bool) -> set[int]:
    step = sub.out_neighbors if forward else sub.in_neighbors
    seen = {root}
    frontier = [root]
    while frontier:
        nxt = []
        for u in frontier:
            for v in step(u).tolist():
                if v not in seen:
                    seen.add(v)
                    nxt.append(v)
        frontier = nxt
    return seen


def _bfs_dist(sub: Subnet, root: int, allowed: set[int]) -> dict[int, int]:
    dist = {root: 0}
    frontier = [root]
    d = 0
    while frontier:
        d += 1
        nxt = []
        for u in frontier:
            for v in sub.out_neighbors(u).tolist():
                if v in allowed and v not in dist:
                    dist[v] = d
                    nxt.append(v)
        frontier = nxt
    return dist
