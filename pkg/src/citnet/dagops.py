"""Acyclicity enforcement and transitive reduction.

An edge (A, B) is *essential* when the only way from A to B is the edge
itself; it is *non-essential* when some other directed path A .. B exists.
The transitive reduction keeps exactly the essential edges, which preserves
reachability and is unique on a DAG.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import ContractError, UnknownIdError
from .model import CitationNetwork, NetworkView, Subnet, as_subnet

# Above this node count, big-int bitset reachability gets memory-hungry and
# the pruned per-source search takes over.
_BITSET_MAX_NODES = 20_000


def break_cycles(
    temporal_edges: Sequence[tuple[str, str]],
    deterministic_order: Sequence[str],
) -> tuple[list[tuple[str, str]], list[tuple[str, str]]]:
    """Drop a deterministic set of edges so the rest is acyclic.

    ``deterministic_order`` fixes both the traversal root order and the
    neighbor visit order, so identical inputs always remove the same edges.
    Input edges must already satisfy the temporal constraint, which confines
    cycles to same-year publications.  Every removed edge would recreate a
    cycle if added back.
    """
    ids = list(deterministic_order)
    index = {pid: i for i, pid in enumerate(ids)}
    if len(index) != len(ids):
        raise ContractError("deterministic_order contains duplicate ids")
    n = len(ids)
    citing = np.empty(len(temporal_edges), dtype=np.int32)
    cited = np.empty(len(temporal_edges), dtype=np.int32)
    for k, (a, b) in enumerate(temporal_edges):
        try:
            citing[k] = index[a]
            cited[k] = index[b]
        except KeyError as exc:
            raise UnknownIdError(str(exc.args[0]), f"edge ({a!r}, {b!r})") from None
    rank = np.arange(n, dtype=np.int32)
    keep = _kernels.break_cycles_idx(n, citing, cited, rank)
    kept = [e for e, k in zip(temporal_edges, keep) if k]
    removed = [e for e, k in zip(temporal_edges, keep) if not k]
    return kept, removed


@dataclass(frozen=True)
class EdgeSubset:
    """All edges of a graph, each tagged essential or non-essential."""

    node_ids: tuple[str, ...]
    citing: np.ndarray
    cited: np.ndarray
    essential_mask: np.ndarray

    @property
    def edge_count(self) -> int:
        return int(self.citing.shape[0])

    @property
    def essential_count(self) -> int:
        return int(np.count_nonzero(self.essential_mask))

    @cached_property
    def essential(self) -> list[tuple[str, str]]:
        return self._pairs(self.essential_mask)

    @cached_property
    def non_essential(self) -> list[tuple[str, str]]:
        return self._pairs(~self.essential_mask)

    def _pairs(self, mask: np.ndarray) -> list[tuple[str, str]]:
        ids = self.node_ids
        return [
            (ids[a], ids[b])
            for a, b in zip(self.citing[mask].tolist(), self.cited[mask].tolist())
        ]

    def tagged(self) -> list[tuple[str, str, bool]]:
        ids = self.node_ids
        return [
            (ids[a], ids[b], bool(e))
            for a, b, e in zip(self.citing.tolist(), self.cited.tolist(), self.essential_mask.tolist())
        ]


def transitive_reduction(
    target: "CitationNetwork | NetworkView | Subnet",
    method: str = "auto",
) -> EdgeSubset:
    """Tag every edge essential or non-essential.

    ``method`` selects the reachability strategy: "bitset" (dense big-int
    reachability, exact and simple, for small graphs), "search" (per-source
    pruned DFS, scales to millions of edges), or "auto".
    """
    sub = as_subnet(target)
    order = _kernels.topological_order(sub.n, sub.citing, sub.cited)
    if order is None:
        raise ContractError("transitive reduction requires an acyclic network")
    rank = np.empty(sub.n, dtype=np.int64)
    rank[order] = np.arange(sub.n)

    if method == "auto":
        method = "bitset" if sub.n <= _BITSET_MAX_NODES else "search"
    if method == "bitset":
        essential = _reduction_mask_bitset(sub, rank, order)
    elif method == "search":
        essential = _kernels.reduction_mask_search(sub.n, sub.citing, sub.cited, rank)
    else:
        raise ContractError(f"unknown reduction method: {method!r}")
    return EdgeSubset(
        node_ids=sub.node_ids,
        citing=sub.citing,
        cited=sub.cited,
        essential_mask=essential,
    )


def _reduction_mask_bitset(sub: Subnet, rank: np.ndarray, topo: np.ndarray) -> np.ndarray:
    """Essential mask via full descendant bitsets in reverse topological order."""
    n = sub.n
    reach: list[int] = [0] * n  # reach[v] includes v itself
    indptr, indices = sub.out_csr
    for u in reversed(topo.tolist()):
        bits = 1 << u
        for w in indices[indptr[u]:indptr[u + 1]].tolist():
            bits |= reach[w]
        reach[u] = bits

    m = sub.citing.shape[0]
    essential = np.ones(m, dtype=bool)
    csr_order = np.lexsort((rank[sub.cited], sub.citing))
    pos = 0
    citing = sub.citing
    while pos < m:
        u = citing[csr_order[pos]]
        end = pos
        while end < m and citing[csr_order[end]] == u:
            end += 1
        acc = 0
        # rank-sorted scan: anything already in acc is reachable via a
        # nearer out-neighbor, hence through a path of length >= 2
        for k in range(pos, end):
            eidx = csr_order[k]
            w = int(sub.cited[eidx])
            if (acc >> w) & 1:
                essential[eidx] = False
            acc |= reach[w]
        pos = end
    return essential
