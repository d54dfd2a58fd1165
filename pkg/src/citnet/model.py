"""Publication and citation-network data model.

A :class:`CitationNetwork` is an immutable directed acyclic graph whose
nodes are publications and whose edges run from the citing to the cited
publication.  Two constraints are enforced at construction time: no edge
may point forward in time, and the edge relation must be acyclic.
:class:`NetworkView` is a publication subset of a full network together
with per-publication attribute state (marked / selected / group).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from . import _kernels
from .errors import ContractError, DuplicateIdError, UnknownIdError


@dataclass(frozen=True, slots=True)
class Publication:
    """A single publication record.

    ``external_citations`` is input data (citations received from anywhere,
    including outside the analyzed network) and is never computed by the
    engine; when the input carries no value it is stored as 0 with
    ``external_known=False`` so displays can show a dash.  Publications with
    ``complete_record=False`` are known only from references to them and
    never cite anything.
    """

    id: str
    first_author: str
    title: str
    source: str
    year: int
    co_authors: tuple[str, ...] = ()
    doi: str | None = None
    external_citations: int = 0
    external_known: bool = True
    complete_record: bool = True

    def __post_init__(self):
        if not self.id:
            raise ContractError("publication id must be non-empty")
        if not isinstance(self.year, int):
            raise ContractError(f"publication {self.id!r}: year must be an integer")
        if self.external_citations < 0:
            raise ContractError(f"publication {self.id!r}: external_citations must be >= 0")

    @property
    def label(self) -> str:
        """Display label: last name of the first author."""
        name = self.first_author.strip()
        if "," in name:
            return name.split(",", 1)[0].strip()
        parts = name.rsplit(" ", 1)
        # "Smith J" style: drop a trailing initial, keep bare last names intact
        if len(parts) == 2 and len(parts[1]) <= 2:
            return parts[0]
        return name


@dataclass(frozen=True, slots=True)
class DroppedEdge:
    citing: str
    cited: str
    reason: str  # "self-edge" | "forward-in-time" | "incomplete-citing" | "duplicate" | "cycle"


class CitationNetwork:
    """Immutable full citation network.

    Edges are stored as parallel integer arrays over publication indexes;
    adjacency in CSR form is derived lazily.  Instances are safe for
    concurrent reads.
    """

    def __init__(self, publications: Sequence[Publication], citing_idx: np.ndarray, cited_idx: np.ndarray):
        self._pubs: tuple[Publication, ...] = tuple(publications)
        self._index: dict[str, int] = {p.id: i for i, p in enumerate(self._pubs)}
        if len(self._index) != len(self._pubs):
            raise ContractError("publication ids are not unique")
        self._citing = np.asarray(citing_idx, dtype=np.int32)
        self._cited = np.asarray(cited_idx, dtype=np.int32)
        self._years = np.fromiter((p.year for p in self._pubs), dtype=np.int32, count=len(self._pubs))
        self._indeg = np.bincount(self._cited, minlength=len(self._pubs)).astype(np.int64)

    # -- basic accessors ---------------------------------------------------

    @property
    def publications(self) -> tuple[Publication, ...]:
        return self._pubs

    @property
    def publication_ids(self) -> Iterator[str]:
        return (p.id for p in self._pubs)

    @property
    def n_publications(self) -> int:
        return len(self._pubs)

    @property
    def n_edges(self) -> int:
        return int(self._citing.shape[0])

    @property
    def years(self) -> np.ndarray:
        return self._years

    def index_of(self, pub_id: str) -> int:
        try:
            return self._index[pub_id]
        except KeyError:
            raise UnknownIdError(pub_id) from None

    def __contains__(self, pub_id: str) -> bool:
        return pub_id in self._index

    def publication(self, pub_id: str) -> Publication:
        return self._pubs[self.index_of(pub_id)]

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """(citing, cited) index arrays; treat as read-only."""
        return self._citing, self._cited

    def iter_edges(self) -> Iterator[tuple[str, str]]:
        pubs = self._pubs
        for a, b in zip(self._citing.tolist(), self._cited.tolist()):
            yield pubs[a].id, pubs[b].id

    def edge_list(self) -> list[tuple[str, str]]:
        return list(self.iter_edges())

    # -- adjacency ---------------------------------------------------------

    @cached_property
    def _out_csr(self) -> tuple[np.ndarray, np.ndarray]:
        return _build_csr(self.n_publications, self._citing, self._cited)

    @cached_property
    def _in_csr(self) -> tuple[np.ndarray, np.ndarray]:
        return _build_csr(self.n_publications, self._cited, self._citing)

    def out_neighbors(self, idx: int) -> np.ndarray:
        indptr, indices = self._out_csr
        return indices[indptr[idx]:indptr[idx + 1]]

    def in_neighbors(self, idx: int) -> np.ndarray:
        indptr, indices = self._in_csr
        return indices[indptr[idx]:indptr[idx + 1]]

    def internal_citations(self, pub_id: str) -> int:
        """Citations received from within this network (in-degree)."""
        return int(self._indeg[self.index_of(pub_id)])

    @property
    def internal_citation_counts(self) -> np.ndarray:
        return self._indeg

    # -- views ---------------------------------------------------------------

    def full_view(self) -> "NetworkView":
        return NetworkView(network=self, member_ids=frozenset(self._index))


def _build_csr(n: int, src: np.ndarray, dst: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    order = np.argsort(src, kind="stable")
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
    return indptr, np.ascontiguousarray(dst[order], dtype=np.int32)


@dataclass(frozen=True)
class Subnet:
    """Induced subgraph used by the analysis and layout operations.

    Nodes are renumbered 0..n-1 in network-index order; ``node_ids`` maps
    back to publication ids.
    """

    network: CitationNetwork
    node_ids: tuple[str, ...]
    years: np.ndarray
    citing: np.ndarray
    cited: np.ndarray

    @cached_property
    def index(self) -> dict[str, int]:
        return {pid: i for i, pid in enumerate(self.node_ids)}

    @property
    def n(self) -> int:
        return len(self.node_ids)

    @property
    def m(self) -> int:
        return int(self.citing.shape[0])

    @cached_property
    def out_csr(self) -> tuple[np.ndarray, np.ndarray]:
        return _build_csr(self.n, self.citing, self.cited)

    @cached_property
    def in_csr(self) -> tuple[np.ndarray, np.ndarray]:
        return _build_csr(self.n, self.cited, self.citing)

    def out_neighbors(self, i: int) -> np.ndarray:
        indptr, indices = self.out_csr
        return indices[indptr[i]:indptr[i + 1]]

    def in_neighbors(self, i: int) -> np.ndarray:
        indptr, indices = self.in_csr
        return indices[indptr[i]:indptr[i + 1]]

    def publication(self, i: int) -> Publication:
        return self.network.publication(self.node_ids[i])


def as_subnet(target: "CitationNetwork | NetworkView | Subnet") -> Subnet:
    """Whole-network or view-induced subgraph, with node renumbering."""
    if isinstance(target, Subnet):
        return target
    if isinstance(target, CitationNetwork):
        return _whole_subnet(target)
    if isinstance(target, NetworkView):
        return target.subnet
    raise ContractError(f"expected CitationNetwork or NetworkView, got {type(target).__name__}")


def _whole_subnet(net: CitationNetwork) -> Subnet:
    cached = getattr(net, "_whole_subnet_cache", None)
    if cached is not None:
        return cached
    sub = Subnet(
        network=net,
        node_ids=tuple(p.id for p in net.publications),
        years=net.years,
        citing=net.edge_arrays()[0],
        cited=net.edge_arrays()[1],
    )
    net._whole_subnet_cache = sub  # type: ignore[attr-defined]
    return sub


@dataclass(frozen=True)
class NetworkView:
    """The "current network": a member subset of a full network plus
    attribute state.  Views are immutable snapshots; attribute changes
    produce new views."""

    network: CitationNetwork
    member_ids: frozenset[str]
    marked: frozenset[str] = frozenset()
    selected: frozenset[str] = frozenset()
    groups: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        for pid in self.member_ids:
            if pid not in self.network:
                raise UnknownIdError(pid, "view member outside full network")
        for name, ids in (("marked", self.marked), ("selected", self.selected), ("groups", self.groups)):
            for pid in ids:
                if pid not in self.member_ids:
                    raise UnknownIdError(pid, f"{name} id outside view")
        for pid, g in self.groups.items():
            if not isinstance(g, int) or g < 1:
                raise ContractError(f"group for {pid!r} must be a positive integer")

    # -- derived counts ------------------------------------------------------

    @property
    def member_count(self) -> int:
        return len(self.member_ids)

    @cached_property
    def subnet(self) -> Subnet:
        return _induce(self.network, self.member_ids)

    @cached_property
    def edge_count(self) -> int:
        return self.subnet.m

    @property
    def selected_count(self) -> int:
        return len(self.selected)

    @cached_property
    def selected_edge_count(self) -> int:
        sub = self.subnet
        sel = np.zeros(sub.n, dtype=bool)
        for pid in self.selected:
            sel[sub.index[pid]] = True
        if not sel.any():
            return 0
        return int(np.count_nonzero(sel[sub.citing] & sel[sub.cited]))

    def counts(self) -> dict[str, int]:
        return {
            "publications": self.member_count,
            "citation_relations": self.edge_count,
            "selected_publications": self.selected_count,
            "selected_citation_relations": self.selected_edge_count,
        }

    # -- attribute transitions ------------------------------------------------

    def with_members(self, member_ids: Iterable[str]) -> "NetworkView":
        """New view for a different member set.

        Marks and selection flags do not survive; group assignments do
        (restricted to the new members).
        """
        members = frozenset(member_ids)
        groups = {pid: g for pid, g in self.groups.items() if pid in members}
        return NetworkView(network=self.network, member_ids=members, groups=groups)

    def with_marked(self, ids: Iterable[str], value: bool = True) -> "NetworkView":
        ids = set(ids)
        self._require_members(ids)
        marked = (self.marked | ids) if value else (self.marked - ids)
        return replace(self, marked=frozenset(marked))

    def with_selected(self, ids: Iterable[str], clear_first: bool = False) -> "NetworkView":
        ids = set(ids)
        self._require_members(ids)
        selected = ids if clear_first else (set(self.selected) | ids)
        return replace(self, selected=frozenset(selected))

    def with_groups(self, assignment: Mapping[str, int | None]) -> "NetworkView":
        """Apply group assignments; ``None`` clears a publication's group."""
        self._require_members(assignment.keys())
        groups = dict(self.groups)
        for pid, g in assignment.items():
            if g is None:
                groups.pop(pid, None)
            else:
                groups[pid] = g
        return replace(self, groups=groups)

    def _require_members(self, ids: Iterable[str]) -> None:
        for pid in ids:
            if pid not in self.member_ids:
                raise UnknownIdError(pid, "not a member of the view")

    def state_key(self) -> tuple:
        """Hashable snapshot identity, usable as a cache key."""
        return (
            id(self.network),
            self.member_ids,
            self.marked,
            self.selected,
            tuple(sorted(self.groups.items())),
        )


def induce_subnet(net: CitationNetwork, member_ids: frozenset[str]) -> Subnet:
    """Subgraph induced by a publication subset (edges with both ends inside)."""
    return _induce(net, member_ids)


def _induce(net: CitationNetwork, member_ids: frozenset[str]) -> Subnet:
    idxs = np.fromiter(sorted(net.index_of(pid) for pid in member_ids), dtype=np.int64, count=len(member_ids))
    node_ids = tuple(net.publications[i].id for i in idxs)
    inside = np.zeros(net.n_publications, dtype=bool)
    inside[idxs] = True
    citing, cited = net.edge_arrays()
    keep = inside[citing] & inside[cited]
    remap = np.full(net.n_publications, -1, dtype=np.int64)
    remap[idxs] = np.arange(len(idxs))
    return Subnet(
        network=net,
        node_ids=node_ids,
        years=net.years[idxs],
        citing=remap[citing[keep]].astype(np.int32),
        cited=remap[cited[keep]].astype(np.int32),
    )


# -- update_attributes -------------------------------------------------------

_UNSET = object()


@dataclass(frozen=True)
class AttributeUpdate:
    """Per-publication attribute change; unset fields are left unchanged.

    ``group=None`` clears the group (a publication holds at most one group,
    so assigning a group replaces any previous one).
    """

    marked: bool | None = None
    selected: bool | None = None
    group: object = _UNSET

    def wants_group_change(self) -> bool:
        return self.group is not _UNSET


def update_attributes(view: NetworkView, changes: Mapping[str, AttributeUpdate]) -> NetworkView:
    """Apply per-id attribute changes, returning a new view."""
    view._require_members(changes.keys())
    marked = set(view.marked)
    selected = set(view.selected)
    groups = dict(view.groups)
    for pid, upd in changes.items():
        if upd.marked is not None:
            (marked.add if upd.marked else marked.discard)(pid)
        if upd.selected is not None:
            (selected.add if upd.selected else selected.discard)(pid)
        if upd.wants_group_change():
            if upd.group is None:
                groups.pop(pid, None)
            else:
                if not isinstance(upd.group, int) or upd.group < 1:
                    raise ContractError(f"group for {pid!r} must be a positive integer")
                groups[pid] = upd.group
    return replace(view, marked=frozenset(marked), selected=frozenset(selected), groups=groups)


# -- network construction ------------------------------------------------------

@dataclass(frozen=True)
class BuildResult:
    network: CitationNetwork
    dropped: list[DroppedEdge]


def build_network(
    publications: Iterable[Publication],
    raw_edges: "Iterable[tuple[str, str]] | np.ndarray",
) -> BuildResult:
    """Construct a valid citation network from raw edges.

    Edges are cleaned deterministically in input order: self-edges, edges
    pointing forward in time (year(citing) < year(cited)), edges leaving an
    incomplete record, and duplicates are dropped, in that order of reasons;
    remaining cycles (necessarily within a single year) are then broken by
    a depth-first pass over publications in (year, id) order.  All dropped
    edges are reported with their reason.

    ``raw_edges`` is normally an iterable of (citing_id, cited_id) pairs; a
    numpy integer array of shape (m, 2) holding indexes into the publication
    sequence is also accepted as a large-scale fast path.
    """
    pubs = list(publications)
    index: dict[str, int] = {}
    for i, p in enumerate(pubs):
        if p.id in index:
            raise DuplicateIdError(p.id)
        index[p.id] = i
    n = len(pubs)

    if isinstance(raw_edges, np.ndarray):
        if raw_edges.ndim != 2 or raw_edges.shape[1] != 2:
            raise ContractError("edge array must have shape (m, 2)")
        citing = np.ascontiguousarray(raw_edges[:, 0], dtype=np.int64)
        cited = np.ascontiguousarray(raw_edges[:, 1], dtype=np.int64)
        if citing.size and (citing.min() < 0 or citing.max() >= n or cited.min() < 0 or cited.max() >= n):
            raise ContractError("edge array references publication indexes out of range")
    else:
        citing_l: list[int] = []
        cited_l: list[int] = []
        for a, b in raw_edges:
            ia = index.get(a)
            ib = index.get(b)
            if ia is None:
                raise UnknownIdError(a, f"edge ({a!r}, {b!r})")
            if ib is None:
                raise UnknownIdError(b, f"edge ({a!r}, {b!r})")
            citing_l.append(ia)
            cited_l.append(ib)
        citing = np.asarray(citing_l, dtype=np.int64)
        cited = np.asarray(cited_l, dtype=np.int64)
        del citing_l, cited_l

    years = np.fromiter((p.year for p in pubs), dtype=np.int64, count=n)
    complete = np.fromiter((p.complete_record for p in pubs), dtype=bool, count=n)

    m = citing.shape[0]
    reason = np.zeros(m, dtype=np.uint8)  # 0 = keep
    R_SELF, R_FORWARD, R_INCOMPLETE, R_DUP, R_CYCLE = 1, 2, 3, 4, 5
    reason[(citing == cited) & (reason == 0)] = R_SELF
    if m:
        fwd = (years[citing] < years[cited]) & (reason == 0)
        reason[fwd] = R_FORWARD
        reason[(~complete[citing]) & (reason == 0)] = R_INCOMPLETE
        ok = reason == 0
        keys = citing[ok] * np.int64(n) + cited[ok]
        _, first_pos = np.unique(keys, return_index=True)
        dup = np.ones(keys.shape[0], dtype=bool)
        dup[first_pos] = False
        idxs = np.flatnonzero(ok)
        reason[idxs[dup]] = R_DUP

    survivors = np.flatnonzero(reason == 0)
    order_rank = _deterministic_rank(pubs)
    keep_mask = _kernels.break_cycles_idx(
        n, citing[survivors].astype(np.int32), cited[survivors].astype(np.int32), order_rank
    )
    reason[survivors[~keep_mask]] = R_CYCLE

    names = {R_SELF: "self-edge", R_FORWARD: "forward-in-time", R_INCOMPLETE: "incomplete-citing",
             R_DUP: "duplicate", R_CYCLE: "cycle"}
    dropped = [
        DroppedEdge(pubs[int(citing[i])].id, pubs[int(cited[i])].id, names[int(reason[i])])
        for i in np.flatnonzero(reason != 0)
    ]
    final = np.flatnonzero(reason == 0)
    net = CitationNetwork(pubs, citing[final].astype(np.int32), cited[final].astype(np.int32))
    return BuildResult(network=net, dropped=dropped)


def _deterministic_rank(pubs: Sequence[Publication]) -> np.ndarray:
    """Position of each publication in (year ascending, id ascending) order."""
    order = sorted(range(len(pubs)), key=lambda i: (pubs[i].year, pubs[i].id))
    rank = np.empty(len(pubs), dtype=np.int32)
    for pos, i in enumerate(order):
        rank[i] = pos
    return rank


def citation_score(network: CitationNetwork, pub_id: str, mode: str = "internal") -> int:
    """Internal (default) or external citation score of a publication."""
    if mode == "internal":
        return network.internal_citations(pub_id)
    if mode == "external":
        return network.publication(pub_id).external_citations
    raise ContractError(f"unknown citation score mode: {mode!r}")
