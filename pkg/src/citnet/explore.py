"""Drill-down, expansion, and browser-style navigation over network views.

Predecessors / successors / intermediates are defined relative to an anchor
set: in the expansion context the anchors are the current members and
candidates come from the whole network; in the drill-down context the
anchors are the marked publications and candidates stay inside the current
network.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field

from .errors import ContractError, PreconditionError
from .model import CitationNetwork, NetworkView

__all__ = [
    "SelectionSpec",
    "ExpansionSpec",
    "Session",
    "predecessors",
    "successors",
    "intermediates",
    "resolve_selection",
    "drill_down",
    "expand",
    "history_navigate",
    "title_search",
]


# -- set primitives -----------------------------------------------------------

def predecessors(
    network: CitationNetwork,
    member_set: "set[str] | frozenset[str]",
    min_relations: int = 1,
    universe: "set[str] | frozenset[str] | None" = None,
) -> set[str]:
    """Non-members cited by at least ``min_relations`` members.

    ``universe`` restricts the candidate pool (drill-down counts only inside
    the current network); by default every publication is a candidate.
    """
    if not member_set:
        raise PreconditionError("member set must not be empty")
    if min_relations < 1:
        raise ContractError("min_relations must be >= 1")
    counts: Counter[int] = Counter()
    for pid in member_set:
        for j in network.out_neighbors(network.index_of(pid)).tolist():
            counts[j] += 1
    return _qualify(network, counts, member_set, min_relations, universe)


def successors(
    network: CitationNetwork,
    member_set: "set[str] | frozenset[str]",
    min_relations: int = 1,
    universe: "set[str] | frozenset[str] | None" = None,
) -> set[str]:
    """Non-members citing at least ``min_relations`` members."""
    if not member_set:
        raise PreconditionError("member set must not be empty")
    if min_relations < 1:
        raise ContractError("min_relations must be >= 1")
    counts: Counter[int] = Counter()
    for pid in member_set:
        for j in network.in_neighbors(network.index_of(pid)).tolist():
            counts[j] += 1
    return _qualify(network, counts, member_set, min_relations, universe)


def _qualify(network, counts, member_set, min_relations, universe) -> set[str]:
    pubs = network.publications
    result = set()
    for j, c in counts.items():
        if c < min_relations:
            continue
        pid = pubs[j].id
        if pid in member_set:
            continue
        if universe is not None and pid not in universe:
            continue
        result.add(pid)
    return result


def intermediates(
    network: CitationNetwork,
    anchor_set: "set[str] | frozenset[str]",
    scope: "set[str] | frozenset[str] | None" = None,
) -> set[str]:
    """Non-anchors lying on a directed citation path between two anchors.

    Computed as (forward-reachable from anchors) intersected with
    (backward-reachable from anchors), minus the anchors; all paths are
    confined to ``scope`` when given.
    """
    if not anchor_set:
        raise PreconditionError("anchor set must not be empty")
    in_scope = None
    if scope is not None:
        in_scope = {network.index_of(pid) for pid in scope}
    anchors_idx = [network.index_of(pid) for pid in anchor_set]
    fwd = _reachable(network, anchors_idx, in_scope, forward=True)
    bwd = _reachable(network, anchors_idx, in_scope, forward=False)
    pubs = network.publications
    return {pubs[i].id for i in (fwd & bwd)} - set(anchor_set)


def _reachable(network, roots, in_scope, forward: bool) -> set[int]:
    step = network.out_neighbors if forward else network.in_neighbors
    seen: set[int] = set()
    frontier = list(roots)
    while frontier:
        nxt = []
        for u in frontier:
            for v in step(u).tolist():
                if v in seen:
                    continue
                if in_scope is not None and v not in in_scope:
                    continue
                seen.add(v)
                nxt.append(v)
        frontier = nxt
    return seen


# -- selection and expansion specs ----------------------------------------------

@dataclass(frozen=True)
class SelectionSpec:
    """How drill-down picks publications from the current network.

    Three modes: a year range, a group id, or the marked publications
    optionally widened with their predecessors / successors / intermediates
    (the default approach).
    """

    mode: str  # "by_period" | "by_group" | "by_marked"
    year_min: int | None = None
    year_max: int | None = None
    group_id: int | None = None
    include_predecessors: bool = False
    include_successors: bool = False
    include_intermediates: bool = False
    min_relations: int = 1

    def __post_init__(self):
        if self.mode not in ("by_period", "by_group", "by_marked"):
            raise ContractError(f"unknown selection mode: {self.mode!r}")
        if self.mode == "by_period":
            if self.year_min is None or self.year_max is None:
                raise ContractError("by_period needs year_min and year_max")
            if self.year_min > self.year_max:
                raise ContractError("year_min must be <= year_max")
        if self.mode == "by_group" and (self.group_id is None or self.group_id < 1):
            raise ContractError("by_group needs a positive group id")
        if self.min_relations < 1:
            raise ContractError("min_relations must be >= 1")

    @classmethod
    def by_period(cls, year_min: int, year_max: int) -> "SelectionSpec":
        return cls(mode="by_period", year_min=year_min, year_max=year_max)

    @classmethod
    def by_group(cls, group_id: int) -> "SelectionSpec":
        return cls(mode="by_group", group_id=group_id)

    @classmethod
    def by_marked(
        cls,
        include_predecessors: bool = False,
        include_successors: bool = False,
        include_intermediates: bool = False,
        min_relations: int = 1,
    ) -> "SelectionSpec":
        return cls(
            mode="by_marked",
            include_predecessors=include_predecessors,
            include_successors=include_successors,
            include_intermediates=include_intermediates,
            min_relations=min_relations,
        )


@dataclass(frozen=True)
class ExpansionSpec:
    add_predecessors: bool = False
    add_successors: bool = False
    add_intermediates: bool = False
    min_relations: int = 1

    def __post_init__(self):
        if not (self.add_predecessors or self.add_successors or self.add_intermediates):
            raise ContractError("expansion must add at least one of predecessors/successors/intermediates")
        if self.min_relations < 1:
            raise ContractError("min_relations must be >= 1")


def resolve_selection(view: NetworkView, spec: SelectionSpec) -> set[str]:
    """The publication set a SelectionSpec denotes on this view (pure)."""
    net = view.network
    if spec.mode == "by_period":
        return {
            pid for pid in view.member_ids
            if spec.year_min <= net.publication(pid).year <= spec.year_max
        }
    if spec.mode == "by_group":
        return {pid for pid, g in view.groups.items() if g == spec.group_id}
    marked = set(view.marked)
    if not marked:
        raise PreconditionError("drill-down by marked publications requires at least one marked publication")
    selection = set(marked)
    members = view.member_ids
    if spec.include_predecessors:
        selection |= predecessors(net, marked, spec.min_relations, universe=members)
    if spec.include_successors:
        selection |= successors(net, marked, spec.min_relations, universe=members)
    if spec.include_intermediates:
        selection |= intermediates(net, marked, scope=members)
    return selection


# -- session history --------------------------------------------------------------

@dataclass
class Session:
    """A navigable sequence of immutable NetworkView snapshots.

    Drill-downs and expansions push new views and truncate any forward tail;
    attribute edits replace the current snapshot without a history event.
    Single writer per session.
    """

    network: CitationNetwork
    views: list[NetworkView] = field(default_factory=list)
    cursor: int = 0

    @classmethod
    def from_network(cls, network: CitationNetwork) -> "Session":
        return cls(network=network, views=[network.full_view()], cursor=0)

    @property
    def current(self) -> NetworkView:
        return self.views[self.cursor]

    @property
    def can_back(self) -> bool:
        return self.cursor > 0

    @property
    def can_forward(self) -> bool:
        return self.cursor < len(self.views) - 1

    def push(self, view: NetworkView) -> NetworkView:
        del self.views[self.cursor + 1:]
        self.views.append(view)
        self.cursor += 1
        return view

    def replace_current(self, view: NetworkView) -> NetworkView:
        self.views[self.cursor] = view
        return view


def drill_down(session: Session, selection: SelectionSpec) -> NetworkView:
    """Replace the current network by the resolved selection.

    Marks and selection flags are cleared in the new view; group
    assignments survive.  An empty resolution is refused and leaves the
    history unchanged.
    """
    view = session.current
    members = resolve_selection(view, selection)
    if not members:
        raise PreconditionError("selection resolves to no publications; drill-down refused")
    return session.push(view.with_members(members))


def expand(session: Session, spec: ExpansionSpec) -> NetworkView:
    """Grow the current network with linked outside publications.

    Predecessors/successors qualify against full-network citation counts;
    intermediates, when requested, are computed in the full network over the
    already-enlarged member set.  Expanding the full network is a no-op view.
    """
    view = session.current
    net = session.network
    members = set(view.member_ids)
    grown = set(members)
    if spec.add_predecessors:
        grown |= predecessors(net, members, spec.min_relations)
    if spec.add_successors:
        grown |= successors(net, members, spec.min_relations)
    if spec.add_intermediates:
        grown |= intermediates(net, grown)
    new_view = NetworkView(
        network=net,
        member_ids=frozenset(grown),
        marked=view.marked,
        selected=view.selected,
        groups=dict(view.groups),
    )
    return session.push(new_view)


def history_navigate(session: Session, direction: str) -> NetworkView | None:
    """Move the cursor one step; returns None at a boundary (no-op)."""
    if direction == "back":
        if not session.can_back:
            return None
        session.cursor -= 1
    elif direction == "forward":
        if not session.can_forward:
            return None
        session.cursor += 1
    else:
        raise ContractError(f"unknown direction: {direction!r}")
    return session.current


# -- title search ------------------------------------------------------------------

def title_search(view: NetworkView, pattern: str) -> list[str]:
    """Members whose title matches a case-insensitive wildcard pattern.

    ``*`` matches any run of characters; the pattern must cover the whole
    title, so substring queries are written ``*term*``.  Results follow
    network order.
    """
    rx = wildcard_regex(pattern)
    net = view.network
    members = view.member_ids
    return [p.id for p in net.publications if p.id in members and rx.fullmatch(p.title)]


def wildcard_regex(pattern: str) -> "re.Pattern[str]":
    parts = [re.escape(chunk) for chunk in pattern.split("*")]
    return re.compile(".*".join(parts), re.IGNORECASE | re.DOTALL)
