#!/usr/bin/env python3
"""Replay the search-and-expand literature walk on the bundled fixture.

Title search, drill into the hits, keep the largest connected component,
expand with well-cited predecessors, remove the off-topic ones, expand
with successors, and compare every membership count against the fixture
manifest.
"""

import sys

from citnet.analytics import largest_component_members
from citnet.explore import ExpansionSpec, Session, expand, title_search
from citnet.model import build_network
from citnet.synth import workflow_corpus


def main() -> int:
    corpus = workflow_corpus()
    net = build_network(corpus.publications, corpus.edges).network
    session = Session.from_network(net)
    expected = [step["expected_members"] for step in corpus.manifest["steps"]]
    got = []

    hits = title_search(session.current, corpus.search_pattern)
    session.push(session.current.with_members(hits))
    got.append(session.current.member_count)
    print(f"search {corpus.search_pattern!r:28} -> {got[-1]:4d} publications")

    session.push(session.current.with_members(largest_component_members(session.current)))
    got.append(session.current.member_count)
    print(f"largest connected component      -> {got[-1]:4d} publications")

    expand(session, ExpansionSpec(add_predecessors=True, min_relations=10))
    got.append(session.current.member_count)
    print(f"expand predecessors (min 10)     -> {got[-1]:4d} publications")

    session.push(session.current.with_members(
        set(session.current.member_ids) - set(corpus.manifest["removal_ids"])))
    got.append(session.current.member_count)
    print(f"remove {len(corpus.manifest['removal_ids'])} off-topic publications   -> {got[-1]:4d} publications")

    expand(session, ExpansionSpec(add_successors=True, min_relations=4))
    got.append(session.current.member_count)
    print(f"expand successors (min 4)        -> {got[-1]:4d} publications")

    if got == expected:
        print(f"all step counts match the manifest: {expected}")
        return 0
    print(f"MISMATCH: got {got}, manifest says {expected}")
    return 1


if __name__ == "__main__":
    sys.exit(main())
