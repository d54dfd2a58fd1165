"""Shared fixtures and independent oracle implementations.

The oracles here deliberately avoid the package's graph machinery: plain
dicts, sets and recursion over edge lists, so they can disagree with the
implementation under test.
"""

from __future__ import annotations

import random

import pytest

from citnet.model import Publication, build_network


def make_pubs(years: dict[str, int], **overrides) -> list[Publication]:
    return [
        Publication(
            id=pid,
            first_author=f"Author{pid} X",
            title=f"Title of {pid}",
            source="SRC",
            year=year,
            **overrides,
        )
        for pid, year in years.items()
    ]


def make_network(years: dict[str, int], edges: list[tuple[str, str]]):
    return build_network(make_pubs(years), edges).network


def random_dag_edges(n: int, density: float, rng: random.Random) -> tuple[dict[str, int], list[tuple[str, str]]]:
    """Random DAG over n nodes: newer nodes cite older ones."""
    years = {f"v{i:03d}": 1990 + i // 3 for i in range(n)}
    ids = sorted(years)
    edges = []
    for i in range(n):
        for j in range(i):
            if rng.random() < density:
                edges.append((ids[i], ids[j]))
    return years, edges


# -- reachability / transitive reduction oracles -----------------------------------

def oracle_reachable(edges: list[tuple[str, str]], src: str) -> set[str]:
    adj: dict[str, list[str]] = {}
    for a, b in edges:
        adj.setdefault(a, []).append(b)
    seen: set[str] = set()
    stack = [src]
    while stack:
        u = stack.pop()
        for v in adj.get(u, []):
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return seen


def oracle_transitive_reduction(edges: list[tuple[str, str]]) -> set[tuple[str, str]]:
    """Keep (a, b) iff removing it breaks a => b."""
    essential = set()
    edge_set = list(edges)
    for e in edge_set:
        rest = [x for x in edge_set if x != e]
        if e[1] not in oracle_reachable(rest, e[0]):
            essential.add(e)
    return essential


def oracle_is_acyclic(nodes: list[str], edges: list[tuple[str, str]]) -> bool:
    adj: dict[str, list[str]] = {}
    indeg = {v: 0 for v in nodes}
    for a, b in edges:
        adj.setdefault(a, []).append(b)
        indeg[b] += 1
    queue = [v for v in nodes if indeg[v] == 0]
    done = 0
    while queue:
        u = queue.pop()
        done += 1
        for v in adj.get(u, []):
            indeg[v] -= 1
            if indeg[v] == 0:
                queue.append(v)
    return done == len(nodes)


# -- clustering oracles ---------------------------------------------------------------

def oracle_quality(n: int, edges: list[tuple[int, int]], labels: list[int], gamma: float) -> float:
    """Literal double-sum evaluation of the clustering quality function."""
    outdeg = [0] * n
    for a, _ in edges:
        outdeg[a] += 1
    a_mat = [[0.0] * n for _ in range(n)]
    for a, b in edges:
        a_mat[a][b] = 1.0 / outdeg[a]
    q = 0.0
    for i in range(n):
        for j in range(n):
            if labels[i] == labels[j]:
                q += a_mat[i][j] - gamma / (2 * n)
    return q


def all_partitions(items: list[int]):
    """Every set partition (restricted growth strings)."""
    n = len(items)
    if n == 0:
        yield []
        return
    labels = [0] * n

    def rec(i: int, maxl: int):
        if i == n:
            yield list(labels)
            return
        for lab in range(maxl + 2):
            labels[i] = lab
            yield from rec(i + 1, max(maxl, lab))

    yield from rec(1, 0)


def oracle_best_partition(n: int, edges: list[tuple[int, int]], gamma: float) -> float:
    best = float("-inf")
    for labels in all_partitions(list(range(n))):
        best = max(best, oracle_quality(n, edges, labels, gamma))
    return best


# -- k-core oracle ---------------------------------------------------------------------

def oracle_kcore(nodes: list[str], edges: list[tuple[str, str]], k: int) -> set[str]:
    alive = set(nodes)
    while True:
        deg = {v: 0 for v in alive}
        for a, b in edges:
            if a in alive and b in alive:
                deg[a] += 1
                deg[b] += 1
        drop = {v for v in alive if deg[v] < k}
        if not drop:
            return alive
        alive -= drop


# -- path enumeration oracle --------------------------------------------------------------

def oracle_all_paths(edges: list[tuple[str, str]], src: str, dst: str, limit: int = 200000):
    adj: dict[str, list[str]] = {}
    for a, b in edges:
        adj.setdefault(a, []).append(b)
    paths: list[tuple[str, ...]] = []

    def rec(u: str, trail: list[str]):
        if len(paths) >= limit:
            raise RuntimeError("oracle path explosion")
        if u == dst:
            paths.append(tuple(trail))
            return
        for v in adj.get(u, []):
            if v not in trail:
                trail.append(v)
                rec(v, trail)
                trail.pop()

    rec(src, [src])
    return paths


# -- union-find oracle ------------------------------------------------------------------

def oracle_components(nodes: list[str], edges: list[tuple[str, str]]) -> dict[str, frozenset[str]]:
    parent = {v: v for v in nodes}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    groups: dict[str, set[str]] = {}
    for v in nodes:
        groups.setdefault(find(v), set()).add(v)
    return {v: frozenset(groups[find(v)]) for v in nodes}


@pytest.fixture
def rng():
    return random.Random(12345)
