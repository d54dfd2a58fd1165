import random

import pytest

from citnet.dagops import break_cycles, transitive_reduction
from citnet.errors import ContractError
from citnet.model import build_network

from conftest import (make_network, make_pubs, oracle_is_acyclic,
                      oracle_transitive_reduction, random_dag_edges)


# -- break_cycles ------------------------------------------------------------------

def test_mutual_pair_keeps_first_in_order():
    kept, removed = break_cycles([("A", "B"), ("B", "A")], ["A", "B"])
    assert kept == [("A", "B")]
    assert removed == [("B", "A")]


def test_mutual_pair_order_reversed():
    kept, removed = break_cycles([("A", "B"), ("B", "A")], ["B", "A"])
    assert kept == [("B", "A")]


def test_acyclic_input_is_fixed_point():
    edges = [("C", "B"), ("B", "A"), ("C", "A")]
    kept, removed = break_cycles(edges, ["A", "B", "C"])
    assert kept == edges
    assert removed == []


def test_three_cycle_single_removal():
    edges = [("A", "B"), ("B", "C"), ("C", "A")]
    kept, removed = break_cycles(edges, ["A", "B", "C"])
    assert len(removed) == 1
    assert oracle_is_acyclic(["A", "B", "C"], kept)
    # oracle: removing any single edge of a 3-cycle leaves an acyclic graph,
    # so exactly one removal is both sufficient and minimal
    for e in edges:
        assert oracle_is_acyclic(["A", "B", "C"], [x for x in edges if x != e])


def test_removed_edges_cannot_be_readded():
    rng = random.Random(3)
    ids = [f"p{i}" for i in range(12)]
    edges = [(ids[rng.randrange(12)], ids[rng.randrange(12)]) for _ in range(40)]
    edges = [(a, b) for a, b in edges if a != b]
    kept, removed = break_cycles(edges, ids)
    assert oracle_is_acyclic(ids, kept)
    for e in removed:
        assert not oracle_is_acyclic(ids, kept + [e])


def test_break_cycles_is_deterministic():
    rng = random.Random(9)
    ids = [f"p{i}" for i in range(15)]
    edges = list({(ids[rng.randrange(15)], ids[rng.randrange(15)]) for _ in range(60)})
    edges = [(a, b) for a, b in edges if a != b]
    assert break_cycles(edges, ids) == break_cycles(edges, ids)


# -- transitive reduction -------------------------------------------------------------

def triangle():
    return make_network({"A": 2002, "B": 2001, "C": 2000},
                        [("A", "B"), ("B", "C"), ("A", "C")])


def test_triangle_reduction():
    subset = transitive_reduction(triangle())
    assert set(subset.essential) == {("A", "B"), ("B", "C")}
    assert subset.non_essential == [("A", "C")]


def test_chain_all_essential():
    net = make_network({"A": 2002, "B": 2001, "C": 2000}, [("A", "B"), ("B", "C")])
    subset = transitive_reduction(net)
    assert set(subset.essential) == {("A", "B"), ("B", "C")}
    assert subset.non_essential == []


def test_cyclic_input_rejected():
    # hand-build a subnet bypassing build_network's repair
    import numpy as np

    from citnet.model import Subnet
    net = make_network({"A": 2000, "B": 2000}, [])
    sub = Subnet(network=net, node_ids=("A", "B"), years=np.array([2000, 2000]),
                 citing=np.array([0, 1], dtype=np.int32), cited=np.array([1, 0], dtype=np.int32))
    with pytest.raises(ContractError, match="acyclic"):
        transitive_reduction(sub)


@pytest.mark.parametrize("method", ["bitset", "search"])
@pytest.mark.parametrize("seed,density", [(0, 0.05), (1, 0.15), (2, 0.3)])
def test_random_dags_match_oracle(method, seed, density):
    years, edges = random_dag_edges(60, density, random.Random(seed))
    net = build_network(make_pubs(years), edges).network
    subset = transitive_reduction(net, method=method)
    assert set(subset.essential) == oracle_transitive_reduction(net.edge_list())


def test_methods_agree():
    # the transitive reduction of a DAG is unique
    for seed in range(6):
        years, edges = random_dag_edges(80, 0.1 + 0.03 * seed, random.Random(seed))
        net = build_network(make_pubs(years), edges).network
        a = transitive_reduction(net, method="bitset")
        b = transitive_reduction(net, method="search")
        assert set(a.essential) == set(b.essential)


def test_reachability_preserved():
    from conftest import oracle_reachable
    years, edges = random_dag_edges(50, 0.2, random.Random(21))
    net = build_network(make_pubs(years), edges).network
    subset = transitive_reduction(net)
    full = net.edge_list()
    for pid in list(years)[:20]:
        assert oracle_reachable(subset.essential, pid) == oracle_reachable(full, pid)


def test_idempotent():
    years, edges = random_dag_edges(40, 0.25, random.Random(33))
    net = build_network(make_pubs(years), edges).network
    once = transitive_reduction(net)
    reduced_net = build_network(make_pubs(years), once.essential).network
    twice = transitive_reduction(reduced_net)
    assert set(twice.essential) == set(once.essential)
    assert twice.non_essential == []


def test_edge_subset_partitions_edges():
    years, edges = random_dag_edges(30, 0.3, random.Random(44))
    net = build_network(make_pubs(years), edges).network
    subset = transitive_reduction(net)
    assert len(subset.essential) + len(subset.non_essential) == net.n_edges
    assert set(subset.essential) | set(subset.non_essential) == set(net.edge_list())
    assert not (set(subset.essential) & set(subset.non_essential))
