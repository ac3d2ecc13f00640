import itertools
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rcsim.graph import (
    ACQ_TIMING, GENERIC, Graph, GraphError, check_assumption, common_neighbors,
    dumps_edgelist, gen_clique_core, gen_complete, gen_fig1, generate, loads_edgelist,
)

# adjacency of the benchmark figure, transcribed label by label
FIG1_HAND = {
    "A": set("BDEFGH"),
    "B": set("ADFGH"),
    "D": set("ABEFGH"),
    "E": set("ADFGH"),
    "F": set("ABDEGH"),
    "G": set("ABDEFH"),
    "H": set("ABDEFG"),
}
RED = {("A", "D"), ("A", "E"), ("B", "D")}
LABELS = "ABDEFGH"


def hand_matrix(reduced=False):
    a = np.zeros((7, 7), dtype=int)
    for u, nbrs in FIG1_HAND.items():
        for v in nbrs:
            if reduced and (tuple(sorted((u, v))) in RED):
                continue
            a[LABELS.index(u), LABELS.index(v)] = 1
    return a


def adjacency_matrix(g):
    a = np.zeros((g.n, g.n), dtype=int)
    for i, j in g.edges():
        a[i, j] = a[j, i] = 1
    return a


def pair_counts(g):
    # (A^2)_ij counts paths of length two, i.e. shared neighbors
    a = adjacency_matrix(g)
    return a @ a


def test_fig1_matches_hand_enumeration():
    for reduced in (False, True):
        g = gen_fig1(reduced)
        assert (adjacency_matrix(g) == hand_matrix(reduced)).all()


def test_fig1_counts():
    full, red = gen_fig1(), gen_fig1(reduced=True)
    assert full.edge_count == 20
    assert red.edge_count == 17
    assert full.degree(0) == 6 and full.degree(1) == 5
    assert full.degree(5) == red.degree(5) == 6
    assert full.labels[5] == "G"


def test_common_neighbors_fig1_a_b():
    g = gen_fig1()
    got = common_neighbors(g, 0, 1)
    assert {g.labels[i] for i in got} == {"D", "F", "G", "H"}
    assert len(got) == pair_counts(g)[0, 1] == 4


def test_common_neighbors_complete_and_disjoint():
    k5 = gen_complete(5)
    for i, j in itertools.combinations(range(5), 2):
        assert common_neighbors(k5, i, j) == set(range(5)) - {i, j}
    path = Graph(4, [(0, 1), (2, 3)])
    assert common_neighbors(path, 0, 2) == set()
    assert common_neighbors(gen_complete(3), 0, 1) == {2}


def test_common_neighbors_errors():
    g = gen_complete(3)
    with pytest.raises(GraphError):
        common_neighbors(g, 0, 5)
    with pytest.raises(GraphError):
        common_neighbors(g, 1, 1)


def brute_min_common(g, nodes=None):
    counts = pair_counts(g)
    nodes = range(g.n) if nodes is None else sorted(nodes)
    return min(counts[i, j] for i, j in itertools.combinations(nodes, 2))


def test_check_assumption_fig1():
    full, red = gen_fig1(), gen_fig1(reduced=True)
    r = check_assumption(full, 1, GENERIC)
    assert r.satisfied and r.threshold == 4 and r.min_common == brute_min_common(full) == 4
    r = check_assumption(red, 1, ACQ_TIMING)
    assert r.satisfied and r.threshold == 3 and r.min_common == brute_min_common(red) == 3
    r = check_assumption(red, 1, GENERIC)
    assert not r.satisfied
    assert all(c == 3 for _, _, c in r.violating_pairs)


def test_check_assumption_subset_and_f0():
    g = Graph(4, [(0, 1), (1, 2), (2, 3)])
    r = check_assumption(g, 0)
    assert r.threshold == 1
    assert r.satisfied == (brute_min_common(g) >= 1)
    assert not r.satisfied
    sub = check_assumption(g, 0, nodes=[0, 2])
    assert sub.satisfied and sub.min_common == 1


def test_report_invariant():
    for F in range(4):
        r = check_assumption(gen_fig1(), F)
        assert r.satisfied == (not r.violating_pairs) == (r.min_common >= r.threshold)


@pytest.mark.parametrize("lam,k", [(4, 2), (1, 0), (3, 5), (7, 20)])
def test_clique_core_construction(lam, k):
    g = gen_clique_core(lam, k)
    assert g.n == lam + k + 1
    assert g.edge_count == comb(lam + 1, 2) + k * (lam + 1)


def test_clique_core_smallest_is_k2():
    assert gen_clique_core(1, 0) == gen_complete(2)


@pytest.mark.parametrize("lam", range(1, 7))
@pytest.mark.parametrize("k", range(1, 11))
def test_clique_core_threshold_sweep(lam, k):
    g = gen_clique_core(lam, k)
    assert check_assumption(g, 0, threshold=lam).satisfied
    assert brute_min_common(g) == lam


@pytest.mark.parametrize("lam", range(1, 7))
def test_clique_core_without_extra_nodes_is_one_short(lam):
    # a bare clique on lam+1 nodes: each pair shares the other lam-1 nodes
    g = gen_clique_core(lam, 0)
    report = check_assumption(g, 0, threshold=lam)
    assert report.min_common == brute_min_common(g) == lam - 1
    assert not report.satisfied


def test_gen_complete():
    assert gen_complete(1).edge_count == 0
    assert gen_complete(5).edge_count == 10
    with pytest.raises(GraphError):
        gen_complete(0)


random_graphs = st.integers(2, 10).flatmap(
    lambda n: st.tuples(
        st.just(n),
        st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda e: e[0] != e[1]),
                 max_size=30),
    )
)


@given(random_graphs)
def test_symmetry_and_no_self_loops(spec):
    n, edges = spec
    g = Graph(n, edges)
    for i in range(n):
        assert i not in g.adjacency[i]
        for j in g.adjacency[i]:
            assert i in g.adjacency[j]


@given(random_graphs, st.integers(0, 3))
def test_check_assumption_monotone_in_f(spec, F):
    g = Graph(*spec)
    if not check_assumption(g, F + 1).satisfied:
        return
    assert check_assumption(g, F).satisfied


@settings(max_examples=50)
@given(st.integers(1, 6), st.integers(0, 10))
def test_generated_graphs_are_simple(lam, k):
    for g in (gen_clique_core(lam, k), gen_complete(lam + 1)):
        a = adjacency_matrix(g)
        assert (a == a.T).all() and a.trace() == 0


def test_connectivity_flag():
    assert gen_fig1().connected
    assert not Graph(4, [(0, 1), (2, 3)]).connected
    assert Graph(1, []).connected


def test_edgelist_roundtrip():
    g = gen_clique_core(4, 2)
    text = dumps_edgelist(g)
    assert text.splitlines()[0] == "n 7"
    assert len(text.splitlines()) == 21
    assert loads_edgelist(text) == g


@pytest.mark.parametrize("text", ["", "0 1\n", "n 3\n0 5\n", "n 3\n1 1\n", "n 3\n0 x\n", "n 2\n0 1 2\n"])
def test_edgelist_rejects_bad_input(text):
    with pytest.raises(GraphError):
        loads_edgelist(text)


def test_generate_by_name():
    assert generate("clique_core", **{"lambda": "4", "k": "2"}).edge_count == 20
    assert generate("complete", n="3").edge_count == 3
    assert generate("fig1").edge_count == 20
    assert generate("fig1_reduced").edge_count == 17
    with pytest.raises(GraphError):
        generate("petersen")
    with pytest.raises(GraphError):
        generate("clique_core", k=2)
