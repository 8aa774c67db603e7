import itertools
import random

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from inducert.errors import MalformedGraph6, PreconditionError, TooLarge
from inducert.graphs import (
    NAMED_GRAPHS,
    Graph,
    canonical_form,
    canonical_H,
    complement,
    count_nj,
    enumerate_H,
    is_isomorphic,
    min_degree,
    parse_graph,
    parse_graph6,
    to_graph6,
)

from oracles import brute_nj, nx_graph


def random_graph(draw_edges, n):
    return Graph(n, [pr for pr, keep in zip(itertools.combinations(range(n), 2), draw_edges) if keep])


graphs = st.integers(1, 7).flatmap(
    lambda n: st.lists(st.booleans(), min_size=n * (n - 1) // 2, max_size=n * (n - 1) // 2).map(
        lambda bits: random_graph(bits, n)
    )
)


@pytest.mark.parametrize("m,count", [(3, 3), (4, 10), (5, 33), (6, 155)])
def test_enumerate_counts(m, count):
    assert len(enumerate_H(m)) == count


def test_enumerate_matches_networkx_atlas():
    # every graph without isolated vertices on 2..5 vertices, up to isomorphism
    atlas = [g for g in nx.graph_atlas_g() if 2 <= g.number_of_nodes() <= 5 and min(dict(g.degree()).values(), default=0) > 0]
    ours = enumerate_H(5)
    assert len(ours) == len(atlas)
    for g in atlas:
        H = canonical_H(Graph(g.number_of_nodes(), g.edges()))
        assert H in ours


def test_enumerate_bounds():
    with pytest.raises(PreconditionError):
        enumerate_H(2)
    with pytest.raises(TooLarge):
        enumerate_H(10)


@settings(max_examples=80, deadline=None)
@given(graphs, st.randoms())
def test_canonical_form_is_relabel_invariant(g, rnd):
    perm = list(range(g.order))
    rnd.shuffle(perm)
    assert canonical_form(g) == canonical_form(g.relabel(perm))


@settings(max_examples=60, deadline=None)
@given(graphs, graphs)
def test_isomorphism_matches_networkx(g, h):
    if g.order != h.order:
        return
    assert is_isomorphic(g, h) == nx.is_isomorphic(nx_graph(g.edges, g.order), nx_graph(h.edges, h.order))


def test_count_nj_examples():
    assert count_nj(parse_graph("K3"), parse_graph("path3+v")) == [0, 2, 5, 3]
    assert count_nj(parse_graph("P2"), parse_graph("C5")) == [5, 20, 5]
    assert count_nj(parse_graph("K3"), parse_graph("K3")) == [1, 0, 0, 0]


def test_count_nj_c4_in_c5_is_0_5_5_5_0():
    # 15 four-cycles live in K5; the 4-cycle 0-1-3-2 on {0,1,2,3} uses exactly
    # two non-edges of the pentagon 0-1-2-3-4
    c5 = parse_graph("C5")
    assert count_nj(parse_graph("C4"), c5) == [0, 5, 5, 5, 0]
    assert count_nj(parse_graph("C4"), c5) == brute_nj(parse_graph("C4").edges, c5.edges, 5)


@pytest.mark.parametrize("Fname", ["C5", "path3+v", "K4", "paw", "P3"])
def test_count_nj_matches_subset_enumeration(Fname):
    F = parse_graph(Fname)
    m = F.order
    if m < 3:
        pytest.skip("too small")
    for H in enumerate_H(m):
        nj = count_nj(H.graph, F)
        assert nj == brute_nj(H.graph.edges, F.edges, m)


@settings(max_examples=40, deadline=None)
@given(graphs)
def test_count_nj_sums_to_copy_count(F):
    if F.order < 3:
        return
    for H in enumerate_H(F.order)[:6]:
        nj = count_nj(H.graph, F)
        # complement swaps edges and non-edges
        assert count_nj(H.graph, complement(F)) == nj[::-1]


@settings(max_examples=100, deadline=None)
@given(graphs)
def test_graph6_round_trip_and_networkx(g):
    s = to_graph6(g)
    back = parse_graph6(s)
    assert back == g
    ref = nx.to_graph6_bytes(nx_graph(g.edges, g.order), header=False).decode().strip()
    assert s == ref


def test_graph6_examples_and_errors():
    assert to_graph6(Graph(1)) == "@"
    assert to_graph6(parse_graph("C5")) == "Dhc"
    assert is_isomorphic(parse_graph6("Dhc"), complement(parse_graph("C5")))
    for bad in ["", "D", "Dh", "Dhcc", "D\x7f\x7f", "~"]:
        with pytest.raises(MalformedGraph6):
            parse_graph6(bad)


def test_named_graphs():
    assert parse_graph("path3+v").order == 5 and parse_graph("path3+v").num_edges == 3
    assert min_degree(parse_graph("C5")) == 2
    assert set(NAMED_GRAPHS) >= {"K3", "C4", "C5", "P2", "path3+v"}
