import cmath
import itertools
import random
from fractions import Fraction
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from inducert.errors import PreconditionError, SearchExhausted, UnsupportedPrime, ZeroMu
from inducert.exactnum import QuadValue, quad_sign
from inducert.ffkernel import (
    ConstKernel,
    F2FormKernel,
    FpKernelSpec,
    SymMatFp,
    build_M,
    congruence_diagonalize,
    cos_2pi_over,
    f2_exponential_sum,
    find_domination_k,
    gauss_term,
    handle_from_json,
    legendre,
    make_uz,
    min_degree_two_classes,
    rank_Fp,
    rank_one_normal_form,
    rank_profile,
    sigma1_set,
    sign_vectors,
    smallest_nonresidue,
    t_f2,
    t_ff,
    t_ff_with_pivots,
    t_grid,
)
from inducert.graphs import Graph, complete_graph, enumerate_H, is_clique, min_degree, parse_graph
from inducert.stepkernel import t_hom

from oracles import f2_brute_sum, rank_mod_p


def as_complex(v: QuadValue) -> float:
    return sum(float(c) * r**0.5 for r, c in v.terms.items())


def test_legendre_against_squares():
    for p in [3, 5, 7, 11, 13]:
        squares = {x * x % p for x in range(1, p)}
        for a in range(1, p):
            assert legendre(a, p) == (1 if a in squares else -1)
        assert legendre(0, p) == 0
        assert legendre(smallest_nonresidue(p), p) == -1
    with pytest.raises(ValueError):
        legendre(1, 2)


@pytest.mark.parametrize("p", [3, 5, 7, 11])
def test_gauss_term_matches_direct_sum(p):
    for mu in range(1, p):
        g = sum(cmath.exp(2j * cmath.pi * mu * x * x / p) for x in range(p)) / p
        for power in range(6):
            re, im = gauss_term(mu, p, power).parts()
            want = g**power
            assert abs(as_complex(re) - want.real) < 1e-12
            assert abs(as_complex(im) - want.imag) < 1e-12
    with pytest.raises(ZeroMu):
        gauss_term(p, p, 1)


def test_cosines_exact():
    for p in [3, 5]:
        for r in range(p):
            assert abs(as_complex(cos_2pi_over(r, p)) - cmath.cos(2 * cmath.pi * r / p).real) < 1e-12


def test_build_M_example():
    M = build_M(parse_graph("K3"), (1, -1, 1), 5)
    # edges (0,1), (0,2), (1,2); diagonal holds signed degrees
    assert M.entries == ((0, 1, 4), (1, 2, 1), (4, 1, 0))
    with pytest.raises(ValueError):
        build_M(parse_graph("K3"), (1, 1), 5)


@st.composite
def sym_mats(draw):
    p = draw(st.sampled_from([3, 5, 7]))
    n = draw(st.integers(1, 6))
    a = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            a[i][j] = a[j][i] = draw(st.integers(0, p - 1))
    return SymMatFp(p, a)


@settings(max_examples=150, deadline=None)
@given(sym_mats(), st.randoms())
def test_diagonalization_verifies_and_rank_matches(M, rnd):
    res = congruence_diagonalize(M)  # re-verifies C^T M C = D internally
    assert res.rank == rank_mod_p(M.entries, M.p) == rank_Fp(M)
    order = list(range(M.order))
    rnd.shuffle(order)
    res2 = congruence_diagonalize(M, order)
    assert res2.rank == res.rank
    # the discriminant class is a congruence invariant
    chi = lambda r: np.prod([legendre(d, M.p) for d in r.nonzero]) if r.rank else 1
    assert chi(res) == chi(res2)


def test_diagonalization_zero_diagonal():
    M = SymMatFp(3, [[0, 1], [1, 0]])
    res = congruence_diagonalize(M)
    assert res.rank == 2
    assert legendre(-res.D[0] * res.D[1], 3) == 1  # hyperbolic plane


def test_rank_one_normal_form():
    M = SymMatFp(7, [[2, 4, 6], [4, 1, 5], [6, 5, 4]])  # 2 * (1,2,3)(1,2,3)^T mod 7
    a, w = rank_one_normal_form(M)
    assert (a, w) == (2, (1, 2, 3))
    with pytest.raises(ValueError):
        rank_one_normal_form(SymMatFp(7, [[1, 0], [0, 1]]))


def test_sigma1_set_examples():
    # K5 over F_3: the constant sign vectors give M = +-J
    s1 = sigma1_set(complete_graph(5), 3)
    assert (1,) * 10 in s1 and (-1,) * 10 in s1
    for s in [(1,) * 10, (-1,) * 10]:
        a, w = rank_one_normal_form(build_M(complete_graph(5), s, 3))
        assert a in (1, 2) and w == (1,) * 5
    assert sigma1_set(parse_graph("C4"), 3) == []


@pytest.mark.parametrize("p", [3, 5, 7])
def test_rank_at_least_two_up_to_five_vertices(p):
    for H in enumerate_H(5):
        g = H.graph
        if min_degree(g) < 2 or is_clique(g):
            continue
        assert all(rk >= 2 for rk, _ in rank_profile(g, p)), g


def test_non_clique_bound_small_levels():
    spec = FpKernelSpec(5, 3, 2, 2)
    for k in (2, 6):
        u = spec.at_level(k)
        for H in min_degree_two_classes(5):
            if is_clique(H.graph):
                continue
            assert abs(t_ff(H, u)) <= QuadValue(Fraction(1, 3**k))


@pytest.mark.parametrize("k", [1, 2])
def test_t_ff_equals_grid_on_four_vertices(k):
    spec = FpKernelSpec(5, 3, k, 2)
    for H in min_degree_two_classes(4):
        assert t_ff(H, spec) == QuadValue(t_grid(H, spec))


def test_t_ff_pivot_order_invariance():
    spec = FpKernelSpec(7, 5, 1, 2)
    rng = random.Random(3)
    for H in min_degree_two_classes(4):
        order = list(range(H.graph.order))
        rng.shuffle(order)
        assert t_ff_with_pivots(H, spec, order) == t_ff(H, spec)


def test_t_ff_p5_against_float_grid():
    spec = FpKernelSpec(7, 5, 1, 2)
    vals = np.array([[float(as_complex(spec.exact_value(i, j))) for j in range(5)] for i in range(5)])
    for H in min_degree_two_classes(4):
        g = H.graph
        tot = 0.0
        for lab in itertools.product(range(5), repeat=g.order):
            tot += np.prod([vals[lab[a], lab[b]] for a, b in g.edges])
        assert abs(tot / 5**g.order - as_complex(t_ff(H, spec))) < 1e-12


def test_spec_validation_and_float_values():
    with pytest.raises(ValueError):
        FpKernelSpec(5, 3, 1, 1)  # 1 is a square
    with pytest.raises(ValueError):
        FpKernelSpec(6, 3, 1, 2)  # 3 does not divide 4
    with pytest.raises(ValueError):
        FpKernelSpec(5, 4, 1, 2)
    with pytest.raises(UnsupportedPrime):
        t_grid(parse_graph("K3"), FpKernelSpec(7, 5, 1, 2))
    spec = FpKernelSpec(7, 5, 2, 2)
    bi = np.arange(25).repeat(25)
    bj = np.tile(np.arange(25), 25)
    got = spec.float_values(bi, bj)
    want = [as_complex(spec.exact_value(int(i), int(j))) for i, j in zip(bi, bj)]
    assert np.allclose(got, want, atol=1e-12)
    with pytest.raises(PreconditionError):
        t_ff(Graph(3, [(0, 1)]), FpKernelSpec(5, 3, 1, 2))


@st.composite
def f2_forms(draw):
    n = draw(st.integers(1, 8))
    pairs = [pr for pr in itertools.combinations(range(n), 2) if draw(st.booleans())]
    lin = [i for i in range(n) if draw(st.booleans())]
    return n, pairs, lin, draw(st.integers(0, 1))


@settings(max_examples=200, deadline=None)
@given(f2_forms())
def test_f2_exponential_sum_matches_brute_force(form):
    n, pairs, lin, const = form
    adj = [0] * n
    for i, j in pairs:
        adj[i] |= 1 << j
        adj[j] |= 1 << i
    lin_mask = sum(1 << i for i in lin)
    assert f2_exponential_sum(const, lin_mask, adj, n) == f2_brute_sum(n, pairs, lin, const)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 2).flatmap(lambda k: st.tuples(st.just(k), st.lists(st.integers(0, 1), min_size=k * (k + 1) // 2, max_size=k * (k + 1) // 2))))
def test_t_f2_matches_grid(kq):
    k, q = kq
    ker = F2FormKernel(k, tuple(q))
    step = ker.as_step_kernel()
    for H in min_degree_two_classes(4) + [parse_graph("P2")]:
        assert t_f2(H, ker) == t_hom(H, step)


def test_make_uz_choices():
    assert make_uz(3) == ConstKernel(Fraction(1, 2))
    assert make_uz(3).hom_density(complete_graph(3)) == QuadValue(Fraction(-1, 8))
    u4 = make_uz(4)
    assert isinstance(u4, F2FormKernel) and (u4.k, u4.q) == (2, (1, 1, 1))
    assert t_f2(complete_graph(4), u4) == Fraction(-1, 2)
    for H in min_degree_two_classes(4):
        if not is_clique(H.graph):
            assert t_f2(H, u4) == Fraction(1, 4)
    assert make_uz(5) == FpKernelSpec(5, 3, 2, 2)
    assert make_uz(7) == FpKernelSpec(7, 5, 1, 2)
    with pytest.raises(PreconditionError):
        make_uz(2)


def test_find_domination_small_cases():
    res = find_domination_k(4, min_degree_two_classes(4), make_uz(4))
    assert res.k == 2 and res.t_table
    with pytest.raises(SearchExhausted):
        find_domination_k(5, min_degree_two_classes(5), make_uz(5), k_cap=6)
    with pytest.raises(PreconditionError):
        find_domination_k(4, [parse_graph("C4")], make_uz(4))


def test_handle_json_round_trip():
    for h in [ConstKernel(Fraction(1, 2)), F2FormKernel(2, (1, 1, 1)), FpKernelSpec(5, 3, 10, 2)]:
        assert handle_from_json(h.to_json()) == h
    with pytest.raises(ValueError):
        handle_from_json({"kind": "nope"})
