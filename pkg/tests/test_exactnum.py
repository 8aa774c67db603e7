from fractions import Fraction

import mpmath
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from inducert.errors import RadicandOverflow
from inducert.exactnum import (
    PolyP,
    QuadValue,
    format_rational,
    isolate_real_roots,
    parse_rational,
    quad_sign,
    rational_roots,
    rational_upper_bound,
    squarefree_decomposition,
    sturm_count,
)

mpmath.mp.dps = 60

small_fracs = st.fractions(min_value=-20, max_value=20, max_denominator=30)
polys = st.lists(st.integers(-9, 9), min_size=1, max_size=7).map(PolyP)


def to_sympy(f: PolyP):
    x = sympy.Symbol("x")
    return sum(sympy.Rational(c.numerator, c.denominator) * x**i for i, c in enumerate(f.coeffs)), x


def test_parse_and_format():
    assert parse_rational("3/6") == Fraction(1, 2)
    assert parse_rational("-7") == -7
    assert format_rational(Fraction(-5, 128)) == "-5/128"
    assert format_rational(Fraction(4)) == "4"
    for bad in ["0.5", "1e3", "1/0", "", "a/b"]:
        with pytest.raises((ValueError, ZeroDivisionError)):
            parse_rational(bad)


def test_poly_basic_ops():
    x = PolyP.x()
    f = (x - 1) * (x - Fraction(2, 5)) * (x - Fraction(1, 2))
    assert f(Fraction(2, 5)) == 0
    q, r = f.divmod(x - 1)
    assert r.is_zero() and q(0) == Fraction(1, 5)
    assert (f.derivative())(0) == Fraction(2, 10) + Fraction(1, 2) + Fraction(2, 5)
    assert PolyP([1, 2, 0, 0]).degree == 1
    assert PolyP.from_json(f.to_json()) == f


@settings(max_examples=60, deadline=None)
@given(polys, polys)
def test_poly_arith_matches_sympy(a, b):
    sa, x = to_sympy(a)
    sb, _ = to_sympy(b)
    for got, want in [(a + b, sa + sb), (a - b, sa - sb), (a * b, sa * sb)]:
        assert sympy.expand(to_sympy(got)[0] - want) == 0
    if not b.is_zero():
        q, r = a.divmod(b)
        assert q * b + r == a
        assert r.is_zero() or r.degree < b.degree


@settings(max_examples=60, deadline=None)
@given(polys)
def test_sturm_count_matches_sympy(f):
    if f.is_zero() or f.degree == 0:
        return
    sf, x = to_sympy(f)
    distinct = {r for r in sympy.Poly(sf, x).real_roots() if 0 < r <= 1}
    assert sturm_count(f, 0, 1) == len(distinct)


def test_isolation_of_example_cubic():
    f = PolyP([0, -2, 9, -10])  # -p(5p-2)(2p-1)
    roots = isolate_real_roots(f, 0, 1)
    assert [(r.lo, r.hi) for r in roots] == [(Fraction(2, 5), Fraction(2, 5)), (Fraction(1, 2), Fraction(1, 2))]
    assert all(r.is_exact for r in roots)


def test_isolation_irrational_and_multiplicity():
    x = PolyP.x()
    f = (x * x - Fraction(1, 2)) * (x - Fraction(1, 3)) ** 2
    roots = isolate_real_roots(f, 0, 1)
    assert len(roots) == 2
    exact = [r for r in roots if r.is_exact][0]
    assert exact.lo == Fraction(1, 3) and exact.multiplicity == 2
    irr = [r for r in roots if not r.is_exact][0].refine(Fraction(1, 10**9))
    assert irr.lo**2 < Fraction(1, 2) < irr.hi**2
    assert irr.hi - irr.lo <= Fraction(1, 10**9)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.fractions(min_value=0, max_value=1, max_denominator=12), min_size=1, max_size=4))
def test_isolation_finds_planted_roots(rs):
    x = PolyP.x()
    f = PolyP([1])
    for r in rs:
        f = f * (x - r)
    found = isolate_real_roots(f, 0, 1)
    planted = sorted({r for r in rs if 0 < r < 1})
    assert sorted(r.lo for r in found if r.is_exact) == planted
    assert rational_roots(f) == sorted(set(rs)) or set(rational_roots(f)) == set(rs)


def test_squarefree_decomposition():
    x = PolyP.x()
    f = (x - 1) ** 3 * (x + 2)
    parts = dict((m, p) for p, m in squarefree_decomposition(f))
    assert parts[3] == (x - 1).monic() and parts[1] == (x + 2).monic()


def test_quadvalue_arithmetic_examples():
    s2, s3 = QuadValue.sqrt(2), QuadValue.sqrt(3)
    assert s2 * s2 == 2
    assert (s2 + s3) * (s2 - s3) == -1
    assert QuadValue.sqrt(12) == 2 * s3
    assert QuadValue.sqrt(8) * QuadValue.sqrt(6) == 4 * s3
    assert (1 + s2).inverse() == s2 - 1
    assert (s2 + s3) ** 2 == 5 + 2 * QuadValue.sqrt(6)
    assert QuadValue.from_json((s2 * Fraction(3, 7) + s3).to_json()) == s2 * Fraction(3, 7) + s3
    with pytest.raises(RadicandOverflow):
        _ = s2 + s3 + QuadValue.sqrt(5)


quads = st.builds(
    lambda a, b, c, d: QuadValue(a) + QuadValue.sqrt(2, b) + QuadValue.sqrt(3, c) + QuadValue.sqrt(6, d),
    small_fracs, small_fracs, small_fracs, small_fracs,
)


def mp_value(v: QuadValue):
    return sum(mpmath.mpf(c.numerator) / c.denominator * mpmath.sqrt(r) for r, c in v.terms.items())


@settings(max_examples=150, deadline=None)
@given(quads)
def test_quad_sign_matches_high_precision(v):
    ref = mp_value(v)
    s = quad_sign(v)
    if abs(ref) > mpmath.mpf(10) ** -40:
        assert s == (1 if ref > 0 else -1)
    else:
        assert s == 0


@settings(max_examples=80, deadline=None)
@given(quads, quads)
def test_quad_field_laws(a, b):
    assert a + b == b + a
    assert a * b == b * a
    assert (a - b) + b == a
    if a != 0:
        assert a * a.inverse() == 1
    assert mpmath.almosteq(mp_value(a * b), mp_value(a) * mp_value(b), 1e-40)


@settings(max_examples=60, deadline=None)
@given(quads)
def test_rational_upper_bound(v):
    if quad_sign(v - 1) >= 0:
        return
    ub = rational_upper_bound(v, below=1)
    assert ub < 1 and quad_sign(QuadValue(ub) - v) >= 0


@settings(max_examples=60, deadline=None)
@given(
    st.fractions(min_value=0, max_value=1, max_denominator=20),
    st.lists(st.fractions(min_value=0, max_value=1, max_denominator=9), max_size=3),
)
def test_isolating_intervals_are_disjoint_and_complete(r, extra):
    x = PolyP.x()
    f = x * x - r
    for s in extra:
        f = f * (x - s)
    sf, sx = to_sympy(f)
    truth = sorted({v for v in sympy.Poly(sf, sx).real_roots() if 0 < v < 1})
    found = isolate_real_roots(f, 0, 1)
    assert len(found) == len(truth)
    for a, b in zip(found, found[1:]):
        assert a.hi < b.lo or (a.hi <= b.lo and not (a.is_exact and b.is_exact and a.lo == b.lo))
    for iv, t in zip(found, truth):
        if iv.is_exact:
            assert iv.lo == t
        else:
            assert iv.lo < t <= iv.hi
            fine = iv.refine(Fraction(1, 2**30))
            assert fine.lo < t <= fine.hi
