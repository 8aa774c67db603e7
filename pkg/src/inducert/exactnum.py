"""Exact arithmetic: rationals, polynomials in one variable, and values in Q(sqrt a, sqrt b).

Rationals are :class:`fractions.Fraction`.  Everything here is immutable and
free of floating point; ``float()`` conversions exist only for display and
Monte Carlo use.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Optional, Sequence, Union

from .errors import PreconditionError, RadicandOverflow, ZeroPolynomial

RationalLike = Union[Fraction, int]

_RAT_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


def parse_rational(text: str | int | Fraction) -> Fraction:
    """Parse ``"a/b"`` or ``"a"``.  Decimal notation is rejected on purpose."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    m = _RAT_RE.match(str(text))
    if m is None:
        raise PreconditionError(f"not an exact rational (use a/b): {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise PreconditionError(f"zero denominator: {text!r}")
    return Fraction(num, den)


def format_rational(x: RationalLike) -> str:
    return str(Fraction(x))


def sign(x: RationalLike) -> int:
    return (x > 0) - (x < 0)


# ---------------------------------------------------------------------------
# Polynomials
# ---------------------------------------------------------------------------


class PolyP:
    """Univariate polynomial with rational coefficients; ``coeffs[i]`` multiplies ``x**i``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[RationalLike] = ()):
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)

    @classmethod
    def const(cls, c: RationalLike) -> "PolyP":
        return cls([c])

    @classmethod
    def x(cls) -> "PolyP":
        return cls([0, 1])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def lead(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def coeff(self, i: int) -> Fraction:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def __call__(self, x: RationalLike) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    eval = __call__

    def _coerce(self, other) -> "PolyP":
        if isinstance(other, PolyP):
            return other
        if isinstance(other, (int, Fraction)):
            return PolyP([other])
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n = max(len(self.coeffs), len(other.coeffs))
        return PolyP(self.coeff(i) + other.coeff(i) for i in range(n))

    __radd__ = __add__

    def __neg__(self):
        return PolyP(-c for c in self.coeffs)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.is_zero() or other.is_zero():
            return PolyP()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return PolyP(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "PolyP":
        if n < 0:
            raise ValueError("negative power")
        result, base = PolyP([1]), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def compose(self, inner: "PolyP") -> "PolyP":
        """Return ``self(inner(x))``."""
        acc = PolyP()
        for c in reversed(self.coeffs):
            acc = acc * inner + c
        return acc

    def derivative(self) -> "PolyP":
        return PolyP(i * c for i, c in enumerate(self.coeffs) if i > 0)

    def divmod(self, other: "PolyP") -> tuple["PolyP", "PolyP"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        if len(rem) - 1 < dq:
            return PolyP(), self
        quot = [Fraction(0)] * (len(rem) - dq)
        lead = other.lead()
        for i in range(len(rem) - 1, dq - 1, -1):
            c = rem[i] / lead
            quot[i - dq] = c
            if c:
                for j, b in enumerate(other.coeffs):
                    rem[i - dq + j] -= c * b
        return PolyP(quot), PolyP(rem[:dq])

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def monic(self) -> "PolyP":
        if self.is_zero():
            return self
        lc = self.lead()
        return PolyP(c / lc for c in self.coeffs)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"PolyP({[str(c) for c in self.coeffs]})"

    def __str__(self):
        if self.is_zero():
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if i == 0 else ("p" if i == 1 else f"p^{i}")
            if mono and c == 1:
                parts.append(mono)
            elif mono and c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}{'*' + mono if mono else ''}")
        return " + ".join(parts).replace("+ -", "- ")

    def to_json(self) -> list[str]:
        return [format_rational(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, data: Sequence[str]) -> "PolyP":
        return cls(parse_rational(c) for c in data)


def poly_gcd(a: PolyP, b: PolyP) -> PolyP:
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def squarefree_decomposition(f: PolyP) -> list[tuple[PolyP, int]]:
    """Yun's algorithm: ``f = c * prod(g_i ** i)`` with pairwise coprime square-free ``g_i``."""
    if f.degree < 1:
        return []
    out = []
    fp = f.derivative()
    a0 = poly_gcd(f, fp)
    b = f // a0
    c = fp // a0
    d = c - b.derivative()
    i = 1
    while b.degree >= 1:
        a = poly_gcd(b, d)
        if a.degree >= 1:
            out.append((a, i))
        b = b // a
        c = d // a
        d = c - b.derivative()
        i += 1
    return out


def sturm_sequence(f: PolyP) -> list[PolyP]:
    seq = [f, f.derivative()]
    while not seq[-1].is_zero():
        seq.append(-(seq[-2] % seq[-1]))
    seq.pop()
    return seq


def _sign_changes(seq: Sequence[PolyP], x: Fraction) -> int:
    signs = [s for s in (sign(q(x)) for q in seq) if s != 0]
    return sum(1 for u, v in zip(signs, signs[1:]) if u != v)


def sturm_count(f: PolyP, lo: RationalLike, hi: RationalLike, seq=None) -> int:
    """Number of distinct real roots of ``f`` in the half-open interval ``(lo, hi]``."""
    seq = seq or sturm_sequence(f)
    return _sign_changes(seq, Fraction(lo)) - _sign_changes(seq, Fraction(hi))


@dataclass(frozen=True)
class RootInterval:
    """One real root of ``polynomial`` inside ``[lo, hi]``; exact when ``lo == hi``."""

    polynomial: PolyP
    lo: Fraction
    hi: Fraction
    multiplicity: int = 1
    # square-free factor with exactly one root in the bracket (used for refinement)
    factor: Optional[PolyP] = field(default=None, compare=False, repr=False)

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi

    def refine(self, width: RationalLike) -> "RootInterval":
        """Bisect until the bracket is narrower than ``width``."""
        if self.is_exact:
            return self
        f = self.factor if self.factor is not None else _squarefree_part(self.polynomial)
        lo, hi = self.lo, self.hi
        seq = sturm_sequence(f)
        while hi - lo >= width:
            mid = (lo + hi) / 2
            if f(mid) == 0:
                return RootInterval(self.polynomial, mid, mid, self.multiplicity)
            if sturm_count(f, lo, mid, seq) >= 1:
                hi = mid
            else:
                lo = mid
        return RootInterval(self.polynomial, lo, hi, self.multiplicity, f)

    def to_json(self) -> dict:
        return {
            "lo": format_rational(self.lo),
            "hi": format_rational(self.hi),
            "multiplicity": self.multiplicity,
            "exact": self.is_exact,
        }

    def __str__(self):
        if self.is_exact:
            return str(self.lo)
        return f"[{self.lo}, {self.hi}]"


def _squarefree_part(f: PolyP) -> PolyP:
    return f // poly_gcd(f, f.derivative())


def _divisors(n: int, limit: int = 10**12) -> list[int] | None:
    n = abs(n)
    if n == 0:
        return None
    if n > limit:
        return None
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def _integer_coeffs(f: PolyP) -> list[int]:
    den = 1
    for c in f.coeffs:
        den = den * c.denominator // math.gcd(den, c.denominator)
    ints = [int(c * den) for c in f.coeffs]
    g = 0
    for c in ints:
        g = math.gcd(g, c)
    return [c // g for c in ints]


def rational_roots(f: PolyP) -> list[Fraction]:
    """All rational roots of ``f`` (rational-root theorem), without multiplicity."""
    if f.is_zero():
        raise ZeroPolynomial("zero polynomial has every number as a root")
    roots: list[Fraction] = []
    ints = _integer_coeffs(f)
    low = 0
    while ints[low] == 0:
        low += 1
    if low:
        roots.append(Fraction(0))
    ints = ints[low:]
    if len(ints) == 1:
        return roots
    num_divs = _divisors(ints[0])
    den_divs = _divisors(ints[-1])
    if num_divs is None or den_divs is None:
        return roots
    g = PolyP(ints)
    seen = set()
    for a in num_divs:
        for b in den_divs:
            for cand in (Fraction(a, b), Fraction(-a, b)):
                if cand not in seen:
                    seen.add(cand)
                    if g(cand) == 0:
                        roots.append(cand)
    return sorted(roots)


def _isolate_squarefree(f: PolyP, lo: Fraction, hi: Fraction) -> list[tuple[Fraction, Fraction]]:
    """Isolating brackets for roots of square-free ``f`` in the open interval ``(lo, hi)``."""
    seq = sturm_sequence(f)
    out: list[tuple[Fraction, Fraction]] = []
    total = sturm_count(f, lo, hi, seq) - (1 if f(hi) == 0 else 0)
    stack = [(lo, hi, total)]
    while stack:
        a, b, n = stack.pop()
        if n == 0:
            continue
        if n == 1:
            # (a, b] holds one root and b is not a root unless b == hi was excluded
            out.append((a, b))
            continue
        mid = (a + b) / 2
        if f(mid) == 0:
            out.append((mid, mid))
            left = sturm_count(f, a, mid, seq) - 1
            right = n - 1 - left
        else:
            left = sturm_count(f, a, mid, seq)
            right = n - left
        stack.append((a, mid, left))
        stack.append((mid, b, right))
    return out


def isolate_real_roots(q: PolyP, lo: RationalLike, hi: RationalLike) -> list[RootInterval]:
    """Disjoint isolating intervals for the real roots of ``q`` in ``(lo, hi)``.

    Rational roots are extracted first and reported with ``lo == hi``; the
    remaining roots come from Sturm sequences of the square-free factors.
    """
    if q.is_zero():
        raise ZeroPolynomial("cannot isolate roots of the zero polynomial")
    lo, hi = Fraction(lo), Fraction(hi)
    found: list[RootInterval] = []
    rest = q
    for r in rational_roots(q):
        lin = PolyP([-r, 1])
        mult = 0
        while True:
            quo, rem = rest.divmod(lin)
            if not rem.is_zero():
                break
            rest = quo
            mult += 1
        if lo < r < hi:
            found.append(RootInterval(q, r, r, mult))
    irr: list[list] = []
    for factor, mult in squarefree_decomposition(rest):
        for a, b in _isolate_squarefree(factor, lo, hi):
            if a == b:
                found.append(RootInterval(q, a, b, mult))
            else:
                irr.append([factor, a, b, mult])
    # brackets from different square-free factors may overlap each other or
    # contain an exact root; halve the offending brackets until disjoint
    exact = [x.lo for x in found]

    def halve(entry):
        f, a, b, m = entry
        mid = (a + b) / 2
        if f(mid) == 0:
            entry[1] = entry[2] = mid
        elif sturm_count(f, a, mid) >= 1:
            entry[2] = mid
        else:
            entry[1] = mid

    def bad(i):
        a, b = irr[i][1], irr[i][2]
        if a == b:
            return False
        if any(a <= x <= b for x in exact):
            return True
        return any(
            j != i and not (b <= irr[j][1] or irr[j][2] <= a) for j in range(len(irr))
        )

    changed = True
    while changed:
        changed = False
        for i in range(len(irr)):
            if bad(i):
                halve(irr[i])
                changed = True
    for f, a, b, m in irr:
        found.append(RootInterval(q, a, b, m, None if a == b else f))
    found.sort(key=lambda r: (r.lo, r.hi))
    return found


# ---------------------------------------------------------------------------
# Values in Q(sqrt a, sqrt b)
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _factor_small(n: int) -> tuple[int, ...]:
    out, d = [], 2
    while d * d <= n:
        while n % d == 0:
            out.append(d)
            n //= d
        d += 1
    if n > 1:
        out.append(n)
    return tuple(out)


def squarefree_split(n: int) -> tuple[int, int]:
    """Write positive ``n`` as ``g**2 * r`` with ``r`` square-free; returns ``(g, r)``."""
    if n <= 0:
        raise ValueError("need a positive integer")
    g, r = 1, 1
    counts: dict[int, int] = {}
    for p in _factor_small(n):
        counts[p] = counts.get(p, 0) + 1
    for p, e in counts.items():
        g *= p ** (e // 2)
        if e % 2:
            r *= p
    return g, r


def _prime_set(r: int) -> frozenset[int]:
    return frozenset(_factor_small(r))


def _basis(radicands: Iterable[int]) -> tuple[int, ...]:
    """Canonical generators (at most two) of the multiplicative group spanned mod squares."""
    radicands = sorted(radicands)
    gens: list[int] = []
    span = {frozenset()}
    for r in radicands:
        ps = _prime_set(r)
        if ps in span:
            continue
        gens.append(r)
        span |= {s ^ ps for s in span}
        if len(gens) > 2:
            raise RadicandOverflow(f"radicands {radicands} need more than two generators")
    return tuple(gens)


class QuadValue:
    """Exact real number ``sum(c_r * sqrt(r))`` over square-free ``r``, spanning at most two radicands.

    ``QuadValue({1: 2, 3: -1})`` is ``2 - sqrt(3)``.  Rationals and ints mix
    freely in arithmetic.  Comparisons are exact.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, RationalLike] | RationalLike = 0):
        if isinstance(terms, (int, Fraction)):
            terms = {1: terms}
        clean: dict[int, Fraction] = {}
        for r, c in terms.items():
            c = Fraction(c)
            if c == 0:
                continue
            if r <= 0 or squarefree_split(r)[0] != 1:
                raise ValueError(f"radicand {r} is not a positive square-free integer")
            clean[r] = clean.get(r, Fraction(0)) + c
        clean = {r: c for r, c in clean.items() if c != 0}
        _basis(k for k in clean if k != 1)
        self._terms = clean
        self._hash = None

    # -- construction -----------------------------------------------------
    @classmethod
    def sqrt(cls, n: int, coeff: RationalLike = 1) -> "QuadValue":
        """``coeff * sqrt(n)`` for a positive integer ``n``."""
        g, r = squarefree_split(n)
        return cls({r: Fraction(coeff) * g})

    @classmethod
    def coerce(cls, x) -> "QuadValue":
        if isinstance(x, QuadValue):
            return x
        if isinstance(x, (int, Fraction)):
            return cls(x)
        raise TypeError(f"cannot convert {type(x).__name__} to QuadValue")

    # -- structure --------------------------------------------------------
    @property
    def terms(self) -> dict[int, Fraction]:
        return dict(self._terms)

    @property
    def radicands(self) -> tuple[int, ...]:
        return _basis(k for k in self._terms if k != 1)

    def coords(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        """Coordinates on ``1, sqrt a, sqrt b, sqrt(a*b)`` for ``radicands == (a, b)``."""
        gens = self.radicands
        c = [Fraction(0)] * 4
        c[0] = self._terms.get(1, Fraction(0))
        if len(gens) >= 1:
            c[1] = self._terms.get(gens[0], Fraction(0))
        if len(gens) == 2:
            a, b = gens
            c[2] = self._terms.get(b, Fraction(0))
            g, r = squarefree_split(a * b)
            c[3] = self._terms.get(r, Fraction(0)) / g
        return tuple(c)

    def is_rational(self) -> bool:
        return all(r == 1 for r in self._terms)

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is irrational")
        return self._terms.get(1, Fraction(0))

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        try:
            other = QuadValue.coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        for r, c in other._terms.items():
            out[r] = out.get(r, Fraction(0)) + c
        return QuadValue(out)

    __radd__ = __add__

    def __neg__(self):
        return QuadValue({r: -c for r, c in self._terms.items()})

    def __pos__(self):
        return self

    def __sub__(self, other):
        try:
            other = QuadValue.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return QuadValue({r: c * other for r, c in self._terms.items()})
        if not isinstance(other, QuadValue):
            return NotImplemented
        out: dict[int, Fraction] = {}
        for r, c in self._terms.items():
            for s, d in other._terms.items():
                g = math.gcd(r, s)
                key = (r // g) * (s // g)
                out[key] = out.get(key, Fraction(0)) + c * d * g
        return QuadValue(out)

    __rmul__ = __mul__

    def _conj(self, gen: int) -> "QuadValue":
        """Flip the sign of ``sqrt(gen)`` (``gen`` must be one of ``self.radicands``)."""
        gens = self.radicands
        other = [g for g in gens if g != gen]
        flip_set = _prime_set(gen)
        out = {}
        for r, c in self._terms.items():
            ps = _prime_set(r)
            # r is gen or gen*other (mod squares) exactly when it involves gen
            involves = ps == flip_set or (other and ps == flip_set ^ _prime_set(other[0]))
            out[r] = -c if involves else c
        return QuadValue(out)

    def inverse(self) -> "QuadValue":
        if not self._terms:
            raise ZeroDivisionError("QuadValue division by zero")
        gens = self.radicands
        if not gens:
            return QuadValue(1 / self._terms[1])
        conj = self._conj(gens[-1])
        norm = self * conj
        return conj * norm.inverse()

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / Fraction(other))
        if not isinstance(other, QuadValue):
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return QuadValue.coerce(other) * self.inverse()

    def __pow__(self, n: int) -> "QuadValue":
        if n < 0:
            return self.inverse() ** (-n)
        result, base = QuadValue(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __abs__(self):
        return -self if quad_sign(self) < 0 else self

    # -- comparison -------------------------------------------------------
    def __eq__(self, other):
        try:
            other = QuadValue.coerce(other)
        except TypeError:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            if self.is_rational():
                self._hash = hash(self._terms.get(1, Fraction(0)))
            else:
                self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def _cmp(self, other) -> int:
        return quad_sign(self - QuadValue.coerce(other))

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __bool__(self):
        return bool(self._terms)

    def __float__(self):
        return float(sum(float(c) * math.sqrt(r) for r, c in self._terms.items()))

    def __repr__(self):
        return f"QuadValue({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for r in sorted(self._terms):
            c = self._terms[r]
            parts.append(str(c) if r == 1 else f"{c}*sqrt({r})")
        return " + ".join(parts).replace("+ -", "- ")

    # -- serialization ----------------------------------------------------
    def to_json(self) -> dict:
        return {
            "radicands": list(self.radicands),
            "coords": [format_rational(c) for c in self.coords()],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "QuadValue":
        gens = [int(g) for g in data.get("radicands", [])]
        c = [parse_rational(x) for x in data["coords"]]
        if len(c) != 4 or len(gens) > 2:
            raise ValueError("QuadValue JSON needs 4 coords and at most 2 radicands")
        value = QuadValue(c[0])
        if gens:
            value = value + QuadValue.sqrt(gens[0], c[1])
        if len(gens) == 2:
            value = value + QuadValue.sqrt(gens[1], c[2]) + QuadValue.sqrt(gens[0] * gens[1], c[3])
        elif c[2] or c[3]:
            raise ValueError("coords beyond the declared radicands must be zero")
        if not gens and c[1]:
            raise ValueError("coords beyond the declared radicands must be zero")
        return value


def as_quad(x) -> QuadValue:
    return QuadValue.coerce(x)


def _sign_one(c0: Fraction, c1: Fraction, a: int) -> int:
    s0, s1 = sign(c0), sign(c1)
    if s1 == 0:
        return s0
    if s0 == 0 or s0 == s1:
        return s1
    return s0 * sign(c0 * c0 - a * c1 * c1)


def quad_sign(v) -> int:
    """Sign of an exact value in Q(sqrt a, sqrt b), decided by squaring; no floating point."""
    if isinstance(v, (int, Fraction)):
        return sign(v)
    gens = v.radicands
    c0, c1, c2, c3 = v.coords()
    if not gens:
        return sign(c0)
    if len(gens) == 1:
        return _sign_one(c0, c1, gens[0])
    a, b = gens
    sqrt_a = QuadValue.sqrt(a)
    big_a = QuadValue(c0) + sqrt_a * c1
    big_b = QuadValue(c2) + sqrt_a * c3
    sa, sb = quad_sign(big_a), quad_sign(big_b)
    if sb == 0:
        return sa
    if sa == 0 or sa == sb:
        return sb
    return sa * quad_sign(big_a * big_a - big_b * big_b * b)


def rational_upper_bound(v, below: RationalLike | None = None, max_bits: int = 4096) -> Fraction:
    """Smallest dyadic ``k/2**j`` (over increasing ``j``) that is ``>= v``, and ``< below`` if given."""
    v = as_quad(v)
    if v.is_rational():
        x = v.to_fraction()
        if below is not None and not x < below:
            raise ValueError("value is not below the requested bound")
        return x
    j = 1
    while j <= max_bits:
        scale = 1 << j
        guess = math.floor(float(v) * scale) if j < 50 else None
        if guess is None:
            lo, hi = -(1 << (2 * j)), 1 << (2 * j)
            while hi - lo > 1:
                mid = (lo + hi) // 2
                if v <= Fraction(mid, scale):
                    hi = mid
                else:
                    lo = mid
            k = hi
        else:
            k = guess
            while not v <= Fraction(k, scale):
                k += 1
            while v <= Fraction(k - 1, scale):
                k -= 1
        cand = Fraction(k, scale)
        if below is None or cand < below:
            return cand
        j += 1
    raise ValueError("could not find a rational bound")
