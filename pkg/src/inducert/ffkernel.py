"""Finite-field quadratic-form kernels and exact clique-dominating densities.

Three kernel families are used to make cliques dominate all other graphs in
absolute homomorphism density:

* ``ConstKernel``: the constant kernel ``-alpha`` (enough for triangles);
* ``FpKernel``: ``U(x, y) = cos(2 pi q(x + y) / p)`` on ``F_p^k`` with
  ``q(x) = s * sum x_i^2``, evaluated exactly through quadratic Gauss sums;
* ``F2FormKernel``: the sign kernel ``(-1)^{q(x + y)}`` on ``F_2^k`` for a
  quadratic form ``q`` found by search.

All densities are exact (Fraction or QuadValue); floats are only offered for
sampling.
"""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence, Union

import numpy as np

from .errors import (
    ImaginaryResidue,
    NoValidForm,
    PreconditionError,
    SearchExhausted,
    UnsupportedPrime,
    ZeroMu,
)
from .exactnum import QuadValue, as_quad, format_rational, parse_rational, quad_sign
from .graphs import CanonGraph, Graph, canonical_H, complete_graph, enumerate_H, is_clique, min_degree
from .stepkernel import DEFAULT_BUDGET, StepKernel, t_hom

GraphLike = Union[Graph, CanonGraph]

K_CAP = 40
F2_K_CAP = 6


def _g(h: GraphLike) -> Graph:
    return h.graph if isinstance(h, CanonGraph) else h


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, int(n**0.5) + 1))


def legendre(a: int, p: int) -> int:
    """Legendre symbol by Euler's criterion."""
    if p < 3 or p % 2 == 0:
        raise ValueError("legendre needs an odd prime")
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def smallest_nonresidue(p: int) -> int:
    return next(s for s in range(2, p) if legendre(s, p) == -1)


# ---------------------------------------------------------------------------
# Gauss sums
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GaussTerm:
    """``legendre_sign * (g(1; p) / p)^power``.

    ``g(1; p)`` is ``sqrt(p)`` for ``p = 1 mod 4`` and ``i sqrt(p)`` for ``p = 3 mod 4``.
    """

    p: int
    power: int
    legendre_sign: int = 1

    def __mul__(self, other: "GaussTerm") -> "GaussTerm":
        if self.p != other.p:
            raise ValueError("Gauss terms over different primes")
        return GaussTerm(self.p, self.power + other.power, self.legendre_sign * other.legendre_sign)

    def parts(self) -> tuple[QuadValue, QuadValue]:
        """(real, imaginary) parts as exact values in Q(sqrt p)."""
        n, p = self.power, self.p
        # |value| = p^(-n/2)
        if n % 2 == 0:
            mag = QuadValue(Fraction(1, p ** (n // 2)))
        else:
            mag = QuadValue.sqrt(p, Fraction(1, p ** ((n + 1) // 2)))
        mag = mag * self.legendre_sign
        if p % 4 == 1:
            return mag, QuadValue(0)
        phase = n % 4
        zero = QuadValue(0)
        return [(mag, zero), (zero, mag), (-mag, zero), (zero, -mag)][phase]

    def is_real(self) -> bool:
        return self.p % 4 == 1 or self.power % 2 == 0


def gauss_term(mu: int, p: int, power: int) -> GaussTerm:
    """Exact representation of ``(g(mu; p) / p)^power``."""
    if mu % p == 0:
        raise ZeroMu(f"g(mu; p) needs mu != 0 mod p, got mu={mu}, p={p}")
    if power < 0:
        raise ValueError("power must be non-negative")
    return GaussTerm(p, power, legendre(mu, p) ** power)


# ---------------------------------------------------------------------------
# symmetric matrices over F_p
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SymMatFp:
    p: int
    entries: tuple

    def __post_init__(self):
        rows = tuple(tuple(int(x) % self.p for x in r) for r in self.entries)
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("matrix must be square")
        for i in range(n):
            for j in range(i + 1, n):
                if rows[i][j] != rows[j][i]:
                    raise ValueError("matrix must be symmetric")
        object.__setattr__(self, "entries", rows)

    @property
    def order(self) -> int:
        return len(self.entries)

    def __neg__(self):
        return SymMatFp(self.p, [[-x for x in r] for r in self.entries])


def build_M(G: GraphLike, sigma: Sequence[int], p: int) -> SymMatFp:
    """``M_G^sigma = sum_e sigma_e E_e`` with sigma indexed by ``G.sorted_edges()``."""
    g = _g(G)
    edges = g.sorted_edges()
    if len(sigma) != len(edges):
        raise ValueError(f"sign vector has length {len(sigma)}, graph has {len(edges)} edges")
    return SymMatFp(p, _raw_M(g.order, edges, sigma, p))


def _raw_M(n, edges, sigma, p):
    a = [[0] * n for _ in range(n)]
    for (u, v), s in zip(edges, sigma):
        a[u][v] = s
        a[v][u] = s
        a[u][u] += s
        a[v][v] += s
    return [[x % p for x in r] for r in a]


@dataclass(frozen=True)
class DiagResult:
    C: tuple
    D: tuple  # full diagonal: nonzero pivots first, then zeros
    rank: int

    @property
    def nonzero(self) -> tuple:
        return self.D[: self.rank]


def _eliminate(a: list, p: int, track: Optional[list]) -> list[int]:
    """Congruence-diagonalize ``a`` in place; returns the nonzero pivots.

    ``track`` (if given) receives the same column operations, so that
    ``track^T M track`` equals the reduced ``a``.
    """
    n = len(a)

    def addcol(t, s, f):
        # column t += f * column s, then the same for rows
        for r in range(n):
            a[r][t] = (a[r][t] + f * a[r][s]) % p
        for c in range(n):
            a[t][c] = (a[t][c] + f * a[s][c]) % p
        if track is not None:
            for r in range(n):
                track[r][t] = (track[r][t] + f * track[r][s]) % p

    def swap(i, j):
        if i == j:
            return
        a[i], a[j] = a[j], a[i]
        for r in a:
            r[i], r[j] = r[j], r[i]
        if track is not None:
            for r in track:
                r[i], r[j] = r[j], r[i]

    pivots = []
    for i in range(n):
        j = next((j for j in range(i, n) if a[j][j]), None)
        if j is None:
            pair = next(((x, y) for x in range(i, n) for y in range(x + 1, n) if a[x][y]), None)
            if pair is None:
                break
            x, y = pair
            # both diagonal entries vanish, so the new a[x][x] = 2 a[x][y] != 0 (p odd)
            addcol(x, y, 1)
            j = x
        swap(i, j)
        piv = a[i][i]
        inv = pow(piv, -1, p)
        for r in range(i + 1, n):
            if a[r][i]:
                addcol(r, i, -a[r][i] * inv % p)
        pivots.append(piv)
    return pivots


def congruence_diagonalize(M: SymMatFp, pivot_order: Optional[Sequence[int]] = None) -> DiagResult:
    """Find invertible ``C`` with ``C^T M C`` diagonal; the product is re-verified."""
    p, n = M.p, M.order
    if p % 2 == 0:
        raise ValueError("congruence diagonalization needs odd p")
    order = list(pivot_order) if pivot_order is not None else list(range(n))
    if sorted(order) != list(range(n)):
        raise ValueError("pivot_order must be a permutation")
    a = [[M.entries[order[i]][order[j]] for j in range(n)] for i in range(n)]
    C = [[1 if r == order[c] else 0 for c in range(n)] for r in range(n)]
    pivots = _eliminate(a, p, C)
    D = tuple(pivots) + (0,) * (n - len(pivots))
    _verify(M, C, D)
    return DiagResult(tuple(tuple(r) for r in C), D, len(pivots))


def _verify(M: SymMatFp, C, D):
    p, n = M.p, M.order
    MC = [[sum(M.entries[r][t] * C[t][c] for t in range(n)) % p for c in range(n)] for r in range(n)]
    for r in range(n):
        for c in range(n):
            v = sum(C[t][r] * MC[t][c] for t in range(n)) % p
            want = D[r] if r == c else 0
            if v != want:
                raise AssertionError("congruence diagonalization failed verification")


def rank_Fp(M: SymMatFp) -> int:
    return len(_eliminate([list(r) for r in M.entries], M.p, None))


def rank_one_normal_form(M: SymMatFp) -> tuple[int, tuple]:
    """Write a rank-1 symmetric ``M`` as ``a * w w^T`` with ``w`` normalized; returns ``(a, w)``."""
    p = M.p
    i = next((i for i in range(M.order) if M.entries[i][i]), None)
    if i is None:
        raise ValueError("matrix has zero diagonal, not rank one")
    a = M.entries[i][i]
    inv = pow(a, -1, p)
    w = tuple(x * inv % p for x in M.entries[i])
    for r in range(M.order):
        for c in range(M.order):
            if M.entries[r][c] != a * w[r] * w[c] % p:
                raise ValueError("matrix is not rank one")
    return a, w


def sign_vectors(G: GraphLike):
    return itertools.product((1, -1), repeat=_g(G).num_edges)


def sigma1_set(G: GraphLike, p: int) -> list[tuple]:
    """All sign vectors with ``rank(M_G^sigma) = 1``."""
    g = _g(G)
    edges = g.sorted_edges()
    return [
        s for s in sign_vectors(g)
        if len(_eliminate(_raw_M(g.order, edges, s, p), p, None)) == 1
    ]


@lru_cache(maxsize=4096)
def rank_profile(G: Graph, p: int) -> Counter:
    """Counter of ``(rank, chi)`` over all sign vectors, ``chi`` = Legendre of the pivot product.

    Uses ``M^{-sigma} = -M^sigma``: only half the sign vectors are eliminated.
    """
    edges = G.sorted_edges()
    out: Counter = Counter()
    if not edges:
        out[(0, 1)] = 1
        return out
    lm1 = legendre(-1, p)
    for rest in itertools.product((1, -1), repeat=len(edges) - 1):
        s = (1,) + rest
        piv = _eliminate(_raw_M(G.order, edges, s, p), p, None)
        prod = 1
        for d in piv:
            prod = prod * d % p
        rk, chi = len(piv), legendre(prod, p)
        out[(rk, chi)] += 1
        out[(rk, chi * lm1**rk)] += 1
    return out


def _profile_with_order(G: Graph, p: int, pivot_order) -> Counter:
    out: Counter = Counter()
    for s in sign_vectors(G):
        res = congruence_diagonalize(build_M(G, s, p), pivot_order)
        chi = 1
        for d in res.nonzero:
            chi *= legendre(d, p)
        out[(res.rank, chi)] += 1
    return out


def _gauss_sum(profile: Counter, p: int, s: int, k: int, e: int) -> QuadValue:
    ls = legendre(s, p)
    re, im = QuadValue(0), QuadValue(0)
    for (rk, chi), cnt in profile.items():
        # prod_j g(d_j s)/p over the rk pivots, raised to k
        term = GaussTerm(p, k * rk, (chi * ls**rk) ** k)
        a, b = term.parts()
        re = re + a * cnt
        im = im + b * cnt
    if im != 0:
        raise ImaginaryResidue(f"imaginary part {im} did not cancel")
    return re / 2**e


# ---------------------------------------------------------------------------
# kernel handles
# ---------------------------------------------------------------------------


def _check_graph(g: Graph):
    if g.order == 0 or any(d == 0 for d in g.degrees()):
        raise PreconditionError("densities expect a graph without isolated vertices")


@dataclass(frozen=True)
class FpKernelSpec:
    z: int
    p: int
    k: int
    s: int

    def __post_init__(self):
        if not _is_prime(self.p) or self.p == 2:
            raise ValueError(f"p={self.p} is not an odd prime")
        if (self.z - 2) % self.p:
            raise ValueError(f"p={self.p} does not divide z-2={self.z - 2}")
        if legendre(self.s, self.p) != -1:
            raise ValueError(f"s={self.s} is a square mod {self.p}")
        if self.k < 1:
            raise ValueError("k must be positive")

    kind = "fp"

    def at_level(self, k: int) -> "FpKernelSpec":
        return replace(self, k=k)

    @property
    def block_count(self) -> int:
        return self.p**self.k

    def block_widths(self) -> tuple:
        return (Fraction(1, self.block_count),) * self.block_count

    def _q(self, i, j):
        # q(x + y) for the base-p digit vectors of block indices i, j
        p = self.p
        tot = 0
        for _ in range(self.k):
            tot += ((i % p) + (j % p)) ** 2
            i //= p
            j //= p
        return self.s * tot % p

    def exact_value(self, i: int, j: int) -> QuadValue:
        return cos_2pi_over(self._q(i, j), self.p)

    def float_values(self, bi, bj) -> np.ndarray:
        bi = np.asarray(bi, dtype=np.int64)
        bj = np.asarray(bj, dtype=np.int64)
        p = self.p
        if self.block_count <= 10**6:
            digits = _digit_table(p, self.k)
            tot = ((digits[bi] + digits[bj]) ** 2).sum(axis=-1)
        else:
            bi, bj = bi.copy(), bj.copy()
            tot = np.zeros(bi.shape, dtype=np.int64)
            for _ in range(self.k):
                tot += (bi % p + bj % p) ** 2
                bi //= p
                bj //= p
        return _cos_table(p)[self.s * tot % p]

    def hom_density(self, h: GraphLike) -> QuadValue:
        return t_ff(h, self)

    def as_step_kernel(self) -> StepKernel:
        if self.p != 3:
            raise UnsupportedPrime("only p = 3 has rational cosine values")
        n = self.block_count
        table = {0: Fraction(1), 1: Fraction(-1, 2), 2: Fraction(-1, 2)}
        return StepKernel.uniform([[table[self._q(i, j)] for j in range(n)] for i in range(n)])

    def to_json(self) -> dict:
        return {"kind": "fp", "z": self.z, "p": self.p, "k": self.k, "s": self.s}


@lru_cache(maxsize=16)
def _digit_table(p: int, k: int) -> np.ndarray:
    idx = np.arange(p**k, dtype=np.int64)
    return np.stack([(idx // p**i) % p for i in range(k)], axis=-1)


@lru_cache(maxsize=16)
def _cos_table(p: int) -> np.ndarray:
    return np.cos(2 * np.pi * np.arange(p) / p)


def cos_2pi_over(r: int, p: int) -> QuadValue:
    """``cos(2 pi r / p)`` exactly, for ``p`` in {3, 5}."""
    r %= p
    if r == 0:
        return QuadValue(1)
    if p == 3:
        return QuadValue(Fraction(-1, 2))
    if p == 5:
        # cos(2pi/5) = (sqrt5 - 1)/4, cos(4pi/5) = -(sqrt5 + 1)/4
        if r in (1, 4):
            return QuadValue.sqrt(5, Fraction(1, 4)) - Fraction(1, 4)
        return -QuadValue.sqrt(5, Fraction(1, 4)) - Fraction(1, 4)
    raise UnsupportedPrime(f"cos(2 pi r / {p}) is not in Q(sqrt {p})")


@dataclass(frozen=True)
class ConstKernel:
    """The constant kernel ``-alpha``."""

    alpha: Fraction = Fraction(1, 2)

    def __post_init__(self):
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")

    kind = "const"
    k = 1

    def at_level(self, k: int) -> "ConstKernel":
        return self

    @property
    def block_count(self) -> int:
        return 1

    def block_widths(self) -> tuple:
        return (Fraction(1),)

    def exact_value(self, i, j) -> Fraction:
        return -self.alpha

    def float_values(self, bi, bj) -> np.ndarray:
        return np.full(np.shape(bi), -float(self.alpha))

    def hom_density(self, h: GraphLike) -> QuadValue:
        return QuadValue((-self.alpha) ** _g(h).num_edges)

    def as_step_kernel(self) -> StepKernel:
        return StepKernel([1], [[-self.alpha]])

    def to_json(self) -> dict:
        return {"kind": "const", "alpha": format_rational(self.alpha)}


def _upper_pairs(k: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(k) for j in range(i, k)]


@dataclass(frozen=True)
class F2FormKernel:
    """Sign kernel ``(-1)^{q(x + y)}`` on ``F_2^k``.

    ``q`` holds the coefficient bits ``a_ij`` (``i <= j``) of
    ``q(x) = sum a_ij x_i x_j`` in the order ``(0,0), (0,1), ..., (1,1), ...``.
    """

    k: int
    q: tuple

    def __post_init__(self):
        object.__setattr__(self, "q", tuple(int(b) & 1 for b in self.q))
        if self.k < 1 or len(self.q) != self.k * (self.k + 1) // 2:
            raise ValueError("q must have k(k+1)/2 coefficient bits")

    kind = "f2"

    @property
    def block_count(self) -> int:
        return 2**self.k

    def block_widths(self) -> tuple:
        return (Fraction(1, self.block_count),) * self.block_count

    def form_value(self, x: int) -> int:
        bits = [(x >> i) & 1 for i in range(self.k)]
        return sum(a * bits[i] * bits[j] for a, (i, j) in zip(self.q, _upper_pairs(self.k))) & 1

    def exact_value(self, i: int, j: int) -> Fraction:
        return Fraction(-1 if self.form_value(i ^ j) else 1)

    def float_values(self, bi, bj) -> np.ndarray:
        x = np.bitwise_xor(np.asarray(bi, dtype=np.int64), np.asarray(bj, dtype=np.int64))
        tot = np.zeros(x.shape, dtype=np.int64)
        for a, (i, j) in zip(self.q, _upper_pairs(self.k)):
            if a:
                tot += ((x >> i) & 1) * ((x >> j) & 1)
        return np.where(tot % 2 == 1, -1.0, 1.0)

    def hom_density(self, h: GraphLike) -> QuadValue:
        return QuadValue(t_f2(h, self))

    def as_step_kernel(self) -> StepKernel:
        n = self.block_count
        return StepKernel.uniform([[self.exact_value(i, j) for j in range(n)] for i in range(n)])

    def to_json(self) -> dict:
        return {"kind": "f2", "k": self.k, "q": list(self.q)}


KernelHandle = Union[FpKernelSpec, F2FormKernel, ConstKernel]


def handle_from_json(data: dict) -> KernelHandle:
    kind = data.get("kind")
    if kind == "fp":
        return FpKernelSpec(int(data["z"]), int(data["p"]), int(data["k"]), int(data["s"]))
    if kind == "f2":
        return F2FormKernel(int(data["k"]), tuple(data["q"]))
    if kind == "const":
        return ConstKernel(parse_rational(data["alpha"]))
    raise ValueError(f"unknown kernel kind {kind!r}")


# ---------------------------------------------------------------------------
# exact densities
# ---------------------------------------------------------------------------


def t_ff(G: GraphLike, spec: FpKernelSpec) -> QuadValue:
    """``t(G, U)`` for the cosine kernel via the Gauss-sum rank formula."""
    g = _g(G)
    _check_graph(g)
    if g.order > 9 or g.num_edges > 21:
        raise PreconditionError("t_ff supports v(G) <= 9 and e(G) <= 21")
    return _gauss_sum(rank_profile(g, spec.p), spec.p, spec.s, spec.k, g.num_edges)


def t_ff_with_pivots(G: GraphLike, spec: FpKernelSpec, pivot_order) -> QuadValue:
    """Same as :func:`t_ff` but with explicit, verified diagonalizations in a given pivot order."""
    g = _g(G)
    _check_graph(g)
    return _gauss_sum(_profile_with_order(g, spec.p, pivot_order), spec.p, spec.s, spec.k, g.num_edges)


def t_grid(G: GraphLike, spec: FpKernelSpec, budget: int = DEFAULT_BUDGET) -> Fraction:
    """Direct summation over the ``3^k``-block materialized kernel (p = 3 only)."""
    if spec.p != 3:
        raise UnsupportedPrime("grid evaluation is exact only for p = 3")
    return t_hom(G, spec.as_step_kernel(), budget)


def _f2_quadratic(g: Graph, ker: F2FormKernel):
    """``sum_{uv in E} q(x_u + x_v)`` as (const, linear mask, adjacency masks) over k*v(G) bits."""
    k = ker.k
    n = k * g.order
    lin = 0
    adj = [0] * n

    def var(v, i):
        return v * k + i

    def add_quad(a, b):
        adj[a] ^= 1 << b
        adj[b] ^= 1 << a

    for u, v in g.sorted_edges():
        for coef, (i, j) in zip(ker.q, _upper_pairs(k)):
            if not coef:
                continue
            if i == j:
                # (x_ui + x_vi)^2 = x_ui + x_vi over F_2
                lin ^= 1 << var(u, i)
                lin ^= 1 << var(v, i)
            else:
                # (x_ui + x_vi)(x_uj + x_vj)
                for a in (u, v):
                    for b in (u, v):
                        add_quad(var(a, i), var(b, j))
    return 0, lin, adj, n


def f2_exponential_sum(const: int, lin: int, adj: list[int], n: int) -> int:
    """``sum_{x in F_2^n} (-1)^{Q(x)}`` for ``Q = const + <lin, x> + sum_{i<j, j in adj[i]} x_i x_j``.

    Variables are eliminated one at a time: summing out ``x_i`` forces the
    linear form multiplying it to vanish, which either factors out a 2 or
    kills the sum, or substitutes an affine expression for another variable.
    """
    adj = list(adj)
    alive = (1 << n) - 1
    factor = 1
    while alive:
        i = (alive & -alive).bit_length() - 1
        alive &= ~(1 << i)
        nbrs = adj[i] & alive
        li = (lin >> i) & 1
        # drop x_i everywhere
        for t in _bits(nbrs):
            adj[t] &= ~(1 << i)
        adj[i] = 0
        lin &= ~(1 << i)
        if not nbrs:
            if li:
                return 0
            factor *= 2
            continue
        # constraint sum_{t in nbrs} x_t = li; solve for j
        j = (nbrs & -nbrs).bit_length() - 1
        T = nbrs & ~(1 << j)
        const, lin, adj = _substitute(const, lin, adj, j, li, T)
        alive &= ~(1 << j)
        factor *= 2
    return factor * (-1 if const else 1)


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _substitute(const, lin, adj, j, a, T):
    """Replace ``x_j`` by ``a + sum_{t in T} x_t`` (``adj`` is symmetric, modified in place)."""
    N = adj[j]
    lj = (lin >> j) & 1
    for u in _bits(N):
        adj[u] &= ~(1 << j)
    adj[j] = 0
    lin &= ~(1 << j)
    # x_j * (lj + sum_N x_u)  ->  (a + sum_T x_t)(lj + sum_N x_u)
    if a and lj:
        const ^= 1
    if a:
        lin ^= N
    if lj:
        lin ^= T
    for t in _bits(T):
        for u in _bits(N):
            if t == u:
                lin ^= 1 << t  # x_t^2 = x_t
            else:
                adj[t] ^= 1 << u
                adj[u] ^= 1 << t
    return const, lin, adj


def t_f2(G: GraphLike, ker: F2FormKernel) -> Fraction:
    g = _g(G)
    _check_graph(g)
    const, lin, adj, n = _f2_quadratic(g, ker)
    return Fraction(f2_exponential_sum(const, lin, adj, n), 2**n)


# ---------------------------------------------------------------------------
# clique domination
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DominationResult:
    k: int
    handle: KernelHandle
    t_table: dict = field(compare=False)  # CanonGraph -> QuadValue


def min_degree_two_classes(m: int) -> list[CanonGraph]:
    return [H for H in enumerate_H(m) if min_degree(H.graph) >= 2]


def dominates(t_table: dict, clique: CanonGraph) -> bool:
    """``t(K) < 0`` and ``|t(G)| < |t(K)|`` for every non-clique ``G`` in the table."""
    tk = as_quad(t_table[clique])
    if quad_sign(tk) >= 0:
        return False
    return all(abs(as_quad(t)) < -tk for H, t in t_table.items() if not is_clique(H.graph))


def _allowed_levels(handle: KernelHandle, k_cap: int):
    if isinstance(handle, FpKernelSpec):
        if handle.p % 4 == 1:
            return range(1, k_cap + 1, 2)
        return range(2, k_cap + 1, 4)
    return [handle.k]


def find_domination_k(m: int, support: Sequence[CanonGraph], handle: KernelHandle, k_cap: int = K_CAP) -> DominationResult:
    """Smallest admissible level ``k`` at which ``K_m`` dominates the support."""
    support = [H if isinstance(H, CanonGraph) else canonical_H(H) for H in support]
    clique = canonical_H(complete_graph(m))
    if clique not in support:
        raise PreconditionError(f"K_{m} must belong to the support")
    if any(min_degree(H.graph) < 2 for H in support):
        raise PreconditionError("support graphs must have minimum degree >= 2")
    for k in _allowed_levels(handle, k_cap):
        h = handle.at_level(k) if isinstance(handle, FpKernelSpec) else handle
        table = {H: as_quad(h.hom_density(H)) for H in support}
        if dominates(table, clique):
            return DominationResult(k, h, table)
    raise SearchExhausted(f"no admissible k <= {k_cap} makes K_{m} dominate for {handle.to_json()}")


def f2_form_search(z: int, k_cap: int = F2_K_CAP) -> F2FormKernel:
    """First quadratic form (by level, then coefficient bits) whose sign kernel makes ``K_z`` dominate."""
    support = min_degree_two_classes(z)
    clique = canonical_H(complete_graph(z))
    for k in range(1, k_cap + 1):
        npairs = k * (k + 1) // 2
        for bits in itertools.product((0, 1), repeat=npairs):
            ker = F2FormKernel(k, bits)
            tk = t_f2(clique, ker)
            if tk >= 0:
                continue
            table = {clique: QuadValue(tk)}
            ok = True
            for H in support:
                if H == clique or is_clique(H.graph):
                    continue
                t = t_f2(H, ker)
                if abs(t) >= -tk:
                    ok = False
                    break
                table[H] = QuadValue(t)
            if ok:
                return ker
    raise NoValidForm(f"no quadratic form over F_2^k, k <= {k_cap}, makes K_{z} dominate")


@lru_cache(maxsize=None)
def _f2_cached(z: int, k_cap: int) -> F2FormKernel:
    return f2_form_search(z, k_cap)


def make_uz(z: int, k_hint: Optional[int] = None, f2_k_cap: int = F2_K_CAP) -> KernelHandle:
    """Kernel handle making ``K_z`` the dominating graph.

    For odd ``z >= 5`` the level ``k`` is a placeholder (``k_hint`` or the first
    admissible level); :func:`find_domination_k` picks the working one.
    """
    if z < 3:
        raise PreconditionError("z must be at least 3")
    if z == 3:
        return ConstKernel(Fraction(1, 2))
    if z % 2:
        p = next(q for q in range(3, z - 1) if _is_prime(q) and (z - 2) % q == 0)
        k = k_hint if k_hint is not None else (1 if p % 4 == 1 else 2)
        return FpKernelSpec(z, p, k, smallest_nonresidue(p))
    return _f2_cached(z, f2_k_cap)


def smallest_negative_level(z: int, handle: KernelHandle, k_cap: int = K_CAP) -> KernelHandle:
    """Lowest admissible level with ``t(K_z, U) < 0`` (no domination required)."""
    clique = complete_graph(z)
    for k in _allowed_levels(handle, k_cap):
        h = handle.at_level(k) if isinstance(handle, FpKernelSpec) else handle
        if quad_sign(h.hom_density(clique)) < 0:
            return h
    raise SearchExhausted(f"t(K_{z}, U) is never negative for k <= {k_cap}")
