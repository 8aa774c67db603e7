"""Exact step-function kernels on [0,1]^2 and their density functionals.

A :class:`StepKernel` is constant on blocks ``I_i x I_j`` where the intervals
``I_0, I_1, ...`` partition [0,1] in order with rational lengths ``widths``.
Densities are exact: the block sums are contracted with ``numpy.einsum`` over
Python integers after clearing denominators.
"""
from __future__ import annotations

import bisect
import csv
import io
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import BlockBudgetExceeded, PreconditionError
from .exactnum import QuadValue, format_rational, parse_rational
from .graphs import CanonGraph, Graph

DEFAULT_BUDGET = 10**8

GraphLike = Union[Graph, CanonGraph]


def _as_graph(h: GraphLike) -> Graph:
    return h.graph if isinstance(h, CanonGraph) else h


def _lcm_den(xs: Iterable[Fraction]) -> int:
    d = 1
    for x in xs:
        d = d * x.denominator // math.gcd(d, x.denominator)
    return d


class StepKernel:
    """Symmetric block-constant kernel with exact rational widths and values."""

    __slots__ = ("widths", "values")

    def __init__(self, widths: Sequence, values: Sequence[Sequence]):
        w = tuple(Fraction(x) for x in widths)
        v = tuple(tuple(Fraction(x) for x in row) for row in values)
        n = len(w)
        if n == 0:
            raise ValueError("a step kernel needs at least one block")
        if any(x <= 0 for x in w):
            raise ValueError("block widths must be positive")
        if sum(w) != 1:
            raise ValueError(f"block widths sum to {sum(w)}, not 1")
        if len(v) != n or any(len(row) != n for row in v):
            raise ValueError("values must be an n x n matrix matching the widths")
        for i in range(n):
            for j in range(i + 1, n):
                if v[i][j] != v[j][i]:
                    raise ValueError(f"values not symmetric at ({i}, {j})")
        self.widths = w
        self.values = v

    @classmethod
    def uniform(cls, values: Sequence[Sequence]) -> "StepKernel":
        n = len(values)
        return cls([Fraction(1, n)] * n, values)

    @property
    def block_count(self) -> int:
        return len(self.widths)

    def block_widths(self) -> tuple[Fraction, ...]:
        return self.widths

    def as_step_kernel(self) -> "StepKernel":
        return self

    def exact_value(self, i: int, j: int) -> Fraction:
        return self.values[i][j]

    def float_values(self, bi: np.ndarray, bj: np.ndarray) -> np.ndarray:
        mat = np.array([[float(x) for x in row] for row in self.values])
        return mat[bi, bj]

    def value_at(self, x, y) -> Fraction:
        """Kernel value at a point of [0,1)^2."""
        return self.values[self.block_of(x)][self.block_of(y)]

    def block_of(self, x) -> int:
        cum = list(itertools.accumulate(self.widths))
        return min(bisect.bisect_right(cum, Fraction(x)), self.block_count - 1)

    def hom_density(self, h: GraphLike, budget: int = DEFAULT_BUDGET) -> Fraction:
        return t_hom(h, self, budget)

    def max_abs(self) -> Fraction:
        return max(abs(x) for row in self.values for x in row)

    def __eq__(self, other):
        return isinstance(other, StepKernel) and self.widths == other.widths and self.values == other.values

    def __hash__(self):
        return hash((self.widths, self.values))

    def __repr__(self):
        return f"StepKernel(widths={[str(w) for w in self.widths]}, values={[[str(x) for x in r] for r in self.values]})"

    # -- serialization ----------------------------------------------------
    def to_json(self) -> dict:
        return {
            "widths": [format_rational(w) for w in self.widths],
            "values": [[format_rational(x) for x in row] for row in self.values],
        }

    @classmethod
    def from_json(cls, data: dict) -> "StepKernel":
        return cls(
            [parse_rational(w) for w in data["widths"]],
            [[parse_rational(x) for x in row] for row in data["values"]],
        )

    def to_csv(self) -> str:
        """Block matrix as CSV: a header row of widths, then one row per block."""
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["width"] + [format_rational(w) for w in self.widths])
        for w, row in zip(self.widths, self.values):
            writer.writerow([format_rational(w)] + [format_rational(x) for x in row])
        return buf.getvalue()


# ---------------------------------------------------------------------------
# constructors and algebra
# ---------------------------------------------------------------------------


def constant(p) -> StepKernel:
    return StepKernel([1], [[Fraction(p)]])


def linear_direction_kernel() -> StepKernel:
    """The balanced 3x3 kernel with values [[2,-1,-1],[-1,1,0],[-1,0,1]] on equal thirds."""
    return StepKernel.uniform([[2, -1, -1], [-1, 1, 0], [-1, 0, 1]])


def rank_one_kernel(f: Sequence, widths: Sequence) -> StepKernel:
    """``B(x, y) = f(x) f(y)`` for a step function ``f``."""
    f = [Fraction(x) for x in f]
    return StepKernel(widths, [[a * b for b in f] for a in f])


def balanced_kernel_B() -> StepKernel:
    """``f(x)f(y)`` with ``f = 1`` on [0,1/3] and ``-1/2`` on (1/3,1]; row integrals vanish."""
    return rank_one_kernel([1, Fraction(-1, 2)], [Fraction(1, 3), Fraction(2, 3)])


def scale(c, w: StepKernel) -> StepKernel:
    c = Fraction(c)
    return StepKernel(w.widths, [[c * x for x in row] for row in w.values])


def _common_refinement(a: Sequence[Fraction], b: Sequence[Fraction]):
    """Widths of the common refinement and, for each piece, its block index in ``a`` and ``b``."""
    ca = list(itertools.accumulate(a))
    cb = list(itertools.accumulate(b))
    cuts = sorted(set(ca) | set(cb))
    widths, ia, ib = [], [], []
    prev = Fraction(0)
    for c in cuts:
        widths.append(c - prev)
        ia.append(bisect.bisect_left(ca, c))
        ib.append(bisect.bisect_left(cb, c))
        prev = c
    return widths, ia, ib


def add(u: StepKernel, w: StepKernel) -> StepKernel:
    widths, iu, iw = _common_refinement(u.widths, w.widths)
    n = len(widths)
    vals = [[u.values[iu[r]][iu[s]] + w.values[iw[r]][iw[s]] for s in range(n)] for r in range(n)]
    return StepKernel(widths, vals)


def tensor(u: StepKernel, w: StepKernel) -> StepKernel:
    """Tensor product; block ``(i, j)`` has index ``i * len(w) + j`` and width ``u_i * w_j``."""
    nu, nw = u.block_count, w.block_count
    widths = [u.widths[i] * w.widths[j] for i in range(nu) for j in range(nw)]
    vals = [
        [u.values[i][k] * w.values[j][l] for k in range(nu) for l in range(nw)]
        for i in range(nu)
        for j in range(nw)
    ]
    return StepKernel(widths, vals)


def split_block(w: StepKernel, block: int, frac) -> StepKernel:
    """Split one block into two pieces of relative size ``frac`` and ``1 - frac`` with the same values."""
    frac = Fraction(frac)
    if not 0 < frac < 1:
        raise ValueError("frac must lie strictly between 0 and 1")
    order = list(range(w.block_count))
    order.insert(block + 1, block)
    widths = list(w.widths)
    widths[block : block + 1] = [w.widths[block] * frac, w.widths[block] * (1 - frac)]
    vals = [[w.values[i][j] for j in order] for i in order]
    return StepKernel(widths, vals)


# ---------------------------------------------------------------------------
# densities
# ---------------------------------------------------------------------------


def _scaled(w: StepKernel):
    dw = _lcm_den(w.widths)
    dv = _lcm_den(x for row in w.values for x in row)
    wi = np.array([int(x * dw) for x in w.widths], dtype=object)
    vi = np.array([[int(x * dv) for x in row] for row in w.values], dtype=object)
    return wi, dw, vi, dv


def _check_budget(blocks: int, verts: int, budget: int):
    if blocks**verts > budget:
        raise BlockBudgetExceeded(f"{blocks}^{verts} summation terms exceed budget {budget}")


def _contract(n_vertices: int, wi, pair_ops: list[tuple[np.ndarray, int, int]]) -> int:
    operands: list = []
    for mat, a, b in pair_ops:
        operands += [mat, [a, b]]
    for v in range(n_vertices):
        operands += [wi, [v]]
    operands.append([])
    return int(np.einsum(*operands, optimize="greedy"))


def t_hom(h: GraphLike, w: StepKernel, budget: int = DEFAULT_BUDGET) -> Fraction:
    """Homomorphism density ``t(H, W)``, exact."""
    g = _as_graph(h)
    if g.order == 0 or any(d == 0 for d in g.degrees()):
        raise PreconditionError("t_hom expects a graph without isolated vertices")
    _check_budget(w.block_count, g.order, budget)
    wi, dw, vi, dv = _scaled(w)
    total = _contract(g.order, wi, [(vi, a, b) for a, b in g.sorted_edges()])
    return Fraction(total, dw**g.order * dv**g.num_edges)


def rho_induced(f: Graph, w: StepKernel, budget: int = DEFAULT_BUDGET) -> Fraction:
    """Induced density: integral of prod_{edges} W * prod_{non-edges} (1 - W)."""
    m = f.order
    if m < 1:
        raise PreconditionError("rho_induced needs at least one vertex")
    _check_budget(w.block_count, m, budget)
    wi, dw, vi, dv = _scaled(w)
    comp = dv - vi
    ops = [(vi if f.has_edge(a, b) else comp, a, b) for a, b in itertools.combinations(range(m), 2)]
    total = _contract(m, wi, ops)
    return Fraction(total, dw**m * dv ** comb(m, 2))


def rand_density(f: Graph, p) -> Fraction:
    """``p^e(F) (1-p)^(C(v(F),2) - e(F))``."""
    p = Fraction(p)
    e = f.num_edges
    return p**e * (1 - p) ** (comb(f.order, 2) - e)


def edge_density(w: StepKernel) -> Fraction:
    n = w.block_count
    return sum(
        (w.widths[i] * w.widths[j] * w.values[i][j] for i in range(n) for j in range(n)),
        Fraction(0),
    )


def row_integrals(w: StepKernel) -> list[Fraction]:
    n = w.block_count
    return [sum((w.widths[j] * w.values[i][j] for j in range(n)), Fraction(0)) for i in range(n)]


def is_balanced(w: StepKernel) -> bool:
    return all(r == 0 for r in row_integrals(w))


def range_check(w: StepKernel, lo, hi) -> bool:
    lo, hi = Fraction(lo), Fraction(hi)
    return all(lo <= x <= hi for row in w.values for x in row)


# ---------------------------------------------------------------------------
# lazy tensor products
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LazyTensorKernel:
    """``scalar * factors[0] (x) factors[1] (x) ...`` without materializing the product grid.

    Factors may be :class:`StepKernel` or any kernel handle exposing
    ``block_count``, ``block_widths()``, ``exact_value(i, j)``,
    ``float_values(bi, bj)`` and ``hom_density(H)``.
    """

    factors: tuple
    scalar: Fraction = Fraction(1)

    def __post_init__(self):
        if not self.factors:
            raise ValueError("LazyTensorKernel needs at least one factor")
        object.__setattr__(self, "factors", tuple(self.factors))
        object.__setattr__(self, "scalar", Fraction(self.scalar))

    @property
    def block_counts(self) -> list[int]:
        return [f.block_count for f in self.factors]


def lazy_blocks(k: LazyTensorKernel, x) -> list[int]:
    """Per-factor block indices of the point ``x`` under the mixed-radix pairing map."""
    x = Fraction(x)
    if not 0 <= x < 1:
        raise ValueError("point must lie in [0, 1)")
    out = []
    for f in k.factors:
        widths = f.block_widths()
        cum = Fraction(0)
        for i, wdt in enumerate(widths):
            if x < cum + wdt or i == len(widths) - 1:
                out.append(i)
                x = (x - cum) / wdt
                break
            cum += wdt
    return out


def lazy_eval(k: LazyTensorKernel, x, y):
    """Exact value of the lazy kernel at ``(x, y)``: Fraction, or QuadValue for irrational factors."""
    bx, by = lazy_blocks(k, x), lazy_blocks(k, y)
    val = k.scalar
    for f, i, j in zip(k.factors, bx, by):
        val = val * f.exact_value(i, j)
    return val


def lazy_t_hom(h: GraphLike, k: LazyTensorKernel) -> QuadValue:
    """``scalar^e(H) * prod t(H, factor)`` by multiplicativity of tensor products."""
    g = _as_graph(h)
    val = QuadValue(k.scalar**g.num_edges)
    for f in k.factors:
        val = val * f.hom_density(g)
    return val


def materialize(k: LazyTensorKernel) -> StepKernel:
    """Fold the tensor product into one explicit step kernel (rational factors only)."""
    out = None
    for f in k.factors:
        sk = f.as_step_kernel()
        out = sk if out is None else tensor(out, sk)
    return scale(k.scalar, out)
