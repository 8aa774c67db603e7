"""Perturbation expansion of the induced density around the constant graphon.

For a kernel ``D``::

    rho_F(p + D) = rand(F, p) + sum_H P_{H,F}(p) t(H, D)

with ``H`` over classes of non-empty graphs without isolated vertices inside
``K_m`` (``m = v(F)``) and

    P_{H,F}(p) = rand(F, p) / (p(1-p))^e(H) * S_{H,F}(p),
    S_{H,F}(p) = sum_j (1-p)^(e(H)-j) (-p)^j n_j(H, F).
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Mapping, Union

from .errors import BoundaryP, IdenticallyZero, OrderOutOfRange, PreconditionError
from .exactnum import PolyP, QuadValue, RootInterval, as_quad, format_rational, isolate_real_roots
from .graphs import CanonGraph, Graph, canonical_H, complete_graph, count_nj, enumerate_H, to_graph6
from .stepkernel import DEFAULT_BUDGET, StepKernel, add, constant, rand_density, rho_induced, t_hom

MIN_ORDER, MAX_ORDER = 3, 7

_X = PolyP.x()
_ONE_MINUS_X = PolyP([1, -1])


@dataclass(frozen=True)
class ExpansionEntry:
    H: CanonGraph
    nj: tuple[int, ...]
    S: PolyP

    @property
    def num_edges(self) -> int:
        return self.H.num_edges


@dataclass(frozen=True)
class ExpansionTable:
    F: Graph
    entries: dict  # CanonGraph -> ExpansionEntry, in enumerate_H order

    @property
    def m(self) -> int:
        return self.F.order

    def __iter__(self):
        return iter(self.entries.values())

    def __len__(self):
        return len(self.entries)

    def entry(self, H: Union[CanonGraph, Graph]) -> ExpansionEntry:
        key = H if isinstance(H, CanonGraph) else canonical_H(H)
        return self.entries[key]

    def rand_poly(self) -> PolyP:
        e = self.F.num_edges
        return _X**e * _ONE_MINUS_X ** (comb(self.m, 2) - e)

    def P_polynomial(self, H) -> PolyP:
        """``P_{H,F}`` as a polynomial in ``p`` (the division by ``(p(1-p))^e(H)`` is exact)."""
        ent = self.entry(H)
        num = self.rand_poly() * ent.S
        quo, rem = num.divmod((_X * _ONE_MINUS_X) ** ent.num_edges)
        assert rem.is_zero(), "P_{H,F} must be a polynomial"
        return quo


def s_polynomial(nj) -> PolyP:
    e = len(nj) - 1
    out = PolyP()
    for j, n in enumerate(nj):
        if n:
            out = out + _ONE_MINUS_X ** (e - j) * (-_X) ** j * n
    return out


@lru_cache(maxsize=64)
def build_table(F: Graph) -> ExpansionTable:
    if not MIN_ORDER <= F.order <= MAX_ORDER:
        raise OrderOutOfRange(f"expansion tables need {MIN_ORDER} <= v(F) <= {MAX_ORDER}, got {F.order}")
    entries = {}
    for H in enumerate_H(F.order):
        nj = tuple(count_nj(H.graph, F))
        entries[H] = ExpansionEntry(H, nj, s_polynomial(nj))
    return ExpansionTable(F, entries)


def eval_P(table: ExpansionTable, H, p) -> Fraction:
    p = Fraction(p)
    if not 0 < p < 1:
        raise BoundaryP(f"P_(H,F)(p) is evaluated in factored form only for 0 < p < 1, got {p}")
    ent = table.entry(H)
    return rand_density(table.F, p) * ent.S(p) / (p * (1 - p)) ** ent.num_edges


def expansion_gap(table: ExpansionTable, p, t_map: Mapping) -> QuadValue:
    """``sum_H P_{H,F}(p) t_map[H]``; keys missing from ``t_map`` count as zero."""
    total = QuadValue(0)
    for key, t in t_map.items():
        H = key if isinstance(key, CanonGraph) else canonical_H(key)
        if H not in table.entries:
            raise PreconditionError(f"{H} is not a subgraph class of K_{table.m}")
        if t:
            total = total + as_quad(t) * eval_P(table, H, p)
    return total


def t_map_for(table: ExpansionTable, D: StepKernel, budget: int = DEFAULT_BUDGET) -> dict:
    return {H: t_hom(H, D, budget) for H in table.entries}


def verify_expansion_identity(F: Graph, p, D: StepKernel, budget: int = DEFAULT_BUDGET) -> bool:
    """Exact check of ``rho_F(p + D) == rand(F,p) + sum_H P_{H,F}(p) t(H, D)``."""
    p = Fraction(p)
    table = build_table(F)
    lhs = rho_induced(F, add(constant(p), D), budget)
    rhs = rand_density(F, p) + expansion_gap(table, p, t_map_for(table, D, budget))
    return as_quad(lhs) == rhs


def k3_polynomial(F: Graph) -> PolyP:
    """``S_{K3,F}``: the cubic whose roots in (0,1) are the exceptional densities."""
    return build_table(F).entry(complete_graph(3)).S


def exceptional_points(F: Graph) -> list[RootInterval]:
    if F.order < 3:
        raise PreconditionError("exceptional points need v(F) >= 3")
    S = k3_polynomial(F)
    if S.is_zero():
        raise IdenticallyZero(f"S_(K3,F) vanishes identically for F={to_graph6(F)}")
    return isolate_real_roots(S, 0, 1)


def epsilon_polynomial(F: Graph, p, D: StepKernel, budget: int = DEFAULT_BUDGET) -> PolyP:
    """``eps -> rho_F(p + eps D) - rand(F, p)`` as an exact polynomial in ``eps``."""
    table = build_table(F)
    p = Fraction(p)
    coeffs = [Fraction(0)] * (comb(F.order, 2) + 1)
    for ent in table:
        t = t_hom(ent.H, D, budget)
        if t:
            coeffs[ent.num_edges] += eval_P(table, ent.H, p) * t
    return PolyP(coeffs)


def term_rows(table: ExpansionTable, p=None) -> list[dict]:
    rows = []
    for ent in table:
        row = {
            "H": to_graph6(ent.H.graph),
            "e": ent.num_edges,
            "nj": list(ent.nj),
            "S": ent.S.to_json(),
        }
        if p is not None:
            row["P"] = format_rational(eval_P(table, ent.H, p))
        rows.append(row)
    return rows


def table_csv(table: ExpansionTable, p=None) -> str:
    """CSV export: H (graph6), e(H), n_0..n_e, S coefficients, P(p)."""
    width = comb(table.m, 2) + 1
    buf = io.StringIO()
    w = csv.writer(buf)
    header = ["H", "e"] + [f"n_{j}" for j in range(width)] + [f"S_{i}" for i in range(width)]
    if p is not None:
        header.append("P")
    w.writerow(header)
    for row in term_rows(table, p):
        nj = row["nj"] + [""] * (width - len(row["nj"]))
        s = row["S"] + [""] * (width - len(row["S"]))
        out = [row["H"], row["e"]] + nj + s
        if p is not None:
            out.append(row["P"])
        w.writerow(out)
    return buf.getvalue()
