"""Certificates that the induced density of ``F`` at ``p`` beats the random value.

Two routes:

* :func:`certify_linear`: perturb the constant graphon by ``eps * Delta`` for a
  fixed 3x3 kernel with ``t(K3, Delta) > 0``; works whenever the cubic
  ``S_{K3,F}(p)`` is nonzero.
* :func:`certify_full`: ``Delta = delta * B (x) (lambda U)^{(x) N} (x) W``
  where ``B`` is balanced (killing every graph with a degree-1 vertex), ``U``
  makes one clique dominate the rest of the support and ``W`` fixes the sign of
  that clique's term. Works at every ``p``, exceptional or not.

Every number in a certificate is exact and :func:`validate_certificate`
recomputes all of them from the serialized data.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .errors import ExceptionalPoint, PreconditionError, SupportDegenerate
from .exactnum import (
    PolyP,
    QuadValue,
    as_quad,
    format_rational,
    parse_rational,
    quad_sign,
    rational_upper_bound,
)
from .expansion import build_table, epsilon_polynomial, eval_P, k3_polynomial
from .ffkernel import (
    KernelHandle,
    dominates,
    find_domination_k,
    handle_from_json,
    make_uz,
    smallest_negative_level,
)
from .graphs import CanonGraph, Graph, canonical_H, complete_graph, is_clique, min_degree, parse_graph6, to_graph6
from .stepkernel import (
    LazyTensorKernel,
    StepKernel,
    add,
    balanced_kernel_B,
    constant,
    linear_direction_kernel,
    rand_density,
    range_check,
    rank_one_kernel,
    rho_induced,
    scale,
    t_hom,
)

MIN_ORDER, MAX_ORDER = 3, 7
LAMBDA_BITS_CAP = 64
N_CAP = 100_000


def _check_order(F: Graph):
    if not MIN_ORDER <= F.order <= MAX_ORDER:
        raise PreconditionError(f"certificates need {MIN_ORDER} <= v(F) <= {MAX_ORDER}, got {F.order}")


def _check_p(p: Fraction):
    if not 0 < p < 1:
        raise PreconditionError(f"p must lie strictly between 0 and 1, got {p}")


# ---------------------------------------------------------------------------
# linear route
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LinearCertificate:
    F: Graph
    p: Fraction
    eps: Fraction
    sign: int
    kernel: StepKernel
    gap: Fraction
    eps_poly: PolyP

    def perturbed(self) -> StepKernel:
        return add(constant(self.p), scale(self.sign * self.eps, self.kernel))

    def to_json(self) -> dict:
        return {
            "route": "linear",
            "F": to_graph6(self.F),
            "p": format_rational(self.p),
            "eps": format_rational(self.eps),
            "sign": self.sign,
            "kernel": self.kernel.to_json(),
            "gap": format_rational(self.gap),
            "eps_poly": self.eps_poly.to_json(),
        }


def certify_linear(F: Graph, p) -> LinearCertificate:
    p = Fraction(p)
    _check_order(F)
    _check_p(p)
    s_val = k3_polynomial(F)(p)
    if s_val == 0:
        raise ExceptionalPoint(f"p = {p} is a root of S_(K3,F); use the full certificate")
    sgn = 1 if s_val > 0 else -1
    delta = linear_direction_kernel()
    poly = epsilon_polynomial(F, p, delta)
    eps = min(p, 1 - p) / 2
    while True:
        gap = poly(sgn * eps)
        W = add(constant(p), scale(sgn * eps, delta))
        if gap > 0 and range_check(W, 0, 1):
            break
        eps /= 2
    direct = rho_induced(F, W) - rand_density(F, p)
    assert direct == gap, "epsilon polynomial disagrees with direct integration"
    return LinearCertificate(F, p, eps, sgn, delta, gap, poly)


# ---------------------------------------------------------------------------
# C5 diagnostic
# ---------------------------------------------------------------------------


@dataclass
class DiagnosticRow:
    kernel: StepKernel
    eps_poly: PolyP
    order: Optional[int]
    coefficient: Fraction
    ok: bool
    note: str = ""


@dataclass
class C5Report:
    coefficients: dict
    rows: list = field(default_factory=list)

    @property
    def all_ok(self) -> bool:
        return all(r.ok for r in self.rows if r.note != "degenerate input")


def balanced_rank_one_battery(count: int, seed: int = 0) -> list[StepKernel]:
    """Kernels ``f(x) f(y)`` with ``int f = 0`` on random rational step partitions."""
    rng = random.Random(seed)
    out = [balanced_kernel_B()]
    while len(out) < count:
        n = rng.randint(2, 4)
        raw = [rng.randint(1, 6) for _ in range(n)]
        widths = [Fraction(r, sum(raw)) for r in raw]
        f = [Fraction(rng.randint(-6, 6), rng.randint(1, 4)) for _ in range(n)]
        mean = sum(w * x for w, x in zip(widths, f))
        f = [x - mean for x in f]
        if all(x == 0 for x in f):
            continue
        top = max(abs(x) for x in f)
        f = [x / top for x in f]
        out.append(rank_one_kernel(f, widths))
    return out


def c5_diagnostic(kernels=None, count: int = 10, seed: int = 0) -> C5Report:
    """Second- and fourth-order coefficients for the 5-cycle at 1/2, and the sign of the
    lowest-order term of the epsilon-polynomial for a battery of balanced kernels."""
    from .graphs import NAMED_GRAPHS

    F = NAMED_GRAPHS["C5"]
    half = Fraction(1, 2)
    table = build_table(F)
    coeffs = {
        "P_P2": eval_P(table, NAMED_GRAPHS["P2"], half),
        "P_C4": eval_P(table, NAMED_GRAPHS["C4"], half),
    }
    report = C5Report(coeffs)
    if kernels is None:
        kernels = balanced_rank_one_battery(count, seed)
    for D in kernels:
        poly = epsilon_polynomial(F, half, D)
        if poly.is_zero():
            report.rows.append(DiagnosticRow(D, poly, None, Fraction(0), False, "degenerate input"))
            continue
        order = next(i for i in range(poly.degree + 1) if poly.coeff(i))
        c = poly.coeff(order)
        report.rows.append(DiagnosticRow(D, poly, order, c, order % 2 == 0 and c < 0))
    return report


# ---------------------------------------------------------------------------
# full route
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SupportRow:
    H: CanonGraph
    P: Fraction
    tB: Fraction
    tU: QuadValue
    tW: QuadValue
    contribution: QuadValue

    @property
    def e(self) -> int:
        return self.H.num_edges

    def to_json(self) -> dict:
        return {
            "H": to_graph6(self.H.graph),
            "e": self.e,
            "P": format_rational(self.P),
            "tB": format_rational(self.tB),
            "tU": self.tU.to_json(),
            "tW": self.tW.to_json(),
            "contribution": self.contribution.to_json(),
        }

    @classmethod
    def from_json(cls, d: dict) -> "SupportRow":
        return cls(
            canonical_H(parse_graph6(d["H"])),
            parse_rational(d["P"]),
            parse_rational(d["tB"]),
            QuadValue.from_json(d["tU"]),
            QuadValue.from_json(d["tW"]),
            QuadValue.from_json(d["contribution"]),
        )


CONST1 = "const1"


@dataclass(frozen=True)
class Certificate:
    F: Graph
    p: Fraction
    delta: Fraction
    lam: Fraction
    m: int
    handle_U: KernelHandle
    z: int
    N: int
    W_choice: Union[str, KernelHandle]
    support: tuple
    gap: QuadValue
    gamma: Fraction

    def w_kernel(self):
        return constant(1) if self.W_choice == CONST1 else self.W_choice

    def kernel(self) -> LazyTensorKernel:
        """``Delta = delta lambda^N * B (x) U^{(x) N} (x) W``."""
        factors = [balanced_kernel_B()] + [self.handle_U] * self.N + [self.w_kernel()]
        return LazyTensorKernel(tuple(factors), self.delta * self.lam**self.N)

    def to_json(self) -> dict:
        return {
            "route": "full",
            "F": to_graph6(self.F),
            "p": format_rational(self.p),
            "delta": format_rational(self.delta),
            "lambda": format_rational(self.lam),
            "m": self.m,
            "handle_U": self.handle_U.to_json(),
            "z": self.z,
            "N": self.N,
            "W_choice": CONST1 if self.W_choice == CONST1 else self.W_choice.to_json(),
            "gamma": format_rational(self.gamma),
            "support": [r.to_json() for r in self.support],
            "gap": self.gap.to_json(),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    @classmethod
    def from_json(cls, d: dict) -> "Certificate":
        w = d["W_choice"]
        return cls(
            parse_graph6(d["F"]),
            parse_rational(d["p"]),
            parse_rational(d["delta"]),
            parse_rational(d["lambda"]),
            int(d["m"]),
            handle_from_json(d["handle_U"]),
            int(d["z"]),
            int(d["N"]),
            CONST1 if w == CONST1 else handle_from_json(w),
            tuple(SupportRow.from_json(r) for r in d["support"]),
            QuadValue.from_json(d["gap"]),
            parse_rational(d["gamma"]),
        )


def _coefficients(F: Graph, p: Fraction, delta: Fraction) -> dict:
    """``c_H = P_{H,F}(p) delta^e(H) t(H, B)`` for min-degree-2 ``H`` with ``c_H != 0``."""
    table = build_table(F)
    B = balanced_kernel_B()
    out = {}
    for H in table.entries:
        if min_degree(H.graph) < 2:
            continue
        P = eval_P(table, H, p)
        tB = t_hom(H, B)
        c = P * delta**H.num_edges * tB
        if c:
            out[H] = (P, tB, c)
    return out


def choose_lambda(t_table: dict) -> tuple[Fraction, CanonGraph]:
    """``lambda = 1`` if one clique has the largest ``|t|``, else the largest ``1 - 2^-j``
    below which the fewest-edge maximizing clique becomes the unique maximizer of
    ``lambda^e(H) |t(H, U)|``."""
    absval = {H: abs(as_quad(t)) for H, t in t_table.items()}
    top = max(absval.values())
    maximizers = [H for H, v in absval.items() if v == top]
    if len(maximizers) == 1:
        return Fraction(1), maximizers[0]
    if not all(is_clique(H.graph) for H in maximizers):
        raise AssertionError("a non-clique attains the maximum |t(H, U)|")
    best = min(maximizers, key=lambda H: H.num_edges)
    for j in range(1, LAMBDA_BITS_CAP + 1):
        lam = 1 - Fraction(1, 2**j)
        lead = absval[best] * lam**best.num_edges
        if all(absval[H] * lam**H.num_edges < lead for H in absval if H != best):
            return lam, best
    raise AssertionError("no lambda makes a clique the unique maximizer")


def gamma_bound(t_table: dict, lam: Fraction, lead: CanonGraph) -> Fraction:
    """Rational ``gamma < 1`` bounding ``|t(H, lam U)| / |t(K_z, lam U)|`` over the rest of the support."""
    denom = abs(as_quad(t_table[lead])) * lam**lead.num_edges
    ratios = [abs(as_quad(t)) * lam**H.num_edges / denom for H, t in t_table.items() if H != lead]
    if not ratios:
        return Fraction(0)
    return rational_upper_bound(max(ratios), below=1)


def minimal_even_N(c_z, tW_z, gamma: Fraction, rest_sum: Fraction) -> int:
    """Smallest even ``N >= 2`` with ``c_z t(K_z, W) > gamma^N * sum_{H != K_z} |c_H|``."""
    lead = as_quad(c_z) * as_quad(tW_z)
    if quad_sign(lead) <= 0:
        raise AssertionError("leading term must be positive")
    N = 2
    while not lead > gamma**N * rest_sum:
        N += 2
        if N > N_CAP:
            raise AssertionError(f"N exceeds {N_CAP}")
    return N


def choose_W(z: int, c_z) -> Union[str, KernelHandle]:
    if quad_sign(as_quad(c_z)) > 0:
        return CONST1
    return smallest_negative_level(z, make_uz(z))


def _tW(W, H) -> QuadValue:
    if W == CONST1:
        return QuadValue(1)
    return as_quad(W.hom_density(H))


def certify_full(F: Graph, p, delta) -> Certificate:
    p, delta = Fraction(p), Fraction(delta)
    _check_order(F)
    _check_p(p)
    if not 0 < delta <= min(p, 1 - p):
        raise PreconditionError(f"delta must satisfy 0 < delta <= min(p, 1-p), got {delta}")
    m = F.order
    coeffs = _coefficients(F, p, delta)
    Km = canonical_H(complete_graph(m))
    if Km not in coeffs:
        raise SupportDegenerate("the K_m coefficient vanishes")
    support = list(coeffs)

    dom = find_domination_k(m, support, make_uz(m))
    lam, lead = choose_lambda(dom.t_table)
    z = lead.order
    gamma = gamma_bound(dom.t_table, lam, lead)
    c_z = coeffs[lead][2]
    W = choose_W(z, c_z)
    tW = {H: _tW(W, H) for H in support}
    rest = sum((abs(coeffs[H][2]) for H in support if H != lead), Fraction(0))
    N = minimal_even_N(c_z, tW[lead], gamma, rest)

    rows = []
    gap = QuadValue(0)
    for H in support:
        P, tB, c = coeffs[H]
        tU = dom.t_table[H]
        contrib = as_quad(c) * (tU * lam**H.num_edges) ** N * tW[H]
        gap = gap + contrib
        rows.append(SupportRow(H, P, tB, tU, tW[H], contrib))
    if quad_sign(gap) != 1:
        raise AssertionError("certificate gap is not positive")
    # the inequality chain: gap >= lead term - gamma^N * rest * |t_z|^N > 0
    tz_pow = (dom.t_table[lead] * lam**lead.num_edges) ** N
    assert gap >= (as_quad(c_z) * tW[lead] - gamma**N * rest) * tz_pow
    return Certificate(F, p, delta, lam, m, dom.handle, z, N, W, tuple(rows), gap, gamma)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ValidationResult:
    ok: bool
    failure: str = ""

    def __bool__(self):
        return self.ok


def _fail(msg: str) -> ValidationResult:
    return ValidationResult(False, msg)


def validate_certificate(c: Union[Certificate, dict, str]) -> ValidationResult:
    """Recompute every value of a certificate; report the first failing check."""
    try:
        if isinstance(c, str):
            c = json.loads(c)
        if isinstance(c, dict):
            c = Certificate.from_json(c)
        return _validate(c)
    except Exception as exc:  # malformed input is a failed validation, not a crash
        return _fail(f"{type(exc).__name__}: {exc}")


def _validate(c: Certificate) -> ValidationResult:
    F = c.F
    if c.m != F.order:
        return _fail("m does not match v(F)")
    if not MIN_ORDER <= c.m <= MAX_ORDER:
        return _fail("v(F) out of range")
    if not 0 < c.p < 1:
        return _fail("p out of range")
    if not 0 < c.delta <= min(c.p, 1 - c.p):
        return _fail("delta out of range")
    if not 0 < c.lam <= 1:
        return _fail("lambda out of range")
    if c.N < 2 or c.N % 2:
        return _fail("N must be a positive even integer")
    if not 3 <= c.z <= c.m:
        return _fail("z out of range")
    if not 0 <= c.gamma < 1:
        return _fail("gamma out of range")

    coeffs = _coefficients(F, c.p, c.delta)
    rows = {r.H: r for r in c.support}
    if len(rows) != len(c.support) or set(rows) != set(coeffs):
        return _fail("support differs from the nonzero coefficient set")

    # values recomputed from the serialized kernels
    U = c.handle_U
    W = c.W_choice
    tU = {H: as_quad(U.hom_density(H)) for H in rows}
    gap = QuadValue(0)
    for H, r in rows.items():
        P, tB, coef = coeffs[H]
        if r.P != P:
            return _fail(f"P mismatch for {H}")
        if r.tB != tB:
            return _fail(f"t(H,B) mismatch for {H}")
        if r.tU != tU[H]:
            return _fail(f"t(H,U) mismatch for {H}")
        if r.tW != _tW(W, H):
            return _fail(f"t(H,W) mismatch for {H}")
        contrib = as_quad(coef) * (tU[H] * c.lam**H.num_edges) ** c.N * r.tW
        if r.contribution != contrib:
            return _fail(f"contribution mismatch for {H}")
        gap = gap + contrib
    if gap != c.gap:
        return _fail("gap mismatch")
    if quad_sign(gap) != 1:
        return _fail("gap is not positive")

    # the structural choices must be the canonical ones
    Km = canonical_H(complete_graph(c.m))
    if not dominates(tU, Km):
        return _fail("K_m does not dominate the support under U")
    expected_U = make_uz(c.m)
    if type(U) is not type(expected_U) or (
        getattr(U, "p", None), getattr(U, "s", None), getattr(U, "z", None)
    ) != (getattr(expected_U, "p", None), getattr(expected_U, "s", None), getattr(expected_U, "z", None)):
        return _fail("kernel U is not the canonical family for K_m")
    try:
        lam, lead = choose_lambda(tU)
    except AssertionError as exc:
        return _fail(str(exc))
    if lam != c.lam:
        return _fail("lambda is not the canonical choice")
    if lead.order != c.z or not is_clique(lead.graph):
        return _fail("z is not the order of the dominating clique")
    if gamma_bound(tU, lam, lead) != c.gamma:
        return _fail("gamma is not the canonical bound")
    c_z = coeffs[lead][2]
    expected_W = choose_W(c.z, c_z)
    if expected_W != W:
        return _fail("W is not the canonical choice")
    rest = sum((abs(coeffs[H][2]) for H in rows if H != lead), Fraction(0))
    try:
        N = minimal_even_N(c_z, rows[lead].tW, c.gamma, rest)
    except AssertionError as exc:
        return _fail(str(exc))
    if N != c.N:
        return _fail("N is not the minimal even exponent")
    return ValidationResult(True)


# ---------------------------------------------------------------------------
# mutations (used to exercise the validator)
# ---------------------------------------------------------------------------


def _bump_quad(d: dict) -> dict:
    q = QuadValue.from_json(d)
    return (q * 2 + 1).to_json()


def mutations(cert_json: dict) -> list:
    """Named single-field mutations of a certificate JSON; each yields a different certificate."""

    def bump_rat(key, f):
        def mut(d):
            d[key] = format_rational(f(parse_rational(d[key])))
        return mut

    def set_key(key, f):
        def mut(d):
            d[key] = f(d[key])
        return mut

    def row_field(i, key, f):
        def mut(d):
            d["support"][i][key] = f(d["support"][i][key])
        return mut

    def handle_k(d):
        d["handle_U"] = dict(d["handle_U"])
        if d["handle_U"]["kind"] == "fp":
            d["handle_U"]["k"] += 4
        elif d["handle_U"]["kind"] == "f2":
            d["handle_U"]["q"] = [1 - b for b in d["handle_U"]["q"]]
        else:
            d["handle_U"]["alpha"] = "1/3"

    def swap_W(d):
        if d["W_choice"] == CONST1:
            d["W_choice"] = make_uz(d["z"]).to_json()
        else:
            d["W_choice"] = CONST1

    def drop_row(d):
        d["support"] = d["support"][:-1]

    def other_F(d):
        # toggle the first vertex pair
        g = parse_graph6(d["F"])
        edges = set(g.edges) ^ {(0, 1)}
        d["F"] = to_graph6(Graph(g.order, edges))

    out = [
        ("N+2", set_key("N", lambda n: n + 2)),
        ("N-2", set_key("N", lambda n: n - 2)),
        ("N+1", set_key("N", lambda n: n + 1)),
        ("delta/2", bump_rat("delta", lambda x: x / 2)),
        ("lambda/2", bump_rat("lambda", lambda x: x / 2)),
        ("gamma", bump_rat("gamma", lambda x: (1 + x) / 2)),
        ("p=delta/2", lambda d: d.__setitem__("p", format_rational(parse_rational(d["delta"]) / 2))),
        ("z-1", set_key("z", lambda z: z - 1)),
        ("m+1", set_key("m", lambda m: m + 1)),
        ("gap", set_key("gap", _bump_quad)),
        ("handle_U", handle_k),
        ("W_choice", swap_W),
        ("drop_row", drop_row),
        ("F", other_F),
    ]
    for i in range(len(cert_json["support"])):
        out.append((f"row{i}.tU", row_field(i, "tU", _bump_quad)))
        out.append((f"row{i}.P", row_field(i, "P", lambda s: format_rational(parse_rational(s) + 1))))
        out.append((f"row{i}.contribution", row_field(i, "contribution", _bump_quad)))
    return out


def apply_mutation(cert_json: dict, mut) -> dict:
    d = json.loads(json.dumps(cert_json))
    mut(d)
    return d
