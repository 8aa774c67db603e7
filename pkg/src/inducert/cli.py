"""Command-line entry point ``inducert``.

Exit codes: 0 success, 1 error, 2 exceptional-point referral, 64 usage.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, fields
from fractions import Fraction
from math import comb
from pathlib import Path
from typing import Optional

from .errors import ExceptionalPoint, IdenticallyZero, InducertError
from .exactnum import as_quad, format_rational, parse_rational, quad_sign
from .graphs import canonical_H, complete_graph, graph_name, parse_graph

EXIT_OK, EXIT_ERROR, EXIT_REFERRAL, EXIT_USAGE = 0, 1, 2, 64

log = logging.getLogger("inducert")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(EXIT_USAGE)


@dataclass
class RunConfig:
    k_cap: int = 40
    seed: int = 0
    threads: int = 1
    reps: int = 10_000
    n: Optional[int] = None

    def update(self, values: dict):
        names = {f.name: f for f in fields(self)}
        for key, val in values.items():
            if val is None:
                continue
            if key not in names:
                raise UsageError(f"unknown config key {key!r}")
            val = int(val)
            if val <= 0 and key != "seed":
                raise UsageError(f"{key} must be positive")
            setattr(self, key, val)


def load_config(path: Optional[str]) -> dict:
    """``key=value`` lines; blank lines and ``#`` comments are ignored."""
    if not path:
        return {}
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, val = (x.strip() for x in line.split("=", 1))
        out[key.replace("-", "_")] = val
    return out


def rational_arg(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _emit(obj, out: Optional[str]):
    text = json.dumps(obj, indent=2)
    if out:
        Path(out).write_text(text + "\n")
        print(f"wrote {out}")
    else:
        print(text)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_expand(args, cfg: RunConfig) -> int:
    from .expansion import build_table, eval_P, table_csv

    F = parse_graph(args.graph)
    table = build_table(F)
    print(f"F = {graph_name(F)}  p = {format_rational(args.p)}  ({len(table)} terms)")
    print(f"{'H':>10} {'e':>3}  {'n_j':<30} P(p)")
    for ent in table:
        nj = ",".join(str(x) for x in ent.nj)
        print(f"{graph_name(ent.H):>10} {ent.num_edges:>3}  {nj:<30} {format_rational(eval_P(table, ent.H, args.p))}")
    if args.csv:
        Path(args.csv).write_text(table_csv(table, args.p))
        print(f"wrote {args.csv}")
    return EXIT_OK


def cmd_exceptional(args, cfg: RunConfig) -> int:
    from .expansion import exceptional_points, k3_polynomial

    F = parse_graph(args.graph)
    try:
        roots = exceptional_points(F)
    except IdenticallyZero:
        print("S_(K3,F) is identically zero: the linear route gives no information at any p")
        return EXIT_OK
    print(f"S_(K3,F)(p) = {k3_polynomial(F)}")
    if not roots:
        print("no exceptional points in (0,1)")
    for r in roots:
        print(r)
    return EXIT_OK


def cmd_certify(args, cfg: RunConfig) -> int:
    from .certifier import certify_full, certify_linear

    F = parse_graph(args.graph)
    if args.linear:
        try:
            cert = certify_linear(F, args.p)
        except ExceptionalPoint as exc:
            print(f"exceptional point: {exc}", file=sys.stderr)
            return EXIT_REFERRAL
        _emit(cert.to_json(), args.out)
        return EXIT_OK
    if args.delta is None:
        raise UsageError("--delta is required for the full certificate")
    cert = certify_full(F, args.p, args.delta)
    log.info("certified %s at p=%s: z=%d N=%d", graph_name(F), args.p, cert.z, cert.N)
    _emit(cert.to_json(), args.out)
    return EXIT_OK


def cmd_validate(args, cfg: RunConfig) -> int:
    from .certifier import validate_certificate

    data = json.loads(Path(args.cert).read_text())
    if data.get("route") == "linear":
        ok, why = _validate_linear(data)
    else:
        res = validate_certificate(data)
        ok, why = res.ok, res.failure
    if ok:
        print("certificate valid")
        return EXIT_OK
    print(f"certificate INVALID: {why}")
    return EXIT_ERROR


def _validate_linear(data: dict):
    from .certifier import certify_linear
    from .graphs import parse_graph6
    from .stepkernel import StepKernel, add, constant, rand_density, range_check, rho_induced, scale

    F = parse_graph6(data["F"])
    p = parse_rational(data["p"])
    eps = parse_rational(data["eps"])
    kernel = StepKernel.from_json(data["kernel"])
    W = add(constant(p), scale(int(data["sign"]) * eps, kernel))
    if not range_check(W, 0, 1):
        return False, "perturbed kernel leaves [0,1]"
    gap = rho_induced(F, W) - rand_density(F, p)
    if gap != parse_rational(data["gap"]):
        return False, "gap mismatch"
    if gap <= 0:
        return False, "gap is not positive"
    if certify_linear(F, p).sign != int(data["sign"]):
        return False, "sign disagrees with S_(K3,F)(p)"
    return True, ""


def cmd_propkey(args, cfg: RunConfig) -> int:
    from .ffkernel import ConstKernel, FpKernelSpec, find_domination_k, make_uz, min_degree_two_classes

    z = args.z
    k_cap = args.max_k or cfg.k_cap
    handle = make_uz(z)
    Kz = complete_graph(z)
    if isinstance(handle, ConstKernel):
        t = handle.hom_density(Kz)
        print(f"z = 3: constant kernel -{handle.alpha}; t(K3, U) = {t}")
        return EXIT_OK
    res = find_domination_k(z, min_degree_two_classes(z), handle, k_cap)
    print(f"kernel {json.dumps(res.handle.to_json())}: dominating level k = {res.k}")
    for H, t in sorted(res.t_table.items()):
        print(f"  t({graph_name(H)}, U) = {t}  ~ {float(t):.6g}")
    if isinstance(res.handle, FpKernelSpec):
        p, k = res.handle.p, res.k
        tk = res.t_table[canonical_H(Kz)]
        if k % 2 == 0:
            bound = Fraction(-1, 2 ** comb(z, 2) * p ** (k // 2))
            ok = quad_sign(tk - bound) <= 0
            print(f"  clique bound t(K_{z}) <= -2^-{comb(z, 2)} {p}^-{k // 2}: {'holds' if ok else 'FAILS'}")
        nonclique = max(abs(t) for H, t in res.t_table.items() if H.num_edges != comb(z, 2))
        print(f"  non-clique bound max |t(G)| <= {p}^-{k}: {'holds' if nonclique <= Fraction(1, p**k) else 'FAILS'}")
    return EXIT_OK


def cmd_mc(args, cfg: RunConfig) -> int:
    from .certifier import Certificate
    from .sampler import certificate_crosscheck, estimate_induced
    from .graphs import parse_graph6
    from .stepkernel import StepKernel, add, constant, rand_density, scale

    data = json.loads(Path(args.cert).read_text())
    n = args.n or cfg.n
    reps = args.reps or cfg.reps
    seed = args.seed if args.seed is not None else cfg.seed
    if data.get("route") == "linear":
        F = parse_graph6(data["F"])
        p = parse_rational(data["p"])
        W = add(constant(p), scale(int(data["sign"]) * parse_rational(data["eps"]), StepKernel.from_json(data["kernel"])))
        target = rand_density(F, p) + parse_rational(data["gap"])
        rep = estimate_induced(F, W, n, reps, seed, target=target, threads=cfg.threads)
        gap = float(parse_rational(data["gap"]))
        if not abs(gap) > 5 * rep.stderr:
            rep.below_resolution = True
            rep.note = "gap below statistical resolution"
        out = {"induced_density": rep.to_json()}
    else:
        cert = Certificate.from_json(data)
        res = certificate_crosscheck(cert, n, reps, seed, threads=cfg.threads)
        out = {k: (v.to_json() if hasattr(v, "to_json") else v) for k, v in res.items()}
    _emit(out, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="inducert", description="Exact certificates for induced-subgraph densities above the random value.")
    ap.add_argument("--config", help="key=value file (flags override it)")
    ap.add_argument("--threads", type=int, help="worker threads for sampling")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("expand", help="expansion coefficients P_(H,F)(p)")
    p.add_argument("--graph", required=True, help="name (C5, path3+v, ...) or graph6")
    p.add_argument("--p", required=True, type=rational_arg)
    p.add_argument("--csv", help="write the term table as CSV")
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("exceptional", help="roots of S_(K3,F) in (0,1)")
    p.add_argument("--graph", required=True)
    p.set_defaults(func=cmd_exceptional)

    p = sub.add_parser("certify", help="build a certificate")
    p.add_argument("--graph", required=True)
    p.add_argument("--p", required=True, type=rational_arg)
    p.add_argument("--delta", type=rational_arg)
    p.add_argument("--linear", action="store_true", help="use the linear route (fails at exceptional points)")
    p.add_argument("--out", help="output JSON path (stdout if omitted)")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("validate", help="recompute and check a certificate")
    p.add_argument("--cert", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("propkey", help="find the level at which K_z dominates")
    p.add_argument("--z", required=True, type=int)
    p.add_argument("--max-k", type=int)
    p.set_defaults(func=cmd_propkey)

    p = sub.add_parser("mc", help="Monte Carlo cross-check of a certificate")
    p.add_argument("--cert", required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--reps", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_mc)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if not getattr(args, "func", None):
        ap.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        cfg = RunConfig()
        cfg.update(load_config(args.config))
        cfg.update({"threads": args.threads})
        return args.func(args, cfg)
    except UsageError as exc:
        print(f"inducert: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ExceptionalPoint as exc:
        print(f"exceptional point: {exc}", file=sys.stderr)
        return EXIT_REFERRAL
    except (InducertError, ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"inducert: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
