"""Command-line front end.

Subcommands: compute (zeta | lvalue | series | hurwitz), verify (identities |
symbolic | certificates), convergents, irrationality.  Exit codes: 0 success,
1 verification failure, 2 usage error, 3 precision/bound failure.  Output is
deterministic: JSON is emitted with sorted keys and no timestamps.
"""

from __future__ import annotations

import argparse
import json
import sys

from gmpy2 import mpq

from .bernoulli import SeriesKind
from .errors import BoundError, PrecisionError, UsageError
from . import certify, irrat, lvalues, pade

SCHEMA_VERSION = 1

_KINDS = {"theta": SeriesKind.THETA, "R": SeriesKind.R, "T": SeriesKind.T,
          "theta_small": SeriesKind.THETA_SMALL}


def _parse_rational(text: str) -> mpq:
    try:
        return mpq(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not a rational number: {text!r}") from exc


def _point_from_args(args) -> lvalues.EvalPoint:
    if args.x is not None:
        if args.a is not None or args.F is not None:
            raise UsageError("give either --x a/F or --a/--F, not both")
        x = _parse_rational(args.x)
        return lvalues.EvalPoint(int(x.numerator), int(x.denominator), args.p)
    if args.a is None or args.F is None:
        raise UsageError("a rational point needs --x or both --a and --F")
    return lvalues.EvalPoint(args.a, args.F, args.p)


def _characters(args) -> dict:
    if getattr(args, "config", None):
        return lvalues.load_characters(args.config)
    return lvalues.BUILTIN_CHARACTERS


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def _json(payload) -> str:
    payload = dict(payload)
    payload["schemaVersion"] = SCHEMA_VERSION
    return json.dumps(payload, sort_keys=True, indent=2, default=str)


# ---------------------------------------------------------------------------

def cmd_compute(args) -> int:
    if args.what == "zeta":
        value = lvalues.zeta_p(args.s, args.p, args.N)
    elif args.what == "lvalue":
        chars = _characters(args)
        if args.char not in chars:
            raise UsageError(f"unknown character {args.char!r}; "
                             f"known: {sorted(chars)}")
        value = lvalues.lp(args.s, chars[args.char], args.p, args.N)
    elif args.what == "series":
        kind = _KINDS[args.kind]
        route = lvalues.eval_series_fc if args.route == "fc" else lvalues.eval_series
        value = route(kind, _point_from_args(args), args.N)
    else:  # hurwitz
        value = lvalues.hurwitz_p(args.s, args.a, args.F, args.p, args.N)
    _emit(args, str(value))
    return 0


def cmd_verify(args) -> int:
    if args.suite == "identities":
        if args.N < 16:
            raise UsageError("identity verification needs -N >= 16")
        reports = lvalues.verify_all_identities(args.N, _characters(args))
        payload = {"suite": "identities", "N": args.N,
                   "identities": [r.to_dict() for r in reports]}
        ok = all(r.passed for r in reports)
    elif args.suite == "symbolic":
        if args.M < 8:
            raise UsageError("symbolic verification needs -M >= 8")
        func = certify.check_functional_equations(args.M)
        fc = certify.check_fc_identities(min(args.M, 20), max(args.M, 25))
        orders = [certify.check_pade_order(tag, n)
                  for tag in ("I", "II", "III", "IV") for n in range(13)]
        bases = certify.check_base_cases()
        payload = {"suite": "symbolic", "M": args.M,
                   "functional_equations": func, "fc_identities": fc,
                   "pade_orders": orders, "base_cases": bases}
        ok = (all(e["holds"] for e in func if not e.get("informational"))
              and all(e["holds"] for e in fc)
              and all(e["ok"] for e in orders)
              and all(e["holds"] for e in bases))
    else:  # certificates
        report = certify.verify_all_certificates()
        bases = certify.check_base_cases()
        payload = {"suite": "certificates", **report, "base_cases": bases}
        ok = (all(e["verified"] for e in report["certificates"])
              and not any(e["verified"] for e in report["mutations"])
              and all(e["holds"] for e in bases))
    payload["all_passed"] = ok
    _emit(args, _json(payload))
    return 0 if ok else 1


def cmd_convergents(args) -> int:
    fam = pade.get_family(args.family)
    x = _parse_rational(args.x)
    rows = pade.convergent_seq(fam, x, args.nmax)
    valuations = None
    if args.p is not None:
        pt = lvalues.EvalPoint(int(x.numerator), int(x.denominator), args.p)
        valuations = dict(pade.remainder_valuation(fam, pt, args.N, args.nmax))
    if args.format == "csv":
        _emit(args, pade.rows_to_csv(fam, rows, valuations, x=x))
    else:
        payload = {"family": fam.tag, "x": str(x),
                   "rows": [{"n": r.n, "p": str(r.p), "q": str(r.q),
                             **({"remainder_valuation": valuations[r.n]}
                                if valuations else {})}
                            for r in rows]}
        _emit(args, _json(payload))
    return 0


def cmd_irrationality(args) -> int:
    if args.gap:
        pt = lvalues.EvalPoint(args.a, args.F, args.p)
        report = irrat.gap_diagnostic(args.family, pt, args.N, args.nmax)
        _emit(args, _json({"gap": report}))
        return 0
    if args.audit:
        report = irrat.denominator_audit(args.family, args.a, args.F, args.nmax)
        _emit(args, _json({"audit": report}))
        return 0 if report["all_ok"] else 1
    if args.table:
        _emit(args, _json({"corollaries": irrat.corollary_table()}))
        return 0
    if args.which is None:
        raise UsageError("irrationality needs --which A|B|C (or --table/--audit/--gap)")
    report = irrat.condition_stable(args.which, args.p, args.F, args.digits)
    _emit(args, _json({"condition": report.to_dict()}))
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="padic-lvalues",
        description="p-adic L-values via Bernoulli series and Stieltjes-type "
                    "convergents; identity verification; irrationality "
                    "conditions.")
    sub = top.add_subparsers(dest="command", required=True)

    def common(p, N_default=128):
        p.add_argument("-N", type=int, default=N_default,
                       help="p-adic precision (digits of p)")
        p.add_argument("--config", help="INI-style character table file")
        p.add_argument("--out", help="write output to a file instead of stdout")

    comp = sub.add_parser("compute", help="compute one p-adic value")
    comp_sub = comp.add_subparsers(dest="what", required=True)
    for what in ("zeta", "lvalue", "series", "hurwitz"):
        c = comp_sub.add_parser(what)
        c.add_argument("-p", type=int, required=True, help="the prime p")
        common(c)
        if what in ("zeta", "lvalue", "hurwitz"):
            c.add_argument("-s", type=int, required=True)
        if what == "lvalue":
            c.add_argument("--char", required=True,
                           help="character name (chi8, chi12, chi5, chi4, ...)")
        if what == "series":
            c.add_argument("--kind", choices=sorted(_KINDS), required=True)
            c.add_argument("--route", choices=["bernoulli", "fc"],
                           default="bernoulli")
        if what in ("series", "hurwitz"):
            c.add_argument("--a", type=int)
            c.add_argument("--F", type=int)
        if what == "series":
            c.add_argument("--x", help="rational point a/F")
        c.set_defaults(func=cmd_compute)

    ver = sub.add_parser("verify", help="run a verification suite")
    ver_sub = ver.add_subparsers(dest="suite", required=True)
    vi = ver_sub.add_parser("identities")
    common(vi, N_default=256)
    vs = ver_sub.add_parser("symbolic")
    vs.add_argument("-M", type=int, default=40, help="Laurent comparison order")
    common(vs)
    vc = ver_sub.add_parser("certificates")
    common(vc)
    for v in (vi, vs, vc):
        v.set_defaults(func=cmd_verify)

    conv = sub.add_parser("convergents", help="emit convergent tables")
    conv.add_argument("--family", required=True, choices=["I", "II", "III", "IV"])
    conv.add_argument("--x", required=True, help="rational point")
    conv.add_argument("--nmax", type=int, default=50)
    conv.add_argument("--format", choices=["csv", "json"], default="csv")
    conv.add_argument("-p", type=int, help="prime (adds remainder valuations)")
    common(conv)
    conv.set_defaults(func=cmd_convergents)

    irr = sub.add_parser("irrationality", help="conditions, audits, gap tables")
    irr.add_argument("--which", choices=["A", "B", "C"])
    irr.add_argument("-p", "--p", dest="p", type=int)
    irr.add_argument("--F", type=int)
    irr.add_argument("--a", type=int, default=1)
    irr.add_argument("--digits", type=int, default=50)
    irr.add_argument("--table", action="store_true",
                     help="evaluate the corollary routing table")
    irr.add_argument("--audit", action="store_true",
                     help="denominator audit for --family at (a, F)")
    irr.add_argument("--gap", action="store_true",
                     help="approximation gap diagnostic for --family at (a, F)")
    irr.add_argument("--family", choices=["I", "II", "III"], default="I")
    irr.add_argument("--nmax", type=int, default=60)
    common(irr, N_default=512)
    irr.set_defaults(func=cmd_irrationality)
    return top


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (PrecisionError, BoundError) as exc:
        print(f"computational failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
