"""Command-line interface: ``prb <command> [options]``.

Exit status is 0 on success, 1 when the engine rejects the input (domain or
precondition errors), 2 on malformed input.  Results are printed as JSON by
default; errors are printed as a JSON object on stdout with a one-line
diagnostic on stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from .arith import Poly, RatFun
from .balls import decimal_up, dyadic_hex, round_up
from .errors import InternalError, ParseError, PrbError
from .parse import parse_gaussian, parse_number, parse_poly, parse_problem
from .ratmajorant import bound_ratpoly

DEFAULT_PRECISION = 128


def _dyadic(x: Fraction) -> dict:
    # rounding up to a 64-bit mantissa is exact for short dyadics
    x = round_up(x, 64)
    return {"hex": dyadic_hex(x), "decimal": decimal_up(x, 17)}


def _load(path: str):
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, encoding="utf-8") as f:
                text = f.read()
    except OSError as e:
        raise ParseError(f"cannot read problem file: {e.strerror}", 1, 1, path) from None
    return parse_problem(text, path)


def _bound_for(spec, bits, refine):
    from .seqbounds import bound_rec
    init = spec.initial
    return bound_rec(spec.recurrence, init, initial_are_bounds=spec.initial_are_bounds,
                     allow_nonreversible=spec.allow_nonreversible, bits=bits, refine_limit=refine)


def _params_json(b) -> dict:
    from .seqbounds import symbolic_bound
    _, ahi = b.alpha_interval()
    sb = symbolic_bound(b)
    return {
        "kappa": {"p": b.p, "q": b.q},
        "p_alpha": str(b.p_alpha),
        "alpha_upper": decimal_up(round_up(ahi, 64), 17),
        "alpha_upper_hex": dyadic_hex(round_up(ahi, 64)),
        "T": b.T,
        "K": b.K,
        "A": _dyadic(b.A),
        "shift": b.shift,
        "prefix": [_dyadic(x) for x in b.prefix],
        "formula_text": sb.text(),
        "formula_latex": sb.latex(),
    }


def cmd_bound_rec(args, bits, refine):
    spec = _load(args.input)
    b = _bound_for(spec, bits, refine)
    out = _params_json(b)
    return out, {"text": out["formula_text"], "latex": out["formula_latex"]}


def cmd_bound_ratfun(args, bits, refine):
    num = parse_poly(args.num, "z", "--num")
    den = parse_poly(args.den, "z", "--den")
    pa = parse_poly(args.palpha, "z", "--palpha")
    if den.is_zero():
        raise ParseError("zero denominator", 1, 1, "--den")
    res = bound_ratpoly(RatFun(num, den), pa, args.m, bits=bits, refine=refine > 0,
                        refine_limit=refine)
    out = {"M": _dyadic(res.M), "m": res.m, "p_alpha": str(pa), "N0": res.N0}
    return out, None


def cmd_tail(args, bits, refine):
    from .tails import TailQuery, abs_point, tail_bound
    spec = _load(args.input)
    b = _bound_for(spec, bits, refine)
    z = parse_gaussian(args.point, "--point") if args.point is not None else spec.point
    if z is None:
        raise ParseError("no evaluation point (use --point)", 1, 1, "--point")
    order = args.order if args.order is not None else spec.order
    ev = tail_bound(TailQuery(b, abs_point(z), order, args.start))
    out = {
        "regime": ev.regime.value,
        "from": args.start,
        "order": order,
        "r": _dyadic(ev.r) if ev.r is not None else None,
        "h": _dyadic(ev.h_value) if ev.h_value is not None else None,
        "bound": _dyadic(ev.bound),
    }
    return out, None


def cmd_truncation_order(args, bits, refine):
    from .tails import truncation_order
    spec = _load(args.input)
    b = _bound_for(spec, bits, refine)
    z = parse_gaussian(args.point, "--point") if args.point is not None else spec.point
    if z is None:
        raise ParseError("no evaluation point (use --point)", 1, 1, "--point")
    eps = parse_number(args.eps, "--eps") if args.eps is not None else spec.eps
    if eps is None:
        raise ParseError("no target accuracy (use --eps)", 1, 1, "--eps")
    order = args.order if args.order is not None else spec.order
    N = truncation_order(b, z, eps, order)
    return {"N": N}, None


def cmd_check(args, bits, refine):
    from .oracle import check_certificate
    spec = _load(args.input)
    b = _bound_for(spec, bits, refine)
    rep = check_certificate(spec.recurrence, spec.initial, b, args.upto)
    return rep.to_json(), None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, default=argparse.SUPPRESS, metavar="BITS",
                        help=f"working precision in bits (default {DEFAULT_PRECISION})")
    common.add_argument("--refine", type=int, default=argparse.SUPPRESS, metavar="N",
                        help="largest N_0 for rational majorant refinement (0 disables)")
    common.add_argument("--format", choices=("json", "text", "latex"), default=argparse.SUPPRESS)

    p = argparse.ArgumentParser(prog="prb", parents=[common],
                                description="Certified bounds for P-recursive sequences.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("bound-rec", parents=[common], help="bound parameters and formula")
    s.add_argument("-i", "--input", required=True, help="problem file (JSON), '-' for stdin")
    s.set_defaults(func=cmd_bound_rec)

    s = sub.add_parser("bound-ratfun", parents=[common], help="majorant for a rational function")
    s.add_argument("--num", required=True)
    s.add_argument("--den", required=True)
    s.add_argument("--palpha", required=True)
    s.add_argument("-m", type=int, required=True)
    s.set_defaults(func=cmd_bound_ratfun)

    s = sub.add_parser("tail", parents=[common], help="bound on a tail of the series")
    s.add_argument("-i", "--input", required=True)
    s.add_argument("--point")
    s.add_argument("--from", dest="start", type=int, default=0)
    s.add_argument("--order", type=int)
    s.set_defaults(func=cmd_tail)

    s = sub.add_parser("truncation-order", parents=[common], help="certified truncation order")
    s.add_argument("-i", "--input", required=True)
    s.add_argument("--point")
    s.add_argument("--eps")
    s.add_argument("--order", type=int)
    s.set_defaults(func=cmd_truncation_order)

    s = sub.add_parser("check", parents=[common], help="compare the bound with exact values")
    s.add_argument("-i", "--input", required=True)
    s.add_argument("--upto", type=int, default=200)
    s.set_defaults(func=cmd_check)
    return p


def _render_plain(out: dict) -> str:
    lines = []
    for k, v in out.items():
        if isinstance(v, dict) and "decimal" in v:
            v = v["decimal"]
        lines.append(f"{k}: {v}")
    return "\n".join(lines)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    bits = getattr(args, "precision", DEFAULT_PRECISION)
    env = os.environ.get("PRB_PRECISION")
    if env:
        try:
            bits = int(env)
        except ValueError:
            parser.error("PRB_PRECISION must be an integer")
    if bits < 16:
        parser.error("precision must be at least 16 bits")
    refine = getattr(args, "refine", 512)
    fmt = getattr(args, "format", "json")
    try:
        out, formulas = args.func(args, bits, refine)
    except PrbError as e:
        print(json.dumps(e.to_json()))
        print(f"prb: {e}", file=sys.stderr)
        return e.exit_code
    except (ZeroDivisionError, ArithmeticError, ValueError) as e:
        err = InternalError(str(e))
        print(json.dumps(err.to_json()))
        print(f"prb: internal error: {e}", file=sys.stderr)
        return 1
    if fmt == "json":
        print(json.dumps(out))
    elif formulas is not None:
        print(formulas[fmt])
    else:
        print(_render_plain(out))
    return 0


if __name__ == "__main__":
    sys.exit(main())
