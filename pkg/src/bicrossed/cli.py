"""Command line driver: ``bclab <command> ...``; every command prints JSON.

Exit status: 0 when every check passes, 1 when some check fails, 2 on
usage or input errors.
"""
from __future__ import annotations

import argparse
import ast
import json
import operator
import sys
from fractions import Fraction

from . import matched as M
from . import pentagon as P
from . import ring as R
from . import scenario as SC
from . import unitary as U
from .padic import DEFAULT_PRECISION, PAdicNumber

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _emit(payload: dict, out: str | None) -> None:
    text = SC.dumps(SC._jsonable(payload))
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_json_arg(text: str):
    """A JSON literal, or ``@path`` for a JSON file."""
    if text.startswith("@"):
        with open(text[1:]) as fh:
            text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"bad JSON argument: {exc.msg} at line {exc.lineno}, column {exc.colno}")


# padic eval: a tiny arithmetic language evaluated in Q_p

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}


def eval_padic(expr: str, prime: int, precision: int = DEFAULT_PRECISION) -> PAdicNumber:
    """Evaluate integer/rational arithmetic (+ - * / ** and parentheses) in Q_p."""
    try:
        tree = ast.parse(expr, mode="eval")
    except SyntaxError as exc:
        raise UsageError(f"cannot parse {expr!r}: {exc.msg} at column {exc.offset}")

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
            return PAdicNumber.from_rational(node.value, prime, precision)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.BinOp) and isinstance(node.op, ast.Pow):
            if not (isinstance(node.right, ast.Constant) and isinstance(node.right.value, int)):
                raise UsageError("exponents must be integer literals")
            return ev(node.left) ** node.right.value
        raise UsageError(f"unsupported syntax: {ast.dump(node)[:60]}")

    return ev(tree)


def _padic_json(x: PAdicNumber) -> dict:
    rat = x.to_rational()
    return {"prime": x.prime, "text": str(x), "valuation": x.valuation,
            "precision": x.precision, "rational": None if rat is None else str(rat)}


def _ring_value_json(desc, v):
    if isinstance(v, PAdicNumber):
        rat = v.to_rational()
        return str(rat) if rat is not None else str(v)
    if isinstance(v, R.Adele):
        return v.to_json()
    return v


# command handlers: each returns (passed, payload)


def cmd_run(args):
    try:
        with open(args.scenario) as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(str(exc))
    scenario = SC.parse_scenario(text)
    report = SC.run_scenario(scenario, timestamp=not args.no_timestamp)
    return SC.report_passed(report), report


def cmd_pentagon_verify(args):
    v = P.builtin_map(args.map) if not args.map.lstrip().startswith(("{", "@")) \
        else P.PentagonalMap.from_json(_load_json_arg(args.map))
    ss = SC.check_seed(args.seed, 0, "pentagon")
    rep = P.pentagon_identity_check(v, args.samples, ss)
    payload = {"pentagon": rep.to_json()}
    ok = rep.ok
    if v.inverse is not None:
        inv = P.inverse_check(v, args.samples, SC.check_seed(args.seed, 0, "inverse"))
        payload["inverse"] = inv.to_json()
        ok = ok and inv.ok
    if args.derived:
        der = P.derived_maps_check(v, args.samples, SC.check_seed(args.seed, 0, "derived"))
        payload["derived"] = der
        ok = ok and der["ok"]
    payload["verdict"] = "pass" if ok else "fail"
    return ok, payload


def cmd_pentagon_qplus(args):
    window = P.calkin_wilf(args.window)
    rep = P.qplus_slice_structure(window)
    return rep["ok"], rep


def cmd_bicrossed_report(args):
    mp = SC.resolve_pair(args.pair if not args.pair.lstrip().startswith(("{", "@"))
                         else _load_json_arg(args.pair))
    rep = U.pair_report(mp, dump=args.dump)
    return rep["pentagon"] and rep["verdict"] == "regular", rep


def _adeles(arg) -> R.RestrictedAdeles:
    if arg in R.BUILTIN_RINGS:
        desc = R.BUILTIN_RINGS[arg]()
    else:
        data = _load_json_arg(arg)
        desc = R.ring_from_json(data) if "kind" in data and "pool" in data else \
            R.RestrictedAdeles(R.PrimePool.from_json(data))
    if not isinstance(desc, R.RestrictedAdeles):
        raise UsageError("expected a prime pool or an adele ring")
    return desc


def cmd_adele_density(args):
    desc = _adeles(args.pool)
    est = R.unit_density_estimate(desc, args.truncation, args.samples, args.seed, shards=args.shards)
    closed = [R.unit_density_closed_form(desc.pool, t) for t in range(1, args.truncation + 1)]
    payload = {"estimate": est.estimate, "std_error": est.std_error,
               "closed_form": str(est.closed_form), "closed_form_float": float(est.closed_form),
               "sigmas": abs(est.estimate - float(est.closed_form)) / est.std_error if est.std_error else 0.0,
               "within_3_sigma": est.within(3), "primes": list(est.primes),
               "closed_form_decreasing": all(a > b for a, b in zip(closed, closed[1:])),
               "samples": est.n_samples, "seed": args.seed, "shards": args.shards}
    return est.within(3), payload


def cmd_adele_witness(args):
    desc = _adeles(args.pool)
    cons = [int(p) for p in args.constraint.split(",") if p.strip()] if args.constraint else []
    u = R.Adele.from_json(desc.pool, _load_json_arg(args.unit)) if args.unit else desc.one()
    w = R.interior_witness(desc, u, cons)
    ok = not w.is_unit() and R.in_basic_neighbourhood(u, w, cons)
    zeroed = sorted(set(w.exception_map) - set(u.exception_map))
    return ok, {"unit": u.to_json(), "constraint": cons, "witness": w.to_json(),
                "free_prime": zeroed[0] if zeroed else None, "witness_is_unit": w.is_unit(),
                "in_neighbourhood": R.in_basic_neighbourhood(u, w, cons)}


def _ring_scalar(desc, text: str):
    try:
        value = Fraction(text)
    except ValueError:
        raise UsageError(f"not a rational number: {text!r}")
    return desc.element(value)


def cmd_axb_factor(args):
    desc = R.resolve_ring(args.ring if not args.ring.startswith("@") else _load_json_arg(args.ring))
    grp = M.AxbGroup(desc)
    elem = grp.element(_ring_scalar(desc, args.a), _ring_scalar(desc, args.x))
    g, s = M.axb_factorize(desc, elem)
    ok = grp.in_g1(g) and grp.in_g2(s) and grp.eq(grp.mul(g, s), elem)
    return ok, {"element": [_ring_value_json(desc, elem.a), _ring_value_json(desc, elem.x)],
                "g": [_ring_value_json(desc, g.a), _ring_value_json(desc, g.x)],
                "s": [_ring_value_json(desc, s.a), _ring_value_json(desc, s.x)],
                "product_matches": ok}


def cmd_padic_eval(args):
    value = eval_padic(args.expr, args.prime, args.precision)
    return True, {"expr": args.expr, "value": _padic_json(value)}


def cmd_ring_bq_check(args):
    base = R.resolve_ring(args.base)
    if not isinstance(base, R.FiniteModRing):
        raise UsageError("bq-check enumerates a finite base ring such as Z/36")
    q = int(Fraction(args.q))
    rep = SC.bq_multiplicativity(base, [q], args.pairs, args.seed)
    unit = base.is_unit(base.element(q))
    payload = {"base": base.to_json(), "q": q, "q_is_unit": unit, "multiplicative": rep}
    ok = rep["ok"]
    if base.n ** 4 <= args.enumerate_limit:
        bij = R.pi_q_component_bijective(base, q)
        payload["first_component_bijective"] = bij
        ok = ok and (bij == unit)
    return ok, payload


# parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bclab", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the JSON result to this file instead of stdout")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", parents=[common], help="run a scenario file")
    p.add_argument("scenario")
    p.add_argument("--no-timestamp", action="store_true")
    p.set_defaults(fn=cmd_run)

    pent = sub.add_parser("pentagon").add_subparsers(dest="action", required=True)
    p = pent.add_parser("verify", parents=[common], help="sampled pentagon check of a map")
    p.add_argument("map", help="built-in name or JSON description (literal or @file)")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--derived", action="store_true", help="also check the derived maps")
    p.set_defaults(fn=cmd_pentagon_verify)
    p = pent.add_parser("qplus", parents=[common], help="slice structure on a Calkin-Wilf window")
    p.add_argument("--window", type=int, default=20)
    p.set_defaults(fn=cmd_pentagon_qplus)

    bic = sub.add_parser("bicrossed").add_subparsers(dest="action", required=True)
    p = bic.add_parser("report", parents=[common], help="pentagon, slice dimensions and verdict for a pair")
    p.add_argument("pair", help=f"one of {', '.join(M.builtin_pair_names())} or JSON")
    p.add_argument("--dump", action="store_true", help="include W as sparse quadruples")
    p.set_defaults(fn=cmd_bicrossed_report)

    ad = sub.add_parser("adele").add_subparsers(dest="action", required=True)
    p = ad.add_parser("density", parents=[common], help="Monte Carlo unit density against the product formula")
    p.add_argument("pool", help="built-in ring name or pool JSON")
    p.add_argument("--truncation", type=int, default=25)
    p.add_argument("--samples", type=int, default=100000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--shards", type=int, default=1)
    p.set_defaults(fn=cmd_adele_density)
    p = ad.add_parser("witness", parents=[common], help="a non-unit inside a basic neighbourhood of a unit")
    p.add_argument("pool")
    p.add_argument("--constraint", default="", help="comma separated constrained primes")
    p.add_argument("--unit", help="centre as adele JSON (default: 1)")
    p.set_defaults(fn=cmd_adele_witness)

    ax = sub.add_parser("axb").add_subparsers(dest="action", required=True)
    p = ax.add_parser("factor", parents=[common], help="split (a, x) into G1 and G2 factors")
    p.add_argument("ring")
    p.add_argument("a")
    p.add_argument("x")
    p.set_defaults(fn=cmd_axb_factor)

    pa = sub.add_parser("padic").add_subparsers(dest="action", required=True)
    p = pa.add_parser("eval", parents=[common], help="evaluate rational arithmetic in Q_p")
    p.add_argument("expr")
    p.add_argument("--prime", "-p", type=int, default=5)
    p.add_argument("--precision", type=int, default=DEFAULT_PRECISION)
    p.set_defaults(fn=cmd_padic_eval)

    rg = sub.add_parser("ring").add_subparsers(dest="action", required=True)
    p = rg.add_parser("bq-check", parents=[common], help="multiplicativity of pi_q over a finite ring")
    p.add_argument("base")
    p.add_argument("q")
    p.add_argument("--pairs", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--enumerate-limit", type=int, default=10**5)
    p.set_defaults(fn=cmd_ring_bq_check)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        ok, payload = args.fn(args)
    except (UsageError, SC.ParseError, SC.UnknownCheck, P.UnknownName, KeyError, ValueError,
            ArithmeticError, OSError) as exc:
        print(f"bclab: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit(payload, args.out)
    return EXIT_PASS if ok else EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
