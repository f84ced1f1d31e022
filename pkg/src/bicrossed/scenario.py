"""Scenario files: parse, run the listed checks, build a JSON report.

Scenario::

    {"schema": "bicrossed-lab/1", "seed": 7,
     "items": [{"subject": {"pair": "S3"}, "checks": ["pentagon", "regularity"]},
               {"subject": {"ring": "adeles-f2"}, "checks": ["openness", "density"],
                "truncation": 25, "samples": 100000}]}

Subject keys may also sit directly on the item.  Every check draws its
randomness from ``SeedSequence([seed, item_index, crc32(check_name)])`` so a
check's outcome does not depend on which other checks run.
"""
from __future__ import annotations

import datetime as _dt
import json
import zlib
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable

import numpy as np

from . import matched as M
from . import pentagon as P
from . import ring as R
from . import unitary as U
from .groups import FiniteGroup
from .padic import haar_integral, indicator, valuation_of_rational

SCHEMA = "bicrossed-lab/1"


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line, self.column = line, column
        where = f" at line {line}, column {column}" if line is not None else ""
        super().__init__(f"{message}{where}")


class UnknownCheck(KeyError):
    pass


def check_seed(seed: int, item_index: int, name: str) -> np.random.SeedSequence:
    return np.random.SeedSequence([int(seed), int(item_index), zlib.crc32(name.encode())])


# subjects


@dataclass
class Subject:
    kind: str  # pair | ring | map | window
    value: Any
    label: str


SUBJECT_KEYS = ("pair", "ring", "map", "window")


def resolve_pair(spec) -> M.MatchedPair:
    if isinstance(spec, str):
        return M.builtin_pair(spec)
    group = FiniteGroup.from_json(spec["group"])
    return M.check_matched(group, spec["g1"], spec["g2"], spec.get("label", "custom"))


def resolve_window(spec) -> list[Fraction]:
    if isinstance(spec, dict):
        if "calkin_wilf" in spec:
            return P.calkin_wilf(int(spec["calkin_wilf"]))
        raise ValueError("a window object needs a 'calkin_wilf' length")
    return [Fraction(str(q)) for q in spec]


def resolve_subject(item: dict) -> Subject:
    sub = item.get("subject", {k: item[k] for k in SUBJECT_KEYS if k in item})
    keys = [k for k in SUBJECT_KEYS if k in sub]
    if len(keys) != 1:
        raise ValueError(f"an item needs exactly one subject among {SUBJECT_KEYS}")
    kind = keys[0]
    spec = sub[kind]
    label = spec if isinstance(spec, str) else json.dumps(spec, sort_keys=True)
    if kind == "pair":
        return Subject(kind, resolve_pair(spec), label)
    if kind == "ring":
        return Subject(kind, R.resolve_ring(spec), label)
    if kind == "map":
        return Subject(kind, P.builtin_map(spec) if isinstance(spec, str) else P.PentagonalMap.from_json(spec),
                       label)
    return Subject(kind, resolve_window(spec), label)


# checks: each returns (passed, data)

Check = Callable[[Subject, dict, np.random.SeedSequence], tuple]
CHECKS: dict[str, dict[str, Check]] = {k: {} for k in SUBJECT_KEYS}


def check(kind: str, name: str):
    def deco(fn):
        CHECKS[kind][name] = fn
        return fn
    return deco


@check("pair", "pentagon")
def _pair_pentagon(sub, params, ss):
    ok = U.pentagon_check(U.build_W(sub.value))
    return ok, {"pentagon": ok}


@check("pair", "matching")
def _pair_matching(sub, params, ss):
    rep = M.verify_matching_relations(sub.value)
    return rep.ok, {"triples": rep.checked, "failures": rep.failures[:10]}


@check("pair", "regularity")
def _pair_regularity(sub, params, ss):
    rep = U.regularity_report(sub.value)
    ok = rep["verdict"] == "regular" and rep["dim_C"] == rep["dim_SShat"]
    return ok, rep


@check("pair", "dims")
def _pair_dims(sub, params, ss):
    rep = U.crossed_product_dims(sub.value)
    return rep["ok"], rep


@check("pair", "comultiplication")
def _pair_comult(sub, params, ss):
    rep = U.comultiplication_check(sub.value, tensor_membership=params.get("tensor_membership", True))
    return rep.ok, rep.to_json()


@check("pair", "semiregularity_slices")
def _pair_semireg(sub, params, ss):
    rep = U.semiregularity_slice_check(sub.value)
    return rep["equal"], rep


@check("pair", "coaction")
def _pair_coaction(sub, params, ss):
    rep = U.coaction_continuity_check(sub.value)
    ok = rep["T_adjoint_closed"] and rep["T_product_closed"] and rep["coaction"] and (
        not rep["weak"] or rep["strong"])
    return ok, rep


@check("pair", "interchange")
def _pair_interchange(sub, params, ss):
    rep = U.interchange_dims(sub.value)
    return rep["ok"], rep


@check("pair", "verdict")
def _pair_verdict(sub, params, ss):
    v = M.semiregularity_verdict(sub.value)
    return v == params.get("expect", "regular"), {"verdict": v}


def _expect(params, name, value):
    exp = params.get("expect", {})
    exp = exp.get(name) if isinstance(exp, dict) else None
    return exp is None or exp == value


@check("ring", "openness")
def _ring_open(sub, params, ss):
    v = R.units_open_verdict(sub.value)
    return _expect(params, "openness", v), {"verdict": v}


@check("ring", "verdict")
def _ring_verdict(sub, params, ss):
    v = M.semiregularity_verdict(sub.value)
    return _expect(params, "verdict", v), {"verdict": v}


@check("ring", "density")
def _ring_density(sub, params, ss):
    if not isinstance(sub.value, R.RestrictedAdeles):
        raise R.DescriptorMismatch("density needs a restricted adele ring")
    est = R.unit_density_estimate(sub.value, int(params.get("truncation", 25)),
                                  int(params.get("samples", 100000)), ss,
                                  shards=int(params.get("shards", 1)))
    sigmas = float(params.get("sigmas", 3))
    return est.within(sigmas), {
        "estimate": est.estimate, "std_error": est.std_error,
        "closed_form": str(est.closed_form), "closed_form_float": float(est.closed_form),
        "primes": list(est.primes), "samples": est.n_samples, "sigmas": sigmas}


@check("ring", "witness")
def _ring_witness(sub, params, ss):
    desc = sub.value
    rep = witness_trials(desc, int(params.get("cases", 100)), int(params.get("max_constraint", 10)), ss)
    return rep["verified"] == rep["cases"], rep


@check("ring", "haar_units")
def _ring_haar_units(sub, params, ss):
    if not isinstance(sub.value, R.PAdicField):
        raise R.DescriptorMismatch("haar_units needs a p-adic field")
    p = sub.value.p
    f = indicator(p, 1, 0, lambda x: x != 0 and valuation_of_rational(x, p) == 0)
    value = haar_integral(f)
    return value == 1 - Fraction(1, p), {"measure": str(value), "expected": str(1 - Fraction(1, p))}


@check("ring", "density_identity")
def _ring_density_identity(sub, params, ss):
    if not isinstance(sub.value, R.PAdicField):
        raise R.DescriptorMismatch("density_identity needs a p-adic field")
    rng = np.random.default_rng(ss)
    p = sub.value.p
    results = []
    for level in params.get("levels", [1, 2]):
        for _ in range(int(params.get("functions", 10))):
            F = M.random_axb_function(p, int(level), int(params.get("radius", 0)), rng)
            chk = M.density_identity_check(F)
            results.append({"level": level, "lhs": str(chk.lhs), "rhs": str(chk.rhs), "equal": chk.equal})
    return all(r["equal"] for r in results), {"functions": len(results), "results": results}


@check("ring", "bq")
def _ring_bq(sub, params, ss):
    rep = bq_multiplicativity(sub.value, params.get("q", [0, 1]), int(params.get("pairs", 1000)), ss)
    return rep["ok"], rep


@check("map", "pentagon")
def _map_pentagon(sub, params, ss):
    rep = P.pentagon_identity_check(sub.value, int(params.get("samples", 1000)), ss)
    expect_fail = params.get("expect") == "fail"
    return rep.ok != expect_fail, rep.to_json()


@check("map", "inverse")
def _map_inverse(sub, params, ss):
    rep = P.inverse_check(sub.value, int(params.get("samples", 1000)), ss)
    return rep.ok, rep.to_json()


@check("map", "derived")
def _map_derived(sub, params, ss):
    rep = P.derived_maps_check(sub.value, int(params.get("samples", 500)), ss)
    return rep["ok"], rep


@check("window", "qplus_slices")
def _window_qplus(sub, params, ss):
    rep = P.qplus_slice_structure(sub.value)
    return rep["ok"], rep


# shared experiment drivers


def witness_trials(desc, cases: int, max_constraint: int, seed) -> dict:
    """Random unit centres and constraint sets; each witness must be a non-unit
    in the basic neighbourhood."""
    if not isinstance(desc, R.RestrictedAdeles):
        raise R.DescriptorMismatch("witnesses need a restricted adele ring")
    rng = np.random.default_rng(seed)
    window = desc.pool.first(30) if not desc.pool.is_finite else desc.pool.primes
    verified = 0
    failures = []
    sample = None
    for case in range(cases):
        u = R.random_unit_adele(desc, rng)
        # a basic neighbourhood constrains every non-integral component
        cons = {p for p, v in u.exceptions if not v.is_integral()}
        k = int(rng.integers(len(cons), max(max_constraint, len(cons)) + 1))
        for p in rng.permutation(window):
            if len(cons) >= k:
                break
            cons.add(int(p))
        w = R.interior_witness(desc, u, cons)
        good = (not w.is_unit()) and R.in_basic_neighbourhood(u, w, cons)
        if good:
            verified += 1
        else:
            failures.append(case)
        if sample is None:
            sample = {"unit": u.to_json(), "constraint": sorted(cons), "witness": w.to_json()}
    return {"cases": cases, "verified": verified, "failures": failures[:10], "example": sample}


def bq_multiplicativity(desc, qs, pairs: int, seed) -> dict:
    """pi_q(m m') = pi_q(m) pi_q(m') on random pairs over a finite base ring."""
    base = desc.base if isinstance(desc, R.BqRing) else desc
    if not isinstance(base, R.FiniteModRing):
        raise R.DescriptorMismatch("random B_q pairs need a finite base ring")
    rng = np.random.default_rng(seed)
    out = {}
    for q in qs:
        q = base.element(q)
        bad = 0
        for _ in range(pairs):
            m = R.BqElement(*(int(v) for v in rng.integers(0, base.n, 4)))
            m2 = R.BqElement(*(int(v) for v in rng.integers(0, base.n, 4)))
            lhs = R.pi_q(base, q, R.bq_mul(base, q, m, m2))
            a, b = R.pi_q(base, q, m), R.pi_q(base, q, m2)
            rhs = (R.matmul2(base, a[0], b[0]), R.matmul2(base, a[1], b[1]))
            bad += lhs != rhs
        out[str(q)] = {"pairs": pairs, "failures": bad}
    return {"q": out, "ok": all(v["failures"] == 0 for v in out.values())}


# parsing and running


def parse_scenario(text: str) -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(data, dict):
        raise ParseError("a scenario must be a JSON object")
    if data.get("schema", SCHEMA) != SCHEMA:
        raise ParseError(f"unsupported schema {data.get('schema')!r}, expected {SCHEMA!r}")
    seed = data.get("seed", 0)
    if not isinstance(seed, int) or seed < 0 or seed >= 2**64:
        raise ParseError("seed must be an unsigned 64-bit integer")
    items = data.get("items", [])
    if not isinstance(items, list):
        raise ParseError("'items' must be a list")
    for i, item in enumerate(items):
        if not isinstance(item, dict):
            raise ParseError(f"item {i} is not an object")
        checks = item.get("checks", [])
        if not isinstance(checks, list) or not all(isinstance(c, str) for c in checks):
            raise ParseError(f"item {i}: 'checks' must be a list of names")
        sub = item.get("subject", {k: item[k] for k in SUBJECT_KEYS if k in item})
        kinds = [k for k in SUBJECT_KEYS if k in sub]
        if checks and len(kinds) != 1:
            raise ParseError(f"item {i}: need exactly one subject among {SUBJECT_KEYS}")
        for c in checks:
            if c not in CHECKS[kinds[0]]:
                raise UnknownCheck(f"item {i}: no check {c!r} for a {kinds[0]} "
                                   f"(known: {', '.join(sorted(CHECKS[kinds[0]]))})")
    return {"schema": SCHEMA, "seed": seed, "items": items}


def run_scenario(scenario: dict, timestamp: bool = True) -> dict:
    seed = scenario.get("seed", 0)
    out_items = []
    for i, item in enumerate(scenario.get("items", [])):
        names = item.get("checks", [])
        params = {k: v for k, v in item.items() if k not in ("subject", "checks") + SUBJECT_KEYS}
        results = []
        try:
            sub = resolve_subject(item) if names else None
        except Exception as exc:  # serialised, not raised
            results = [{"name": n, "status": "error", "data": {"error": f"{type(exc).__name__}: {exc}"}}
                       for n in names]
            out_items.append({"subject": item.get("subject"), "checks": results})
            continue
        for name in names:
            try:
                ok, data = CHECKS[sub.kind][name](sub, params, check_seed(seed, i, name))
                results.append({"name": name, "status": "pass" if ok else "fail", "data": _jsonable(data)})
            except Exception as exc:
                results.append({"name": name, "status": "error",
                                "data": {"error": f"{type(exc).__name__}: {exc}"}})
        out_items.append({"subject": {sub.kind: sub.label} if sub else item.get("subject"),
                          "checks": results})
    statuses = [c["status"] for it in out_items for c in it["checks"]]
    report = {"schema": SCHEMA, "seed": seed, "items": out_items,
              "verdict": "pass" if all(s == "pass" for s in statuses) else "fail"}
    if timestamp:
        report["timestamp"] = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    return report


def report_passed(report: dict) -> bool:
    return report["verdict"] == "pass"


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, str)) or x is None:
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    return str(x)


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"
