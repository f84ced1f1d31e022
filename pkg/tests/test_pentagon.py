from __future__ import annotations

import json
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from bicrossed.pentagon import (DomainViolation, EmptyWindow, MissingInverse, PentagonError,
                                PentagonalMap, Pole, Poly, RationalFunction, UnknownName,
                                builtin_map, builtin_map_names, calkin_wilf, compose,
                                conjugation_identity, derived_maps, derived_maps_check,
                                inverse_check, on_legs, pentagon_identity_check, pentagon_sides,
                                qplus_slice_entries, qplus_slice_structure, sample_rational)

X, Y = sympy.symbols("x y")


def to_sympy(f: RationalFunction, syms=(X, Y)):
    def poly(p):
        return sum((sympy.Rational(c.numerator, c.denominator)
                    * sympy.Mul(*(s**k for s, k in zip(syms, e))) for e, c in p.terms.items()),
                   sympy.Integer(0))
    return poly(f.num) / poly(f.den)


def sym_pentagon(dot, sharp):
    """Symbolic pentagon for a map given by sympy expressions in x, y."""
    a, b, c = sympy.symbols("a b c")

    def v(p, q):
        return dot.subs({X: p, Y: q}, simultaneous=True), sharp.subs({X: p, Y: q}, simultaneous=True)

    # left: v23 v13 v12 applied to (a, b, c), rightmost first
    p = [a, b, c]
    p[0], p[1] = v(p[0], p[1])
    p[0], p[2] = v(p[0], p[2])
    p[1], p[2] = v(p[1], p[2])
    q = [a, b, c]
    q[1], q[2] = v(q[1], q[2])
    q[0], q[1] = v(q[0], q[1])
    return all(sympy.simplify(l - r) == 0 for l, r in zip(p, q))


# rational function arithmetic against sympy

@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_rational_function_ops_match_sympy(seed):
    rng = np.random.default_rng(seed)

    def rand_poly():
        return Poly.from_coeffs(rng.integers(-3, 4, size=(2, 3)).tolist())

    f = RationalFunction(rand_poly(), rand_poly() if rng.random() < 0.5 else None)
    g = RationalFunction(rand_poly(), Poly.from_coeffs([[1, 1], [2, 0]]))
    if f.den.is_zero() or f.num.is_zero() and rng.random() < 0.1:
        return
    F, G = to_sympy(f), to_sympy(g)
    for mine, theirs in [(f + g, F + G), (f * g, F * G), (f - g, F - G), (f.diff(0), sympy.diff(F, X)),
                         (g.diff(1), sympy.diff(G, Y))]:
        assert sympy.simplify(to_sympy(mine) - theirs) == 0
    if not g.num.is_zero():
        assert sympy.simplify(to_sympy(f / g) - F / G) == 0


def test_compose_and_evaluation():
    x, y = RationalFunction.var(2, 0), RationalFunction.var(2, 1)
    f = x * y / (x + 1)
    h = f.compose([y, x])  # y x / (y + 1)
    assert h(Fraction(2), Fraction(3)) == Fraction(6, 4)
    with pytest.raises(Pole):
        f(Fraction(-1), Fraction(2))
    with pytest.raises(PentagonError):
        RationalFunction(Poly.var(2, 0), Poly(2, {}))


def test_json_round_trip():
    for name in builtin_map_names():
        v = builtin_map(name)
        w = PentagonalMap.from_json(json.dumps(v.to_json()))
        p = (Fraction(1, 3), Fraction(2, 5))
        assert w(*p) == v(*p) and w.inv(*p) == v.inv(*p)
    with pytest.raises(PentagonError):
        PentagonalMap.from_json({"forward": [{"num": [[0, 1]]}]})
    with pytest.raises(PentagonError):
        PentagonalMap.from_json({"forward": "nope"})


def test_unknown_map():
    with pytest.raises(UnknownName):
        builtin_map("nope")
    with pytest.raises(KeyError):
        builtin_map("nope")


# the built-in maps

def test_worked_examples():
    v = builtin_map("axb_real")
    assert v(Fraction(2), Fraction(3)) == (1, 1)
    assert v.inv(Fraction(1), Fraction(1)) == (2, 3)
    u = builtin_map("unit_interval")
    assert u(Fraction(1, 2), Fraction(1, 3)) == (Fraction(1, 6), Fraction(1, 5))


@pytest.mark.parametrize("name", ["axb_real", "unit_interval", "identity", "additive"])
def test_pentagon_holds_symbolically(name):
    v = builtin_map(name)
    assert sym_pentagon(to_sympy(v.forward[0]), to_sympy(v.forward[1]))


def test_broken_shift_fails_symbolically():
    v = builtin_map("broken_shift")
    assert not sym_pentagon(to_sympy(v.forward[0]), to_sympy(v.forward[1]))


@pytest.mark.parametrize("name", ["axb_real", "qplus", "unit_interval", "identity", "additive"])
def test_sampled_pentagon_and_inverse(name):
    v = builtin_map(name)
    rep = pentagon_identity_check(v, 300, seed=1)
    assert rep.ok and rep.passed == 300
    assert inverse_check(v, 300, seed=2).ok


def test_additive_passes_and_broken_fails():
    assert pentagon_identity_check(builtin_map("additive"), 200, seed=0).ok
    rep = pentagon_identity_check(builtin_map("broken_shift"), 200, seed=0)
    assert not rep.ok and len(rep.failures) == 200
    assert not rep.to_json()["ok"]


def test_sampled_checks_are_seeded():
    v = builtin_map("unit_interval")
    a = pentagon_identity_check(v, 50, seed=9).to_json()
    assert a == pentagon_identity_check(v, 50, seed=9).to_json()


def test_domain_violation_and_missing_inverse():
    x, y = RationalFunction.var(2, 0), RationalFunction.var(2, 1)
    bad = PentagonalMap("bad", "open_unit_interval_rationals", (x + y, y))
    with pytest.raises(DomainViolation):
        pentagon_identity_check(bad, 10, seed=0)
    with pytest.raises(MissingInverse):
        inverse_check(bad, 10)
    with pytest.raises(MissingInverse):
        derived_maps(bad)
    with pytest.raises(PentagonError):
        PentagonalMap("bad", "reals", (x, y))


def test_poles_are_resampled():
    x, y = RationalFunction.var(2, 0), RationalFunction.var(2, 1)
    # 1/(x - y) has poles on the diagonal, which random sampling must step around
    v = PentagonalMap("pole", "full_rationals_with_excluded_locus", (x, y / (x - y) * 0 + y))
    assert pentagon_identity_check(v, 20, seed=0).ok


@settings(max_examples=50)
@given(seed=st.integers(0, 2**32 - 1))
def test_samplers_respect_domains(seed):
    rng = np.random.default_rng(seed)
    assert sample_rational("positive_rationals", rng) > 0
    assert 0 < sample_rational("open_unit_interval_rationals", rng) < 1
    q = sample_rational("full_rationals_with_excluded_locus", rng)
    assert q != 0 and abs(q.numerator) <= 10**4


def test_leg_calculus():
    f = lambda a, b: (a + b, b)  # noqa: E731
    assert on_legs(f, 2, 0)((1, 2, 3)) == (1, 2, 4)
    assert compose(lambda p: p + (0,), lambda p: p[::-1])((1, 2)) == (2, 1, 0)
    lhs, rhs = pentagon_sides(f)
    assert lhs((1, 2, 3)) == rhs((1, 2, 3))


# derived maps

@pytest.mark.parametrize("name", ["axb_real", "unit_interval", "additive"])
def test_derived_maps(name):
    res = derived_maps_check(builtin_map(name), 150, seed=3)
    assert res["ok"], {k: v for k, v in res.items() if k != "ok" and not v["ok"]}


def test_derived_jacobians_match_sympy():
    dm = derived_maps(builtin_map("axb_real"))
    for name in ("phi", "eta"):
        f, g = (to_sympy(c) for c in getattr(dm, name))
        jac = sympy.Matrix([[sympy.diff(f, X), sympy.diff(f, Y)],
                            [sympy.diff(g, X), sympy.diff(g, Y)]]).det()
        assert sympy.simplify(to_sympy(dm.jacobian(name)) - jac) == 0


def test_derived_maps_example():
    dm = derived_maps(builtin_map("axb_real"))
    x, y = Fraction(2), Fraction(3)
    assert (dm.phi[0](x, y), dm.phi[1](x, y)) == (1, 3)  # 2 . 3 = 1
    assert (dm.eta[0](x, y), dm.eta[1](x, y)) == (2, 1)  # 2 # 3 = 1
    # * is the second inverse component, so y * x = y + x + yx = 11
    assert dm.psi_prime[0](x, y) == 11
    v = builtin_map("axb_real")
    assert v.inv(y, x)[1] == 11


def test_conjugation_identity_negative_control():
    v = builtin_map("axb_real")
    dm = derived_maps(v)
    phi, psi = dm.as_map("phi"), dm.as_map("psi_prime")
    good = conjugation_identity(dm)
    # the same word with v on legs (1, 2) instead of (2, 1)
    wrong = compose(on_legs(psi, 1, 3), on_legs(v, 0, 1), on_legs(phi, 0, 2), on_legs(v.inv, 0, 1))
    rng = np.random.default_rng(4)
    mismatches = 0
    for _ in range(50):
        p = tuple(sample_rational(v.domain, rng) for _ in range(4))
        assert good(p)
        a, b = dm.w_pairs(p[:2], p[2:])
        mismatches += (a + b) != wrong(p)
    assert mismatches >= 45


# Q*+ slices

def test_calkin_wilf():
    assert calkin_wilf(8) == [Fraction(1), Fraction(1, 2), Fraction(2), Fraction(1, 3),
                              Fraction(3, 2), Fraction(2, 3), Fraction(3), Fraction(1, 4)]
    assert len(set(calkin_wilf(200))) == 200


@settings(max_examples=100)
@given(a=st.fractions(min_value=Fraction(1, 50), max_value=100, max_denominator=50),
       b=st.fractions(min_value=Fraction(1, 50), max_value=100, max_denominator=50))
def test_qplus_slice_entry_formula(a, b):
    if a <= 0 or b <= 0:
        return
    entries = qplus_slice_entries(builtin_map("qplus"), a, b)
    if a > b:
        r, s = b / (a - b), b * (a + 1) / (a - b)
        assert entries == [(s, r)] and r < s
    else:
        assert entries == []


def test_qplus_slice_entries_by_sympy_solve():
    v = builtin_map("qplus")
    dot, sharp = (to_sympy(c) for c in v.forward)
    for a in calkin_wilf(8):
        for b in calkin_wilf(8):
            sols = sympy.solve(sympy.Eq(dot.subs(X, sympy.Rational(a.numerator, a.denominator)),
                                        sympy.Rational(b.numerator, b.denominator)), Y)
            sols = [s for s in sols if s.is_rational and s > 0]
            expected = [(Fraction(int(sympy.fraction(s)[0]), int(sympy.fraction(s)[1])),) for s in sols]
            got = qplus_slice_entries(v, a, b)
            assert [(e[0],) for e in got] == expected


def test_qplus_window_structure():
    res = qplus_slice_structure(calkin_wilf(20))
    assert res["ok"] and res["strictly_triangular"] and res["diagonal_zero"]
    assert res["single_entry_slices"] == res["nonzero_slices"] == 190
    assert res["not_adjoint_closed"]
    w = res["witness"]
    assert Fraction(w["r"]) < Fraction(w["s"])


def test_qplus_window_errors():
    with pytest.raises(EmptyWindow):
        qplus_slice_structure([])
    with pytest.raises(PentagonError):
        qplus_slice_structure([Fraction(1), Fraction(1)])
    with pytest.raises(PentagonError):
        qplus_slice_structure([Fraction(-1)])
