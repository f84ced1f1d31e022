"""Pentagonal transformations given by exact rational functions.

A map v(x, y) = (x . y, x # y) on a set X of rationals is pentagonal when
v23 v13 v12 = v12 v23 as maps of X^3 (rightmost applied first), where v13
acts on coordinates 1 and 3 and leaves coordinate 2 alone.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import floor
from typing import Callable, Mapping, Sequence

import numpy as np

from .padic import seed_sequence

class PentagonError(ValueError):
    pass


class UnknownName(PentagonError, KeyError):
    pass


class DomainViolation(PentagonError):
    pass


class MissingInverse(PentagonError):
    pass


class EmptyWindow(PentagonError):
    pass


class Pole(ZeroDivisionError):
    pass


# polynomials and rational functions


class Poly:
    """Polynomial in ``nvars`` variables with rational coefficients."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[tuple, Fraction] | None = None):
        self.nvars = nvars
        self.terms = {tuple(e): Fraction(c) for e, c in (terms or {}).items() if c}

    @classmethod
    def const(cls, nvars: int, c) -> Poly:
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, nvars: int, k: int) -> Poly:
        return cls(nvars, {tuple(int(i == k) for i in range(nvars)): 1})

    @classmethod
    def from_coeffs(cls, coeffs: Sequence[Sequence]) -> Poly:
        """Two-variable polynomial from ``coeffs[i][j]``, the coefficient of x^i y^j."""
        return cls(2, {(i, j): _frac(c) for i, row in enumerate(coeffs) for j, c in enumerate(row)})

    def to_coeffs(self) -> list[list[str]]:
        if self.nvars != 2:
            raise ValueError("coefficient arrays are for two variables")
        di = max((e[0] for e in self.terms), default=0)
        dj = max((e[1] for e in self.terms), default=0)
        return [[str(self.terms.get((i, j), 0)) for j in range(dj + 1)] for i in range(di + 1)]

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: Poly) -> Poly:
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return Poly(self.nvars, out)

    def __neg__(self) -> Poly:
        return Poly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: Poly) -> Poly:
        return self + (-other)

    def __mul__(self, other: Poly) -> Poly:
        out: dict[tuple, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return Poly(self.nvars, out)

    def __call__(self, *xs) -> Fraction:
        total = Fraction(0)
        for e, c in self.terms.items():
            t = c
            for x, k in zip(xs, e):
                if k:
                    t *= x ** k
            total += t
        return total

    def diff(self, k: int) -> Poly:
        out = {}
        for e, c in self.terms.items():
            if e[k]:
                e2 = list(e)
                e2[k] -= 1
                out[tuple(e2)] = c * e[k]
        return Poly(self.nvars, out)

    def degree_in(self, k: int) -> int:
        return max((e[k] for e in self.terms), default=0)

    def __repr__(self) -> str:
        return f"Poly({self.nvars}, {self.terms})"


def _frac(c) -> Fraction:
    return Fraction(c) if not isinstance(c, float) else Fraction(str(c))


class RationalFunction:
    """num / den, evaluated exactly; no cancellation is attempted."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly | None = None):
        self.num = num
        self.den = Poly.const(num.nvars, 1) if den is None else den
        if self.den.is_zero():
            raise PentagonError("zero denominator")

    @property
    def nvars(self) -> int:
        return self.num.nvars

    @classmethod
    def var(cls, nvars: int, k: int) -> RationalFunction:
        return cls(Poly.var(nvars, k))

    @classmethod
    def const(cls, nvars: int, c) -> RationalFunction:
        return cls(Poly.const(nvars, c))

    @classmethod
    def from_json(cls, data: Mapping) -> RationalFunction:
        num = Poly.from_coeffs(data["num"])
        den = Poly.from_coeffs(data.get("den", [[1]]))
        return cls(num, den)

    def to_json(self) -> dict:
        return {"num": self.num.to_coeffs(), "den": self.den.to_coeffs()}

    def _lift(self, other) -> RationalFunction:
        if isinstance(other, RationalFunction):
            return other
        return RationalFunction.const(self.nvars, other)

    def __add__(self, other) -> RationalFunction:
        o = self._lift(other)
        return RationalFunction(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self) -> RationalFunction:
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other) -> RationalFunction:
        return self + (-self._lift(other))

    def __rsub__(self, other) -> RationalFunction:
        return self._lift(other) - self

    def __mul__(self, other) -> RationalFunction:
        o = self._lift(other)
        return RationalFunction(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> RationalFunction:
        o = self._lift(other)
        return RationalFunction(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other) -> RationalFunction:
        return self._lift(other) / self

    def __call__(self, *xs) -> Fraction:
        d = self.den(*xs)
        if d == 0:
            raise Pole(f"denominator vanishes at {xs}")
        return self.num(*xs) / d

    def diff(self, k: int) -> RationalFunction:
        """Partial derivative in variable k by the quotient rule."""
        return RationalFunction(self.num.diff(k) * self.den - self.num * self.den.diff(k),
                                self.den * self.den)

    def compose(self, args: Sequence[RationalFunction]) -> RationalFunction:
        """Substitute rational functions (all in the same variables) for the variables."""
        if len(args) != self.nvars:
            raise ValueError("need one argument per variable")
        nv = args[0].nvars

        def subst(p: Poly) -> RationalFunction:
            total = RationalFunction.const(nv, 0)
            for e, c in p.terms.items():
                t = RationalFunction.const(nv, c)
                for a, k in zip(args, e):
                    for _ in range(k):
                        t = t * a
                total = total + t
            return total

        return subst(self.num) / subst(self.den)

    def __repr__(self) -> str:
        return f"({self.num!r}) / ({self.den!r})"


def _vars(n: int) -> list[RationalFunction]:
    return [RationalFunction.var(n, k) for k in range(n)]


# domains and maps

DOMAINS = ("positive_rationals", "open_unit_interval_rationals", "full_rationals_with_excluded_locus")


def in_domain(domain: str, x: Fraction) -> bool:
    if domain == "positive_rationals":
        return x > 0
    if domain == "open_unit_interval_rationals":
        return 0 < x < 1
    return True


def sample_rational(domain: str, rng: np.random.Generator, bound: int = 10**4) -> Fraction:
    """Numerator and denominator uniform in [1, bound], conditioned on the domain."""
    while True:
        a, b = (int(v) for v in rng.integers(1, bound + 1, size=2))
        if domain == "open_unit_interval_rationals":
            if a == b:
                continue
            a, b = min(a, b), max(a, b)
        x = Fraction(a, b)
        if domain == "full_rationals_with_excluded_locus" and rng.integers(0, 2):
            x = -x
        return x


@dataclass
class PentagonalMap:
    name: str
    domain: str
    forward: tuple[RationalFunction, RationalFunction]
    inverse: tuple[RationalFunction, RationalFunction] | None = None

    def __post_init__(self):
        if self.domain not in DOMAINS:
            raise PentagonError(f"unknown domain {self.domain!r}")
        for f in self.forward + (self.inverse or ()):
            if f.nvars != 2:
                raise PentagonError("components must be functions of two variables")

    @property
    def excluded_locus(self) -> list[Poly]:
        """Denominators whose zeros are excluded from the domain of definition."""
        return [f.den for f in self.forward + (self.inverse or ())]

    def _apply(self, fs, x, y) -> tuple[Fraction, Fraction]:
        out = (fs[0](x, y), fs[1](x, y))
        for z in out:
            if not in_domain(self.domain, z):
                raise DomainViolation(f"{self.name} sends {(x, y)} to {out}, outside {self.domain}")
        return out

    def __call__(self, x, y) -> tuple[Fraction, Fraction]:
        return self._apply(self.forward, x, y)

    def inv(self, x, y) -> tuple[Fraction, Fraction]:
        if self.inverse is None:
            raise MissingInverse(f"{self.name} has no inverse")
        return self._apply(self.inverse, x, y)

    def to_json(self) -> dict:
        out = {"name": self.name, "domain": self.domain,
               "forward": [f.to_json() for f in self.forward]}
        if self.inverse is not None:
            out["inverse"] = [f.to_json() for f in self.inverse]
        return out

    @classmethod
    def from_json(cls, data) -> PentagonalMap:
        if isinstance(data, str):
            data = json.loads(data)
        try:
            fwd = tuple(RationalFunction.from_json(c) for c in data["forward"])
            inv = data.get("inverse")
            inv = tuple(RationalFunction.from_json(c) for c in inv) if inv else None
        except (KeyError, TypeError, ValueError) as exc:
            raise PentagonError(f"malformed map description: {exc}") from None
        if len(fwd) != 2 or (inv is not None and len(inv) != 2):
            raise PentagonError("a map needs exactly two components")
        return cls(data.get("name", "custom"), data.get("domain", "positive_rationals"), fwd, inv)


def _axb_real(name: str) -> PentagonalMap:
    x, y = _vars(2)
    return PentagonalMap(name, "positive_rationals",
                         (x * y / (x + y + 1), y / (x + 1)),
                         (x * (y + 1) / y, x + y + x * y))


def _unit_interval() -> PentagonalMap:
    x, y = _vars(2)
    s = x + y - x * y
    return PentagonalMap("unit_interval", "open_unit_interval_rationals",
                         (x * y, y * (1 - x) / (1 - x * y)),
                         (x / s, s))


def _identity() -> PentagonalMap:
    x, y = _vars(2)
    return PentagonalMap("identity", "positive_rationals", (x, y), (x, y))


def _broken_shift() -> PentagonalMap:
    # a bijection of Q^2 that is not pentagonal
    x, y = _vars(2)
    return PentagonalMap("broken_shift", "full_rationals_with_excluded_locus",
                         (x + y, x), (y, x - y))


def _additive() -> PentagonalMap:
    # (x + y, y): the map of the additive group of Q, which is pentagonal
    x, y = _vars(2)
    return PentagonalMap("additive", "full_rationals_with_excluded_locus",
                         (x + y, y), (x - y, y))


_BUILTINS: dict[str, Callable[[], PentagonalMap]] = {
    "axb_real": lambda: _axb_real("axb_real"),
    "qplus": lambda: _axb_real("qplus"),
    "unit_interval": _unit_interval,
    "identity": _identity,
    "additive": _additive,
    "broken_shift": _broken_shift,
}


def builtin_map_names() -> list[str]:
    return list(_BUILTINS)


def builtin_map(name: str) -> PentagonalMap:
    try:
        return _BUILTINS[name]()
    except KeyError:
        raise UnknownName(f"no built-in map {name!r}; known: {', '.join(_BUILTINS)}") from None


# leg calculus on tuples


def on_legs(f: Callable, i: int, j: int) -> Callable[[tuple], tuple]:
    """f_ij: apply the two-variable map f to coordinates (i, j) of a tuple."""
    def g(p: tuple) -> tuple:
        q = list(p)
        q[i], q[j] = f(p[i], p[j])
        return tuple(q)
    return g


def compose(*maps: Callable) -> Callable:
    """compose(f, g, h)(p) = f(g(h(p)))."""
    def c(p):
        for m in reversed(maps):
            p = m(p)
        return p
    return c


def pentagon_sides(f: Callable) -> tuple[Callable, Callable]:
    return (compose(on_legs(f, 1, 2), on_legs(f, 0, 2), on_legs(f, 0, 1)),
            compose(on_legs(f, 0, 1), on_legs(f, 1, 2)))


@dataclass
class SampleReport:
    name: str
    requested: int
    passed: int = 0
    resampled: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures and self.passed == self.requested

    def to_json(self) -> dict:
        return {"map": self.name, "samples": self.requested, "passed": self.passed,
                "resampled": self.resampled, "ok": self.ok,
                "failures": [[str(c) for c in p] for p in self.failures[:10]]}


def _sampled_check(name: str, domain: str, arity: int, check: Callable[[tuple], bool],
                   n_samples: int, seed, max_resample: int | None = None) -> SampleReport:
    rng = np.random.default_rng(seed)
    rep = SampleReport(name, n_samples)
    limit = max_resample if max_resample is not None else 10 * n_samples + 100
    while rep.passed + len(rep.failures) < n_samples:
        p = tuple(sample_rational(domain, rng) for _ in range(arity))
        try:
            good = check(p)
        except Pole:
            rep.resampled += 1
            if rep.resampled > limit:
                raise PentagonError(f"{name}: too many samples on the excluded locus")
            continue
        if good:
            rep.passed += 1
        else:
            rep.failures.append(p)
    return rep


def pentagon_identity_check(v: PentagonalMap, n_samples: int = 1000, seed=0) -> SampleReport:
    """Exact comparison of v23 v13 v12 and v12 v23 on random triples.

    Triples where some intermediate point meets a pole are resampled;
    a point leaving the domain raises DomainViolation.
    """
    lhs, rhs = pentagon_sides(v)
    return _sampled_check(v.name, v.domain, 3, lambda p: lhs(p) == rhs(p), n_samples, seed)


def inverse_check(v: PentagonalMap, n_samples: int = 1000, seed=0) -> SampleReport:
    """v^-1 v = id and v v^-1 = id on random points."""
    if v.inverse is None:
        raise MissingInverse(f"{v.name} has no inverse")

    def both(p):
        return v.inv(*v(*p)) == p and v(*v.inv(*p)) == p

    return _sampled_check(f"{v.name} inverse", v.domain, 2, both, n_samples, seed)


# derived maps


@dataclass
class DerivedMaps:
    """phi(x,y) = (x.y, y), eta(x,y) = (x, x#y), psi'(x,y) = (y*x, y) and
    w(a,b,c,d) = (a.(b#c), d*(b.c), c, d), as exact rational functions."""

    source: PentagonalMap
    phi: tuple[RationalFunction, RationalFunction]
    eta: tuple[RationalFunction, RationalFunction]
    psi_prime: tuple[RationalFunction, RationalFunction]
    w: tuple[RationalFunction, ...]

    def as_map(self, name: str) -> PentagonalMap:
        comps = getattr(self, name)
        return PentagonalMap(f"{self.source.name}:{name}", self.source.domain, comps)

    def w_pairs(self, p, q):
        """w on (X x X) x (X x X), pairs in and pairs out."""
        out = tuple(f(*p, *q) for f in self.w)
        for z in out:
            if not in_domain(self.source.domain, z):
                raise DomainViolation(f"w leaves the domain at {p + q}")
        return out[:2], out[2:]

    def jacobian(self, name: str) -> RationalFunction:
        f, g = getattr(self, name)
        return f.diff(0) * g.diff(1) - f.diff(1) * g.diff(0)


def derived_maps(v: PentagonalMap) -> DerivedMaps:
    if v.inverse is None:
        raise MissingInverse(f"{v.name} has no inverse, so * is undefined")
    x, y = _vars(2)
    dot, sharp = v.forward
    star = v.inverse[1]
    phi = (dot, y)
    eta = (x, sharp)
    psi = (star.compose([y, x]), y)
    a, b, c, d = _vars(4)
    bc_sharp = sharp.compose([b, c])
    bc_dot = dot.compose([b, c])
    w = (dot.compose([a, bc_sharp]), star.compose([d, bc_dot]), c, d)
    return DerivedMaps(v, phi, eta, psi, w)


def conjugation_identity(dm: DerivedMaps) -> Callable[[tuple], bool]:
    """Pointwise test of w = psi'_24 v_21 phi_13 v_21^-1 on X^4 (legs from 1)."""
    v = dm.source
    phi = dm.as_map("phi")
    psi = dm.as_map("psi_prime")
    rhs = compose(on_legs(psi, 1, 3), on_legs(v, 1, 0), on_legs(phi, 0, 2), on_legs(v.inv, 1, 0))

    def check(p):
        p1, p2 = dm.w_pairs(p[:2], p[2:])
        return p1 + p2 == rhs(p)

    return check


def derived_maps_check(v: PentagonalMap, n_samples: int = 500, seed=0) -> dict:
    """Sampled verification of everything the derived maps are claimed to satisfy."""
    dm = derived_maps(v)
    seeds = seed_sequence(seed).spawn(6)
    out = {}
    for k, name in enumerate(("phi", "psi_prime")):
        out[f"{name}_pentagonal"] = pentagon_identity_check(dm.as_map(name), n_samples, seeds[k]).to_json()

    def w_pair(p, q):
        return dm.w_pairs(p, q)

    lhs, rhs = pentagon_sides(w_pair)

    def w_pent(p):
        pairs = (p[0:2], p[2:4], p[4:6])
        return lhs(pairs) == rhs(pairs)

    out["w_pentagonal"] = _sampled_check(f"{v.name}:w", v.domain, 6, w_pent, n_samples, seeds[2]).to_json()
    out["conjugation_identity"] = _sampled_check(
        f"{v.name}:w conjugation", v.domain, 4, conjugation_identity(dm), n_samples, seeds[3]).to_json()
    for k, name in ((4, "phi"), (5, "eta")):
        jac = dm.jacobian(name)
        out[f"jacobian_{name}_nonzero"] = _sampled_check(
            f"{v.name}:J({name})", v.domain, 2, lambda p, j=jac: j(*p) != 0, n_samples, seeds[k]).to_json()
    out["ok"] = all(r["ok"] for r in out.values())
    return out


# the operator on l2(Q*+) x l2(Q*+)


def calkin_wilf(n: int) -> list[Fraction]:
    """First n terms of the Calkin-Wilf enumeration of the positive rationals."""
    out = []
    q = Fraction(1)
    for _ in range(n):
        out.append(q)
        q = 1 / (2 * floor(q) - q + 1)
    return out


def _solve_first(v: PentagonalMap, a: Fraction, b: Fraction) -> list[Fraction]:
    """All y in the domain with a . y = b (a rational root search in y)."""
    dot = v.forward[0]
    # a . y = b  <=>  num(a, y) - b den(a, y) = 0, a polynomial in y
    coeffs: dict[int, Fraction] = {}
    for poly, scale in ((dot.num, Fraction(1)), (dot.den, -b)):
        for (i, j), c in poly.terms.items():
            coeffs[j] = coeffs.get(j, 0) + c * scale * a ** i
    deg = max((j for j, c in coeffs.items() if c), default=-1)
    if deg < 0:
        raise PentagonError(f"{v.name}: a . y is constant for a = {a}")
    if deg == 0:
        return []
    if deg == 1:
        roots = [-coeffs.get(0, 0) / coeffs[1]]
    else:
        import sympy
        t = sympy.Symbol("t")
        poly = sympy.Poly(sum(sympy.Rational(c.numerator, c.denominator) * t**j
                              for j, c in coeffs.items()), t)
        roots = [Fraction(int(r.p), int(r.q)) for r in poly.ground_roots() if r.is_Rational]
    good = []
    for y in roots:
        if not in_domain(v.domain, y):
            continue
        try:
            if dot(a, y) == b:
                good.append(y)
        except Pole:
            pass
    return good


def qplus_slice_entries(v: PentagonalMap, a: Fraction, b: Fraction) -> list[tuple[Fraction, Fraction]]:
    """Nonzero entries (row s, column r) of the slice (omega_ab (x) id)(Y).

    Y e_(u,w) = e_(v^-1(u,w)) has Y[(x,y),(u,w)] = 1 exactly when v(x,y) = (u,w),
    so the slice at (a, b) has a 1 at (y, a # y) for each y with a . y = b.
    """
    return [(y, v.forward[1](a, y)) for y in _solve_first(v, a, b)]


def qplus_slice_structure(window: Sequence[Fraction], v: PentagonalMap | None = None) -> dict:
    window = [Fraction(q) for q in window]
    if not window:
        raise EmptyWindow("the window is empty")
    if len(set(window)) != len(window) or any(q <= 0 for q in window):
        raise PentagonError("the window must consist of distinct positive rationals")
    v = builtin_map("qplus") if v is None else v
    in_window = set(window)
    nonzero = single = 0
    triangular = True
    diagonal_zero = True
    violations = []
    witness = None
    examples = []
    for a in window:
        for b in window:
            entries = qplus_slice_entries(v, a, b)
            if not entries:
                continue
            nonzero += 1
            if len(entries) == 1:
                single += 1
            for s, r in entries:
                if s == r:
                    diagonal_zero = False
                if not r < s:
                    triangular = False
                    violations.append([str(a), str(b), str(s), str(r)])
            if witness is None and len(entries) == 1:
                s, r = entries[0]
                witness = {"a": str(a), "b": str(b), "s": str(s), "r": str(r),
                           "s_in_window": s in in_window, "r_in_window": r in in_window}
            if len(examples) < 5:
                examples.append({"a": str(a), "b": str(b),
                                 "entries": [[str(s), str(r)] for s, r in entries]})
    # the adjoint of the witness slice has its entry at (r, s) with r < s, where
    # every slice vanishes, so it is orthogonal to the whole slice span
    if witness is not None:
        witness["adjoint_orthogonal_to_all_slices"] = triangular
    return {
        "window_size": len(window),
        "slices_checked": len(window) ** 2,
        "nonzero_slices": nonzero,
        "single_entry_slices": single,
        "strictly_triangular": triangular,
        "diagonal_zero": diagonal_zero,
        "violations": violations[:10],
        "witness": witness,
        "not_adjoint_closed": witness is not None and triangular,
        "examples": examples,
        "ok": triangular and diagonal_zero and witness is not None,
    }
