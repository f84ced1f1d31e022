"""Matched pairs of groups: exact finite factorizations and the ax+b pair.

For a finite group G with subgroups G1, G2 such that G = G1 G2 uniquely,
every x factors as x = p1(x) p2(x) and the mutual actions are
alpha_s(g) = p1(sg) (G2 on G1, left) and beta_g(s) = p2(sg) (G1 on G2, right).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence, Union

import numpy as np

from . import groups
from .groups import FiniteGroup
from .padic import (LocallyConstantFunction, PAdicNumber, PrecisionExhausted, coset_index,
                    valuation_of_rational)
from .ring import BqRing, FiniteModRing, Ring, units_open_verdict


class MatchedPairError(ValueError):
    pass


class NotSubgroup(MatchedPairError):
    pass


class NontrivialIntersection(MatchedPairError):
    pass


class NotExactFactorization(MatchedPairError):
    pass


class NotMatchedPair(MatchedPairError):
    pass


class NotFactorizable(ArithmeticError):
    """x + 1 is a certified non-unit: the element lies off G1 G2."""


class UnsupportedLevel(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class MatchedPair:
    group: FiniteGroup
    g1: tuple[int, ...]
    g2: tuple[int, ...]
    p1: np.ndarray
    p2: np.ndarray
    label: str = ""

    @property
    def n1(self) -> int:
        return len(self.g1)

    @property
    def n2(self) -> int:
        return len(self.g2)

    def alpha(self, s: int, g: int) -> int:
        """alpha_s(g) = p1(sg)."""
        return int(self.p1[self.group.mul(s, g)])

    def beta(self, g: int, s: int) -> int:
        """beta_g(s) = p2(sg)."""
        return int(self.p2[self.group.mul(s, g)])

    @property
    def pos1(self) -> dict[int, int]:
        return {g: i for i, g in enumerate(self.g1)}

    @property
    def pos2(self) -> dict[int, int]:
        return {s: i for i, s in enumerate(self.g2)}

    def alpha_table(self) -> np.ndarray:
        """``T[i, j]`` is the G1-position of alpha applied by g2[i] to g1[j]."""
        pos1 = self.pos1
        return np.array([[pos1[self.alpha(s, g)] for g in self.g1] for s in self.g2],
                        dtype=np.int64).reshape(self.n2, self.n1)

    def beta_table(self) -> np.ndarray:
        """``T[j, i]`` is the G2-position of beta applied by g1[j] to g2[i]."""
        pos2 = self.pos2
        return np.array([[pos2[self.beta(g, s)] for s in self.g2] for g in self.g1],
                        dtype=np.int64).reshape(self.n1, self.n2)

    def swapped(self) -> MatchedPair:
        return check_matched(self.group, self.g2, self.g1, label=f"{self.label}*")


def check_matched(group: FiniteGroup, g1: Sequence[int], g2: Sequence[int],
                  label: str = "") -> MatchedPair:
    """Validate G = G1 G2 as an exact factorization and tabulate p1, p2."""
    g1 = tuple(sorted(set(g1)))
    g2 = tuple(sorted(set(g2)))
    for name, sub in (("G1", g1), ("G2", g2)):
        if not group.is_subgroup(sub):
            raise NotSubgroup(f"{name} is not closed under the group law")
    common = set(g1) & set(g2)
    if common != {group.identity}:
        raise NontrivialIntersection(
            f"G1 and G2 share {sorted(group.labels[x] for x in common)}")
    if len(g1) * len(g2) != group.order:
        raise NotExactFactorization(f"|G1||G2| = {len(g1) * len(g2)} != |G| = {group.order}")
    p1 = np.full(group.order, -1, dtype=np.int64)
    p2 = np.full(group.order, -1, dtype=np.int64)
    for g in g1:
        for s in g2:
            x = group.mul(g, s)
            if p1[x] >= 0:
                raise NotExactFactorization(f"{group.labels[x]} factors twice")
            p1[x], p2[x] = g, s
    p1.setflags(write=False)
    p2.setflags(write=False)
    return MatchedPair(group, g1, g2, p1, p2, label)


@dataclass
class MatchingReport:
    checked: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def verify_matching_relations(mp: MatchedPair) -> MatchingReport:
    """Check alpha_s(gh) = alpha_s(g) alpha_{beta_g(s)}(h) and
    beta_{gh}(s) = beta_h(beta_g(s)) on every triple (s, g, h)."""
    G = mp.group
    report = MatchingReport()
    for s in mp.g2:
        for g in mp.g1:
            bgs = mp.beta(g, s)
            ag = mp.alpha(s, g)
            for h in mp.g1:
                gh = G.mul(g, h)
                report.checked += 1
                if mp.alpha(s, gh) != G.mul(ag, mp.alpha(bgs, h)):
                    report.failures.append(("alpha", G.labels[s], G.labels[g], G.labels[h]))
                if mp.beta(gh, s) != mp.beta(h, bgs):
                    report.failures.append(("beta", G.labels[s], G.labels[g], G.labels[h]))
    return report


# built-in pairs


def _by_labels(G: FiniteGroup, *labels: str) -> tuple[int, ...]:
    return G.generated([G.index(x) for x in labels])


def _s3() -> MatchedPair:
    G = groups.symmetric_group(3)
    return check_matched(G, _by_labels(G, "(1 2 3)"), _by_labels(G, "(1 2)"), "S3")


def _s4_s3c4() -> MatchedPair:
    G = groups.symmetric_group(4)
    return check_matched(G, _by_labels(G, "(1 2)", "(1 2 3)"), _by_labels(G, "(1 2 3 4)"), "S4")


def _s4_d8c3() -> MatchedPair:
    G = groups.symmetric_group(4)
    return check_matched(G, _by_labels(G, "(1 2 3 4)", "(1 3)"), _by_labels(G, "(1 2 3)"), "S4b")


def _c7c3() -> MatchedPair:
    G = groups.semidirect_cyclic(7, 3)
    return check_matched(G, _by_labels(G, "a^1"), _by_labels(G, "b^1"), "C7:C3")


def _d8() -> MatchedPair:
    G = groups.dihedral_group(4)
    return check_matched(G, _by_labels(G, "r^1"), _by_labels(G, "s"), "D8")


def _c2c3() -> MatchedPair:
    G = groups.direct_product(groups.cyclic_group(2), groups.cyclic_group(3))
    return check_matched(G, _by_labels(G, "(r^1,e)"), _by_labels(G, "(e,r^1)"), "C2xC3")


def _trivial() -> MatchedPair:
    G = groups.trivial_group()
    return check_matched(G, (0,), (0,), "trivial")


_BUILTINS: dict[str, Callable[[], MatchedPair]] = {
    "S3": _s3,
    "S4": _s4_s3c4,
    "S4b": _s4_d8c3,
    "C7:C3": _c7c3,
    "D8": _d8,
    "C2xC3": _c2c3,
    "trivial": _trivial,
}


def builtin_pair_names() -> list[str]:
    return list(_BUILTINS)


@lru_cache(maxsize=None)
def builtin_pair(name: str) -> MatchedPair:
    try:
        return _BUILTINS[name]()
    except KeyError:
        raise KeyError(f"unknown pair {name!r}; choose from {sorted(_BUILTINS)}") from None


# the ax+b group over a ring A: (a, x)(b, y) = (ab, x + a y)


@dataclass(frozen=True, eq=False)
class AxbGroupElement:
    a: object
    x: object


@dataclass(frozen=True)
class AxbGroup:
    ring: Ring

    def element(self, a, x) -> AxbGroupElement:
        r = self.ring
        a, x = r.element(a), r.element(x)
        if not r.is_unit(a):
            raise ValueError("the first coordinate of an ax+b element must be a unit")
        return AxbGroupElement(a, x)

    def mul(self, u: AxbGroupElement, v: AxbGroupElement) -> AxbGroupElement:
        r = self.ring
        return AxbGroupElement(r.mul(u.a, v.a), r.add(u.x, r.mul(u.a, v.x)))

    def eq(self, u: AxbGroupElement, v: AxbGroupElement) -> bool:
        return self.ring.eq(u.a, v.a) and self.ring.eq(u.x, v.x)

    def in_g1(self, u: AxbGroupElement) -> bool:
        """G1 = {(a, a - 1)}."""
        r = self.ring
        try:
            shifted = r.add(u.x, r.one())
        except PrecisionExhausted:
            return False  # x + 1 vanishes to precision while a is a unit
        return r.eq(u.a, shifted)

    def in_g2(self, u: AxbGroupElement) -> bool:
        """G2 = {(b, 0)}."""
        return self.ring.eq(u.x, self.ring.zero())


def axb_factorize(desc: Ring, elem: AxbGroupElement) -> tuple[AxbGroupElement, AxbGroupElement]:
    """Split (a, x) = (x+1, x) (a (x+1)^-1, 0) with the factors in G1 and G2."""
    r = desc
    try:
        u = r.add(elem.x, r.one())
    except PrecisionExhausted:
        raise NotFactorizable("x + 1 vanishes to the tracked precision") from None
    if not r.is_unit(u):  # may raise TailUncertain
        raise NotFactorizable("x + 1 is not a unit: the element lies off G1 G2")
    g = AxbGroupElement(u, elem.x)
    s = AxbGroupElement(r.mul(elem.a, r.inverse(u)), r.zero())
    return g, s


# verdicts


def semiregularity_verdict(subject: Union[MatchedPair, Ring]) -> str:
    """``regular``, ``semiregular_not_regular`` or ``not_semiregular``.

    A finite matched pair is always regular.  For the ax+b pair over a ring
    A whose non-units are Haar-null the unitary is never regular, and it is
    semi-regular exactly when the unit group is open.
    """
    if isinstance(subject, MatchedPair):
        return "regular"
    if isinstance(subject, FiniteModRing) or (
            isinstance(subject, BqRing) and isinstance(subject.base, FiniteModRing)):
        raise NotMatchedPair(
            "over a finite ring the non-units have positive counting measure")
    if isinstance(subject, Ring):
        return ("semiregular_not_regular" if units_open_verdict(subject) == "open"
                else "not_semiregular")
    raise TypeError(f"unsupported subject {subject!r}")


# averaging over G2 (finite pairs and ax+b over Q_p)


def quotient_average_finite(mp: MatchedPair, f1: Callable[[int], Fraction],
                            f2: Callable[[int], Fraction]) -> dict[int, Fraction]:
    """H(g) = sum_s F1(p1(sg)) F2(s) for g in G1 (counting measure)."""
    G = mp.group
    return {g: sum((Fraction(f1(int(mp.p1[G.mul(s, g)]))) * Fraction(f2(s)) for s in mp.g2),
                   Fraction(0))
            for g in mp.g1}


def _unit_cosets(prime: int, level: int):
    """Units of Z_p modulo p^level (level >= 1) as integers."""
    return [u for u in range(prime**level) if u % prime]


@dataclass
class QuotientAverage:
    """H tabulated on cosets of p^level Z_p inside p^-radius Z_p (x = a - 1).

    ``constant_at`` is ``level`` when every refinement checked agreed with
    the coarse table, else None.  ``support_bound`` is the radius outside
    which H vanishes identically.  ``singular_cells`` counts integration
    cells whose image under b -> bx + 1 meets the non-factorizable point 0;
    F1 vanishes on all of them.
    """

    prime: int
    level: int
    radius: int
    values: dict[Fraction, Fraction]
    constant_at: int | None
    support_bound: int
    singular_cells: int

    def __call__(self, x: Fraction) -> Fraction:
        j = coset_index(x, self.prime, self.level, self.radius)
        if j is None:
            return Fraction(0)
        return self.values[Fraction(j, self.prime**self.radius)]


def _check_punctured(f: LocallyConstantFunction) -> None:
    zero = coset_index(0, f.prime, f.level, f.radius)
    if f.values[zero]:
        raise ValueError("functions on Q_p^x must vanish near 0")


def quotient_average_axb(f1: LocallyConstantFunction, f2: LocallyConstantFunction,
                         level: int, radius: int, check_level: int | None = None) -> QuotientAverage:
    """H(x) = integral F1(bx + 1) F2(b) d*b for the ax+b pair over Q_p.

    G1 and G2 are both copies of Q_p^x (g = (a, a-1), s = (b, 0)), the coset
    of g in G/G2 is x = a - 1 and p1(sg) has parameter bx + 1.  F1, F2 are
    locally constant on Q_p^x.  H is tabulated on cosets of p^level inside
    p^-radius; with ``check_level`` every finer coset is re-evaluated to
    certify local constancy at ``level``.
    """
    p = f1.prime
    for f in (f1, f2):
        if f.arity != 1 or f.prime != p:
            raise ValueError("F1, F2 must be one-variable functions on the same Q_p")
        _check_punctured(f)
    k1, m1, k2, m2 = f1.level, f1.radius, f2.level, f2.radius
    support_bound = m1 + k2 - 1
    singular = 0

    def h(x: Fraction) -> Fraction:
        nonlocal singular
        if x == 0:
            depth = max(1, k2 + m2)
        else:
            vx = valuation_of_rational(x, p)
            if vx < -support_bound:
                return Fraction(0)  # |bx| > p^m1 for every b in supp F2
            depth = max(1, k2 + m2, k1 + m2 - vx)
        units = _unit_cosets(p, depth)
        w = Fraction(1, p**depth)
        total = Fraction(0)
        for v in range(-m2, k2):
            pv = Fraction(p) ** v
            for u in units:
                b = pv * u
                f2b = f2(b)
                if not f2b:
                    continue
                y = b * x + 1
                if coset_index(y, p, k1, m1) == coset_index(0, p, k1, m1):
                    singular += 1
                total += f1(y) * f2b * w
        return total

    size = p ** (level + radius)
    values = {Fraction(j, p**radius): h(Fraction(j, p**radius)) for j in range(size)}
    constant_at = None
    if check_level is not None:
        constant_at = level
        for j in range(p ** (check_level + radius)):
            if h(Fraction(j, p**radius)) != values[Fraction(j % size, p**radius)]:
                constant_at = None
                break
    return QuotientAverage(p, level, radius, values, constant_at, support_bound, singular)


# Haar measures on ax+b over Q_p in coordinates (A, X):
#   right Haar on G:    dA dX / |A|
#   right Haar on G1:   d*a = da/|a|  (g = (a, a-1)),  likewise on G2
#   modular functions:  Delta(A, X) = |A|^-1,  Delta1 = Delta2 = 1


def modular_function_axb(a: Fraction | PAdicNumber, prime: int) -> Fraction:
    if isinstance(a, PAdicNumber):
        return 1 / a.norm()
    return Fraction(prime) ** valuation_of_rational(a, prime)


def haar_integral_axb(F: LocallyConstantFunction) -> Fraction:
    """Right Haar integral of F(A, X) over G = Q_p^x x Q_p.

    F must vanish on cosets of A meeting 0 so that the integrand is
    compactly supported in G.
    """
    if F.arity != 2:
        raise ValueError("need a two-variable function of (A, X)")
    p, m = F.prime, F.cells_per_axis
    zero = coset_index(0, p, F.level, F.radius)
    total = Fraction(0)
    for i in range(m):
        row = F.values[i * m:(i + 1) * m]
        if not any(row):
            continue
        if i == zero:
            raise ValueError("F does not vanish near A = 0")
        vA = valuation_of_rational(Fraction(i, p**F.radius), p)
        total += sum(row, Fraction(0)) * Fraction(p) ** vA
    return total * F.cell_measure


def right_translate_axb(F: LocallyConstantFunction, b: Fraction, y: Fraction,
                        level: int, radius: int) -> LocallyConstantFunction:
    """The function (A, X) -> F((A, X)(b, y)) = F(Ab, X + Ay) on a finer grid."""
    return LocallyConstantFunction.from_callable(
        F.prime, level, radius, lambda A, X: F(A * b, X + A * y) if A else 0, arity=2)


@dataclass
class DensityCheck:
    lhs: Fraction
    rhs: Fraction

    @property
    def equal(self) -> bool:
        return self.lhs == self.rhs


def density_identity_check(F: LocallyConstantFunction, twist: int = 0) -> DensityCheck:
    """Both sides of int F(x) dx = iint F(gs) Delta1(g) Delta(g)^-1 dg ds.

    The left side sums F over its (A, X) cells.  The right side integrates
    over (a, b) in G1 x G2 with gs = (ab, a - 1), writing a = p^v u and
    b = p^i w with u, w units enumerated modulo p^r; shells with v past the
    level of F all contribute the same amount and are summed as a
    geometric series.

    A nonzero ``twist`` multiplies the right-hand integrand by |a|^twist,
    i.e. uses a wrong modular factor; it exists as a negative control.
    """
    if F.arity != 2:
        raise ValueError("need a two-variable function of (A, X)")
    p, k, m = F.prime, F.level, F.radius
    if twist < 0:
        raise ValueError("twist must be nonnegative")
    if m < 0:
        raise UnsupportedLevel("negative radius is not supported")
    if k < 1:
        raise UnsupportedLevel(f"level {k} is too coarse for the unit cosets")
    lhs = haar_integral_axb(F)
    r = k + max(m, 0)
    mod = p**r  # cells of both coordinates, scaled by p^m
    units = _unit_cosets(p, r)
    M = F.cells_per_axis
    vals = F.values
    cell = Fraction(1, p ** (2 * r))  # du dw for one pair of unit cosets

    def shell(x_index: Callable[[int], int]) -> Fraction:
        # sum over n = v + i (the valuation of A = ab) of the (u, w) integral
        total = 0
        for n in range(-m, k):
            scale = p ** (n + m)
            for u in units:
                base = x_index(u)
                su = scale * u
                for w in units:
                    total += vals[(su * w % mod) * M + base]
        return Fraction(total) * cell

    rhs = Fraction(0)
    # a = p^v u with -m <= v < k; the cell index of X = a - 1 is (a - 1) p^m mod p^r
    for v in range(-m, k):
        pv = p ** (v + m)
        rhs += Fraction(p) ** (-v * (1 + twist)) * shell(lambda u: (pv * u - p**m) % mod)
    # v >= k: a - 1 lies in -1 + p^k Z_p, all such shells agree
    rhs += shell(lambda u: (-(p**m)) % mod) * sum_geometric_tail(p ** (1 + twist), k)
    return DensityCheck(lhs, rhs)


def sum_geometric_tail(p: int, k: int) -> Fraction:
    """sum_{v >= k} p^-v."""
    return Fraction(p) ** (-k) / (1 - Fraction(1, p))


def random_axb_function(prime: int, level: int, radius: int, rng,
                        max_value: int = 5, density: float = 0.5) -> LocallyConstantFunction:
    """Random level-k function of (A, X), zero on cells with A near 0."""
    m = prime ** (level + radius)
    zero = coset_index(0, prime, level, radius)
    vals = []
    for i in range(m):
        for _ in range(m):
            if i == zero or rng.random() > density:
                vals.append(Fraction(0))
            else:
                vals.append(Fraction(int(rng.integers(1, max_value + 1))))
    return LocallyConstantFunction(prime, level, radius, tuple(vals), 2)
