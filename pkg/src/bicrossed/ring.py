"""Locally compact rings: Z/n, Q_p, restricted adele products and B_q.

Adele convention: components outside the exception map are all equal to 1
when the tail is ``"unit"`` and are unspecified elements of Z_p when the
tail is ``"integral"``.  A unit of the restricted product is an element whose
components are all nonzero and almost all lie in Z_p^x.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Iterable, Mapping

import numpy as np

from .padic import (DEFAULT_PRECISION, LocallyConstantFunction, PAdicNumber, haar_integral,
                    parse_padic, seed_sequence, valuation_of_rational)


class RingError(ArithmeticError):
    pass


class DescriptorMismatch(RingError, TypeError):
    pass


class NotInvertible(RingError):
    pass


class TailUncertain(RingError):
    """The verdict depends on unspecified tail components."""


class NoFreePrime(RingError):
    pass


# primes


@lru_cache(maxsize=None)
def first_primes(count: int) -> tuple[int, ...]:
    from sympy import prime
    return tuple(prime(i) for i in range(1, count + 1))


def is_prime(n: int) -> bool:
    from sympy import isprime
    return bool(isprime(n))


@dataclass(frozen=True)
class PrimePool:
    """A set of primes with residue degrees and a convergence certificate.

    ``kind`` is one of ``ExplicitFinite``, ``AllPrimesResidueDegree2`` and
    ``SparseSummableList``.  A sparse list is an infinite set of which
    ``primes`` is the enumerated part; ``bound`` is the user-declared bound on
    sum(1/p) and must dominate every listed partial sum.  All primes with
    residue degree 1 is not constructible (sum 1/p diverges).
    """

    kind: str
    primes: tuple[int, ...] = ()
    degrees: tuple[tuple[int, int], ...] = ()
    bound: Fraction | None = None

    KINDS = ("ExplicitFinite", "AllPrimesResidueDegree2", "SparseSummableList")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown pool kind {self.kind!r}")
        if self.kind == "AllPrimesResidueDegree2":
            if self.primes:
                raise ValueError("AllPrimesResidueDegree2 takes no explicit primes")
        else:
            if any(b <= a for a, b in zip(self.primes, self.primes[1:])):
                raise ValueError("primes must be strictly increasing")
            bad = [p for p in self.primes if not is_prime(p)]
            if bad:
                raise ValueError(f"not prime: {bad}")
        if self.kind == "SparseSummableList":
            if self.bound is None:
                raise ValueError("SparseSummableList needs a declared summability bound")
            partial = Fraction(0)
            for p in self.primes:
                partial += Fraction(1, p)
                if partial > self.bound:
                    raise ValueError(f"declared bound {self.bound} is exceeded at p={p}")
        for p, f in self.degrees:
            if f < 1:
                raise ValueError("residue degree must be >= 1")
            if not self.contains(p):
                raise ValueError(f"residue degree given for {p}, not in pool")

    @classmethod
    def explicit(cls, primes: Iterable[int], degree: int | Mapping[int, int] = 1) -> PrimePool:
        primes = tuple(primes)
        if isinstance(degree, int):
            degrees = tuple((p, degree) for p in primes) if degree != 1 else ()
        else:
            degrees = tuple(sorted(degree.items()))
        return cls("ExplicitFinite", primes, degrees)

    @classmethod
    def all_primes_degree2(cls) -> PrimePool:
        return cls("AllPrimesResidueDegree2")

    @classmethod
    def sparse(cls, primes: Iterable[int], bound) -> PrimePool:
        return cls("SparseSummableList", tuple(primes), (), Fraction(bound))

    @property
    def is_finite(self) -> bool:
        return self.kind == "ExplicitFinite"

    def residue_degree(self, p: int) -> int:
        for q, f in self.degrees:
            if q == p:
                return f
        return 2 if self.kind == "AllPrimesResidueDegree2" else 1

    def contains(self, p: int) -> bool:
        if self.kind == "AllPrimesResidueDegree2":
            return is_prime(p)
        return p in self.primes

    def first(self, count: int) -> tuple[int, ...]:
        """The ``count`` smallest primes of the pool."""
        if self.kind == "AllPrimesResidueDegree2":
            return first_primes(count)
        if count > len(self.primes):
            raise ValueError(f"pool lists only {len(self.primes)} primes")
        return self.primes[:count]

    def iter_primes(self):
        if self.kind == "AllPrimesResidueDegree2":
            n = 1
            while True:
                batch = first_primes(n * 64)
                yield from batch[(n - 1) * 64:]
                n += 1
        else:
            yield from self.primes

    def to_json(self) -> dict:
        out: dict[str, Any] = {"kind": self.kind}
        if self.kind != "AllPrimesResidueDegree2":
            out["primes"] = list(self.primes)
        if self.degrees:
            out["residue_degree"] = {str(p): f for p, f in self.degrees}
        if self.bound is not None:
            out["bound"] = str(self.bound)
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> PrimePool:
        kind = data.get("kind")
        if kind == "AllPrimesResidueDegree2":
            return cls.all_primes_degree2()
        primes = tuple(int(p) for p in data.get("primes", ()))
        deg = data.get("residue_degree", 1)
        if kind == "ExplicitFinite":
            if isinstance(deg, Mapping):
                deg = {int(k): int(v) for k, v in deg.items()}
            return cls.explicit(primes, deg)
        if kind == "SparseSummableList":
            return cls.sparse(primes, Fraction(str(data["bound"])))
        raise ValueError(f"unknown pool kind {kind!r}")


# elements


@dataclass(frozen=True, eq=False)
class Adele:
    pool: PrimePool
    exceptions: tuple[tuple[int, PAdicNumber], ...] = ()
    tail: str = "unit"

    def __post_init__(self):
        if self.tail not in ("unit", "integral"):
            raise ValueError(f"tail must be 'unit' or 'integral', got {self.tail!r}")
        primes = [p for p, _ in self.exceptions]
        if primes != sorted(set(primes)):
            raise ValueError("exception primes must be sorted and distinct")
        for p, x in self.exceptions:
            if not self.pool.contains(p):
                raise ValueError(f"exception prime {p} is not in the pool")
            if x.prime != p:
                raise ValueError(f"component at {p} lives in Q_{x.prime}")

    @classmethod
    def make(cls, pool: PrimePool, components: Mapping[int, PAdicNumber | int | Fraction],
             tail: str = "unit", precision: int = DEFAULT_PRECISION) -> Adele:
        exc = []
        for p in sorted(components):
            x = components[p]
            if not isinstance(x, PAdicNumber):
                x = PAdicNumber.from_rational(x, p, precision)
            exc.append((p, x))
        return cls(pool, tuple(exc), tail)

    @property
    def exception_map(self) -> dict[int, PAdicNumber]:
        return dict(self.exceptions)

    def covers_pool(self) -> bool:
        """True when every pool prime carries an explicit component."""
        return self.pool.is_finite and set(self.pool.primes) <= set(self.exception_map)

    def component(self, p: int, precision: int = DEFAULT_PRECISION) -> PAdicNumber:
        exc = self.exception_map
        if p in exc:
            return exc[p]
        if not self.pool.contains(p):
            raise ValueError(f"{p} is not in the pool")
        if self.tail == "unit":
            return PAdicNumber.from_rational(1, p, precision)
        raise TailUncertain(f"component at {p} is an unspecified element of Z_{p}")

    def is_unit(self) -> bool:
        """Certified unit verdict; raises TailUncertain when not decidable."""
        if any(x.is_zero for _, x in self.exceptions):
            return False
        if self.tail == "unit" or self.covers_pool():
            return True
        raise TailUncertain("integral tail: invertibility is not certified")

    def __eq__(self, other) -> bool:
        if not isinstance(other, Adele):
            return NotImplemented
        if self.pool != other.pool or self.tail != other.tail:
            return False
        primes = set(self.exception_map) | set(other.exception_map)
        if self.tail == "integral":
            if set(self.exception_map) != set(other.exception_map):
                return False
        return all(self.component(p) == other.component(p) for p in primes)

    __hash__ = None

    def to_json(self) -> dict:
        return {"exceptions": {str(p): str(x) for p, x in self.exceptions}, "tail": self.tail}

    @classmethod
    def from_json(cls, pool: PrimePool, data: Mapping) -> Adele:
        exc = tuple(sorted((int(p), parse_padic(s)) for p, s in data.get("exceptions", {}).items()))
        return cls(pool, exc, data.get("tail", "unit"))


@dataclass(frozen=True)
class BqElement:
    """The element (a, b; c, d)_q of B_q; entries live in the base ring."""

    a: Any
    b: Any
    c: Any
    d: Any

    def entries(self) -> tuple:
        return (self.a, self.b, self.c, self.d)


# descriptors


class Ring:
    """Common interface of the ring descriptors."""

    kind: str

    def zero(self):
        return self.element(0)

    def one(self):
        return self.element(1)

    def element(self, value):
        raise NotImplementedError

    def validate(self, x):
        raise NotImplementedError

    def add(self, x, y):
        raise NotImplementedError

    def neg(self, x):
        raise NotImplementedError

    def sub(self, x, y):
        return self.add(x, self.neg(y))

    def mul(self, x, y):
        raise NotImplementedError

    def is_unit(self, x) -> bool:
        raise NotImplementedError

    def inverse(self, x):
        raise NotImplementedError

    def eq(self, x, y) -> bool:
        return x == y

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class FiniteModRing(Ring):
    n: int
    kind = "FiniteModRing"

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("FiniteModRing needs n >= 2")

    def element(self, value):
        value = Fraction(value)
        return value.numerator * pow(value.denominator, -1, self.n) % self.n

    def validate(self, x):
        if not isinstance(x, (int, np.integer)) or isinstance(x, bool) or not 0 <= x < self.n:
            raise DescriptorMismatch(f"{x!r} is not an element of Z/{self.n}")
        return int(x)

    def add(self, x, y):
        return (self.validate(x) + self.validate(y)) % self.n

    def neg(self, x):
        return -self.validate(x) % self.n

    def mul(self, x, y):
        return self.validate(x) * self.validate(y) % self.n

    def is_unit(self, x) -> bool:
        return math.gcd(self.validate(x), self.n) == 1

    def inverse(self, x):
        if not self.is_unit(x):
            raise NotInvertible(f"{x} is not a unit of Z/{self.n}")
        return pow(x, -1, self.n)

    def elements(self):
        return range(self.n)

    def to_json(self) -> dict:
        return {"kind": self.kind, "n": self.n}


@dataclass(frozen=True)
class PAdicField(Ring):
    p: int
    precision: int = DEFAULT_PRECISION
    kind = "PAdicField"

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")

    def element(self, value):
        if isinstance(value, PAdicNumber):
            return self.validate(value)
        return PAdicNumber.from_rational(value, self.p, self.precision)

    def validate(self, x):
        if not isinstance(x, PAdicNumber) or x.prime != self.p:
            raise DescriptorMismatch(f"{x!r} is not an element of Q_{self.p}")
        return x

    def add(self, x, y):
        return self.validate(x) + self.validate(y)

    def neg(self, x):
        return -self.validate(x)

    def mul(self, x, y):
        return self.validate(x) * self.validate(y)

    def is_unit(self, x) -> bool:
        return not self.validate(x).is_zero

    def inverse(self, x):
        if not self.is_unit(x):
            raise NotInvertible("zero is not invertible in Q_p")
        return x.inverse()

    def to_json(self) -> dict:
        return {"kind": self.kind, "p": self.p, "precision": self.precision}


@dataclass(frozen=True)
class RestrictedAdeles(Ring):
    pool: PrimePool
    precision: int = DEFAULT_PRECISION
    kind = "RestrictedAdeles"

    def element(self, value):
        if isinstance(value, Adele):
            return self.validate(value)
        value = Fraction(value)
        if self.pool.is_finite:
            return Adele.make(self.pool, {p: value for p in self.pool.primes}, "unit", self.precision)
        if value == 1:
            return Adele(self.pool, (), "unit")
        raise TailUncertain("only the constant 1 has a representable tail in an infinite pool")

    def validate(self, x):
        if not isinstance(x, Adele) or x.pool != self.pool:
            raise DescriptorMismatch(f"{x!r} is not an adele over this pool")
        return x

    def _combine(self, x: Adele, y: Adele, op, tail: str) -> Adele:
        """Apply ``op`` prime-wise on the explicit components.

        A component meeting an unspecified tail entry is unspecified too; it
        is absorbed into the integral tail when it is provably in Z_p.
        """
        ex, ey = x.exception_map, y.exception_map
        out = {}
        for p in sorted(set(ex) | set(ey)):
            try:
                out[p] = op(x.component(p, self.precision), y.component(p, self.precision))
            except TailUncertain:
                known = ex.get(p, ey.get(p))
                if not known.is_integral():
                    raise
        if self.pool.is_finite and set(out) >= set(self.pool.primes):
            tail = "unit"  # the tail is empty
        return Adele.make(self.pool, out, tail, self.precision)

    def add(self, x, y):
        x, y = self.validate(x), self.validate(y)
        # 1 + 1 = 2 leaves the canonical unit tail, so sums have integral tails
        return self._combine(x, y, lambda a, b: a + b, "integral")

    def neg(self, x):
        x = self.validate(x)
        tail = "unit" if x.covers_pool() else "integral"
        return Adele(self.pool, tuple((p, -v) for p, v in x.exceptions), tail)

    def mul(self, x, y):
        x, y = self.validate(x), self.validate(y)
        tail = "unit" if (x.tail, y.tail) == ("unit", "unit") else "integral"
        return self._combine(x, y, lambda a, b: a * b, tail)

    def is_unit(self, x) -> bool:
        return self.validate(x).is_unit()

    def inverse(self, x):
        x = self.validate(x)
        if not x.is_unit():
            raise NotInvertible("an adele with a zero component is not invertible")
        return Adele(self.pool, tuple((p, v.inverse()) for p, v in x.exceptions), x.tail)

    def eq(self, x, y) -> bool:
        return self.validate(x) == self.validate(y)

    def to_json(self) -> dict:
        return {"kind": self.kind, "pool": self.pool.to_json(), "precision": self.precision}


@dataclass(frozen=True)
class BqRing(Ring):
    base: Ring
    q: Any
    kind = "BqRing"

    def __post_init__(self):
        self.base.validate(self.q)

    def element(self, value):
        if isinstance(value, BqElement):
            return self.validate(value)
        z, o = self.base.zero(), self.base.element(value)
        return BqElement(o, z, z, o)

    def validate(self, x):
        if not isinstance(x, BqElement):
            raise DescriptorMismatch(f"{x!r} is not a B_q element")
        for e in x.entries():
            self.base.validate(e)
        return x

    def add(self, x, y):
        b = self.base
        return BqElement(*(b.add(u, v) for u, v in zip(self.validate(x).entries(),
                                                      self.validate(y).entries())))

    def neg(self, x):
        return BqElement(*(self.base.neg(u) for u in self.validate(x).entries()))

    def mul(self, x, y):
        return bq_mul(self.base, self.q, self.validate(x), self.validate(y))

    def is_unit(self, x) -> bool:
        # invertible iff both components of pi_q are invertible 2x2 matrices
        b = self.base
        for m in pi_q(b, self.q, self.validate(x)):
            (a, bb), (c, d) = m
            if not b.is_unit(b.sub(b.mul(a, d), b.mul(bb, c))):
                return False
        return True

    def inverse(self, x):
        raise NotImplementedError("B_q inverses are not needed by any check")

    def eq(self, x, y) -> bool:
        return all(self.base.eq(u, v) for u, v in zip(x.entries(), y.entries()))

    def to_json(self) -> dict:
        q = self.q if isinstance(self.q, int) else str(self.q)
        return {"kind": self.kind, "base": self.base.to_json(), "q": q}


def bq_mul(base: Ring, q, m: BqElement, m2: BqElement) -> BqElement:
    """(a,b;c,d)(a',b';c',d') = (aa'+qbc', ab'+bd'; ca'+dc', dd'+qcb')."""
    add, mul = base.add, base.mul
    a, b, c, d = m.entries()
    a2, b2, c2, d2 = m2.entries()
    return BqElement(
        add(mul(a, a2), mul(q, mul(b, c2))),
        add(mul(a, b2), mul(b, d2)),
        add(mul(c, a2), mul(d, c2)),
        add(mul(d, d2), mul(q, mul(c, b2))),
    )


def pi_q(base: Ring, q, m: BqElement):
    """The pair ((a, b; qc, d), (a, qb; c, d)) of 2x2 matrices over the base."""
    a, b, c, d = m.entries()
    return (((a, b), (base.mul(q, c), d)),
            ((a, base.mul(q, b)), (c, d)))


def pi_q_component_bijective(base: FiniteModRing, q, component: int = 0) -> bool:
    """Whether m -> pi_q(m)[component] is a bijection of B_q onto M_2(base), by enumeration."""
    if not isinstance(base, FiniteModRing):
        raise DescriptorMismatch("enumeration needs a finite base ring")
    q = base.element(q)
    seen = set()
    n = base.n
    for a in range(n):
        for b in range(n):
            for c in range(n):
                for d in range(n):
                    seen.add(pi_q(base, q, BqElement(a, b, c, d))[component])
    return len(seen) == n ** 4


def matmul2(base: Ring, x, y):
    add, mul = base.add, base.mul
    return tuple(tuple(add(mul(x[i][0], y[0][j]), mul(x[i][1], y[1][j])) for j in range(2))
                 for i in range(2))


def ring_arith(desc: Ring, op: str, x, y=None):
    """Dispatch ``add``, ``sub``, ``mul``, ``div``, ``neg`` or ``inv`` on ``desc``."""
    if op == "add":
        return desc.add(x, y)
    if op == "sub":
        return desc.sub(x, y)
    if op == "mul":
        return desc.mul(x, y)
    if op == "neg":
        return desc.neg(x)
    if op == "inv":
        return desc.inverse(x)
    if op == "div":
        return desc.mul(x, desc.inverse(y))
    raise ValueError(f"unknown operation {op!r}")


# topology and measure


def units_open_verdict(desc: Ring) -> str:
    if isinstance(desc, (FiniteModRing, PAdicField)):
        return "open"
    if isinstance(desc, RestrictedAdeles):
        return "open" if desc.pool.is_finite else "not_open"
    if isinstance(desc, BqRing):
        # units are cut out by two determinants being units of the base
        return units_open_verdict(desc.base)
    raise DescriptorMismatch(f"unsupported descriptor {desc!r}")


def interior_witness(desc: RestrictedAdeles, u: Adele, constraint: Iterable[int]) -> Adele:
    """A non-unit agreeing with the unit ``u`` on every constrained prime.

    The basic neighbourhood of ``u`` fixes the constrained components and
    leaves every other component free in Z_p; the witness sets the first
    free component to 0.
    """
    if not isinstance(desc, RestrictedAdeles):
        raise DescriptorMismatch("interior witnesses exist only for adele rings")
    u = desc.validate(u)
    if not u.is_unit():
        raise NotInvertible("the centre of the neighbourhood must be a unit")
    constraint = set(constraint)
    if desc.pool.is_finite:
        raise NoFreePrime("finite pool: the unit group is open, no witness exists")
    exc = u.exception_map
    for p in desc.pool.iter_primes():
        if p in constraint:
            continue
        if p in exc and not exc[p].is_integral():
            continue  # that coordinate cannot range over all of Z_p
        comps = dict(exc)
        comps[p] = PAdicNumber.zero(p, desc.precision)
        return Adele.make(desc.pool, comps, u.tail, desc.precision)
    raise NoFreePrime("every listed prime of the pool is constrained")


def in_basic_neighbourhood(u: Adele, x: Adele, constraint: Iterable[int]) -> bool:
    """x agrees with u on the constrained primes and is integral elsewhere."""
    constraint = set(constraint)
    for p in constraint:
        if x.component(p) != u.component(p):
            return False
    return all(v.is_integral() for p, v in x.exceptions if p not in constraint)


def random_unit_adele(desc: RestrictedAdeles, rng, max_exceptions: int = 4,
                      prime_window: int = 20) -> Adele:
    """A certified unit with a few random nonzero components among the first primes."""
    primes = desc.pool.first(prime_window) if not desc.pool.is_finite else desc.pool.primes
    k = int(rng.integers(0, min(max_exceptions, len(primes)) + 1))
    chosen = sorted(int(p) for p in rng.choice(primes, size=k, replace=False)) if k else []
    comps = {}
    for p in chosen:
        v = int(rng.integers(-2, 3))
        unit = int(rng.integers(1, p ** 3))
        while unit % p == 0:
            unit = int(rng.integers(1, p ** 3))
        comps[p] = Fraction(unit) * Fraction(p) ** v
    return Adele.make(desc.pool, comps, "unit", desc.precision)


def local_nonunit_measure(p: int, f: int = 1) -> Fraction:
    """Haar measure of the non-units of the degree-f unramified ring of integers.

    That ring is Z_p^f as an additive group (f = 1 or 2) and its non-units
    are the points with every coordinate in pZ_p.
    """
    if f not in (1, 2):
        raise ValueError("only residue degrees 1 and 2 are modelled")
    F = LocallyConstantFunction.from_callable(
        p, 1, 0, lambda *xs: int(all(x == 0 or valuation_of_rational(x, p) >= 1 for x in xs)), arity=f)
    return haar_integral(F)


@dataclass(frozen=True)
class DensityEstimate:
    estimate: float
    std_error: float
    closed_form: Fraction
    primes: tuple[int, ...]
    n_samples: int

    def within(self, sigmas: float = 3.0) -> bool:
        if self.std_error == 0:
            return self.estimate == float(self.closed_form)
        return abs(self.estimate - float(self.closed_form)) <= sigmas * self.std_error


def unit_density_closed_form(pool: PrimePool, truncation: int) -> Fraction:
    """prod over the first ``truncation`` pool primes of (1 - p^-f_p)."""
    out = Fraction(1)
    for p in pool.first(truncation):
        out *= 1 - Fraction(1, p ** pool.residue_degree(p))
    return out


def unit_density_estimate(desc: RestrictedAdeles, truncation: int, n_samples: int, seed,
                          shards: int = 1) -> DensityEstimate:
    """Monte Carlo estimate of the Haar measure of the units in prod Z_p.

    Samples the first ``truncation`` pool primes.  A component of residue
    degree f is a unit iff its f residue digits are not all zero.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    pool = desc.pool
    primes = pool.first(truncation)
    closed = unit_density_closed_form(pool, truncation)
    children = seed_sequence(seed).spawn(shards)
    sizes = [n_samples // shards + (1 if i < n_samples % shards else 0) for i in range(shards)]
    hits = 0
    for ss, k in zip(children, sizes):
        rng = np.random.default_rng(ss)
        ok = np.ones(k, dtype=bool)
        for p in primes:
            f = pool.residue_degree(p)
            residues = rng.integers(0, p, size=(k, f))
            ok &= residues.any(axis=1)
        hits += int(ok.sum())
    est = hits / n_samples
    se = math.sqrt(est * (1 - est) / n_samples)
    return DensityEstimate(est, se, closed, primes, n_samples)


# JSON


def ring_from_json(data) -> Ring:
    if isinstance(data, str):
        data = json.loads(data)
    kind = data.get("kind")
    if kind == "FiniteModRing":
        return FiniteModRing(int(data["n"]))
    if kind == "PAdicField":
        return PAdicField(int(data["p"]), int(data.get("precision", DEFAULT_PRECISION)))
    if kind == "RestrictedAdeles":
        return RestrictedAdeles(PrimePool.from_json(data["pool"]),
                                int(data.get("precision", DEFAULT_PRECISION)))
    if kind == "BqRing":
        base = ring_from_json(data["base"])
        return BqRing(base, base.element(Fraction(str(data["q"]))))
    raise ValueError(f"unknown ring kind {kind!r}")


BUILTIN_RINGS = {
    "adeles-f2": lambda: RestrictedAdeles(PrimePool.all_primes_degree2()),
    "adeles-235": lambda: RestrictedAdeles(PrimePool.explicit([2, 3, 5])),
    "Q5": lambda: PAdicField(5),
    "Q3": lambda: PAdicField(3),
    "Z/36": lambda: FiniteModRing(36),
}


def resolve_ring(spec) -> Ring:
    """A ring from a built-in name, a JSON string or a JSON object."""
    if isinstance(spec, Ring):
        return spec
    if isinstance(spec, str):
        if spec in BUILTIN_RINGS:
            return BUILTIN_RINGS[spec]()
        if spec.startswith("Z/") and spec[2:].isdigit():
            return FiniteModRing(int(spec[2:]))
        return ring_from_json(json.loads(spec))
    return ring_from_json(spec)
