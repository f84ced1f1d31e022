"""Exact arithmetic in Q_p and Haar integration of locally constant functions.

A nonzero p-adic number is stored as ``p**valuation * unit`` where ``unit`` is
an integer prime to ``p`` known modulo ``p**precision``.  Precision is
relative: it counts the tracked digits of the unit part.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence, Union

import numpy as np

DEFAULT_PRECISION = 8


def seed_sequence(seed) -> np.random.SeedSequence:
    """Accept an int, a sequence of ints or an existing SeedSequence."""
    return seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)


class PAdicError(ArithmeticError):
    pass


class PrimeMismatch(PAdicError):
    pass


class DivisionByZeroToPrecision(PAdicError, ZeroDivisionError):
    pass


class PrecisionExhausted(PAdicError):
    """Cancellation consumed every tracked digit."""


class InsufficientPrecision(PAdicError):
    pass


class MalformedFunction(ValueError):
    pass


def valuation_of_int(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def valuation_of_rational(x: Fraction | int, p: int) -> int:
    x = Fraction(x)
    return valuation_of_int(x.numerator, p) - valuation_of_int(x.denominator, p)


@dataclass(frozen=True, eq=False)
class PAdicNumber:
    """An element of Q_p at fixed relative precision.

    ``valuation is None`` marks the zero-to-precision value; it behaves as an
    exact zero under arithmetic.  ``loss`` counts digits dropped by
    cancellation along the computation that produced this value.
    """

    prime: int
    valuation: int | None
    unit: int
    precision: int = DEFAULT_PRECISION
    loss: int = 0

    def __post_init__(self):
        p, n = self.prime, self.precision
        if p < 2:
            raise ValueError(f"prime must be >= 2, got {p}")
        if n < 1:
            raise ValueError(f"precision must be >= 1, got {n}")
        if self.valuation is None:
            if self.unit != 0:
                raise ValueError("zero-to-precision value must have unit 0")
        else:
            if not 0 < self.unit < p**n or self.unit % p == 0:
                raise ValueError(f"unit part {self.unit} is not a unit modulo {p}^{n}")

    # construction

    @classmethod
    def zero(cls, prime: int, precision: int = DEFAULT_PRECISION) -> PAdicNumber:
        return cls(prime, None, 0, precision)

    @classmethod
    def from_rational(cls, x: Fraction | int, prime: int,
                      precision: int = DEFAULT_PRECISION) -> PAdicNumber:
        x = Fraction(x)
        if x == 0:
            return cls.zero(prime, precision)
        num, den = x.numerator, x.denominator
        vn = valuation_of_int(num, prime)
        vd = valuation_of_int(den, prime)
        num //= prime**vn
        den //= prime**vd
        mod = prime**precision
        unit = num * pow(den, -1, mod) % mod
        return cls(prime, vn - vd, unit, precision)

    @classmethod
    def from_digits(cls, prime: int, valuation: int | None, digits: Sequence[int]) -> PAdicNumber:
        """Build from base-p unit digits, least significant first."""
        if not digits:
            raise ValueError("need at least one digit")
        if any(not 0 <= d < prime for d in digits):
            raise ValueError(f"digits must lie in [0, {prime - 1}]")
        if valuation is None:
            if any(digits):
                raise ValueError("zero-to-precision value must have all digits 0")
            return cls.zero(prime, len(digits))
        if digits[0] == 0:
            raise ValueError("leading unit digit must be nonzero")
        unit = sum(d * prime**i for i, d in enumerate(digits))
        return cls(prime, valuation, unit, len(digits))

    def _coerce(self, other) -> PAdicNumber:
        if isinstance(other, PAdicNumber):
            if other.prime != self.prime:
                raise PrimeMismatch(f"Q_{self.prime} vs Q_{other.prime}")
            return other
        if isinstance(other, (int, Fraction)):
            return PAdicNumber.from_rational(other, self.prime, self.precision)
        return NotImplemented

    # inspection

    @property
    def is_zero(self) -> bool:
        return self.valuation is None

    @property
    def unit_digits(self) -> tuple[int, ...]:
        u, p = self.unit, self.prime
        out = []
        for _ in range(self.precision):
            u, d = divmod(u, p)
            out.append(d)
        return tuple(out)

    @property
    def absolute_precision(self) -> float:
        """Exponent k such that the value is known modulo p**k."""
        if self.valuation is None:
            return float("inf")
        return self.valuation + self.precision

    def is_integral(self) -> bool:
        return self.valuation is None or self.valuation >= 0

    def is_padic_unit(self) -> bool:
        """Unit of Z_p (valuation zero)."""
        return self.valuation == 0

    def norm(self) -> Fraction:
        """The p-adic absolute value |x|_p."""
        if self.valuation is None:
            return Fraction(0)
        return Fraction(self.prime) ** (-self.valuation)

    def residue_mod(self, k: int) -> int:
        """Integer in [0, p**k) congruent to this element of Z_p."""
        if self.valuation is None:
            return 0
        if self.valuation < 0:
            raise ValueError("element is not in Z_p")
        if self.absolute_precision < k:
            raise InsufficientPrecision(
                f"known modulo p^{self.absolute_precision}, need p^{k}")
        return self.prime**self.valuation * self.unit % self.prime**k

    def to_rational(self, bound: int | None = None) -> Fraction | None:
        """Rational reconstruction of the value, or None if none fits.

        Finds n/d with |n|, d <= bound congruent to the unit part; the default
        bound is the largest that keeps the answer unique.
        """
        if self.valuation is None:
            return Fraction(0)
        mod = self.prime**self.precision
        if bound is None:
            bound = int((mod // 2) ** 0.5)
        r0, r1 = mod, self.unit
        s0, s1 = 0, 1
        while r1 > bound:
            q = r0 // r1
            r0, r1 = r1, r0 - q * r1
            s0, s1 = s1, s0 - q * s1
        if s1 == 0 or abs(s1) > bound:
            return None
        frac = Fraction(r1, s1)
        if frac.denominator % self.prime == 0 or frac.numerator % self.prime == 0:
            return None
        return frac * Fraction(self.prime) ** self.valuation

    # arithmetic

    def _result(self, valuation: int, total: int, precision: int, loss: int) -> PAdicNumber:
        p = self.prime
        total %= p**precision
        if total == 0:
            raise PrecisionExhausted(
                f"cancellation consumed all {precision} tracked digits")
        j = valuation_of_int(total, p)
        new_precision = precision - j
        unit = (total // p**j) % p**new_precision
        return PAdicNumber(p, valuation + j, unit, new_precision, loss)

    def __add__(self, other) -> PAdicNumber:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.valuation is None:
            return other
        if other.valuation is None:
            return self
        p = self.prime
        v = min(self.valuation, other.valuation)
        absprec = min(self.valuation + self.precision, other.valuation + other.precision)
        total = (self.unit * p ** (self.valuation - v)
                 + other.unit * p ** (other.valuation - v))
        res = self._result(v, total, absprec - v, 0)
        lost = max(0, min(self.precision, other.precision) - res.precision)
        return PAdicNumber(p, res.valuation, res.unit, res.precision,
                           max(self.loss, other.loss) + lost)

    __radd__ = __add__

    def __neg__(self) -> PAdicNumber:
        if self.valuation is None:
            return self
        mod = self.prime**self.precision
        return PAdicNumber(self.prime, self.valuation, (-self.unit) % mod, self.precision, self.loss)

    def __sub__(self, other) -> PAdicNumber:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> PAdicNumber:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other) -> PAdicNumber:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        loss = max(self.loss, other.loss)
        n = min(self.precision, other.precision)
        if self.valuation is None or other.valuation is None:
            return PAdicNumber(self.prime, None, 0, n, loss)
        unit = self.unit * other.unit % self.prime**n
        return PAdicNumber(self.prime, self.valuation + other.valuation, unit, n, loss)

    __rmul__ = __mul__

    def inverse(self) -> PAdicNumber:
        if self.valuation is None:
            raise DivisionByZeroToPrecision("inverse of zero-to-precision value")
        mod = self.prime**self.precision
        return PAdicNumber(self.prime, -self.valuation, pow(self.unit, -1, mod),
                           self.precision, self.loss)

    def __truediv__(self, other) -> PAdicNumber:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other) -> PAdicNumber:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, k: int) -> PAdicNumber:
        if not isinstance(k, int):
            return NotImplemented
        base = self if k >= 0 else self.inverse()
        out = PAdicNumber.from_rational(1, self.prime, self.precision)
        for _ in range(abs(k)):
            out = out * base
        return out

    # comparison at shared precision

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = PAdicNumber.from_rational(other, self.prime, self.precision)
        if not isinstance(other, PAdicNumber):
            return NotImplemented
        if other.prime != self.prime:
            return False
        if self.valuation is None or other.valuation is None:
            return self.valuation is None and other.valuation is None
        if self.valuation != other.valuation:
            return False
        n = min(self.precision, other.precision)
        return (self.unit - other.unit) % self.prime**n == 0

    __hash__ = None

    def truncate(self, precision: int) -> PAdicNumber:
        if precision > self.precision:
            raise InsufficientPrecision(f"only {self.precision} digits tracked")
        if self.valuation is None:
            return PAdicNumber(self.prime, None, 0, precision, self.loss)
        return PAdicNumber(self.prime, self.valuation, self.unit % self.prime**precision,
                           precision, self.loss)

    # text form: "p^v * (d0 d1 ...)_p", zero as "0 * (0 ...)_p"

    def __str__(self) -> str:
        digits = " ".join(str(d) for d in self.unit_digits)
        if self.valuation is None:
            return f"0 * ({digits})_{self.prime}"
        return f"{self.prime}^{self.valuation} * ({digits})_{self.prime}"

    def __repr__(self) -> str:
        return f"PAdicNumber({self})"


_TEXT = re.compile(r"^\s*(?:(\d+)\^(-?\d+)|0)\s*\*\s*\(([\d\s]+)\)_(\d+)\s*$")


def parse_padic(text: str) -> PAdicNumber:
    """Inverse of ``str(PAdicNumber)``."""
    m = _TEXT.match(text)
    if not m:
        raise ValueError(f"not a p-adic literal: {text!r}")
    base, val, digits, prime = m.groups()
    prime = int(prime)
    digit_list = [int(d) for d in digits.split()]
    if base is None:
        return PAdicNumber.from_digits(prime, None, digit_list)
    if int(base) != prime:
        raise ValueError(f"base {base} disagrees with subscript {prime}")
    return PAdicNumber.from_digits(prime, int(val), digit_list)


def padic_arith(op: str, a: PAdicNumber, b: PAdicNumber) -> PAdicNumber:
    if a.prime != b.prime:
        raise PrimeMismatch(f"Q_{a.prime} vs Q_{b.prime}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


# Haar measure on Q_p, normalised so that Z_p has measure one.

Number = Union[int, Fraction, PAdicNumber]


def coset_index(x: Number, prime: int, level: int, radius: int) -> int | None:
    """Index of the coset x + p^level Z_p inside p^-radius Z_p, None outside it.

    Cosets are enumerated by representatives ``j * p**-radius`` for
    ``0 <= j < p**(level + radius)``.
    """
    size = prime ** (level + radius)
    if isinstance(x, PAdicNumber):
        if x.valuation is None:
            return 0
        if x.valuation < -radius:
            return None
        if x.absolute_precision < level:
            raise InsufficientPrecision(
                f"value known modulo p^{x.absolute_precision}, level {level} needs more")
        return prime ** (x.valuation + radius) * x.unit % size
    x = Fraction(x)
    if x == 0:
        return 0
    if valuation_of_rational(x, prime) < -radius:
        return None
    scaled = x * prime**radius
    return scaled.numerator * pow(scaled.denominator, -1, size) % size


def coset_representative(index: int, prime: int, radius: int) -> Fraction:
    return Fraction(index, prime**radius)


@dataclass(frozen=True)
class LocallyConstantFunction:
    """Compactly supported function on Q_p (arity 1) or Q_p x Q_p (arity 2).

    Constant on cosets of ``p**level Z_p`` (per coordinate), zero outside
    ``p**-radius Z_p``.  ``values`` is flat: for arity 2 the entry for the
    coset pair ``(i, j)`` sits at ``i * m + j`` with ``m = p**(level+radius)``.
    """

    prime: int
    level: int
    radius: int
    values: tuple[Fraction, ...]
    arity: int = 1

    def __post_init__(self):
        if self.level + self.radius < 0:
            raise MalformedFunction("level + radius must be non-negative")
        if self.arity not in (1, 2):
            raise MalformedFunction(f"arity must be 1 or 2, got {self.arity}")
        if len(self.values) != self.cells_per_axis**self.arity:
            raise MalformedFunction(
                f"expected {self.cells_per_axis ** self.arity} values, got {len(self.values)}")

    @property
    def cells_per_axis(self) -> int:
        return self.prime ** (self.level + self.radius)

    @property
    def cell_measure(self) -> Fraction:
        return Fraction(1, self.prime**self.level) ** self.arity

    @classmethod
    def from_callable(cls, prime: int, level: int, radius: int,
                      fn: Callable[..., Fraction | int], arity: int = 1) -> LocallyConstantFunction:
        """Tabulate ``fn`` on coset representatives."""
        m = prime ** (level + radius)
        reps = [coset_representative(j, prime, radius) for j in range(m)]
        if arity == 1:
            vals = tuple(Fraction(fn(r)) for r in reps)
        else:
            vals = tuple(Fraction(fn(a, b)) for a in reps for b in reps)
        return cls(prime, level, radius, vals, arity)

    def __call__(self, *xs: Number) -> Fraction:
        if len(xs) != self.arity:
            raise TypeError(f"expected {self.arity} arguments")
        flat = 0
        m = self.cells_per_axis
        for x in xs:
            j = coset_index(x, self.prime, self.level, self.radius)
            if j is None:
                return Fraction(0)
            flat = flat * m + j
        return self.values[flat]

    def refine(self, level: int, radius: int | None = None) -> LocallyConstantFunction:
        """Same function tabulated on a finer grid."""
        radius = self.radius if radius is None else radius
        if level < self.level or radius < self.radius:
            raise ValueError("refinement must not coarsen")
        return LocallyConstantFunction.from_callable(self.prime, level, radius, self, self.arity)


def indicator(prime: int, level: int, radius: int,
              predicate: Callable[[Fraction], bool]) -> LocallyConstantFunction:
    return LocallyConstantFunction.from_callable(
        prime, level, radius, lambda r: 1 if predicate(r) else 0)


def haar_integral(f: LocallyConstantFunction) -> Fraction:
    """Exact integral against Haar measure with measure(Z_p) = 1."""
    if len(f.values) != f.cells_per_axis**f.arity:
        raise MalformedFunction("value table does not match level/radius")
    return sum(f.values, Fraction(0)) * f.cell_measure


def _padic_from_digits(prime: int, digits: Sequence[int]) -> PAdicNumber:
    nonzero = [i for i, d in enumerate(digits) if d]
    if not nonzero:
        return PAdicNumber.zero(prime, len(digits))
    v = nonzero[0]
    return PAdicNumber.from_digits(prime, v, [int(d) for d in digits[v:]])


def haar_sample(prime: int, precision: int, seed) -> PAdicNumber:
    """One Haar-random element of Z_p with ``precision`` absolute digits."""
    rng = np.random.default_rng(seed)
    return _padic_from_digits(prime, rng.integers(0, prime, size=precision).tolist())


def haar_digit_samples(prime: int, precision: int, n: int, seed, shards: int = 1) -> np.ndarray:
    """An ``(n, precision)`` array of i.i.d. uniform base-p digits.

    Shard ``i`` draws from the i-th child of ``SeedSequence(seed)``, so the
    output depends only on ``(seed, shards)``.
    """
    children = seed_sequence(seed).spawn(shards)
    sizes = [n // shards + (1 if i < n % shards else 0) for i in range(shards)]
    blocks = [np.random.default_rng(ss).integers(0, prime, size=(k, precision))
              for ss, k in zip(children, sizes)]
    return np.concatenate(blocks, axis=0) if blocks else np.zeros((0, precision), dtype=np.int64)


def haar_samples(prime: int, precision: int, n: int, seed, shards: int = 1) -> list[PAdicNumber]:
    digits = haar_digit_samples(prime, precision, n, seed, shards)
    return [_padic_from_digits(prime, row.tolist()) for row in digits]
