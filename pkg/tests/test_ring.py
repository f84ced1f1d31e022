from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from bicrossed import ring as R
from bicrossed.padic import PAdicNumber, PrecisionExhausted


@pytest.fixture
def f2():
    return R.RestrictedAdeles(R.PrimePool.all_primes_degree2())


@pytest.fixture
def finite():
    return R.RestrictedAdeles(R.PrimePool.explicit([2, 3, 5]))


# pools

def test_pool_validation():
    with pytest.raises(ValueError):
        R.PrimePool.explicit([2, 4])
    with pytest.raises(ValueError):
        R.PrimePool.explicit([5, 3])
    with pytest.raises(ValueError):
        R.PrimePool("AllPrimesResidueDegree1")
    with pytest.raises(ValueError):
        R.PrimePool.sparse([2, 3, 5], Fraction(1, 2))  # 1/2 + 1/3 exceeds the bound
    pool = R.PrimePool.sparse([2, 3, 5], 2)
    assert not pool.is_finite and pool.first(2) == (2, 3)


def test_pool_json_round_trip():
    for pool in (R.PrimePool.explicit([2, 3, 7], {2: 2, 3: 1, 7: 1}),
                 R.PrimePool.all_primes_degree2(), R.PrimePool.sparse([2, 11], 1)):
        assert R.PrimePool.from_json(pool.to_json()) == pool


def test_first_primes_match_sympy():
    assert R.first_primes(25) == tuple(sympy.prime(k) for k in range(1, 26))
    assert R.PrimePool.all_primes_degree2().first(25)[-1] == 97


# adele arithmetic

def test_unit_and_nonunit(f2):
    u = R.Adele.make(f2.pool, {5: 5, 7: Fraction(1, 7)})
    assert u.is_unit()  # valuation is no obstruction; only zero components are
    z = R.Adele.make(f2.pool, {5: 0})
    assert not z.is_unit()
    with pytest.raises(R.NotInvertible):
        f2.inverse(z)
    inv = f2.inverse(u)
    assert f2.mul(u, inv) == f2.one()


def test_integral_tail_is_uncertain(f2):
    x = R.Adele.make(f2.pool, {3: 2}, tail="integral")
    with pytest.raises(R.TailUncertain):
        x.is_unit()
    with pytest.raises(R.TailUncertain):
        x.component(11)


def test_infinite_pool_constants(f2):
    assert f2.element(1) == R.Adele(f2.pool, (), "unit")
    with pytest.raises(R.TailUncertain):
        f2.element(2)


def test_finite_pool_arithmetic(finite):
    x, y = finite.element(Fraction(3, 2)), finite.element(10)
    s = finite.add(x, y)
    for p in (2, 3, 5):
        assert s.component(p) == Fraction(23, 2)
    assert finite.is_unit(finite.mul(x, y))
    # 10 - 10 cancels every tracked digit at every prime
    with pytest.raises(PrecisionExhausted):
        finite.sub(y, y)


def test_descriptor_mismatch(f2, finite):
    with pytest.raises(R.DescriptorMismatch):
        f2.add(f2.one(), finite.one())
    with pytest.raises(R.DescriptorMismatch):
        R.FiniteModRing(6).add(3, 7)


def test_adele_json_round_trip(f2):
    u = R.Adele.make(f2.pool, {2: Fraction(3, 4), 13: 26})
    assert R.Adele.from_json(f2.pool, u.to_json()) == u


# topology verdicts and witnesses

def test_units_open_verdicts(f2, finite):
    assert R.units_open_verdict(finite) == "open"
    assert R.units_open_verdict(f2) == "not_open"
    assert R.units_open_verdict(R.PAdicField(5)) == "open"
    assert R.units_open_verdict(R.BqRing(f2, f2.one())) == "not_open"


def test_interior_witness(f2):
    u = R.Adele.make(f2.pool, {2: Fraction(1, 4), 3: 5})
    w = R.interior_witness(f2, u, [2, 3, 5])
    assert not w.is_unit()
    assert R.in_basic_neighbourhood(u, w, [2, 3, 5])
    assert w.component(7).is_zero  # first unconstrained prime


def test_interior_witness_finite_pool(finite):
    with pytest.raises(R.NoFreePrime):
        R.interior_witness(finite, finite.one(), [2])


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), k=st.integers(0, 10))
def test_witness_in_every_neighbourhood(seed, k):
    f2 = R.RestrictedAdeles(R.PrimePool.all_primes_degree2())
    rng = np.random.default_rng(seed)
    u = R.random_unit_adele(f2, rng)
    cons = {p for p, v in u.exceptions if not v.is_integral()}
    cons |= set(int(p) for p in rng.choice(R.first_primes(30), size=k, replace=False))
    w = R.interior_witness(f2, u, cons)
    assert not w.is_unit() and R.in_basic_neighbourhood(u, w, cons)


# measure

def test_local_nonunit_measure():
    for p in (2, 3, 5, 7, 11):
        assert R.local_nonunit_measure(p, 1) == Fraction(1, p)
        assert R.local_nonunit_measure(p, 2) == Fraction(1, p * p)


def test_closed_form_against_independent_product():
    pool = R.PrimePool.all_primes_degree2()
    expected = Fraction(1)
    for p in sympy.primerange(2, 98):
        expected *= Fraction(p * p - 1, p * p)
    assert R.unit_density_closed_form(pool, 25) == expected
    # the infinite product is 1/zeta(2)
    assert abs(float(R.unit_density_closed_form(pool, 2000)) - 6 / math.pi**2) < 1e-4


def test_density_estimate_is_seeded(f2):
    a = R.unit_density_estimate(f2, 10, 5000, seed=1, shards=3)
    b = R.unit_density_estimate(f2, 10, 5000, seed=1, shards=3)
    assert a == b and a.within(4)


def test_density_degree_one_finite_pool():
    desc = R.RestrictedAdeles(R.PrimePool.explicit([2, 3]))
    est = R.unit_density_estimate(desc, 2, 20000, seed=5)
    assert est.closed_form == Fraction(1, 3)
    assert est.within(4)


# B_q

def _pi_q_oracle(n, q, m):
    a, b, c, d = m
    return (np.array([[a, b], [q * c, d]]) % n, np.array([[a, q * b], [c, d]]) % n)


@settings(max_examples=100)
@given(q=st.integers(0, 35), m=st.tuples(*[st.integers(0, 35)] * 4),
       m2=st.tuples(*[st.integers(0, 35)] * 4))
def test_pi_q_multiplicative(q, m, m2):
    base = R.FiniteModRing(36)
    prod = R.bq_mul(base, q, R.BqElement(*m), R.BqElement(*m2))
    lhs = _pi_q_oracle(36, q, prod.entries())
    A, B = _pi_q_oracle(36, q, m), _pi_q_oracle(36, q, m2)
    for k in range(2):
        assert ((lhs[k] - A[k] @ B[k]) % 36 == 0).all()


def test_pi_q_bijection_only_for_units():
    z7 = R.FiniteModRing(7)
    assert [R.pi_q_component_bijective(z7, q) for q in range(7)] == [False] + [True] * 6
    assert R.pi_q_component_bijective(R.FiniteModRing(6), 5, component=1)
    assert not R.pi_q_component_bijective(R.FiniteModRing(6), 2, component=1)


def test_bq_units():
    bq = R.BqRing(R.FiniteModRing(7), 3)
    assert bq.is_unit(bq.one())
    assert not bq.is_unit(R.BqElement(1, 1, 5, 1))  # det of first component 1 - 15 = 0 mod 7


# descriptors

def test_resolve_ring_names_and_json():
    assert R.resolve_ring("Z/36") == R.FiniteModRing(36)
    assert R.resolve_ring("Q5") == R.PAdicField(5)
    desc = R.resolve_ring('{"kind": "BqRing", "base": {"kind": "FiniteModRing", "n": 36}, "q": 6}')
    assert isinstance(desc, R.BqRing) and desc.q == 6
    assert R.ring_from_json(desc.to_json()) == desc
    with pytest.raises(ValueError):
        R.ring_from_json({"kind": "Nope"})


def test_ring_arith_dispatch():
    q5 = R.PAdicField(5)
    x, y = q5.element(3), q5.element(Fraction(1, 5))
    assert R.ring_arith(q5, "div", x, y) == 15
    assert R.ring_arith(q5, "inv", y) == 5
    assert isinstance(R.ring_arith(q5, "neg", x), PAdicNumber)
    with pytest.raises(ValueError):
        R.ring_arith(q5, "pow", x, y)
