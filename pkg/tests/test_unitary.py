from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from bicrossed import groups
from bicrossed.matched import builtin_pair, builtin_pair_names
from bicrossed.operators import LegMismatch, Operator, flip_operator
from bicrossed.unitary import (build_W, build_X, build_Yhat, coaction_continuity_check,
                               comultiplication_check, crossed_product_dims, cv_span, delta,
                               find_non_pentagonal, interchange_dims, pair_report,
                               pentagon_check, regularity_report, semiregularity_slice_check,
                               slice_spans)

SMALL = ["S3", "D8", "C2xC3", "trivial"]


def oracle_W(mp, beta=None, alpha=None):
    """W straight from group elements: (s, g, t, h) -> (s, g a_{t'}(h), t', h),
    t' = b_g(s)^-1 t, with the usual index convention (W xi)(x) = xi(perm x)."""
    G = mp.group
    beta = beta or mp.beta
    alpha = alpha or mp.alpha
    n1, n2 = mp.n1, mp.n2
    p1, p2 = mp.pos1, mp.pos2
    n = n1 * n2
    perm = np.empty(n * n, dtype=np.int64)
    for s in mp.g2:
        for g in mp.g1:
            for t in mp.g2:
                for h in mp.g1:
                    t2 = G.mul(G.inv(beta(g, s)), t)
                    g2 = G.mul(g, alpha(t2, h))
                    src = (p2[s] * n1 + p1[g]) * n + p2[t] * n1 + p1[h]
                    perm[src] = (p2[s] * n1 + p1[g2]) * n + p2[t2] * n1 + p1[h]
    return Operator((n, n), perm=perm)


@pytest.mark.parametrize("name", builtin_pair_names())
def test_W_matches_oracle(name):
    mp = builtin_pair(name)
    assert build_W(mp) == oracle_W(mp)


@pytest.mark.parametrize("name", builtin_pair_names())
def test_pentagon_builtin(name):
    assert pentagon_check(build_W(builtin_pair(name)))


def test_pentagon_accepts_four_legs():
    mp = builtin_pair("S3")
    W = build_W(mp)
    assert pentagon_check(W.regroup((mp.n2, mp.n1, mp.n2, mp.n1)))
    with pytest.raises(LegMismatch):
        pentagon_check(Operator.identity((2, 3)))


@pytest.mark.parametrize("G", [groups.symmetric_group(3), groups.dihedral_group(4),
                               groups.cyclic_group(5)])
def test_group_unitaries_pentagonal(G):
    assert pentagon_check(build_X(G))
    assert pentagon_check(build_Yhat(G))


def test_wrong_beta_breaks_pentagon():
    # in S4 = S3 C4 the subgroup S3 is not normal, so beta is not trivial
    mp = builtin_pair("S4")
    assert any(mp.beta(g, s) != s for g in mp.g1 for s in mp.g2)
    bad = oracle_W(mp, beta=lambda g, s: s)
    assert bad.is_permutation and not pentagon_check(bad)


def test_trivial_beta_is_correct_for_normal_g1():
    # C3 is normal in S3, so s g = (s g s^-1) s and beta is the trivial action
    mp = builtin_pair("S3")
    assert all(mp.beta(g, s) == s for g in mp.g1 for s in mp.g2)
    assert oracle_W(mp, beta=lambda g, s: s) == build_W(mp)


def test_find_non_pentagonal():
    W = find_non_pentagonal(2, seed=0)
    assert not pentagon_check(W)
    assert pentagon_check(Operator.identity((2, 2)))
    assert pentagon_check(flip_operator(1))


# regularity and dimensions

@pytest.mark.parametrize("name", SMALL + ["C7:C3"])
def test_regularity(name):
    mp = builtin_pair(name)
    n = mp.n1 * mp.n2
    rep = regularity_report(mp)
    assert rep["dim_S"] == rep["dim_Shat"] == n
    assert rep["dim_C"] == rep["dim_CC"] == rep["dim_SShat"] == rep["dim_K"] == n * n
    assert rep["verdict"] == "regular"


@pytest.mark.parametrize("name", SMALL)
def test_S_is_an_algebra(name):
    mp = builtin_pair(name)
    S, Shat = slice_spans(build_W(mp))
    for A in (S, Shat):
        assert A.adjoint_closed()
        assert A.product_span().dim == A.dim


def test_cv_of_identity_and_flip():
    # C(V) slices Sigma V: for V = 1 that is Sigma, whose slices are all matrix units
    assert cv_span(Operator.identity((3, 3))).dim == 9
    # for V = Sigma it is the identity, whose slices only give scalars
    assert cv_span(flip_operator(3)).dim == 1


@pytest.mark.parametrize("name", SMALL)
def test_crossed_product_dims(name):
    res = crossed_product_dims(builtin_pair(name))
    assert res["ok"], res


def test_interchange():
    res = interchange_dims(builtin_pair("C7:C3"))
    assert res["ok"] and res["pair"] == (21, 21)


# comultiplication

@pytest.mark.parametrize("name", SMALL)
def test_comultiplication(name):
    rep = comultiplication_check(builtin_pair(name))
    assert rep.ok, rep.failures
    assert rep.to_json()["ok"]


def test_delta_is_multiplicative():
    mp = builtin_pair("S3")
    W = build_W(mp)
    S, _ = slice_spans(W)
    ops = S.operators()
    for x in ops[:3]:
        for y in ops[:3]:
            assert delta(W, x @ y) == delta(W, x) @ delta(W, y)


def test_comultiplication_detects_wrong_unitary():
    mp = builtin_pair("S4")
    rep = comultiplication_check(mp, W=oracle_W(mp, beta=lambda g, s: s), tensor_membership=False)
    assert not rep.ok and not rep.coassociative


# semi-regularity slices and the coaction

@pytest.mark.parametrize("name", ["S3", "D8"])
def test_semiregularity_slices(name):
    res = semiregularity_slice_check(builtin_pair(name))
    assert res["equal"] and res["contained_in_S"] and res["meets_S"]


def test_coaction_regular_rep_variant():
    res = coaction_continuity_check(builtin_pair("S3"))
    assert res["weak"] and res["strong"] and res["coaction"]
    assert res["T_adjoint_closed"] and res["T_product_closed"]
    assert res["dim_T"] == res["dim_B"] == 49
    assert res["dim_strong_S"] == res["dim_S_tensor_B"] == 6 * 49


def test_coaction_literal_variant_coacts_by_shat():
    res = coaction_continuity_check(builtin_pair("S3"), variant="literal")
    assert res["weak"]
    assert res["strong_Shat"] and not res["strong_S"]
    assert res["dim_strong_S"] == res["dim_S_tensor_B"]  # equal dimensions, different subspaces
    with pytest.raises(ValueError):
        coaction_continuity_check(builtin_pair("S3"), variant="other")


def test_pair_report_dump():
    rep = pair_report(builtin_pair("C2xC3"), dump=True)
    assert rep["pentagon"] and rep["verdict"] == "regular"
    assert rep["dims"] == {"S": 6, "Shat": 6, "C": 36, "SShat": 36, "K": 36}
    assert len(rep["W"]) == 36  # one unit entry per row of the permutation
    assert {Fraction(q[2], q[3]) for q in rep["W"]} == {1}
