from __future__ import annotations

from fractions import Fraction
from math import prod

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from bicrossed.linalg import EchelonBasis, dense_rank, rank, same_span, span_of
from bicrossed.operators import (LegMismatch, Operator, OperatorSpan, flip_operator,
                                 left_slices, right_slices, slice_left, slice_right, swap_legs)


def to_np(op: Operator) -> np.ndarray:
    return np.array([[int(x) for x in row] for row in op.to_dense()], dtype=np.int64)


def random_int_matrix(rng, n, density=0.4):
    m = rng.integers(-3, 4, size=(n, n))
    m[rng.random((n, n)) > density] = 0
    return m


def random_op(rng, dims, perm=False):
    n = prod(dims)
    if perm:
        return Operator.from_perm(rng.permutation(n), dims)
    return Operator.from_dense(dims, random_int_matrix(rng, n).tolist())


def dense_place(M: np.ndarray, op_dims, legs, dims) -> np.ndarray:
    """Oracle: kron with identity on the other legs, then permute tensor axes."""
    others = [k for k in range(len(dims)) if k not in legs]
    rest = prod(dims[k] for k in others)
    big = np.kron(M, np.eye(rest, dtype=np.int64))
    order = list(legs) + others  # axis order of the kron product
    shape = [dims[k] for k in order]
    T = big.reshape(shape + shape)
    inv = np.argsort(order)
    k = len(dims)
    T = T.transpose(list(inv) + [k + i for i in inv])
    return T.reshape(prod(dims), prod(dims))


# linear algebra

@settings(max_examples=60)
@given(seed=st.integers(0, 2**32 - 1), rows=st.integers(1, 8), cols=st.integers(1, 8))
def test_rank_matches_sympy(seed, rows, cols):
    rng = np.random.default_rng(seed)
    M = rng.integers(-2, 3, size=(rows, cols))
    M[rng.random((rows, cols)) > 0.5] = 0
    expected = sympy.Matrix(M.tolist()).rank()
    vecs = [{j: Fraction(int(v)) for j, v in enumerate(r) if v} for r in M]
    assert rank(vecs, cols) == expected
    assert dense_rank(M.tolist()) == expected


def test_echelon_membership_and_reduction():
    b = EchelonBasis(3)
    assert b.add({0: Fraction(1), 1: Fraction(1)})
    assert b.add({1: Fraction(1), 2: Fraction(1)})
    assert not b.add({0: Fraction(2), 2: Fraction(-2)})  # 2(e0+e1) - 2(e1+e2)
    assert {0: Fraction(1), 2: Fraction(-1)} in b
    assert {0: Fraction(1)} not in b
    assert b.rank == 2 and not b.full
    assert b.reduce({0: Fraction(1)}) != {}


def test_echelon_rows_are_reduced():
    rng = np.random.default_rng(3)
    M = rng.integers(-3, 4, size=(12, 10))
    b = span_of(({j: Fraction(int(v)) for j, v in enumerate(r) if v} for r in M), 10)
    for p, row in b.rows.items():
        assert row[p] == 1
        for q in b.rows:
            assert q == p or q not in row


def test_same_span_and_copy():
    a = span_of([{0: Fraction(1)}, {1: Fraction(1)}], 3)
    b = span_of([{0: Fraction(1), 1: Fraction(1)}, {0: Fraction(1), 1: Fraction(-1)}], 3)
    assert same_span(a, b)
    c = a.copy()
    c.add({2: Fraction(1)})
    assert c.full and a.rank == 2


# operators against dense numpy arithmetic

@settings(max_examples=40)
@given(seed=st.integers(0, 2**32 - 1), pa=st.booleans(), pb=st.booleans())
def test_matmul_adjoint_add(seed, pa, pb):
    rng = np.random.default_rng(seed)
    dims = (2, 3)
    A, B = random_op(rng, dims, pa), random_op(rng, dims, pb)
    assert (to_np(A @ B) == to_np(A) @ to_np(B)).all()
    assert (to_np(A.adjoint()) == to_np(A).T).all()
    assert (to_np(A + B) == to_np(A) + to_np(B)).all()
    assert (to_np(A - B) == to_np(A) - to_np(B)).all()
    assert (to_np(A.scale(3)) == 3 * to_np(A)).all()


def test_perm_convention():
    P = Operator.from_perm([1, 2, 0], (3,))
    assert P.entry(0, 1) == 1 and P.entry(0, 0) == 0
    Q = Operator.from_perm([2, 0, 1], (3,))
    assert (P @ Q).is_permutation and (P @ Q) == Operator.identity((3,))
    with pytest.raises(ValueError):
        Operator.from_perm([0, 0, 1], (3,))


@settings(max_examples=40)
@given(seed=st.integers(0, 2**32 - 1), perm=st.booleans())
def test_tensor_is_kron(seed, perm):
    rng = np.random.default_rng(seed)
    A, B = random_op(rng, (2,), perm), random_op(rng, (3,), perm)
    assert (to_np(A.tensor(B)) == np.kron(to_np(A), to_np(B))).all()


PLACEMENTS = [((0,), (2, 3, 2)), ((2,), (2, 3, 2)), ((1,), (2, 3, 2)),
              ((0, 2), (2, 3, 2)), ((2, 0), (2, 3, 2)), ((1, 0), (3, 2, 2)), ((1, 3), (2, 2, 3, 2))]


@pytest.mark.parametrize("legs,dims", PLACEMENTS)
@pytest.mark.parametrize("perm", [False, True])
def test_place_matches_oracle(legs, dims, perm):
    rng = np.random.default_rng(hash((legs, dims, perm)) % 2**32)
    op_dims = tuple(dims[k] for k in legs)
    op = random_op(rng, op_dims, perm)
    placed = op.place(legs, dims)
    assert (to_np(placed) == dense_place(to_np(op), op_dims, legs, dims)).all()
    assert placed.is_permutation == perm or not perm


def test_perm_and_general_place_agree():
    rng = np.random.default_rng(0)
    P = random_op(rng, (3, 2), perm=True)
    G = Operator((3, 2), P.rows)  # same matrix stored sparsely
    for legs, dims in [((0, 1), (3, 2, 2)), ((2, 0), (2, 2, 3)), ((1, 2), (2, 3, 2))]:
        if tuple(dims[k] for k in legs) != (3, 2):
            continue
        assert P.place(legs, dims) == G.place(legs, dims)


def test_place_leg_mismatch():
    op = Operator.identity((2, 3))
    with pytest.raises(LegMismatch):
        op.place((0, 1), (3, 2))
    with pytest.raises(LegMismatch):
        op.place((0, 0), (2, 3))
    with pytest.raises(LegMismatch):
        op @ Operator.identity((6,))


def test_flip_and_swap():
    S = flip_operator(3)
    e = lambda x, y: x * 3 + y  # noqa: E731
    assert S.entry(e(0, 1), e(1, 0)) == 1
    assert S @ S == Operator.identity((3, 3))
    W = random_op(np.random.default_rng(1), (3, 3), perm=True)
    assert swap_legs(W) == S @ W
    with pytest.raises(LegMismatch):
        swap_legs(Operator.identity((2, 3)))


def test_regroup_and_vector_round_trip():
    op = random_op(np.random.default_rng(2), (2, 3))
    assert op.regroup((6,)).to_dense() == op.to_dense()
    assert Operator.from_vector((2, 3), op.vector()) == op
    with pytest.raises(LegMismatch):
        op.regroup((5,))


# slices

@pytest.mark.parametrize("perm", [False, True])
def test_slices_against_dense(perm):
    rng = np.random.default_rng(5)
    a, b = 2, 3
    op = random_op(rng, (a, b), perm)
    T = to_np(op).reshape(a, b, a, b)
    for i in range(a):
        for j in range(a):
            assert (to_np(slice_left(op, i, j)) == T[i, :, j, :]).all()
    for i in range(b):
        for j in range(b):
            assert (to_np(slice_right(op, i, j)) == T[:, i, :, j]).all()
    assert len(list(left_slices(op))) == a * a and len(list(right_slices(op))) == b * b


def test_operator_span():
    units = [Operator.matrix_unit((2,), i, j) for i in range(2) for j in range(2)]
    full = OperatorSpan((2,), units)
    assert full.full and full.dim == 4 and full.adjoint_closed()
    diag = OperatorSpan((2,), [Operator.identity((2,)), Operator.diagonal((2,), [1, -1])])
    assert diag.dim == 2 and diag.adjoint_closed() and full.contains_span(diag)
    upper = OperatorSpan((2,), [units[1]])
    assert not upper.adjoint_closed()
    assert upper.product_span().dim == 0  # e01 e01 = 0
    assert diag.product_span(full).full
    assert OperatorSpan((2,), units[:2]) != OperatorSpan((2,), units[2:])
