"""Exact operators on tensor products of finite-dimensional coordinate spaces.

An ``Operator`` carries its leg dimensions and either a sparse table of
rational entries or, for 0/1 permutation matrices, an index array.  The
permutation convention is ``(A xi)(x) = xi(perm[x])``, so ``A[x, perm[x]] = 1``
and the product ``A @ B`` has permutation ``perm_B[perm_A]``.

Basis indices of a tensor product are row-major in the legs.
"""
from __future__ import annotations

from fractions import Fraction
from math import prod
from typing import Iterable, Mapping, Sequence

import numpy as np

from .linalg import EchelonBasis


class LegMismatch(ValueError):
    pass


class Operator:
    __slots__ = ("dims", "_rows", "_perm")

    def __init__(self, dims: Sequence[int], rows: Mapping[int, Mapping[int, Fraction]] | None = None,
                 perm: np.ndarray | None = None):
        self.dims = tuple(int(d) for d in dims)
        if perm is not None:
            perm = np.array(perm, dtype=np.int64)
            if perm.shape != (self.size,):
                raise LegMismatch(f"permutation of length {perm.shape} on legs {self.dims}")
            perm.setflags(write=False)
            self._perm = perm
            self._rows = None
        else:
            self._perm = None
            self._rows = {r: {c: Fraction(v) for c, v in row.items() if v}
                          for r, row in (rows or {}).items()}
            self._rows = {r: row for r, row in self._rows.items() if row}

    # construction

    @classmethod
    def from_perm(cls, perm, dims: Sequence[int]) -> Operator:
        perm = np.asarray(perm, dtype=np.int64)
        if not np.array_equal(np.sort(perm), np.arange(len(perm))):
            raise ValueError("index map is not a bijection")
        return cls(dims, perm=perm)

    @classmethod
    def identity(cls, dims: Sequence[int]) -> Operator:
        return cls(dims, perm=np.arange(prod(dims)))

    @classmethod
    def matrix_unit(cls, dims: Sequence[int], i: int, j: int) -> Operator:
        return cls(dims, {i: {j: Fraction(1)}})

    @classmethod
    def diagonal(cls, dims: Sequence[int], values: Sequence) -> Operator:
        return cls(dims, {i: {i: v} for i, v in enumerate(values)})

    @classmethod
    def from_dense(cls, dims: Sequence[int], matrix) -> Operator:
        return cls(dims, {i: {j: v for j, v in enumerate(row) if v} for i, row in enumerate(matrix)})

    @classmethod
    def from_vector(cls, dims: Sequence[int], vec: Mapping[int, Fraction]) -> Operator:
        n = prod(dims)
        rows: dict[int, dict[int, Fraction]] = {}
        for k, v in vec.items():
            rows.setdefault(k // n, {})[k % n] = v
        return cls(dims, rows)

    # basic data

    @property
    def size(self) -> int:
        return prod(self.dims)

    @property
    def is_permutation(self) -> bool:
        if self._perm is not None:
            return True
        if len(self._rows) != self.size:
            return False
        cols = set()
        for row in self._rows.values():
            if len(row) != 1:
                return False
            (c, v), = row.items()
            if v != 1:
                return False
            cols.add(c)
        return len(cols) == self.size

    @property
    def perm(self) -> np.ndarray:
        if self._perm is None:
            if not self.is_permutation:
                raise ValueError("operator is not a permutation matrix")
            self._perm = np.array([next(iter(self._rows[r])) for r in range(self.size)], dtype=np.int64)
            self._perm.setflags(write=False)
        return self._perm

    @property
    def rows(self) -> dict[int, dict[int, Fraction]]:
        if self._rows is None:
            one = Fraction(1)
            self._rows = {r: {int(c): one} for r, c in enumerate(self._perm)}
        return self._rows

    def entry(self, i: int, j: int) -> Fraction:
        if self._perm is not None:
            return Fraction(int(self._perm[i] == j))
        return self.rows.get(i, {}).get(j, Fraction(0))

    @property
    def nnz(self) -> int:
        return self.size if self._perm is not None else sum(len(r) for r in self._rows.values())

    def is_zero(self) -> bool:
        return self._perm is None and not self._rows

    def triples(self) -> Iterable[tuple[int, int, Fraction]]:
        for r, row in self.rows.items():
            for c, v in row.items():
                yield r, c, v

    def vector(self) -> dict[int, Fraction]:
        """Row-major flattening as a sparse vector of length size**2."""
        n = self.size
        return {r * n + c: v for r, c, v in self.triples()}

    def to_dense(self) -> list[list[Fraction]]:
        n = self.size
        out = [[Fraction(0)] * n for _ in range(n)]
        for r, c, v in self.triples():
            out[r][c] = v
        return out

    def quadruples(self) -> list[tuple[int, int, int, int]]:
        """Sparse dump as (row, col, numerator, denominator)."""
        return sorted((r, c, v.numerator, v.denominator) for r, c, v in self.triples())

    def regroup(self, dims: Sequence[int]) -> Operator:
        """Same matrix, legs merged or split (row-major indices are unchanged)."""
        if prod(dims) != self.size:
            raise LegMismatch(f"cannot regroup legs {self.dims} as {tuple(dims)}")
        if self._perm is not None:
            return Operator(dims, perm=self._perm)
        return Operator(dims, self._rows)

    # algebra

    def _check_legs(self, other: Operator) -> None:
        if self.dims != other.dims:
            raise LegMismatch(f"legs {self.dims} and {other.dims} differ")

    def __matmul__(self, other: Operator) -> Operator:
        self._check_legs(other)
        if self._perm is not None and other._perm is not None:
            return Operator(self.dims, perm=other._perm[self._perm])
        if other._perm is not None:
            # right multiplication by a permutation relabels columns
            pm = other._perm
            return Operator(self.dims, {r: {int(pm[c]): v for c, v in row.items()}
                                        for r, row in self._rows.items()})
        if self._perm is not None:
            orows = other.rows
            return Operator(self.dims, {r: dict(orows[int(c)]) for r, c in enumerate(self._perm)
                                        if int(c) in orows})
        orows = other.rows
        out = {}
        for r, row in self._rows.items():
            acc: dict[int, Fraction] = {}
            for k, a in row.items():
                for c, b in orows.get(k, {}).items():
                    acc[c] = acc.get(c, 0) + a * b
            acc = {c: v for c, v in acc.items() if v}
            if acc:
                out[r] = acc
        return Operator(self.dims, out)

    def __add__(self, other: Operator) -> Operator:
        self._check_legs(other)
        out = {r: dict(row) for r, row in self.rows.items()}
        for r, c, v in other.triples():
            row = out.setdefault(r, {})
            row[c] = row.get(c, 0) + v
        return Operator(self.dims, out)

    def __sub__(self, other: Operator) -> Operator:
        return self + other.scale(-1)

    def scale(self, k) -> Operator:
        k = Fraction(k)
        return Operator(self.dims, {r: {c: v * k for c, v in row.items()} for r, row in self.rows.items()})

    def adjoint(self) -> Operator:
        """Conjugate transpose (all entries are rational, so a transpose)."""
        if self._perm is not None:
            return Operator(self.dims, perm=np.argsort(self._perm))
        out: dict[int, dict[int, Fraction]] = {}
        for r, c, v in self.triples():
            out.setdefault(c, {})[r] = v
        return Operator(self.dims, out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Operator):
            return NotImplemented
        if self.size != other.size:
            return False
        if self._perm is not None and other._perm is not None:
            return bool(np.array_equal(self._perm, other._perm))
        return self.rows == other.rows

    __hash__ = None

    def tensor(self, other: Operator) -> Operator:
        """Kronecker product with ``self`` on the leading legs."""
        m = other.size
        dims = self.dims + other.dims
        if self._perm is not None and other._perm is not None:
            return Operator(dims, perm=(self._perm[:, None] * m + other._perm[None, :]).ravel())
        out: dict[int, dict[int, Fraction]] = {}
        orows = other.rows
        for r, row in self.rows.items():
            for r2, row2 in orows.items():
                out[r * m + r2] = {c * m + c2: a * b for c, a in row.items() for c2, b in row2.items()}
        return Operator(dims, out)

    def place(self, legs: Sequence[int], dims: Sequence[int]) -> Operator:
        """Leg placement: this operator acting on ``legs`` of a product with ``dims``.

        ``W.place((0, 2), (n, n, n))`` is W13 in subscript notation (legs are
        numbered from zero here).  Legs may be given in any order, so
        ``W.place((1, 0), ...)`` is W21.
        """
        dims = tuple(int(d) for d in dims)
        legs = tuple(legs)
        if len(set(legs)) != len(legs) or any(not 0 <= k < len(dims) for k in legs):
            raise LegMismatch(f"bad leg list {legs} for {len(dims)} legs")
        if tuple(dims[k] for k in legs) != self.dims:
            raise LegMismatch(f"legs {legs} of {dims} do not match operator legs {self.dims}")
        strides = np.array([prod(dims[k + 1:]) for k in range(len(dims))], dtype=np.int64)
        own = np.array([strides[k] for k in legs], dtype=np.int64)
        others = [k for k in range(len(dims)) if k not in legs]
        grid = np.indices([dims[k] for k in others]).reshape(len(others), -1) if others else np.zeros((0, 1), dtype=np.int64)
        offset = (strides[others][:, None] * grid).sum(axis=0) if others else np.zeros(1, dtype=np.int64)

        def spread(idx: np.ndarray) -> np.ndarray:
            parts = np.array(np.unravel_index(idx, self.dims)) if len(self.dims) else np.zeros((0, len(idx)))
            return (own[:, None] * parts).sum(axis=0)

        if self._perm is not None:
            src = spread(np.arange(self.size))
            dst = spread(self._perm)
            perm = np.empty(prod(dims), dtype=np.int64)
            perm[(src[:, None] + offset[None, :]).ravel()] = (dst[:, None] + offset[None, :]).ravel()
            return Operator(dims, perm=perm)
        trip = list(self.triples())
        if not trip:
            return Operator(dims, {})
        rs = spread(np.array([t[0] for t in trip]))
        cs = spread(np.array([t[1] for t in trip]))
        out: dict[int, dict[int, Fraction]] = {}
        for (_, _, v), r, c in zip(trip, rs, cs):
            for off in offset:
                out.setdefault(int(r + off), {})[int(c + off)] = v
        return Operator(dims, out)

    def __repr__(self) -> str:
        kind = "perm" if self._perm is not None else f"nnz={self.nnz}"
        return f"Operator(dims={self.dims}, {kind})"


def flip_operator(n: int) -> Operator:
    """Sigma on C^n (x) C^n, (Sigma xi)(x, y) = xi(y, x)."""
    idx = np.arange(n)
    return Operator((n, n), perm=(idx[None, :] * n + idx[:, None]).ravel())


def swap_legs(op: Operator) -> Operator:
    """Sigma V for an operator on two equal legs."""
    a, b = _two_legs(op)
    if a != b:
        raise LegMismatch("the flip needs two equal legs")
    return flip_operator(a) @ op


def _two_legs(op: Operator) -> tuple[int, int]:
    if len(op.dims) != 2:
        raise LegMismatch(f"expected an operator on two legs, got {op.dims}")
    return op.dims


def slice_left(op: Operator, i: int, j: int) -> Operator:
    """(omega_ij (x) id)(op): entries op[(i, y), (j, y')]."""
    a, b = _two_legs(op)
    out: dict[int, dict[int, Fraction]] = {}
    if op._perm is not None:
        rows = np.arange(i * b, (i + 1) * b)
        cols = op._perm[rows]
        hit = cols // b == j
        return Operator((b,), {int(y): {int(c % b): Fraction(1)} for y, c in zip(np.nonzero(hit)[0], cols[hit])})
    for y in range(b):
        row = op.rows.get(i * b + y)
        if not row:
            continue
        sel = {c - j * b: v for c, v in row.items() if c // b == j}
        if sel:
            out[y] = sel
    return Operator((b,), out)


def slice_right(op: Operator, i: int, j: int) -> Operator:
    """(id (x) omega_ij)(op): entries op[(x, i), (x', j)]."""
    a, b = _two_legs(op)
    if op._perm is not None:
        rows = np.arange(a) * b + i
        cols = op._perm[rows]
        hit = cols % b == j
        return Operator((a,), {int(x): {int(c // b): Fraction(1)} for x, c in zip(np.nonzero(hit)[0], cols[hit])})
    out: dict[int, dict[int, Fraction]] = {}
    for x in range(a):
        row = op.rows.get(x * b + i)
        if not row:
            continue
        sel = {c // b: v for c, v in row.items() if c % b == j}
        if sel:
            out[x] = sel
    return Operator((a,), out)


def left_slices(op: Operator) -> Iterable[Operator]:
    """All matrix-unit slices (omega_ij (x) id)(op), row-major in (i, j)."""
    a, _ = _two_legs(op)
    for i in range(a):
        for j in range(a):
            yield slice_left(op, i, j)


def right_slices(op: Operator) -> Iterable[Operator]:
    _, b = _two_legs(op)
    for i in range(b):
        for j in range(b):
            yield slice_right(op, i, j)


class OperatorSpan:
    """Exact linear span of operators on a fixed space."""

    def __init__(self, dims: Sequence[int], generators: Iterable[Operator] = ()):
        self.dims = tuple(dims)
        self.basis = EchelonBasis(prod(self.dims) ** 2)
        self.generators = 0
        self.extend(generators)

    def extend(self, ops: Iterable[Operator]) -> OperatorSpan:
        for op in ops:
            self.generators += 1
            if not op.is_zero():
                self.basis.add(op.vector())
        return self

    @property
    def dim(self) -> int:
        return self.basis.rank

    @property
    def full(self) -> bool:
        return self.basis.full

    def __contains__(self, op: Operator) -> bool:
        return op.vector() in self.basis

    def operators(self) -> list[Operator]:
        return [Operator.from_vector(self.dims, v) for v in self.basis.basis()]

    def contains_span(self, other: OperatorSpan) -> bool:
        return other.basis.rank <= self.basis.rank and self.basis.contains_all(other.basis.basis())

    def __eq__(self, other) -> bool:
        if not isinstance(other, OperatorSpan):
            return NotImplemented
        return self.dim == other.dim and self.contains_span(other)

    __hash__ = None

    def adjoint_closed(self) -> bool:
        return all(op.adjoint() in self for op in self.operators())

    def product_span(self, other: OperatorSpan | None = None, stop_at: int | None = None) -> OperatorSpan:
        """Span of all products x y with x here and y in ``other`` (default: here)."""
        other = self if other is None else other
        out = OperatorSpan(self.dims)
        right = other.operators()
        for x in self.operators():
            for y in right:
                out.extend([x @ y])
                if out.full or (stop_at is not None and out.dim >= stop_at):
                    return out
        return out
