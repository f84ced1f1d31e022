"""Exact rational linear algebra on sparse vectors.

Vectors are ``dict[int, Fraction]`` with no zero entries.  ``EchelonBasis``
keeps a reduced row echelon basis under incremental insertion, which is what
every span, rank and membership question in this package reduces to.
"""
from __future__ import annotations

from collections import defaultdict
from fractions import Fraction
from typing import Iterable, Mapping

SparseVector = dict


def clean(vec: Mapping[int, Fraction]) -> SparseVector:
    return {k: Fraction(v) for k, v in vec.items() if v}


class EchelonBasis:
    """Reduced row echelon basis of a growing subspace of Q^dim.

    Each stored row has a pivot coefficient of 1, and no other row has a
    nonzero entry in a pivot column.
    """

    def __init__(self, dim: int):
        self.dim = dim
        self.rows: dict[int, SparseVector] = {}
        self._col_rows: dict[int, set[int]] = defaultdict(set)

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def rank(self) -> int:
        return len(self.rows)

    @property
    def full(self) -> bool:
        return len(self.rows) == self.dim

    def reduce(self, vec: Mapping[int, Fraction]) -> SparseVector:
        """Residue of ``vec`` modulo the span (zero dict iff a member)."""
        out = dict(vec)
        for c in [c for c in out if c in self.rows]:
            coef = out.get(c)
            if not coef:
                continue
            for k, v in self.rows[c].items():
                nv = out.get(k, 0) - coef * v
                if nv:
                    out[k] = nv
                else:
                    out.pop(k, None)
        return out

    def __contains__(self, vec: Mapping[int, Fraction]) -> bool:
        return not self.reduce(vec)

    def add(self, vec: Mapping[int, Fraction]) -> bool:
        """Insert ``vec``; True iff it enlarged the span."""
        r = self.reduce(vec)
        if not r:
            return False
        pivot = min(r)
        inv = 1 / Fraction(r[pivot])
        row = {k: v * inv for k, v in r.items()}
        # clear the new pivot column from existing rows
        for p in list(self._col_rows.get(pivot, ())):
            other = self.rows[p]
            coef = other[pivot]
            for k, v in row.items():
                nv = other.get(k, 0) - coef * v
                if nv:
                    if k not in other:
                        self._col_rows[k].add(p)
                    other[k] = nv
                else:
                    other.pop(k, None)
                    self._col_rows[k].discard(p)
        self.rows[pivot] = row
        for k in row:
            if k != pivot:
                self._col_rows[k].add(pivot)
        self._col_rows.pop(pivot, None)
        return True

    def extend(self, vecs: Iterable[Mapping[int, Fraction]], stop_at_full: bool = True) -> int:
        """Insert many vectors; returns how many enlarged the span."""
        added = 0
        for v in vecs:
            if self.add(v):
                added += 1
                if stop_at_full and self.full:
                    break
        return added

    def basis(self) -> list[SparseVector]:
        return [dict(self.rows[p]) for p in sorted(self.rows)]

    def contains_all(self, vecs: Iterable[Mapping[int, Fraction]]) -> bool:
        return all(v in self for v in vecs)

    def copy(self) -> EchelonBasis:
        out = EchelonBasis(self.dim)
        out.rows = {p: dict(r) for p, r in self.rows.items()}
        out._col_rows = defaultdict(set, {k: set(v) for k, v in self._col_rows.items()})
        return out


def span_of(vecs: Iterable[Mapping[int, Fraction]], dim: int) -> EchelonBasis:
    b = EchelonBasis(dim)
    b.extend(vecs)
    return b


def rank(vecs: Iterable[Mapping[int, Fraction]], dim: int) -> int:
    return span_of(vecs, dim).rank


def same_span(a: EchelonBasis, b: EchelonBasis) -> bool:
    return a.rank == b.rank and a.contains_all(b.basis())


def dense_rank(matrix: list[list[Fraction]]) -> int:
    """Textbook Gaussian elimination on a dense exact matrix."""
    m = [[Fraction(x) for x in row] for row in matrix]
    if not m:
        return 0
    rows, cols = len(m), len(m[0])
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(r + 1, rows):
            f = m[i][c] / m[r][c]
            if f:
                for j in range(c, cols):
                    m[i][j] -= f * m[r][j]
        r += 1
        if r == rows:
            break
    return r
