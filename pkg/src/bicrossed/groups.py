"""Finite groups given by multiplication tables, with standard generators."""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Sequence

import numpy as np


class GroupLawError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """Group law on ``range(order)`` given as an ``order x order`` table.

    The table is validated on construction (closure, associativity, identity,
    inverses) and is read-only afterwards.
    """

    table: np.ndarray
    labels: tuple[str, ...]
    identity: int = 0

    def __post_init__(self):
        t = np.asarray(self.table, dtype=np.int64)
        n = t.shape[0]
        if t.shape != (n, n) or n == 0:
            raise GroupLawError(f"table must be square and nonempty, got {t.shape}")
        if len(self.labels) != n:
            raise GroupLawError("need one label per element")
        if t.min() < 0 or t.max() >= n:
            raise GroupLawError("table entries out of range")
        e = self.identity
        idx = np.arange(n)
        if not (np.array_equal(t[e], idx) and np.array_equal(t[:, e], idx)):
            raise GroupLawError(f"element {e} is not a two-sided identity")
        if not np.array_equal(t[t[:, :, None], idx[None, None, :]], t[idx[:, None, None], t[None, :, :]]):
            raise GroupLawError("table is not associative")
        inv = np.argmax(t == e, axis=1)
        if not np.all(t[idx, inv] == e):
            raise GroupLawError("some element has no inverse")
        t.setflags(write=False)
        inv.setflags(write=False)
        object.__setattr__(self, "table", t)
        object.__setattr__(self, "_inverse", inv)

    @property
    def order(self) -> int:
        return self.table.shape[0]

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inv(self, a: int) -> int:
        return int(self._inverse[a])

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"no element labelled {label!r}") from None

    def generated(self, gens: Iterable[int]) -> tuple[int, ...]:
        """Subgroup generated by ``gens``, as sorted element indices."""
        seen = {self.identity}
        frontier = [self.identity]
        gens = list(gens)
        while frontier:
            x = frontier.pop()
            for g in gens:
                y = self.mul(x, g)
                if y not in seen:
                    seen.add(y)
                    frontier.append(y)
        return tuple(sorted(seen))

    def is_subgroup(self, elems: Iterable[int]) -> bool:
        s = set(elems)
        if self.identity not in s:
            return False
        return all(self.mul(a, b) in s for a in s for b in s)

    @classmethod
    def from_elements(cls, elements: Sequence[Hashable], op: Callable, label=str) -> FiniteGroup:
        """Tabulate ``op`` on ``elements``; the identity must come first."""
        pos = {x: i for i, x in enumerate(elements)}
        n = len(elements)
        table = np.empty((n, n), dtype=np.int64)
        for i, a in enumerate(elements):
            for j, b in enumerate(elements):
                c = op(a, b)
                if c not in pos:
                    raise GroupLawError(f"{a} * {b} = {c} leaves the element set")
                table[i, j] = pos[c]
        return cls(table, tuple(label(x) for x in elements), 0)

    def to_json(self) -> dict:
        return {"order": self.order, "table": self.table.tolist(), "labels": list(self.labels)}

    @classmethod
    def from_json(cls, data) -> FiniteGroup:
        if isinstance(data, str):
            data = json.loads(data)
        n = int(data["order"])
        table = np.asarray(data["table"], dtype=np.int64)
        labels = tuple(data.get("labels") or (str(i) for i in range(n)))
        if table.shape != (n, n):
            raise GroupLawError(f"order {n} does not match table shape {table.shape}")
        ident = [i for i in range(n) if np.array_equal(table[i], np.arange(n))]
        if not ident:
            raise GroupLawError("table has no identity row")
        return cls(table, labels, ident[0])


def cycle_label(perm: tuple[int, ...]) -> str:
    """Cycle notation on 1..n, e.g. ``(1 2)(3 4)``; ``e`` for the identity."""
    seen = set()
    cycles = []
    for start in range(len(perm)):
        if start in seen or perm[start] == start:
            continue
        cyc = [start]
        seen.add(start)
        j = perm[start]
        while j != start:
            cyc.append(j)
            seen.add(j)
            j = perm[j]
        cycles.append("(" + " ".join(str(k + 1) for k in cyc) + ")")
    return "".join(cycles) or "e"


def symmetric_group(n: int) -> FiniteGroup:
    """S_n acting on 1..n with (xy)(i) = x(y(i))."""
    ident = tuple(range(n))
    perms = [ident] + [p for p in itertools.permutations(range(n)) if p != ident]
    return FiniteGroup.from_elements(
        perms, lambda a, b: tuple(a[b[i]] for i in range(n)), cycle_label)


def cyclic_group(n: int) -> FiniteGroup:
    return FiniteGroup.from_elements(list(range(n)), lambda a, b: (a + b) % n,
                                     lambda k: "e" if k == 0 else f"r^{k}")


def dihedral_group(n: int) -> FiniteGroup:
    """Symmetries of the n-gon, order 2n; elements r^k s^f."""
    elems = [(k, f) for f in (0, 1) for k in range(n)]

    def op(a, b):
        k1, f1 = a
        k2, f2 = b
        return ((k1 + (-k2 if f1 else k2)) % n, f1 ^ f2)

    def label(x):
        k, f = x
        return ("" if k == 0 and f else ("e" if k == 0 else f"r^{k}")) + ("s" if f else "")

    return FiniteGroup.from_elements(elems, op, label)


def semidirect_cyclic(p: int, q: int, r: int | None = None) -> FiniteGroup:
    """C_p x| C_q with the generator of C_q acting by x -> r x.

    ``r`` must have multiplicative order dividing q modulo p; by default the
    smallest element of order exactly q is used.
    """
    if r is None:
        cands = [x for x in range(2, p) if pow(x, q, p) == 1]
        if not cands:
            raise ValueError(f"no element of order {q} modulo {p}")
        r = cands[0]
    if pow(r, q, p) != 1:
        raise ValueError(f"{r}^{q} is not 1 modulo {p}")
    elems = [(a, b) for b in range(q) for a in range(p)]

    def op(x, y):
        a1, b1 = x
        a2, b2 = y
        return ((a1 + pow(r, b1, p) * a2) % p, (b1 + b2) % q)

    def label(x):
        a, b = x
        parts = ([f"a^{a}"] if a else []) + ([f"b^{b}"] if b else [])
        return "".join(parts) or "e"

    return FiniteGroup.from_elements(elems, op, label)


def direct_product(g: FiniteGroup, h: FiniteGroup) -> FiniteGroup:
    elems = [(a, b) for a in range(g.order) for b in range(h.order)]
    elems.sort(key=lambda x: (x != (g.identity, h.identity)))
    return FiniteGroup.from_elements(
        elems, lambda x, y: (g.mul(x[0], y[0]), h.mul(x[1], y[1])),
        lambda x: f"({g.labels[x[0]]},{h.labels[x[1]]})")


def trivial_group() -> FiniteGroup:
    return FiniteGroup(np.zeros((1, 1), dtype=np.int64), ("e",), 0)
