"""The multiplicative unitary of a finite matched pair, and exact checks on it.

Spaces: H1 = l2(G1), H2 = l2(G2), H = H2 (x) H1 with basis index
``pos2(s) * |G1| + pos1(g)``.  Every unitary built here is a permutation of
basis vectors and is stored as an index array; spans and ranks are exact.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from .groups import FiniteGroup
from .matched import MatchedPair
from .operators import (LegMismatch, Operator, OperatorSpan, flip_operator, left_slices,
                        right_slices, swap_legs)

__all__ = [
    "LegMismatch", "build_X", "build_Yhat", "build_W", "pentagon_check", "slice_spans",
    "cv_span", "regularity_report", "crossed_product_dims", "comultiplication_check",
    "semiregularity_slice_check", "coaction_continuity_check", "interchange_dims",
    "find_non_pentagonal", "pair_report",
]


def _subgroup_table(group: FiniteGroup, elems) -> np.ndarray:
    pos = {x: i for i, x in enumerate(elems)}
    return np.array([[pos[group.mul(a, b)] for b in elems] for a in elems], dtype=np.int64)


def _table_of(G) -> np.ndarray:
    if isinstance(G, FiniteGroup):
        if G.identity != 0:
            raise ValueError("expected the identity at index 0")
        return G.table
    return np.asarray(G, dtype=np.int64)


def _checked(op: Operator) -> Operator:
    if not op.is_permutation:  # pragma: no cover - a construction bug
        raise AssertionError("constructed operator is not a permutation")
    return op


def build_X(G) -> Operator:
    """X on l2(G1) (x) l2(G1): (X xi)(g, h) = xi(gh, h).

    ``G`` is a FiniteGroup (identity at index 0) or its multiplication table.
    """
    t = _table_of(G)
    n = t.shape[0]
    g, h = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    return _checked(Operator((n, n), perm=(t[g, h] * n + h).ravel()))


def build_Yhat(G) -> Operator:
    """Yhat on l2(G2) (x) l2(G2): (Yhat eta)(s, t) = eta(s, s^-1 t)."""
    t = _table_of(G)
    n = t.shape[0]
    inv = np.argmax(t == 0, axis=1)
    s, u = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    return _checked(Operator((n, n), perm=(s * n + t[inv[s], u]).ravel()))


def beta_yhat(mp: MatchedPair) -> Operator:
    """(beta (x) id)(Yhat) on H2 (x) H1 (x) H2: (s, g, t) -> (s, g, beta_g(s)^-1 t)."""
    n1, n2 = mp.n1, mp.n2
    t2 = _subgroup_table(mp.group, mp.g2)
    inv2 = np.argmax(t2 == 0, axis=1)
    bt = mp.beta_table()  # [g, s] -> position of beta_g(s)
    s, g, t = np.meshgrid(np.arange(n2), np.arange(n1), np.arange(n2), indexing="ij")
    t_new = t2[inv2[bt[g, s]], t]
    return _checked(Operator((n2, n1, n2), perm=((s * n1 + g) * n2 + t_new).ravel()))


def alpha_x(mp: MatchedPair) -> Operator:
    """(id (x) alpha)(X) on H1 (x) H2 (x) H1: (g, t, h) -> (g alpha_t(h), t, h)."""
    n1, n2 = mp.n1, mp.n2
    t1 = _subgroup_table(mp.group, mp.g1)
    at = mp.alpha_table()  # [t, h] -> position of alpha_t(h)
    g, t, h = np.meshgrid(np.arange(n1), np.arange(n2), np.arange(n1), indexing="ij")
    g_new = t1[g, at[t, h]]
    return _checked(Operator((n1, n2, n1), perm=((g_new * n2 + t) * n1 + h).ravel()))


def build_W(mp: MatchedPair) -> Operator:
    """W = (beta (x) id)(Yhat)_123 (id (x) alpha)(X)_234 on H (x) H.

    The result has two legs of dimension |G2||G1|; ``regroup`` recovers the
    four legs (s, g, t, h).
    """
    legs4 = (mp.n2, mp.n1, mp.n2, mp.n1)
    W = beta_yhat(mp).place((0, 1, 2), legs4) @ alpha_x(mp).place((1, 2, 3), legs4)
    n = mp.n1 * mp.n2
    return _checked(W.regroup((n, n)))


def _as_square(W: Operator) -> tuple[Operator, int]:
    dims = W.dims
    if len(dims) == 2 and dims[0] == dims[1]:
        return W, dims[0]
    half = len(dims) // 2
    if len(dims) % 2 == 0 and dims[:half] == dims[half:]:
        n = int(np.prod(dims[:half]))
        return W.regroup((n, n)), n
    raise LegMismatch(f"legs {dims} are not of the form H (x) H")


def pentagon_check(W: Operator) -> bool:
    """Exact test of W12 W13 W23 = W23 W12 on H (x) H (x) H."""
    W, n = _as_square(W)
    d3 = (n, n, n)
    w12 = W.place((0, 1), d3)
    w13 = W.place((0, 2), d3)
    w23 = W.place((1, 2), d3)
    return w12 @ w13 @ w23 == w23 @ w12


def find_non_pentagonal(n: int = 2, seed: int = 0, tries: int = 1000) -> Operator:
    """Search random permutations of C^n (x) C^n for one violating the pentagon."""
    rng = np.random.default_rng(seed)
    for _ in range(tries):
        W = Operator((n, n), perm=rng.permutation(n * n))
        if not pentagon_check(W):
            return W
    raise RuntimeError("no counterexample found")  # pragma: no cover


def slice_spans(W: Operator) -> tuple[OperatorSpan, OperatorSpan]:
    """S from the slices (omega (x) id)(W), Shat from (id (x) omega)(W)."""
    W, n = _as_square(W)
    return OperatorSpan((n,), left_slices(W)), OperatorSpan((n,), right_slices(W))


@dataclass
class CvSpan:
    span: OperatorSpan
    product_dim: int

    @property
    def dim(self) -> int:
        return self.span.dim

    @property
    def product_closed(self) -> bool:
        return self.product_dim == self.span.dim


def cv_span(V: Operator) -> CvSpan:
    """C(V) spanned by (id (x) omega)(Sigma V), with the rank of [C(V) C(V)]."""
    V, n = _as_square(V)
    span = OperatorSpan((n,), right_slices(swap_legs(V)))
    prod_span = span.product_span(stop_at=None)
    return CvSpan(span, prod_span.dim)


def _products(xs: Iterable[Operator], ys: list[Operator]) -> Iterable[Operator]:
    for x in xs:
        for y in ys:
            yield x @ y


def regularity_report(mp: MatchedPair, W: Operator | None = None) -> dict:
    W = build_W(mp) if W is None else W
    W, n = _as_square(W)
    S, Shat = slice_spans(W)
    cv = cv_span(W)
    SShat = OperatorSpan((n,), _products(S.operators(), Shat.operators()))
    dim_K = n * n
    return {
        "dim_S": S.dim,
        "dim_Shat": Shat.dim,
        "dim_C": cv.dim,
        "dim_CC": cv.product_dim,
        "dim_SShat": SShat.dim,
        "dim_K": dim_K,
        "verdict": "regular" if cv.dim == dim_K else "not_regular",
        "C_equals_SShat": cv.span == SShat,
    }


def crossed_product_dims(mp: MatchedPair, W: Operator | None = None) -> dict:
    """Observed and expected dimensions of S, Shat and span(S Shat)."""
    rep = regularity_report(mp, W)
    order = mp.group.order
    expected = {"S": mp.n2 * mp.n1, "Shat": mp.n1 * mp.n2, "SShat": mp.n2 * mp.n1 * order}
    observed = {"S": rep["dim_S"], "Shat": rep["dim_Shat"], "SShat": rep["dim_SShat"]}
    return {"observed": observed, "expected": expected, "ok": observed == expected}


def interchange_dims(mp: MatchedPair) -> dict:
    """Slice dimensions of W for the pair and for the swapped pair."""
    S, Shat = slice_spans(build_W(mp))
    S2, Shat2 = slice_spans(build_W(mp.swapped()))
    return {"pair": (S.dim, Shat.dim), "swapped": (S2.dim, Shat2.dim),
            "ok": (S.dim, Shat.dim) == (Shat2.dim, S2.dim)}


# comultiplication


def delta(W: Operator, x: Operator) -> Operator:
    """delta(x) = W (x (x) 1) W*."""
    W, n = _as_square(W)
    return W @ x.place((0,), (n, n)) @ W.adjoint()


def delta_hat(W: Operator, y: Operator) -> Operator:
    """delta-hat(y) = W* (1 (x) y) W."""
    W, n = _as_square(W)
    return W.adjoint() @ y.place((1,), (n, n)) @ W


def alpha_function(mp: MatchedPair, values) -> Operator:
    """Multiplication by (s, g) -> F(p1(s g)) on H, for F given on G1 positions."""
    pos1 = mp.pos1
    diag = [values[pos1[mp.alpha(s, g)]] for s in mp.g2 for g in mp.g1]
    n = mp.n1 * mp.n2
    return Operator.diagonal((n,), diag)


def alpha_alpha_delta1(mp: MatchedPair, values) -> Operator:
    """(alpha (x) alpha) delta1(F): multiplication by F(alpha_s(g) alpha_t(h))."""
    G, pos1 = mp.group, mp.pos1
    labels = [(s, g) for s in mp.g2 for g in mp.g1]
    diag = [values[pos1[G.mul(mp.alpha(s, g), mp.alpha(t, h))]] for s, g in labels for t, h in labels]
    n = len(labels)
    return Operator.diagonal((n * n,), diag)


@dataclass
class ComultiplicationReport:
    checked: int = 0
    coassociative: bool = True
    coassociative_hat: bool = True
    in_S_tensor_S: bool = True
    unital: bool = True
    alpha_compatible: bool = True
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (self.coassociative and self.coassociative_hat and self.in_S_tensor_S
                and self.unital and self.alpha_compatible)

    def to_json(self) -> dict:
        return {"checked": self.checked, "coassociative": self.coassociative,
                "coassociative_hat": self.coassociative_hat, "in_S_tensor_S": self.in_S_tensor_S,
                "unital": self.unital, "alpha_compatible": self.alpha_compatible,
                "ok": self.ok, "failures": self.failures}


def comultiplication_check(mp: MatchedPair, W: Operator | None = None,
                           tensor_membership: bool = True) -> ComultiplicationReport:
    """Coassociativity of delta on a basis of S and of delta-hat on a basis of Shat,
    delta(S) inside span(S) (x) span(S), delta(1) = 1 (x) 1, and
    delta alpha = (alpha (x) alpha) delta1 on the point masses of G1."""
    W = build_W(mp) if W is None else W
    W, n = _as_square(W)
    d3 = (n, n, n)
    rep = ComultiplicationReport()
    S, Shat = slice_spans(W)
    w12, w23 = W.place((0, 1), d3), W.place((1, 2), d3)
    w12s, w23s = w12.adjoint(), w23.adjoint()
    SS = None
    if tensor_membership:
        basis = S.operators()
        SS = OperatorSpan((n, n), (a.tensor(b) for a in basis for b in basis))
    for k, x in enumerate(S.operators()):
        rep.checked += 1
        d = delta(W, x)
        if w12 @ d.place((0, 2), d3) @ w12s != w23 @ d.place((0, 1), d3) @ w23s:
            rep.coassociative = False
            rep.failures.append(("coassociativity", k))
        if SS is not None and d not in SS:
            rep.in_S_tensor_S = False
            rep.failures.append(("S(x)S", k))
    for k, y in enumerate(Shat.operators()):
        rep.checked += 1
        d = delta_hat(W, y)
        if w12s @ d.place((1, 2), d3) @ w12 != w23s @ d.place((0, 2), d3) @ w23:
            rep.coassociative_hat = False
            rep.failures.append(("hat coassociativity", k))
    one = Operator.identity((n,))
    rep.unital = delta(W, one) == Operator.identity((n, n)) and delta_hat(W, one) == Operator.identity((n, n))
    for k in range(mp.n1):
        point = [Fraction(int(i == k)) for i in range(mp.n1)]
        rep.checked += 1
        lhs = delta(W, alpha_function(mp, point))
        if lhs.regroup((n * n,)) != alpha_alpha_delta1(mp, point):
            rep.alpha_compatible = False
            rep.failures.append(("alpha", k))
    return rep


# checks on characterisations of semi-regularity


def semiregularity_slice_check(mp: MatchedPair, W: Operator | None = None) -> dict:
    """Span of the slices (omega (x) id)(V* (1 (x) x) V), x in S, against span(S)."""
    W = build_W(mp) if W is None else W
    W, n = _as_square(W)
    S, _ = slice_spans(W)
    Ws = W.adjoint()
    sliced = OperatorSpan((n,))
    for x in S.operators():
        sliced.extend(left_slices(Ws @ x.place((1,), (n, n)) @ W))
    meet = OperatorSpan((n,), S.operators())
    return {
        "dim_slices": sliced.dim,
        "dim_S": S.dim,
        "contained_in_S": S.contains_span(sliced),
        "equal": sliced == S,
        "meets_S": sliced.dim + S.dim > meet.extend(sliced.operators()).dim,
    }


def coaction_unitary(U: Operator) -> Operator:
    """U (+) 1 on H (x) (H (+) C); the extra basis vector has index n."""
    U, n = _as_square(U)
    m = n + 1
    x, y = np.meshgrid(np.arange(n), np.arange(m), indexing="ij")
    perm = np.empty(n * m, dtype=np.int64)
    inside = y < n
    src = U.perm[(x * n + y)[inside]]
    perm[(x * m + y)[inside]] = (src // n) * m + src % n
    perm[(x * m + y)[~inside]] = (x * m + y)[~inside]
    return _checked(Operator((n, m), perm=perm))


def coaction_continuity_check(mp: MatchedPair, W: Operator | None = None,
                              variant: str = "regular_rep") -> dict:
    """Exact spans for the coaction alpha(b) = X* (1 (x) b) X of B = M_{n+1}.

    ``variant="regular_rep"`` takes X = (Sigma W Sigma) (+) 1, whose first leg
    generates S and which satisfies (delta (x) id)(U) = U13 U23; then alpha is a
    coaction of S and strong continuity is tested against S (x) B.
    ``variant="literal"`` takes X = W (+) 1, whose first leg generates Shat,
    and tests strong continuity against both S (x) B and Shat (x) B.
    """
    W = build_W(mp) if W is None else W
    W, n = _as_square(W)
    m = n + 1
    if variant == "regular_rep":
        sigma = flip_operator(n)
        U = sigma @ W @ sigma
    elif variant == "literal":
        U = W
    else:
        raise ValueError(f"unknown variant {variant!r}")
    X = coaction_unitary(U)
    Xs = X.adjoint()
    units_B = [Operator.matrix_unit((m,), i, j) for i in range(m) for j in range(m)]
    alphas = [Xs @ b.place((1,), (n, m)) @ X for b in units_B]
    T = OperatorSpan((m,))
    for a in alphas:
        T.extend(left_slices(a))
    T_ops = T.operators()
    S, Shat = slice_spans(W)
    out = {
        "variant": variant,
        "dim_T": T.dim,
        "dim_B": m * m,
        "T_adjoint_closed": T.adjoint_closed(),
        "T_product_closed": all(x @ y in T for x in T_ops for y in T_ops),
        "weak": T.dim == m * m,
    }
    if variant == "regular_rep":
        d3 = (n, n, m)
        X23, X23s = X.place((1, 2), d3), Xs.place((1, 2), d3)
        W12, W12s = W.place((0, 1), d3), W.adjoint().place((0, 1), d3)
        out["coaction"] = all(X23s @ a.place((0, 2), d3) @ X23 == W12 @ a.place((0, 2), d3) @ W12s
                              for a in alphas)
    targets = {"S": S} if variant == "regular_rep" else {"S": S, "Shat": Shat}
    for name, A in targets.items():
        A_ops = A.operators()
        strong = OperatorSpan((n, m), (a @ x.place((0,), (n, m)) for a in alphas for x in A_ops))
        target = OperatorSpan((n, m), (x.tensor(b) for x in A_ops for b in units_B))
        out[f"dim_strong_{name}"] = strong.dim
        out[f"dim_{name}_tensor_B"] = target.dim
        out[f"strong_{name}"] = strong == target
    out["strong"] = out["strong_S"]
    return out


def pair_report(mp: MatchedPair, dump: bool = False) -> dict:
    """JSON-ready summary: pentagon, slice dimensions and the regularity verdict."""
    W = build_W(mp)
    reg = regularity_report(mp, W)
    out = {
        "pair": mp.label,
        "pentagon": pentagon_check(W),
        "dims": {"S": reg["dim_S"], "Shat": reg["dim_Shat"], "C": reg["dim_C"],
                 "SShat": reg["dim_SShat"], "K": reg["dim_K"]},
        "verdict": reg["verdict"],
    }
    if dump:
        out["W"] = W.quadruples()
    return out
