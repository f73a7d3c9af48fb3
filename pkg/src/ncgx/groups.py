"""Discrete group models, weights and the group-algebra operators on l^2(G).

Two models are supported: finite groups given by a multiplication table, and
windowed truncations of Z to the integers in [-N, N].  In the windowed model a
product that leaves the window is reported (``mul`` returns ``None``) and
operators are compressions, so identities hold exactly on an interior window
whose margin covers the group elements involved.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.sparse as sp

from .errors import EmptyWindow, GroupNotAbelian, InvalidGroupLaw, MarginTooLarge, WindowOverflow
from .opalg import ComplexOperator, HilbertSpace, diagonal

MAX_WINDOW_DIM = 64


class GroupModel:
    """Common interface; elements are hashable labels, ``index`` gives their position."""

    elements: tuple
    identity: object
    is_finite: bool

    @property
    def order(self) -> int:
        return len(self.elements)

    def index(self, g) -> int:
        return self._index[g]

    def contains(self, g) -> bool:
        return g in self._index

    def mul(self, a, b):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def mul_strict(self, a, b):
        out = self.mul(a, b)
        if out is None:
            raise WindowOverflow(f"product {a}*{b} leaves the window")
        return out

    def word_length(self, g) -> int:
        return 0

    @property
    def abelian(self) -> bool:
        return self._abelian

    def space(self) -> HilbertSpace:
        return HilbertSpace(self.order, self.elements)

    def table(self) -> np.ndarray:
        """Index multiplication table, -1 where the product leaves the window."""
        n = self.order
        t = np.full((n, n), -1, dtype=int)
        for i, a in enumerate(self.elements):
            for j, b in enumerate(self.elements):
                c = self.mul(a, b)
                if c is not None:
                    t[i, j] = self._index[c]
        return t

    def inverse_indices(self) -> np.ndarray:
        return np.array([self._index[self.inv(g)] for g in self.elements], dtype=int)


class FiniteGroup(GroupModel):
    is_finite = True

    def __init__(self, table, labels=None):
        t = np.asarray(table, dtype=int)
        n = t.shape[0]
        if t.ndim != 2 or t.shape != (n, n) or n < 1:
            raise InvalidGroupLaw("multiplication table must be square")
        if t.min() < 0 or t.max() >= n:
            raise InvalidGroupLaw("table entries must be element indices")
        ids = [e for e in range(n) if all(t[e, x] == x and t[x, e] == x for x in range(n))]
        if len(ids) != 1:
            raise InvalidGroupLaw("table has no (unique) identity")
        e = ids[0]
        inverse = []
        for x in range(n):
            cand = [y for y in range(n) if t[x, y] == e and t[y, x] == e]
            if not cand:
                raise InvalidGroupLaw(f"element {x} has no inverse")
            inverse.append(cand[0])
        # associativity, exhaustively
        lhs = t[t, :]  # lhs[a, b, c] = (ab)c
        rhs = t[:, t]  # rhs[a, b, c] = a(bc)
        if not np.array_equal(lhs, rhs):
            a, b, c = np.argwhere(lhs != rhs)[0]
            raise InvalidGroupLaw(f"table is not associative at ({a}, {b}, {c})")
        self._t = t
        self._inv = np.array(inverse)
        self.elements = tuple(range(n)) if labels is None else tuple(labels)
        if len(set(self.elements)) != n:
            raise InvalidGroupLaw("labels must be distinct")
        self._index = {g: i for i, g in enumerate(self.elements)}
        self.identity = self.elements[e]
        self._abelian = bool(np.array_equal(t, t.T))

    def mul(self, a, b):
        return self.elements[self._t[self._index[a], self._index[b]]]

    def inv(self, a):
        return self.elements[self._inv[self._index[a]]]

    def table(self) -> np.ndarray:
        return self._t.copy()

    def __repr__(self):
        return f"FiniteGroup(order={self.order})"

    def __eq__(self, other):
        return isinstance(other, FiniteGroup) and np.array_equal(self._t, other._t) and self.elements == other.elements

    def __hash__(self):
        return hash((self.order, self._t.tobytes()))


class WindowedZ(GroupModel):
    """The integers in [-N, N] with addition; escaping sums are flagged."""

    is_finite = False
    _abelian = True

    def __init__(self, N: int):
        if int(N) != N or N < 1:
            raise EmptyWindow(f"window radius must be a positive integer, got {N!r}")
        if 2 * N + 1 > MAX_WINDOW_DIM:
            raise ValueError(f"windowed Z is capped at dimension {MAX_WINDOW_DIM} (N <= {(MAX_WINDOW_DIM - 1) // 2})")
        self.N = int(N)
        self.elements = tuple(range(-self.N, self.N + 1))
        self._index = {g: g + self.N for g in self.elements}
        self.identity = 0

    def index(self, g) -> int:
        if not -self.N <= g <= self.N:
            raise KeyError(g)
        return int(g) + self.N

    def mul(self, a, b):
        c = a + b
        return c if -self.N <= c <= self.N else None

    def inv(self, a):
        return -a

    def word_length(self, g) -> int:
        return abs(g)

    def __repr__(self):
        return f"WindowedZ(N={self.N})"

    def __eq__(self, other):
        return isinstance(other, WindowedZ) and other.N == self.N

    def __hash__(self):
        return hash(("Z", self.N))


def cyclic(n: int) -> FiniteGroup:
    return FiniteGroup([[(i + j) % n for j in range(n)] for i in range(n)])


def symmetric3() -> FiniteGroup:
    """S_3 as permutations of (0, 1, 2); composition (p*q)(k) = p(q(k))."""
    perms = list(itertools.permutations(range(3)))
    idx = {p: i for i, p in enumerate(perms)}
    table = [[idx[tuple(p[q[k]] for k in range(3))] for q in perms] for p in perms]
    return FiniteGroup(table)


@dataclass(frozen=True, eq=False)
class Weight:
    group: GroupModel
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.group.order,):
            raise ValueError("weight needs one value per group element")
        if not np.all(np.isfinite(vals)):
            raise ValueError("weight values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __call__(self, g) -> float:
        return float(self.values[self.group.index(g)])

    @classmethod
    def from_function(cls, group: GroupModel, f: Callable) -> "Weight":
        return cls(group, np.array([f(g) for g in group.elements], dtype=float))

    @classmethod
    def inclusion(cls, group: WindowedZ) -> "Weight":
        return cls.from_function(group, float)

    @classmethod
    def absolute(cls, group: WindowedZ) -> "Weight":
        return cls.from_function(group, lambda g: float(abs(g)))

    @classmethod
    def constant(cls, group: GroupModel, c: float = 0.0) -> "Weight":
        return cls(group, np.full(group.order, float(c)))


@dataclass
class WeightClassification:
    flags: dict
    witnesses: dict = field(default_factory=dict)

    def __getattr__(self, name):
        flags = self.__dict__.get("flags", {})
        if name in flags:
            return flags[name]
        raise AttributeError(name)


def _first_violation(mask: np.ndarray, cost: np.ndarray | None = None):
    hits = np.argwhere(mask)
    if len(hits) == 0:
        return None
    if cost is not None:
        k = np.argmin(cost[tuple(hits.T)])
        return tuple(int(v) for v in hits[k])
    return tuple(int(v) for v in hits[0])


def translation_function(w: Weight, g) -> dict:
    """l_g(x) = l(x) - l(g^{-1}x) on the elements x where g^{-1}x is defined."""
    G = w.group
    gi = G.inv(g)
    out = {}
    for x in G.elements:
        y = G.mul(gi, x)
        if y is not None:
            out[x] = w(x) - w(y)
    return out


def classify_weight(w: Weight, atol: float = 1e-10) -> WeightClassification:
    G = w.group
    if isinstance(G, WindowedZ) and G.N < 1:
        raise EmptyWindow("empty window")
    el = G.elements
    l = w.values
    t = G.table()
    inv = G.inverse_indices()
    e = G.index(G.identity)
    n = G.order
    # crude size of a witness, used to prefer short witnesses on windowed Z
    size = np.array([G.word_length(g) for g in el], dtype=float)
    flags, wit = {}, {}

    def close(a, b):
        return np.abs(a - b) <= atol * (1 + np.maximum(np.abs(a), np.abs(b)))

    # constant
    bad = _first_violation(~close(l[:, None], l[None, :]))
    flags["constant"] = bad is None
    if bad:
        wit["constant"] = {"x": el[bad[0]], "y": el[bad[1]]}

    # homomorphism: l(xy) = l(x) + l(y) where xy is defined
    defined = t >= 0
    lxy = np.where(defined, l[np.where(defined, t, 0)], 0.0)
    mask = defined & ~close(lxy, l[:, None] + l[None, :])
    bad = _first_violation(mask, size[:, None] + size[None, :])
    flags["homomorphism"] = bad is None
    if bad:
        x, y = bad
        wit["homomorphism"] = {"x": el[x], "y": el[y], "l(xy)": float(l[t[x, y]]), "l(x)+l(y)": float(l[x] + l[y])}

    # first order: l(xzy^-1) - l(zy^-1) = l(xz) - l(z)
    X, Y, Z = np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij")
    zy = t[Z, inv[Y]]
    xz = t[X, Z]
    ok = (zy >= 0) & (xz >= 0)
    xzy = np.where(ok, t[X, np.where(ok, zy, 0)], -1)
    ok &= xzy >= 0
    lhs = np.where(ok, l[np.maximum(xzy, 0)] - l[np.maximum(zy, 0)], 0.0)
    rhs = np.where(ok, l[np.maximum(xz, 0)] - l[Z], 0.0)
    mask = ok & ~close(lhs, rhs)
    bad = _first_violation(mask, size[X] + size[Y] + size[Z])
    flags["first_order"] = bad is None
    if bad:
        x, y, z = bad
        wit["first_order"] = {"x": el[x], "y": el[y], "z": el[z], "lhs": float(lhs[bad]), "rhs": float(rhs[bad])}

    # non-degenerate: l(g) = 0 exactly when g = e
    zero = np.abs(l) <= atol
    bad_idx = [i for i in range(n) if zero[i] != (i == e)]
    flags["non_degenerate"] = not bad_idx
    if bad_idx:
        wit["non_degenerate"] = {"g": el[bad_idx[0]], "l(g)": float(l[bad_idx[0]])}

    sym = ~close(l[inv], l)
    bad = _first_violation(sym, size)
    flags["symmetric"] = bad is None
    if bad:
        wit["symmetric"] = {"g": el[bad[0]], "l(g)": float(l[bad[0]]), "l(g^-1)": float(l[inv[bad[0]]])}
    asym = ~close(l[inv], -l)
    bad = _first_violation(asym, size)
    flags["antisymmetric"] = bad is None
    if bad:
        wit["antisymmetric"] = {"g": el[bad[0]], "l(g)": float(l[bad[0]]), "l(g^-1)": float(l[inv[bad[0]]])}

    # length function: non-degenerate, nonnegative, symmetric, subadditive
    reason = None
    if not flags["non_degenerate"]:
        reason = {"reason": "degenerate", **wit["non_degenerate"]}
    elif np.any(l < -atol):
        i = int(np.argmax(l < -atol))
        reason = {"reason": "negative", "g": el[i], "l(g)": float(l[i])}
    elif not flags["symmetric"]:
        reason = {"reason": "not symmetric", **wit["symmetric"]}
    else:
        sub = defined & (lxy > l[:, None] + l[None, :] + atol)
        bad = _first_violation(sub, size[:, None] + size[None, :])
        if bad:
            x, y = bad
            reason = {"reason": "not subadditive", "x": el[x], "y": el[y]}
    flags["length_function"] = reason is None
    if reason:
        wit["length_function"] = reason

    # Dirac: bounded translation functions.  On a finite group this is
    # automatic.  On a window we use a growth proxy: sup |l_g| over the whole
    # window may not exceed its sup over the inner half-window.
    flags["dirac"] = True
    if isinstance(G, WindowedZ):
        half = G.N // 2
        for g in range(-half, half + 1):
            lg = translation_function(w, g)
            inner = max((abs(v) for x, v in lg.items() if abs(x) <= half), default=0.0)
            for x, v in sorted(lg.items(), key=lambda kv: abs(kv[0])):
                if abs(v) > inner + atol * (1 + inner):
                    flags["dirac"] = False
                    wit["dirac"] = {"g": g, "x": x, "l_g(x)": v, "inner_sup": inner}
                    break
            if not flags["dirac"]:
                break

    cls = WeightClassification(flags, wit)
    assert not flags["homomorphism"] or flags["first_order"], "homomorphism must be first order"
    assert not flags["first_order"] or flags["dirac"], "first order must be Dirac"
    assert not flags["length_function"] or flags["dirac"], "length function must be Dirac"
    return cls


@dataclass(frozen=True, eq=False)
class GroupOperators:
    lambda_: dict
    M_l: ComplexOperator
    J_G: ComplexOperator


def left_regular(G: GroupModel, g) -> ComplexOperator:
    """lambda_g delta_h = delta_{gh} (dropped when gh leaves the window)."""
    rows, cols = [], []
    for h in G.elements:
        gh = G.mul(g, h)
        if gh is not None:
            rows.append(G.index(gh))
            cols.append(G.index(h))
    m = sp.csr_matrix((np.ones(len(rows), dtype=complex), (rows, cols)), shape=(G.order, G.order))
    return ComplexOperator(m, G.space())


def inversion_matrix(G: GroupModel) -> sp.csr_matrix:
    inv = G.inverse_indices()
    n = G.order
    return sp.csr_matrix((np.ones(n, dtype=complex), (inv, np.arange(n))), shape=(n, n))


def multiplication_operator(G: GroupModel, values) -> ComplexOperator:
    return diagonal(values, G.space())


def build_group_operators(G: GroupModel, w: Weight) -> GroupOperators:
    lam = {g: left_regular(G, g) for g in G.elements}
    M_l = multiplication_operator(G, w.values)
    J_G = ComplexOperator(inversion_matrix(G), G.space(), antilinear=True)
    return GroupOperators(lam, M_l, J_G)


def interior_indices(G: GroupModel, margin: int) -> np.ndarray:
    if G.is_finite:
        return np.ones(G.order, dtype=bool)
    if margin < 0 or margin > G.N:
        raise MarginTooLarge(f"margin {margin} outside [0, {G.N}]")
    return np.array([abs(k) <= G.N - margin for k in G.elements])


def interior_projection(G: GroupModel, margin: int) -> ComplexOperator:
    return diagonal(interior_indices(G, margin).astype(float), G.space())


@dataclass(frozen=True)
class GroupHopfData:
    """Group algebra with one of its two *-structures: ``inverse`` or ``identity``."""

    group: GroupModel
    star: str = "inverse"

    def __post_init__(self):
        if self.star not in ("inverse", "identity"):
            raise ValueError("star must be 'inverse' or 'identity'")
        if self.star == "identity" and not self.group.abelian:
            raise GroupNotAbelian("the identity *-structure needs an abelian group")

    def star_of(self, g):
        return self.group.inv(g) if self.star == "inverse" else g
