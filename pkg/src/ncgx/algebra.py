"""Algebras with an explicit linear basis, used for exact chain arithmetic.

Elements are sparse coordinate dicts ``{basis_index: coefficient}``.  A based
algebra optionally knows how to represent each basis element as an operator;
the Hochschild evaluation map needs that, the boundary does not.
"""
from __future__ import annotations

from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import ActionDoesNotPreserveAlgebra, AlgebraNotClosed, WindowOverflow
from .groups import GroupModel
from .opalg import ComplexOperator, identity, span_coordinates

SNAP = 1e-13


def _snap(c: complex) -> complex:
    """Remove least-squares dust so exact structure constants stay exact."""
    re, im = c.real, c.imag
    re = 0.0 if abs(re) < SNAP else (round(re) if abs(re - round(re)) < SNAP else re)
    im = 0.0 if abs(im) < SNAP else (round(im) if abs(im - round(im)) < SNAP else im)
    return complex(re, im)


def _sparse(vec, tol=SNAP) -> dict:
    return {i: _snap(complex(c)) for i, c in enumerate(vec) if abs(c) > tol}


def axpy(out: dict, x: Mapping, c: complex = 1.0):
    for k, v in x.items():
        out[k] = out.get(k, 0) + c * v
    return out


class BasedAlgebra:
    """A unital *-algebra with basis labels, structure constants, unit and star."""

    def __init__(self, labels: Sequence, product: Callable[[int, int], dict], unit: dict,
                 star: Callable[[int], dict], rep: Callable[[int], ComplexOperator] | None = None,
                 name: str = "algebra"):
        self.labels = tuple(labels)
        self._index = {lab: i for i, lab in enumerate(self.labels)}
        self._product = product
        self._prod_cache: dict = {}
        self._star = star
        self._rep = rep
        self._rep_cache: dict = {}
        self.unit = dict(unit)
        self.name = name

    def __repr__(self):
        return f"BasedAlgebra({self.name}, dim={self.dim})"

    @property
    def dim(self) -> int:
        return len(self.labels)

    def index(self, label) -> int:
        return self._index[label]

    def product(self, i: int, j: int) -> dict:
        key = (i, j)
        if key not in self._prod_cache:
            self._prod_cache[key] = self._product(i, j)
        return self._prod_cache[key]

    def multiply(self, x: Mapping, y: Mapping) -> dict:
        out: dict = {}
        for i, a in x.items():
            for j, b in y.items():
                axpy(out, self.product(i, j), a * b)
        return {k: v for k, v in out.items() if v != 0}

    def star(self, x: Mapping) -> dict:
        out: dict = {}
        for i, a in x.items():
            axpy(out, self._star(i), np.conj(a))
        return out

    @property
    def has_rep(self) -> bool:
        return self._rep is not None

    def rep(self, i: int) -> ComplexOperator:
        if self._rep is None:
            raise AttributeError(f"{self.name} has no representation attached")
        if i not in self._rep_cache:
            self._rep_cache[i] = self._rep(i)
        return self._rep_cache[i]

    def rep_of(self, x: Mapping) -> ComplexOperator:
        ops = [c * self.rep(i) for i, c in x.items()]
        out = ops[0]
        for op in ops[1:]:
            out = out + op
        return out

    # -------------------------------------------------------- constructors

    @classmethod
    def from_operators(cls, basis: Sequence[ComplexOperator], tol: float = 1e-9, name="operators") -> "BasedAlgebra":
        """Structure constants of span(basis) by least squares; raises if the span is not closed."""
        basis = list(basis)
        table = {}
        for i, a in enumerate(basis):
            for j, b in enumerate(basis):
                coords, r = span_coordinates(basis, a @ b)
                if r > tol:
                    raise AlgebraNotClosed(f"product of basis elements {i}, {j} leaves the span (residual {r:.2e})")
                table[i, j] = _sparse(coords)
        stars = {}
        for i, a in enumerate(basis):
            coords, r = span_coordinates(basis, a.adjoint())
            if r > tol:
                raise AlgebraNotClosed(f"adjoint of basis element {i} leaves the span")
            stars[i] = _sparse(coords)
        coords, r = span_coordinates(basis, identity(basis[0].space))
        if r > tol:
            raise AlgebraNotClosed("identity is not in the span")
        return cls(range(len(basis)), lambda i, j: table[i, j], _sparse(coords), stars.__getitem__,
                   lambda i: basis[i], name)

    @classmethod
    def group_algebra(cls, G: GroupModel, radius: int | None = None, rep=None, name="group algebra") -> "BasedAlgebra":
        """Basis delta_g (|g| <= radius on windowed Z).  Products leaving the basis raise WindowOverflow."""
        if G.is_finite or radius is None:
            elems = list(G.elements)
        else:
            elems = [g for g in G.elements if G.word_length(g) <= radius]
        index = {g: i for i, g in enumerate(elems)}

        def product(i, j):
            gh = G.mul(elems[i], elems[j])
            if gh is None or gh not in index:
                raise WindowOverflow(f"delta_{elems[i]} * delta_{elems[j]} leaves the basis window")
            return {index[gh]: 1.0}

        def star(i):
            return {index[G.inv(elems[i])]: 1.0}

        alg = cls(elems, product, {index[G.identity]: 1.0}, star, rep, name)
        alg.group = G
        return alg


class AlgebraAction:
    """alpha_g on a based algebra, as coordinate matrices (column j = coords of alpha_g(e_j))."""

    def __init__(self, group: GroupModel, matrices: Mapping):
        self.group = group
        self.matrices = {g: np.asarray(m, dtype=complex) for g, m in matrices.items()}

    @classmethod
    def trivial(cls, group: GroupModel, dim: int) -> "AlgebraAction":
        eye = np.eye(dim, dtype=complex)
        return cls(group, {g: eye for g in group.elements})

    @classmethod
    def from_unitaries(cls, group: GroupModel, basis: Sequence[ComplexOperator], unitaries: Mapping,
                       tol: float = 1e-9) -> "AlgebraAction":
        mats = {}
        for g, u in unitaries.items():
            cols = []
            for j, a in enumerate(basis):
                coords, r = span_coordinates(basis, u @ a @ u.adjoint())
                if r > tol:
                    raise ActionDoesNotPreserveAlgebra(f"Ad u_{g} moves basis element {j} out of the algebra "
                                                      f"(residual {r:.2e})")
                cols.append([_snap(complex(c)) for c in coords])
            mats[g] = np.array(cols, dtype=complex).T
        return cls(group, mats)

    def __call__(self, g) -> np.ndarray:
        return self.matrices[g]

    def apply(self, g, x: Mapping) -> dict:
        m = self.matrices[g]
        out: dict = {}
        for j, c in x.items():
            col = m[:, j]
            for k in np.flatnonzero(col):
                out[int(k)] = out.get(int(k), 0) + c * col[k]
        return out


def crossed_product(A: BasedAlgebra, action: AlgebraAction, radius: int | None = None,
                    rep=None, name="crossed product") -> BasedAlgebra:
    """Basis e_i delta_g with (e_i delta_g)(e_j delta_h) = e_i alpha_g(e_j) delta_gh."""
    G = action.group
    if G.is_finite or radius is None:
        elems = list(G.elements)
    else:
        elems = [g for g in G.elements if G.word_length(g) <= radius]
    labels = [(i, g) for g in elems for i in range(A.dim)]
    index = {lab: k for k, lab in enumerate(labels)}

    def product(p, q):
        i, g = labels[p]
        j, h = labels[q]
        gh = G.mul(g, h)
        if gh is None or (0, gh) not in index:
            raise WindowOverflow(f"delta_{g} * delta_{h} leaves the group window")
        prod = A.multiply({i: 1.0}, action.apply(g, {j: 1.0}))
        return {index[(k, gh)]: c for k, c in prod.items()}

    def star(p):
        i, g = labels[p]
        gi = G.inv(g)
        if (0, gi) not in index:
            raise WindowOverflow(f"inverse of {g} leaves the group window")
        a = action.apply(gi, A.star({i: 1.0}))
        return {index[(k, gi)]: c for k, c in a.items()}

    unit = {index[(k, G.identity)]: c for k, c in A.unit.items()}
    B = BasedAlgebra(labels, product, unit, star, rep, name)
    B.base = A
    B.group = G
    B.action = action
    return B
