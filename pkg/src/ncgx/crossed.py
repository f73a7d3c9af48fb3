"""The crossed-product spectral triple on H (x) l^2(G) [(x) C^2].

Kronecker order is always H, then l^2(G), then the C^2 factor (present when
the base triple is odd and the crossed triple is even).  Operators on
H (x) l^2(G) are called *core* operators; :meth:`CrossedTriple.lift` adds
the C^2 factor.

Two representations of the algebraic crossed product are available:

* ``pi1_lambda``: pi1(a)(xi (x) d_g) = alpha_{g^-1}(a) xi (x) d_g and lambda_h = 1 (x) lambda_h,
* ``pi2_gamma``:  pi2(a) = a (x) 1 and Gamma_h = u_h (x) lambda_h,

with the action alpha_g = Ad u_g realized on the represented algebra.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .algebra import AlgebraAction, BasedAlgebra, crossed_product
from .errors import GroupNotAbelian, GroupNotFinite, MissingUnitaries
from .groups import GroupModel, Weight, classify_weight, interior_indices, left_regular, translation_function
from .opalg import (SIGMA_1, SIGMA_2, SIGMA_3, ComplexOperator, HilbertSpace, Tolerance, commutator, masked_residual,
                    op_norm, relation_residual, span_coordinates, spectrum)
from .report import Report
from .triples import SpectralTripleData, _sort_key, basis_labels

PI1_LAMBDA = "pi1_lambda"
PI2_GAMMA = "pi2_gamma"
EVEN_FROM_ODD = "even_from_odd"
ODD_FROM_EVEN = "odd_from_even"
MAX_CROSSED_DIM = 20000


def _csr(x):
    return sp.csr_matrix(x, dtype=complex)


def _unit(n, i, j):
    return sp.csr_matrix(([1.0 + 0j], ([i], [j])), shape=(n, n))


@dataclass(frozen=True, eq=False)
class CrossedElement:
    """sum_g a_g d_g with a_g given by coordinates over the base algebra basis."""

    terms: dict

    def coords(self, B: BasedAlgebra) -> dict:
        out = {}
        for g, vec in self.terms.items():
            for i, c in enumerate(vec):
                if c != 0:
                    out[B.index((i, g))] = complex(c)
        return out

    @classmethod
    def from_coords(cls, B: BasedAlgebra, x: dict) -> "CrossedElement":
        n = B.base.dim
        terms: dict = {}
        for k, c in x.items():
            i, g = B.labels[k]
            terms.setdefault(g, np.zeros(n, dtype=complex))[i] += c
        return cls(terms)


@dataclass(frozen=True, eq=False)
class CrossedTriple:
    base: SpectralTripleData
    group: GroupModel
    weight: Weight
    representation: str
    parity: str
    action: AlgebraAction
    tolerance: Tolerance = Tolerance()
    _cache: dict = field(default_factory=dict, repr=False)

    # ---------------------------------------------------------- spaces
    @property
    def nH(self) -> int:
        return self.base.space.dim

    @property
    def nG(self) -> int:
        return self.group.order

    @property
    def core_space(self) -> HilbertSpace:
        return HilbertSpace(self.nH * self.nG)

    @property
    def space(self) -> HilbertSpace:
        k = 2 if self.parity == EVEN_FROM_ODD else 1
        return HilbertSpace(self.nH * self.nG * k)

    def lift(self, x: ComplexOperator) -> ComplexOperator:
        if self.parity == ODD_FROM_EVEN:
            return ComplexOperator(x.matrix, self.space, x.antilinear)
        return ComplexOperator(sp.kron(x.matrix, sp.identity(2, dtype=complex), format="csr"), self.space, x.antilinear)

    def _op(self, m, antilinear=False, core=True) -> ComplexOperator:
        return ComplexOperator(m, self.core_space if core else self.space, antilinear)

    # ------------------------------------------------------ group pieces
    def u(self, g) -> ComplexOperator:
        if self.base.unitaries is None:
            return ComplexOperator(sp.identity(self.nH, dtype=complex, format="csr"), self.base.space)
        return self.base.unitaries[g]

    def alpha(self, g, a: ComplexOperator) -> ComplexOperator:
        if self.base.unitaries is None:
            return a
        u = self.base.unitaries[g]
        return u @ a @ u.adjoint()

    def lam(self, h) -> sp.csr_matrix:
        key = ("lam", h)
        if key not in self._cache:
            self._cache[key] = left_regular(self.group, h).matrix
        return self._cache[key]

    def M_l(self) -> sp.csr_matrix:
        return sp.diags(self.weight.values.astype(complex), format="csr")

    def M_lh(self, h) -> sp.csr_matrix:
        """Multiplication by l_h(x) = l(x) - l(h^-1 x) (zero where h^-1 x leaves the window)."""
        lh = translation_function(self.weight, h)
        vals = np.array([lh.get(x, 0.0) for x in self.group.elements], dtype=complex)
        return sp.diags(vals, format="csr")

    # ----------------------------------------------------- core operators
    def core_pi1(self, a: ComplexOperator) -> ComplexOperator:
        G = self.group
        m = None
        for x in G.elements:
            blk = sp.kron(self.alpha(G.inv(x), a).matrix, _unit(self.nG, G.index(x), G.index(x)), format="csr")
            m = blk if m is None else m + blk
        return self._op(m)

    def core_pi2(self, a: ComplexOperator) -> ComplexOperator:
        return self._op(sp.kron(a.matrix, sp.identity(self.nG, dtype=complex), format="csr"))

    def core_lambda(self, h) -> ComplexOperator:
        return self._op(sp.kron(sp.identity(self.nH, dtype=complex), self.lam(h), format="csr"))

    def core_gamma(self, h) -> ComplexOperator:
        return self._op(sp.kron(self.u(h).matrix, self.lam(h), format="csr"))

    def core_D(self) -> ComplexOperator:
        return self._op(sp.kron(self.base.D.matrix, sp.identity(self.nG, dtype=complex), format="csr"))

    def core_Ml(self) -> ComplexOperator:
        return self._op(sp.kron(sp.identity(self.nH, dtype=complex), self.M_l(), format="csr"))

    def core_pi(self, a: ComplexOperator) -> ComplexOperator:
        return self.core_pi1(a) if self.representation == PI1_LAMBDA else self.core_pi2(a)

    def core_unitary(self, h) -> ComplexOperator:
        return self.core_lambda(h) if self.representation == PI1_LAMBDA else self.core_gamma(h)

    def core_rep_basis(self, i: int, g) -> ComplexOperator:
        key = ("core_rep", i, g)
        if key not in self._cache:
            self._cache[key] = self.core_pi(self.base.algebra_basis[i]) @ self.core_unitary(g)
        return self._cache[key]

    # ------------------------------------------------------ full operators
    def rep_basis(self, i: int, g) -> ComplexOperator:
        key = ("rep", i, g)
        if key not in self._cache:
            self._cache[key] = self.lift(self.core_rep_basis(i, g))
        return self._cache[key]

    def rep(self, f: CrossedElement) -> ComplexOperator:
        out = None
        for g, vec in f.terms.items():
            for i, c in enumerate(vec):
                if c != 0:
                    term = complex(c) * self.rep_basis(i, g)
                    out = term if out is None else out + term
        if out is None:
            return ComplexOperator(sp.csr_matrix((self.space.dim,) * 2, dtype=complex), self.space)
        return out

    @property
    def D_hat(self) -> ComplexOperator:
        if "D_hat" not in self._cache:
            D, Ml = self.core_D().matrix, self.core_Ml().matrix
            if self.parity == EVEN_FROM_ODD:
                m = sp.kron(D, _csr(SIGMA_1), format="csr") + sp.kron(Ml, _csr(SIGMA_2), format="csr")
            else:
                chi = self.base.grading.matrix
                m = D + sp.kron(chi, self.M_l(), format="csr")
            self._cache["D_hat"] = ComplexOperator(m, self.space)
        return self._cache["D_hat"]

    @property
    def grading_hat(self) -> ComplexOperator | None:
        if self.parity != EVEN_FROM_ODD:
            return None
        m = sp.kron(sp.identity(self.nH * self.nG, dtype=complex), _csr(SIGMA_3), format="csr")
        return ComplexOperator(m, self.space)

    def interior_mask(self, margin: int = 0, core: bool = False) -> np.ndarray:
        hmask = np.ones(self.nH, dtype=bool)
        hg = self.base.hilbert_group
        if hg is not None and not hg.is_finite:
            hmask = interior_indices(hg, margin)
        gmask = interior_indices(self.group, margin)
        m = np.kron(hmask, gmask).astype(bool)
        if not core and self.parity == EVEN_FROM_ODD:
            m = np.repeat(m, 2)
        return m

    def interior(self, margin: int = 0, core: bool = False) -> ComplexOperator:
        m = self.interior_mask(margin, core)
        return ComplexOperator(sp.diags(m.astype(complex), format="csr"), self.core_space if core else self.space)

    def generators(self, g_max: int = 2) -> list:
        """(i, g) for every base basis element and every g with word length <= g_max (all g if finite)."""
        G = self.group
        elems = [g for g in G.elements if G.is_finite or G.word_length(g) <= g_max]
        elems.sort(key=lambda g: _sort_key(G, g))
        return [(i, g) for g in elems for i in range(len(self.base.algebra_basis))]

    def as_triple(self, J: ComplexOperator | None = None, g_max: int = 2) -> SpectralTripleData:
        basis = [self.rep_basis(i, g) for i, g in self.generators(g_max)]
        return SpectralTripleData(self.space, basis, self.D_hat, grading=self.grading_hat, J=J,
                                  truncated=True, tolerance=self.tolerance)


def build_crossed(base: SpectralTripleData, group: GroupModel, weight: Weight, rep: str = PI1_LAMBDA,
                  tolerance: Tolerance | None = None) -> CrossedTriple:
    if rep not in (PI1_LAMBDA, PI2_GAMMA):
        raise ValueError(f"unknown representation {rep!r}")
    if weight.group != group:
        raise ValueError("weight must live on the acting group")
    if base.unitaries is None:
        if rep == PI2_GAMMA:
            raise MissingUnitaries("pi2-gamma representation needs group unitaries on the base")
        action = AlgebraAction.trivial(group, len(base.algebra_basis))
    else:
        if base.group != group:
            raise ValueError("base unitaries are indexed by a different group")
        action = AlgebraAction.from_unitaries(group, base.algebra_basis, base.unitaries, base.tolerance.threshold())
    parity = ODD_FROM_EVEN if base.even else EVEN_FROM_ODD
    dim = base.space.dim * group.order * (1 if base.even else 2)
    if dim > MAX_CROSSED_DIM:
        raise ValueError(f"crossed space of dimension {dim} exceeds the cap {MAX_CROSSED_DIM}")
    return CrossedTriple(base, group, weight, rep, parity, action, tolerance or base.tolerance)


def base_algebra(t: SpectralTripleData) -> BasedAlgebra:
    """Based algebra whose representation is the triple's algebra basis (same order)."""
    G = t.hilbert_group
    if t.truncated and G is not None and t.weight is not None:
        r = (len(t.algebra_basis) - 1) // 2
        A = BasedAlgebra.group_algebra(G, radius=r, rep=lambda i: t.algebra_basis[i], name="windowed group algebra")
        return A
    return BasedAlgebra.from_operators(t.algebra_basis, t.tolerance.threshold())


def crossed_algebra(c: CrossedTriple, A: BasedAlgebra | None = None):
    """(B, action, Q): the crossed-product based algebra represented through ``c``,
    the action on A, and the group algebra of the acting group."""
    A = A or base_algebra(c.base)
    B = crossed_product(A, c.action, rep=None)
    B._rep = lambda p: c.rep_basis(*B.labels[p])
    Q = BasedAlgebra.group_algebra(c.group, name="group algebra of G")
    return B, c.action, Q


# ---------------------------------------------------------------- checks

def check_crossed_identities(c: CrossedTriple, margin: int = 4, samples: int = 6, seed: int = 0) -> Report:
    """Structural identities of the crossed triple on the interior window."""
    tol = c.tolerance.threshold()
    rep = Report()
    mask = c.interior_mask(margin)
    cmask = c.interior_mask(margin, core=True)
    Dh = c.D_hat
    rep.residual_check("D_hat self-adjoint", "crossed Dirac operator is self-adjoint",
                       relation_residual(Dh, Dh.adjoint()), tol)
    # D_hat^2 = D^2 (x) 1 + 1 (x) M_l^2 exactly
    D2 = c.core_D().matrix @ c.core_D().matrix + c.core_Ml().matrix @ c.core_Ml().matrix
    if c.parity == ODD_FROM_EVEN:
        rhs = ComplexOperator(D2, c.space)
    else:
        rhs = c.lift(ComplexOperator(D2, c.core_space))
    rep.residual_check("D_hat squared", "D_hat^2 = D^2 (x) 1 + 1 (x) M_l^2", relation_residual(Dh @ Dh, rhs), tol)
    if c.grading_hat is not None:
        chi = c.grading_hat
        rep.residual_check("grading anticommutes with D_hat", "crossed triple is even with grading 1 (x) 1 (x) sigma_3",
                           relation_residual(chi @ Dh, -(Dh @ chi)), tol)
    gens = c.generators()
    if c.grading_hat is not None:
        chi = c.grading_hat.matrix
        worst = max(masked_residual(chi @ c.rep_basis(i, g).matrix - c.rep_basis(i, g).matrix @ chi, None)
                    for i, g in gens)
        rep.residual_check("grading commutes with representation", "crossed triple is even with grading 1 (x) 1 (x) sigma_3",
                           worst, tol)

    G = c.group
    basis = c.base.algebra_basis
    hs = sorted({g for _, g in gens}, key=lambda g: _sort_key(G, g))
    if c.representation == PI1_LAMBDA:
        # [D (x) 1, pi1(a) lambda_h] = sum_g [D, alpha_{(hg)^-1}(a)] (x) |hg><g|
        w40, w41, wit40, wit41 = 0.0, 0.0, None, None
        Dc, Mc = c.core_D().matrix, c.core_Ml().matrix
        for h in hs:
            for i, a in enumerate(basis):
                X = c.core_rep_basis(i, h).matrix
                lhs = Dc @ X - X @ Dc
                rhs = None
                for g in G.elements:
                    hg = G.mul(h, g)
                    if hg is None:
                        continue
                    blk = sp.kron(commutator(c.base.D, c.alpha(G.inv(hg), a)).matrix,
                                  _unit(c.nG, G.index(hg), G.index(g)), format="csr")
                    rhs = blk if rhs is None else rhs + blk
                r = masked_residual(lhs - rhs, cmask)
                if r > w40:
                    w40, wit40 = r, {"a": i, "h": h}
                lhs = Mc @ X - X @ Mc
                rhs = sp.kron(sp.identity(c.nH, dtype=complex), c.M_lh(h), format="csr") @ X
                r = masked_residual(lhs - rhs, cmask)
                if r > w41:
                    w41, wit41 = r, {"a": i, "h": h}
        rep.residual_check("commutator with D (x) 1", "[D (x) 1, pi1(a) lambda_h] = sum_g [D, alpha_(hg)^-1(a)] (x) |hg><g|",
                           w40, tol, wit40)
        rep.residual_check("commutator with 1 (x) M_l", "[1 (x) M_l, pi1(a) lambda_h] = (1 (x) M_(l_h)) pi1(a) lambda_h",
                           w41, tol, wit41)

    # covariance: U_h pi(a) U_h* = pi(alpha_h(a))
    worst, wit = 0.0, None
    for h in hs:
        U = c.core_unitary(h).matrix
        for i, a in enumerate(basis):
            lhs = U @ c.core_pi(a).matrix @ U.conj().T
            rhs = c.core_pi(c.alpha(h, a)).matrix
            r = masked_residual(lhs - rhs, cmask)
            if r > worst:
                worst, wit = r, {"a": i, "h": h}
    rep.residual_check("covariance", "covariant pair: U_h pi(a) U_h* = pi(alpha_h(a))", worst, tol, wit)

    # *-homomorphism on random elements of small support
    B, _, _ = crossed_algebra(c)
    rng = np.random.default_rng(seed)
    blabels = basis_labels(c.base)
    small_base = {i for i, lab in enumerate(blabels)
                  if c.base.hilbert_group is None or c.base.hilbert_group.is_finite or abs(lab) <= 1}
    small = [k for k, (i, g) in enumerate(B.labels)
             if i in small_base and (G.is_finite or G.word_length(g) <= 1)]
    w_mul, w_star = 0.0, 0.0
    for _ in range(samples):
        f = {int(k): complex(*rng.integers(-3, 4, 2)) for k in rng.choice(small, size=min(3, len(small)), replace=False)}
        h = {int(k): complex(*rng.integers(-3, 4, 2)) for k in rng.choice(small, size=min(3, len(small)), replace=False)}
        fh = B.multiply(f, h)
        prod = (B.rep_of(f) @ B.rep_of(h)).matrix
        r = masked_residual(prod - (B.rep_of(fh).matrix if fh else 0 * prod), mask)
        w_mul = max(w_mul, r)
        r = masked_residual(B.rep_of(B.star(f)).matrix - B.rep_of(f).adjoint().matrix, mask)
        w_star = max(w_star, r)
    rep.residual_check("rep multiplicative", "integrated form is a *-homomorphism: rep(fg) = rep(f) rep(g)", w_mul, tol)
    rep.residual_check("rep star", "integrated form is a *-homomorphism: rep(f*) = rep(f)*", w_star, tol)
    return rep


def dhat_spectrum_check(c: CrossedTriple) -> Report:
    """spectrum(D_hat^2) = {lambda^2 + mu^2}; finite groups only."""
    if not c.group.is_finite:
        raise GroupNotFinite("spectral comparison needs a finite group")
    D2 = c.D_hat @ c.D_hat
    got = np.sort(np.real(spectrum(D2)))
    lam = np.linalg.eigvalsh(c.base.D.dense())
    if c.parity == ODD_FROM_EVEN:
        mu = c.weight.values
        expect = np.sort((lam[:, None] ** 2 + mu[None, :] ** 2).ravel())
    else:
        mu = c.weight.values
        expect = np.sort(np.repeat((lam[:, None] ** 2 + mu[None, :] ** 2).ravel(), 2))
    rep = Report()
    rep.residual_check("D_hat^2 spectrum", "spectrum of D_hat^2 is {lambda_i^2 + mu_j^2}",
                       float(np.abs(got - expect).max()), max(c.tolerance.threshold(), 1e-9))
    return rep


def check_equicontinuity(base: SpectralTripleData, group: GroupModel | None = None) -> Report:
    if base.unitaries is None:
        raise MissingUnitaries("equicontinuity needs the action unitaries")
    group = group or base.group
    tol = base.tolerance.threshold()
    rep = Report()
    D = base.D
    table, worst_bound, wit = {}, 0.0, None
    for i, a in enumerate(base.algebra_basis):
        na, nda = op_norm(a), op_norm(commutator(D, a))
        sup = 0.0
        for g, u in base.unitaries.items():
            lhs = op_norm(commutator(D, u @ a @ u.adjoint()))
            sup = max(sup, lhs)
            bound = 2 * op_norm(commutator(D, u)) * na + nda
            if lhs - bound > worst_bound:
                worst_bound, wit = lhs - bound, {"basis": i, "g": g}
        table[i] = {"sup": sup, "norm_commutator": nda}
    rep.add("equicontinuity table", "equicontinuous action: sup_g ||[D, alpha_g(a)]|| finite", True,
            report_only=True, detail={"per_basis": table})
    smooth = 0.0
    for g, u in base.unitaries.items():
        for a in base.algebra_basis:
            smooth = max(smooth, span_coordinates(base.algebra_basis, u @ a @ u.adjoint())[1])
    rep.residual_check("smooth action", "alpha_g preserves the smooth subalgebra", smooth, tol)
    rep.residual_check("commutator bound", "||[D, alpha_g(a)]|| <= 2 ||[D, u_g]|| ||a|| + ||[D, a]||",
                       max(worst_bound, 0.0), max(tol, 1e-9), wit)
    return rep


def intertwiner_U(c: CrossedTriple) -> ComplexOperator:
    """U(xi (x) d_g) = u_g xi (x) d_g, extended diagonally over C^2."""
    if c.base.unitaries is None:
        raise MissingUnitaries("the intertwiner needs group unitaries")
    G = c.group
    m = None
    for g in G.elements:
        blk = sp.kron(c.u(g).matrix, _unit(c.nG, G.index(g), G.index(g)), format="csr")
        m = blk if m is None else m + blk
    return c.lift(ComplexOperator(m, c.core_space))


def intertwiner_residuals(c: CrossedTriple, margin: int = 4, g_max: int = 2) -> Report:
    tol = c.tolerance.threshold()
    U = intertwiner_U(c).matrix
    Ud = U.conj().T
    mask = c.interior_mask(margin)
    rep = Report()
    worst = 0.0
    for a in c.base.algebra_basis:
        lhs = U @ c.lift(c.core_pi1(a)).matrix @ Ud
        worst = max(worst, masked_residual(lhs - c.lift(c.core_pi2(a)).matrix, mask))
    rep.residual_check("U pi1 U* = pi2", "unitary equivalence of the two covariant representations", worst, tol)
    worst = 0.0
    G = c.group
    for h in G.elements:
        if not G.is_finite and G.word_length(h) > g_max:
            continue
        lhs = U @ c.lift(c.core_lambda(h)).matrix @ Ud
        worst = max(worst, masked_residual(lhs - c.lift(c.core_gamma(h)).matrix, mask))
    rep.residual_check("U lambda U* = Gamma", "unitary equivalence of the two covariant representations", worst, tol)
    Dh = c.D_hat.matrix
    r = masked_residual(U @ Dh @ Ud - Dh, mask)
    invariant = max(masked_residual(commutator(c.base.D, u).matrix, None) for u in c.base.unitaries.values()) <= tol
    if invariant:
        rep.residual_check("U D_hat U* = D_hat", "unitary equivalence of the two crossed triples", r, tol)
    else:
        rep.add("U D_hat U* = D_hat", "bounded-perturbation equivalent: [D, u_g] != 0", True, residual=r,
                threshold=tol, report_only=True, detail={"note": "base D is not G-invariant; residual reported only"})
    return rep


# ------------------------------------------------- dual (co)action checks

def coaction_unitary(c: CrossedTriple, core: bool = False) -> sp.csr_matrix:
    """U(xi (x) d_x [(x) v] (x) d_g) = xi (x) d_x [(x) v] (x) d_xg on X (x) CG."""
    G = c.group
    if not G.is_finite:
        raise GroupNotFinite("the dual coaction unitary needs a finite group")
    n = G.order
    t = G.table()
    s = 1 if core or c.parity == ODD_FROM_EVEN else 2
    rows, cols = [], []
    for h in range(c.nH):
        for x in range(n):
            for v in range(s):
                base = ((h * n + x) * s + v) * n
                for g in range(n):
                    cols.append(base + g)
                    rows.append(base + t[x, g])
    dim = c.nH * n * s * n
    return sp.csr_matrix((np.ones(len(rows), dtype=complex), (rows, cols)), shape=(dim, dim))


def comodule_map(c: CrossedTriple) -> sp.csr_matrix:
    """Theta(xi (x) d_h [(x) v]) = xi (x) d_h [(x) v] (x) d_h, an isometry Hhat -> Hhat (x) CG."""
    G = c.group
    n = G.order
    s = 2 if c.parity == EVEN_FROM_ODD else 1
    rows, cols = [], []
    for hh in range(c.nH):
        for x in range(n):
            for v in range(s):
                src = (hh * n + x) * s + v
                rows.append(src * n + x)
                cols.append(src)
    return sp.csr_matrix((np.ones(len(rows), dtype=complex), (rows, cols)), shape=(c.space.dim * n, c.space.dim))


def vector_states(n: int) -> list:
    """Basis vectors and their pairwise superpositions (d_k + d_l)/sqrt2, (d_k + i d_l)/sqrt2."""
    out = []
    for k in range(n):
        v = np.zeros(n, dtype=complex)
        v[k] = 1
        out.append(v)
    for k in range(n):
        for l in range(k + 1, n):
            for ph in (1, 1j):
                v = np.zeros(n, dtype=complex)
                v[k], v[l] = 1 / np.sqrt(2), ph / np.sqrt(2)
                out.append(v)
    return out


def slice_state(X: sp.spmatrix, n: int, v: np.ndarray) -> sp.csr_matrix:
    """(id (x) omega_v)(X) for X on Y (x) C^n."""
    X = sp.csr_matrix(X)
    d = X.shape[0] // n
    out = sp.csr_matrix((d, d), dtype=complex)
    R = sp.kron(sp.identity(d, dtype=complex), sp.csr_matrix(v.reshape(-1, 1)), format="csr")
    # (1 (x) v*) X (1 (x) v)
    return R.conj().T @ X @ R + out


def character_phase(G: GroupModel, phi: float):
    """The character g -> exp(i phi g) of Z, or of Z_n when phi is a multiple of 2 pi / n."""
    return lambda g: np.exp(1j * phi * g)


def dual_action_unitary(c: CrossedTriple, chi, core: bool = False) -> sp.csr_matrix:
    """v_chi(xi (x) d_g) = conj(chi(g)) xi (x) d_g [(x) 1]."""
    G = c.group
    ph = np.array([np.conj(chi(g)) for g in G.elements], dtype=complex)
    d = np.kron(np.ones(c.nH), ph)
    if not core and c.parity == EVEN_FROM_ODD:
        d = np.repeat(d, 2)
    return sp.diags(d, format="csr")


def check_dual_symmetry(c: CrossedTriple, form: str = "auto", characters=None, margin: int = 4,
                        g_max: int = 2) -> Report:
    G = c.group
    if form == "auto":
        form = "coaction" if G.is_finite else "dual_action"
    tol = c.tolerance.threshold()
    rep = Report()
    gens = c.generators(g_max)
    if form == "coaction":
        if not G.is_finite:
            raise GroupNotFinite("coaction form needs a finite group")
        n = G.order
        U = coaction_unitary(c)
        Dk = sp.kron(c.D_hat.matrix, sp.identity(n, dtype=complex), format="csr")
        rep.residual_check("coaction commutes with D_hat", "equivariant for the dual coaction: [D_hat (x) 1, U] = 0",
                           masked_residual(Dk @ U - U @ Dk, None), tol)
        Th = comodule_map(c)
        worst, wit = 0.0, None
        for i, g in gens:
            R = c.rep_basis(i, g).matrix
            lhs = Th @ R
            rhs = sp.kron(R, c.lam(g), format="csr") @ Th
            r = masked_residual(lhs - rhs, None)
            if r > worst:
                worst, wit = r, {"a": i, "g": g}
        rep.residual_check("comodule identity", "Theta(b x) = b_(-1) x_(-1) (x) b_(0) x_(0) on basis vectors",
                           worst, tol, wit)
        worst, span_worst, wit = 0.0, 0.0, None
        basis_ops = [c.rep_basis(i, g) for i, g in gens]
        states = vector_states(n)
        for i, g in gens:
            R = c.rep_basis(i, g).matrix
            Rk = sp.kron(R, sp.identity(n, dtype=complex), format="csr")
            ad = U @ Rk @ U.conj().T
            worst = max(worst, masked_residual(ad - sp.kron(R, c.lam(g), format="csr"), None))
            for v in states:
                s = ComplexOperator(slice_state(ad, n, v), c.space)
                _, r = span_coordinates(basis_ops, s)
                if r > span_worst:
                    span_worst, wit = r, {"a": i, "g": g}
        rep.residual_check("dual coaction on the algebra", "Ad_U(b (x) 1) = b (x) lambda_g", worst, tol)
        rep.residual_check("slices stay in the algebra", "(id (x) phi) Ad_U(b) lies in the represented algebra",
                           span_worst, max(tol, 1e-9), wit)
        return rep
    if form != "dual_action":
        raise ValueError(f"unknown form {form!r}")
    if not G.abelian:
        raise GroupNotAbelian("dual action needs an abelian group")
    characters = characters if characters is not None else default_characters(G)
    mask = c.interior_mask(margin)
    Dh = c.D_hat.matrix
    wD, wR, wit = 0.0, 0.0, None
    for name, chi in characters:
        V = dual_action_unitary(c, chi)
        wD = max(wD, masked_residual(V @ Dh - Dh @ V, mask))
        for i, g in gens:
            R = c.rep_basis(i, g).matrix
            r = masked_residual(V @ R @ V.conj().T - np.conj(chi(g)) * R, mask)
            if r > wR:
                wR, wit = r, {"character": name, "a": i, "g": g}
    rep.residual_check("dual action commutes with D_hat", "invariant under v_chi: [V_chi, D_hat] = 0", wD, tol)
    rep.residual_check("dual action on the algebra", "V_chi rep(a d_g) V_chi* = conj(chi(g)) rep(a d_g)", wR, tol, wit)
    return rep


def default_characters(G: GroupModel) -> list:
    """Sampled characters: e^{i phi g} on windowed Z, the characters of Z_n for cyclic tables."""
    if not G.is_finite:
        return [(f"phi={phi:g}", character_phase(G, phi)) for phi in (0.0, np.pi / 2, 1.0)]
    n = G.order
    if not G.abelian:
        raise GroupNotAbelian("characters need an abelian group")
    # cyclic groups built by ``cyclic`` have element k = k mod n
    t = G.table()
    if all(t[i, j] == (i + j) % n for i in range(n) for j in range(n)):
        return [(f"k={k}", (lambda k: lambda g: np.exp(2j * np.pi * k * g / n))(k)) for k in range(n)]
    raise GroupNotAbelian("pass characters explicitly for non-cyclic abelian groups")
