"""Spectral triple data, axiom checks, real structures and order conditions."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Mapping

import numpy as np
import scipy.sparse as sp

from .errors import (GroupNotFinite, MissingJ, MissingUnitaries, NoRealStructure, NonConvergence,
                     ZerothOrderViolation)
from .groups import (GroupHopfData, GroupModel, Weight, WindowedZ, build_group_operators,
                     interior_projection)
from .opalg import (ComplexOperator, HilbertSpace, Tolerance, commutator, identity, masked_residual,
                    op_norm, relation_residual, span_coordinates, window_mask)
from .report import Report

# KO-dimension -> (eps, eps', eps''); eps'' is None in odd dimensions
KO_TABLE = {
    0: (1, 1, 1),
    1: (1, -1, None),
    2: (-1, 1, -1),
    3: (-1, 1, None),
    4: (-1, 1, 1),
    5: (-1, -1, None),
    6: (1, 1, -1),
    7: (1, 1, None),
}

UNDETERMINED = 0


@dataclass(frozen=True, eq=False)
class SpectralTripleData:
    """A represented algebra (given by a basis of operators) with Dirac operator and optional extras.

    ``hilbert_group`` is set when H = l^2(hilbert_group); for a windowed group
    the algebra basis is a finite piece of an infinite algebra (``truncated``),
    and identities are asserted on :meth:`interior` windows only.
    """

    space: HilbertSpace
    algebra_basis: tuple
    D: ComplexOperator
    grading: ComplexOperator | None = None
    J: ComplexOperator | None = None
    unitaries: Mapping | None = None
    group: GroupModel | None = None
    weight: Weight | None = None
    hilbert_group: GroupModel | None = None
    truncated: bool = False
    tolerance: Tolerance = Tolerance()

    def __post_init__(self):
        object.__setattr__(self, "algebra_basis", tuple(self.algebra_basis))
        ops = list(self.algebra_basis) + [self.D]
        ops += [x for x in (self.grading,) if x is not None]
        for op in ops:
            if op.dim != self.space.dim or op.antilinear:
                raise ValueError("algebra, D and grading must be linear operators on the triple's space")
        if self.J is not None and (self.J.dim != self.space.dim or not self.J.antilinear):
            raise ValueError("J must be an antilinear operator on the triple's space")
        if self.unitaries is not None:
            if self.group is None:
                raise ValueError("unitaries need the acting group")
            object.__setattr__(self, "unitaries", dict(self.unitaries))

    @property
    def even(self) -> bool:
        return self.grading is not None

    def interior(self, margin: int = 0) -> ComplexOperator | None:
        if self.hilbert_group is None or self.hilbert_group.is_finite:
            return None
        return interior_projection(self.hilbert_group, margin).with_space(self.space)

    def replace(self, **changes) -> "SpectralTripleData":
        return dataclasses.replace(self, **changes)

    def u(self, g) -> ComplexOperator:
        if self.unitaries is None:
            raise MissingUnitaries("triple carries no group unitaries")
        return self.unitaries[g]


def group_triple(G: GroupModel, w: Weight, radius: int | None = None, real: bool = True) -> SpectralTripleData:
    """(CG, l^2(G), M_l) with J = J_G; on windowed Z the algebra basis is lambda_g, |g| <= radius."""
    ops = build_group_operators(G, w)
    if G.is_finite:
        elems = list(G.elements)
    else:
        radius = min(2, G.N) if radius is None else radius
        elems = [g for g in G.elements if abs(g) <= radius]
    basis = tuple(ops.lambda_[g] for g in elems)
    return SpectralTripleData(G.space(), basis, ops.M_l, J=ops.J_G if real else None, weight=w,
                              hilbert_group=G, truncated=not G.is_finite)


def basis_labels(t: SpectralTripleData) -> list:
    """Group elements labelling the basis of a group triple, else plain indices."""
    G = t.hilbert_group
    if G is not None and t.weight is not None:
        if G.is_finite:
            return list(G.elements)
        r = (len(t.algebra_basis) - 1) // 2
        return list(range(-r, r + 1))
    return list(range(len(t.algebra_basis)))


# ---------------------------------------------------------------- axioms

def verify_axioms(t: SpectralTripleData, window: ComplexOperator | None = None) -> Report:
    tol = t.tolerance.threshold()
    rep = Report()
    D = t.D
    rep.residual_check("D self-adjoint", "Dirac operator is self-adjoint", relation_residual(D, D.adjoint(), window), tol)
    if t.grading is not None:
        chi = t.grading
        one = identity(t.space)
        rep.residual_check("grading self-adjoint", "grading operator", relation_residual(chi, chi.adjoint(), window), tol)
        rep.residual_check("grading involution", "grading operator", relation_residual(chi @ chi, one, window), tol)
        rep.residual_check("grading anticommutes with D", "grading operator",
                           commutator(chi, D, anti=True).max_abs() if window is None else
                           relation_residual(chi @ D, -(D @ chi), window), tol)
        worst, wit = 0.0, None
        for i, a in enumerate(t.algebra_basis):
            r = relation_residual(chi @ a, a @ chi, window)
            if r > worst:
                worst, wit = r, {"basis": i}
        rep.residual_check("grading commutes with algebra", "grading operator", worst, tol, wit)

    # *-closure and unit
    basis = t.algebra_basis
    _, r_unit = span_coordinates(basis, identity(t.space))
    rep.residual_check("unit in algebra", "unital represented algebra", r_unit, tol)
    worst, wit = 0.0, None
    for i, a in enumerate(basis):
        _, r = span_coordinates(basis, a.adjoint())
        if r > worst:
            worst, wit = r, {"basis": i}
    rep.residual_check("star closure", "represented algebra is a *-algebra", worst, tol, wit)
    if t.truncated:
        rep.add("product closure", "represented algebra is a *-algebra", True, report_only=True,
                detail={"note": "basis is a window of an infinite-dimensional algebra; products leave it"})
    else:
        worst, wit = 0.0, None
        for i, a in enumerate(basis):
            for j, b in enumerate(basis):
                _, r = span_coordinates(basis, a @ b)
                if r > worst:
                    worst, wit = r, {"pair": [i, j]}
        rep.residual_check("product closure", "represented algebra is a *-algebra", worst, tol, wit)
    if t.J is not None:
        m = t.J.matrix
        r = masked_residual(m.conj().T @ m - sp.identity(t.space.dim), None)
        rep.residual_check("J isometric", "real structure is an antilinear isometry", r, tol)
    note = {"note": "finite-scale: trivially satisfied"}
    rep.add("bounded commutators", "commutators with D extend to bounded operators", True, report_only=True, detail=note)
    rep.add("compact resolvent", "D has compact resolvent", True, report_only=True, detail=note)
    return rep


# ---------------------------------------------------------- real structure

@dataclass(frozen=True)
class SignTriple:
    """Signs of a real structure; 0 marks an undetermined sign, ``eps_dprime`` is None without grading."""

    eps: int
    eps_prime: int
    eps_dprime: int | None
    ko_dims: frozenset
    residuals: dict = dataclasses.field(default_factory=dict, compare=False)

    @property
    def ko(self) -> int | None:
        return next(iter(self.ko_dims)) if len(self.ko_dims) == 1 else None

    @property
    def signs(self) -> tuple:
        return (self.eps, self.eps_prime, self.eps_dprime)


def ko_dims_for(eps: int, eps_prime: int, eps_dprime: int | None, graded: bool) -> frozenset:
    out = set()
    for n, row in KO_TABLE.items():
        if (n % 2 == 0) != graded:
            continue
        if eps and row[0] != eps:
            continue
        if eps_prime and row[1] != eps_prime:
            continue
        if graded and eps_dprime and row[2] != eps_dprime:
            continue
        out.add(n)
    return frozenset(out)


def _pick_sign(name, r_plus, r_minus, tol):
    ok_p, ok_m = r_plus <= tol, r_minus <= tol
    if ok_p and ok_m:
        return UNDETERMINED
    if ok_p:
        return 1
    if ok_m:
        return -1
    raise NoRealStructure(f"{name}: neither sign holds (residuals {r_plus:.3e}, {r_minus:.3e})")


def classify_real_structure(t: SpectralTripleData, window: ComplexOperator | None = None,
                            check_zeroth: bool = True) -> SignTriple:
    if t.J is None:
        raise MissingJ("triple has no real structure")
    tol = t.tolerance.threshold()
    J, D = t.J, t.D
    one = identity(t.space)
    J2 = J @ J
    res = {"eps+": relation_residual(J2, one, window), "eps-": relation_residual(J2, -one, window)}
    eps = _pick_sign("J^2 = eps", res["eps+"], res["eps-"], tol)
    DJ, JD = D @ J, J @ D
    res["eps'+"] = relation_residual(DJ, JD, window)
    res["eps'-"] = relation_residual(DJ, -JD, window)
    eps_p = _pick_sign("DJ = eps' JD", res["eps'+"], res["eps'-"], tol)
    eps_pp = None
    if t.grading is not None:
        Jc, cJ = J @ t.grading, t.grading @ J
        res["eps''+"] = relation_residual(Jc, cJ, window)
        res["eps''-"] = relation_residual(Jc, -cJ, window)
        eps_pp = _pick_sign("J chi = eps'' chi J", res["eps''+"], res["eps''-"], tol)
    if check_zeroth:
        r, pair = _zeroth_order(t, window)
        res["zeroth order"] = r
        if r > tol:
            raise ZerothOrderViolation(f"[a, J b J^-1] != 0 for basis pair {pair}", pair, r)
    return SignTriple(eps, eps_p, eps_pp, ko_dims_for(eps, eps_p, eps_pp, t.grading is not None), res)


def _zeroth_order(t, window):
    mask = window_mask(window)
    Jinv = t.J.inverse()
    conj = [(t.J @ b @ Jinv).matrix for b in t.algebra_basis]
    worst, pair = 0.0, None
    for i, a in enumerate(t.algebra_basis):
        am = a.matrix
        for j, c in enumerate(conj):
            r = masked_residual(am @ c - c @ am, mask)
            if r > worst:
                worst, pair = r, (i, j)
    return worst, pair


def alternate_real_structure(t: SpectralTripleData) -> SpectralTripleData:
    """Replace J by J' = J chi on an even triple; signs become (eps eps'', -eps', eps'')."""
    if t.J is None or t.grading is None:
        raise MissingJ("alternate real structure needs J and a grading")
    return t.replace(J=t.J @ t.grading)


def order_residuals(ops, D, J, order: int, mask=None, tol=0.0, max_witnesses=10):
    """Max double-commutator residual over all pairs of ``ops`` (list of ComplexOperators).

    order 0: [a, J b J^-1]; order 1: [[D, a], J b J^-1]; order 2: [[D, a], J [D, b] J^-1].
    Returns (max residual, list of failing (i, j, residual)).
    """
    Jinv = J.inverse()
    Dm = D.matrix
    left, right = [], []
    for a in ops:
        am = a.matrix
        da = Dm @ am - am @ Dm
        left.append(am if order == 0 else da)
        inner = a if order < 2 else ComplexOperator(da, a.space)
        right.append((J @ inner @ Jinv).matrix)
    worst, failing = 0.0, []
    for i, x in enumerate(left):
        for j, y in enumerate(right):
            r = masked_residual(x @ y - y @ x, mask)
            worst = max(worst, r)
            if r > tol and len(failing) < max_witnesses:
                failing.append((i, j, r))
    return worst, failing


ORDER_ANCHORS = {
    0: "zeroth order condition [a, J b J^-1] = 0",
    1: "first order condition [[D, a], J b J^-1] = 0",
    2: "second order condition [[D, a], J [D, b] J^-1] = 0",
}


def check_order_condition(t: SpectralTripleData, order: int, window: ComplexOperator | None = None) -> Report:
    if t.J is None:
        raise MissingJ("order conditions need a real structure")
    if order not in (0, 1, 2):
        raise ValueError("order must be 0, 1 or 2")
    tol = t.tolerance.threshold()
    worst, failing = order_residuals(t.algebra_basis, t.D, t.J, order, window_mask(window), tol)
    labels = basis_labels(t)
    witness = None
    if failing:
        i, j, r = failing[0]
        witness = {"a": labels[i], "b": labels[j], "residual": r}
    rep = Report()
    rep.residual_check(f"order {order}", ORDER_ANCHORS[order], worst, tol, witness,
                       detail={"failing_pairs": [(labels[i], labels[j]) for i, j, _ in failing]})
    return rep


# ------------------------------------------------- nondegeneracy, irreducible

def _require_finite(t: SpectralTripleData):
    if t.truncated or (t.hilbert_group is not None and not t.hilbert_group.is_finite):
        raise GroupNotFinite("check only meaningful on finite (non-windowed) fixtures")


def _nullity(columns, tol):
    a = np.column_stack(columns)
    s = np.linalg.svd(a, compute_uv=False)
    scale = max(1.0, s[0] if len(s) else 1.0)
    rank = int(np.sum(s > tol * scale))
    return a.shape[1] - rank, s


def check_nondegenerate(t: SpectralTripleData) -> Report:
    _require_finite(t)
    tol = max(t.tolerance.threshold(), 1e-12)
    rep = Report()
    vecs = [a.dense().ravel() for a in t.algebra_basis]
    null, s = _nullity(vecs, tol)
    rep.add("faithful", "represented algebra basis is linearly independent", null == 0,
            residual=float(s[-1]), threshold=tol, witness=None if null == 0 else {"kernel_dim": null})
    Dm = t.D.dense()
    comm = [(Dm @ a.dense() - a.dense() @ Dm).ravel() for a in t.algebra_basis]
    null, _ = _nullity(comm, tol)
    rep.add("commutant of D in algebra is scalar", "non-degenerate: [D, a] = 0 only for scalars", null == 1,
            witness=None if null == 1 else {"solution_dim": null})
    return rep


def commutant_dimension(ops, tol=1e-10) -> int:
    """dim {X : XT = TX for all T in ops}."""
    d = ops[0].dim
    gram = np.zeros((d * d, d * d), dtype=complex)
    eye = sp.identity(d, dtype=complex, format="csr")
    for op in ops:
        T = op.matrix
        # row-major vec: vec(XT) = (1 kron T^T) vec X, vec(TX) = (T kron 1) vec X
        M = sp.kron(eye, T.T) - sp.kron(T, eye)
        gram += (M.conj().T @ M).toarray()
    w = np.linalg.eigvalsh(gram)
    scale = max(1.0, abs(w).max())
    return int(np.sum(w <= tol * scale))


def check_irreducible(t: SpectralTripleData) -> Report:
    _require_finite(t)
    dim = commutant_dimension(list(t.algebra_basis) + [t.D])
    rep = Report()
    rep.add("irreducible", "joint commutant of algebra and D is trivial", dim == 1,
            witness=None if dim == 1 else {"commutant_dim": dim})
    return rep


# -------------------------------------------------------------- equivariance

def _sort_key(G, g):
    if isinstance(G, WindowedZ):
        return (abs(g), g < 0)
    return (0 if g == G.identity else 1, G.index(g))


def check_equivariance(t: SpectralTripleData, star: GroupHopfData, window: ComplexOperator | None = None) -> Report:
    if t.unitaries is None:
        raise MissingUnitaries("equivariance needs group unitaries")
    tol = t.tolerance.threshold()
    G = t.group
    elems = sorted(t.unitaries, key=lambda g: _sort_key(G, g))
    rep = Report()
    one = identity(t.space)
    worst, wit = 0.0, None
    for g in elems:
        u = t.unitaries[g]
        r = relation_residual(u.adjoint() @ u, one)
        if r > worst:
            worst, wit = r, {"g": g}
    rep.residual_check("u unitary", "covariant representation: u_g unitary", worst, tol, wit)

    worst, wit = 0.0, None
    for g in elems:
        for h in elems:
            gh = G.mul(g, h)
            if gh is None or gh not in t.unitaries:
                continue
            r = relation_residual(t.unitaries[g] @ t.unitaries[h], t.unitaries[gh], window)
            if r > worst:
                worst, wit = r, {"g": g, "h": h}
    rep.residual_check("u group law", "covariant representation: u_g u_h = u_gh", worst, tol, wit)

    worst, wit = 0.0, None
    for g in elems:
        u = t.unitaries[g]
        for i, a in enumerate(t.algebra_basis):
            _, r = span_coordinates(t.algebra_basis, u @ a @ u.adjoint())
            if r > worst:
                worst, wit = r, {"g": g, "basis": i}
    rep.residual_check("action preserves algebra", "covariance u_g a u_g* = alpha_g(a) in the algebra", worst, tol, wit)

    comm = {}
    for g in elems:
        comm[g] = commutator(t.D, t.unitaries[g])
    mask = window_mask(window)
    inv_res = {g: masked_residual(c.matrix, mask) for g, c in comm.items()}
    invariant = max(inv_res.values()) <= tol
    rep.add("D invariant", "G-invariance [D, u_g] = 0", invariant, residual=max(inv_res.values()), threshold=tol,
            report_only=True, detail={"per_g": {str(g): r for g, r in inv_res.items()}})

    if t.J is not None:
        Jinv = t.J.inverse()
        worst, wit = 0.0, None
        for g in elems:
            u = t.unitaries[g]
            target = u if star.star == "inverse" else u.adjoint()
            r = relation_residual(t.J @ u @ Jinv, target, window)
            if r > tol and wit is None:
                # first failure in order of word length
                wit = {"g": g, "residual": r}
            worst = max(worst, r)
        if star.star == "inverse":
            rep.residual_check("J unitarily invariant", "J u_g J^-1 = u_g (inverse *-structure)", worst, tol, wit)
        else:
            rep.residual_check("J twisted invariant", "J u_g J^-1 = u_g* (identity *-structure)", worst, tol, wit)

    if invariant:
        worst, wit = 0.0, None
        for g in elems:
            u = t.unitaries[g]
            for i, a in enumerate(t.algebra_basis):
                lhs = op_norm(commutator(t.D, u @ a @ u.adjoint()))
                rhs = op_norm(commutator(t.D, a))
                if abs(lhs - rhs) > worst:
                    worst, wit = abs(lhs - rhs), {"g": g, "basis": i}
        rep.residual_check("Lip-isometric action", "||[D, alpha_g(a)]|| = ||[D, a]|| for invariant D",
                           worst, max(tol, 1e-8), wit)
    return rep


# ----------------------------------------------------- spectral functions

def bounded_transform(t: SpectralTripleData) -> ComplexOperator:
    """D (1 + D^2)^-1 through an eigendecomposition."""
    m = t.D.dense()
    try:
        w, v = np.linalg.eigh((m + m.conj().T) / 2)
    except np.linalg.LinAlgError as exc:
        raise NonConvergence(str(exc)) from exc
    return ComplexOperator((v * (w / (1 + w ** 2))) @ v.conj().T, t.space)


def summability_partial_sums(t: SpectralTripleData, p: float, terms: int | None = None) -> list:
    m = t.D.dense()
    w = np.linalg.eigvalsh((m + m.conj().T) / 2)
    w = w[np.argsort(np.abs(w), kind="stable")]
    if terms is not None:
        w = w[:terms]
    return [float(x) for x in np.cumsum((1 + w ** 2) ** (-p / 2))]
