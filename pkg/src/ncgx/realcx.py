"""Real structures on the crossed triple.

Two variants are built from an auxiliary antilinear map j on H (x) l^2(G):

* ``hat``   j(xi (x) d_g) = u_g* J xi (x) d_g^-1   (needs J u_g J^-1 = u_g, weight a homomorphism)
* ``tilde`` j(xi (x) d_g) = u_g J xi (x) d_g       (needs J u_g J^-1 = u_g*, abelian group)

and then assembled per base KO row.  Antilinear 2x2 factors such as
``cc o sigma_2`` are stored as the matrix M with v -> M conj(v), so
cc o sigma_k has matrix conj(sigma_k).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .crossed import (EVEN_FROM_ODD, ODD_FROM_EVEN, PI2_GAMMA, CrossedTriple, _unit, coaction_unitary,
                      default_characters, dual_action_unitary)
from .errors import (AmbiguousBaseKO, GroupNotAbelian, GroupNotFinite, HypothesisNotMet, KOShiftMismatch, MissingJ,
                     MissingUnitaries, TableRowMismatch, WrongStarConvention)
from .groups import classify_weight, inversion_matrix
from .opalg import (SIGMA_1, SIGMA_2, SIGMA_3, ComplexOperator, commutator, masked_residual, op_norm,
                    relation_residual)
from .report import Report
from .triples import SignTriple, check_order_condition, classify_real_structure, order_residuals

HAT = "hat"
TILDE = "tilde"

# 2x2 antilinear factor per base KO (odd base): matrix M of v -> M conj(v)
_HAT_ODD = {3: np.eye(2), 7: np.eye(2), 1: np.conj(SIGMA_2), 5: np.conj(SIGMA_2)}
_TILDE_ODD = {3: np.conj(SIGMA_1), 7: np.conj(SIGMA_1), 1: np.conj(SIGMA_3), 5: np.conj(SIGMA_3)}
# even base: whether the grading multiplies j
_HAT_EVEN_CHI = {0: True, 4: True, 2: False, 6: False}
_TILDE_EVEN_CHI = {0: False, 4: False, 2: True, 6: True}

ROW_NAMES = {
    (HAT, 3): "j (x) cc", (HAT, 7): "j (x) cc", (HAT, 1): "j (x) cc.sigma_2", (HAT, 5): "j (x) cc.sigma_2",
    (HAT, 0): "(chi (x) 1) j", (HAT, 4): "(chi (x) 1) j", (HAT, 2): "j", (HAT, 6): "j",
    (TILDE, 3): "j (x) cc.sigma_1", (TILDE, 7): "j (x) cc.sigma_1", (TILDE, 1): "j (x) cc.sigma_3",
    (TILDE, 5): "j (x) cc.sigma_3", (TILDE, 0): "j", (TILDE, 4): "j", (TILDE, 2): "(chi (x) 1) j",
    (TILDE, 6): "(chi (x) 1) j",
}


def antilinear_factor(variant: str, base_ko: int) -> ComplexOperator:
    """The C^2 factor of the odd-base rows as an antilinear operator."""
    table = _HAT_ODD if variant == HAT else _TILDE_ODD
    return ComplexOperator(table[base_ko], antilinear=True)


@dataclass(frozen=True, eq=False)
class RealCrossedStructure:
    crossed: CrossedTriple
    variant: str
    base_ko: int
    base_signs: SignTriple
    j: ComplexOperator
    J_out: ComplexOperator
    predicted_ko: int
    measured: SignTriple | None
    row: str

    @property
    def base_J(self) -> ComplexOperator:
        return self.crossed.base.J

    def as_triple(self, g_max: int = 2):
        return self.crossed.as_triple(self.J_out, g_max)


def _star_check(c: CrossedTriple, variant: str):
    base = c.base
    if base.J is None:
        raise MissingJ("base triple has no real structure")
    if base.unitaries is None:
        raise MissingUnitaries("base triple carries no group unitaries")
    tol = base.tolerance.threshold()
    Jinv = base.J.inverse()
    for g, u in base.unitaries.items():
        target = u if variant == HAT else u.adjoint()
        r = relation_residual(base.J @ u @ Jinv, target)
        if r > tol:
            conv = "J u_g J^-1 = u_g" if variant == HAT else "J u_g J^-1 = u_g*"
            raise WrongStarConvention(f"{variant} needs {conv}; fails at g = {g} (residual {r:.2e})")


def build_aux_j(c: CrossedTriple, variant: str) -> ComplexOperator:
    """Antilinear j on H (x) l^2(G) as the block matrix of v -> M conj(v)."""
    if variant not in (HAT, TILDE):
        raise ValueError(f"unknown variant {variant!r}")
    _star_check(c, variant)
    G = c.group
    MJ = c.base.J.matrix
    m = None
    for g in G.elements:
        u = c.u(g).matrix
        if variant == HAT:
            blk = sp.kron(u.conj().T @ MJ, _unit(c.nG, G.index(G.inv(g)), G.index(g)), format="csr")
        else:
            blk = sp.kron(u @ MJ, _unit(c.nG, G.index(g), G.index(g)), format="csr")
        m = blk if m is None else m + blk
    return ComplexOperator(m, c.core_space, antilinear=True)


def _check_hypotheses(c: CrossedTriple, variant: str):
    if variant == HAT:
        if not classify_weight(c.weight).flags["homomorphism"]:
            raise HypothesisNotMet("the hat real structure needs a homomorphism weight", "homomorphism")
    elif not c.group.abelian:
        raise GroupNotAbelian("the tilde real structure needs an abelian group")


def assemble_real_structure(c: CrossedTriple, variant: str, margin: int | None = None, g_max: int = 2,
                            verify: bool = True) -> RealCrossedStructure:
    """Assemble J_out from the base KO row, then measure its signs independently on the crossed triple."""
    if c.representation != PI2_GAMMA:
        raise TableRowMismatch("real structures are assembled on the pi2-gamma representation")
    _check_hypotheses(c, variant)
    base = c.base
    if base.J is None:
        raise MissingJ("base triple has no real structure")
    bw = base.interior(min(2, base.hilbert_group.N)) if base.interior(0) is not None else None
    signs = classify_real_structure(base, bw)
    if signs.ko is None or 0 in signs.signs:
        raise AmbiguousBaseKO(f"base signs {signs.signs} do not determine a KO dimension")
    n = signs.ko
    if (n % 2 == 1) != (c.parity == EVEN_FROM_ODD):
        raise TableRowMismatch(f"base KO {n} does not match crossed parity {c.parity}")
    j = build_aux_j(c, variant)
    if c.parity == EVEN_FROM_ODD:
        J_out = ComplexOperator(sp.kron(j.matrix, sp.csr_matrix(antilinear_factor(variant, n).matrix), format="csr"),
                                c.space, antilinear=True)
    else:
        use_chi = (_HAT_EVEN_CHI if variant == HAT else _TILDE_EVEN_CHI)[n]
        if use_chi:
            chi = sp.kron(base.grading.matrix, sp.identity(c.nG, dtype=complex), format="csr")
            J_out = ComplexOperator(chi @ j.matrix, c.space, antilinear=True)
        else:
            J_out = ComplexOperator(j.matrix, c.space, antilinear=True)
    predicted = (n + 1) % 8 if variant == HAT else (n - 1) % 8
    r = RealCrossedStructure(c, variant, n, signs, j, J_out, predicted, None, ROW_NAMES[variant, n])
    if not verify:
        return r
    margin = 2 * g_max + 2 if margin is None else margin
    measured = measure_signs(r, margin, g_max)
    if measured.ko != predicted:
        raise KOShiftMismatch(f"predicted KO {predicted}, measured {sorted(measured.ko_dims)} "
                              f"(signs {measured.signs})")
    return RealCrossedStructure(c, variant, n, signs, j, J_out, predicted, measured, r.row)


def _window(c: CrossedTriple, margin: int):
    return c.interior(_clip_margin(c, margin))


def _clip_margin(c: CrossedTriple, margin: int) -> int:
    caps = []
    for G in (c.group, c.base.hilbert_group):
        if G is not None and not G.is_finite:
            caps.append(G.N)
    return min([margin] + caps)


def measure_signs(r: RealCrossedStructure, margin: int = 6, g_max: int = 2) -> SignTriple:
    c = r.crossed
    return classify_real_structure(r.as_triple(g_max), _window(c, margin))


# ---------------------------------------------------------------- lemmas

def check_aux_j_lemma(r: RealCrossedStructure, margin: int = 6, g_max: int = 2) -> Report:
    """The auxiliary map j: isometric, j^2 = eps, maps the algebra into its commutant,
    commutes up to eps' with D (x) 1 and anticommutes with the weight part."""
    c = r.crossed
    tol = c.tolerance.threshold()
    mask = c.interior_mask(_clip_margin(c, margin), core=True)
    j = r.j
    jm = j.matrix
    rep = Report()
    anchor = "auxiliary map j sends the crossed product into its commutant"
    rep.residual_check("j isometric", anchor, masked_residual((jm.conj().T @ jm) - sp.identity(jm.shape[0]), None), tol)
    eps = r.base_signs.eps
    rep.residual_check("j^2 = eps", anchor, masked_residual((j @ j).matrix - eps * sp.identity(jm.shape[0]), mask),
                       tol, detail={"eps": eps})
    jinv = j.inverse()
    gens = c.generators(g_max)
    conj = [(j @ c.core_rep_basis(i, g) @ jinv).matrix for i, g in gens]
    worst, wit = 0.0, None
    for p, (i, g) in enumerate(gens):
        am = c.core_rep_basis(i, g).matrix
        for q, y in enumerate(conj):
            res = masked_residual(am @ y - y @ am, mask)
            if res > worst:
                worst, wit = res, {"a": gens[p], "b": gens[q]}
    rep.residual_check("j zeroth order", anchor, worst, tol, wit)
    Dc = c.core_D()
    ep = r.base_signs.eps_prime
    rep.residual_check("(D (x) 1) j = eps' j (D (x) 1)", anchor,
                       masked_residual((Dc @ j).matrix - ep * (j @ Dc).matrix, mask), tol, detail={"eps_prime": ep})
    Ml = c.core_Ml()
    if r.variant == HAT:
        rep.residual_check("(1 (x) M_l) j = -j (1 (x) M_l)", anchor,
                           masked_residual((Ml @ j).matrix + (j @ Ml).matrix, mask), tol)
    else:
        iM = 1j * Ml
        rep.residual_check("(i (x) M_l) j = -j (i (x) M_l)", anchor,
                           masked_residual((iM @ j).matrix + (j @ iM).matrix, mask), tol)
    return rep


# ------------------------------------------------------ order conditions

def check_crossed_order_conditions(r: RealCrossedStructure, order: int, g_max: int = 2,
                                   margin: int | None = None) -> Report:
    c = r.crossed
    if order not in (0, 1, 2):
        raise ValueError("order must be 0, 1 or 2")
    flags = classify_weight(c.weight).flags
    if order >= 1:
        if r.variant == HAT and not flags["homomorphism"]:
            raise HypothesisNotMet("order conditions for the hat structure need a homomorphism weight", "homomorphism")
        if r.variant == TILDE and not flags["first_order"]:
            raise HypothesisNotMet("order conditions for the tilde structure need a first-order weight", "first_order")
    if order == 2:
        base = c.base
        bw = base.interior(min(4, base.hilbert_group.N)) if base.interior(0) is not None else None
        if not check_order_condition(base, 1, bw).passed:
            raise HypothesisNotMet("second order condition needs the base to satisfy the first order condition",
                                   "base first order")
    margin = 2 * g_max + 2 if margin is None else margin
    tol = c.tolerance.threshold()
    gens = c.generators(g_max)
    ops = [c.rep_basis(i, g) for i, g in gens]
    worst, failing = order_residuals(ops, c.D_hat, r.J_out, order, c.interior_mask(_clip_margin(c, margin)), tol)
    wit = None
    if failing:
        p, q, res = failing[0]
        wit = {"a": gens[p], "b": gens[q], "residual": res}
    anchors = {0: "crossed real structure satisfies the zeroth order condition",
               1: "crossed real structure satisfies the first order condition",
               2: "crossed real structure satisfies the second order condition"}
    rep = Report()
    rep.residual_check(f"crossed order {order}", anchors[order], worst, tol, wit,
                       detail={"generators": len(gens), "margin": margin})
    return rep


# ------------------------------------------------- (co)action symmetry of J

def _star_on_group(G) -> sp.csr_matrix:
    """* on CG: d_g -> d_g^-1, antilinear (matrix of the permutation)."""
    return inversion_matrix(G)


def check_J_coaction_equivariance(r: RealCrossedStructure, characters=None, margin: int = 6) -> Report:
    """Hat: (J (x) *) U = U (J (x) 1) on H (x) l^2(G) (x) 1 (finite groups).
    Tilde: j v_chi = v_chi* j on sampled characters (abelian groups)."""
    c = r.crossed
    G = c.group
    tol = c.tolerance.threshold()
    rep = Report()
    if r.variant == HAT:
        if not G.is_finite:
            raise GroupNotFinite("coaction equivariance needs a finite group; use check_J_dual_action")
        n = G.order
        star = _star_on_group(G)
        e_cols = np.zeros(n, dtype=bool)
        e_cols[G.index(G.identity)] = True
        for name, J, core in (("j", r.j, True), ("J_out", r.J_out, False)):
            U = coaction_unitary(c, core=core)
            lhs = sp.kron(J.matrix, star, format="csr") @ U.conj()
            rhs = U @ sp.kron(J.matrix, sp.identity(n, dtype=complex), format="csr")
            # antilinear on both sides: (A conj)(U v) = A conj(U) conj(v); compare matrices on e-columns
            cols = np.tile(e_cols, J.dim)
            diff = (lhs - rhs)[:, np.flatnonzero(cols)]
            res = float(np.abs(diff.toarray()).max()) if diff.nnz else 0.0
            rep.residual_check(f"{name} coaction equivariant", "equivariant for the dual coaction: (J (x) *) U = U (J (x) 1)",
                               res, tol)
        return rep
    return check_J_dual_action(r, characters, margin, twisted=True)


def check_J_dual_action(r: RealCrossedStructure, characters=None, margin: int = 6, twisted: bool | None = None) -> Report:
    """j v_chi = v_chi j (hat, untwisted) or j v_chi = v_chi* j (tilde, twisted), and the same for J_out."""
    c = r.crossed
    if not c.group.abelian:
        raise GroupNotAbelian("dual action needs an abelian group")
    twisted = (r.variant == TILDE) if twisted is None else twisted
    characters = characters if characters is not None else default_characters(c.group)
    tol = c.tolerance.threshold()
    rep = Report()
    rel = "j v_chi = v_chi* j" if twisted else "j v_chi = v_chi j"
    anchor = "twisted invariant under the dual action" if twisted else "invariant under the dual action"
    for name, J, core in (("j", r.j, True), ("J_out", r.J_out, False)):
        mask = c.interior_mask(_clip_margin(c, margin), core=core)
        worst, wit = 0.0, None
        for cname, chi in characters:
            V = ComplexOperator(dual_action_unitary(c, chi, core=core), J.space)
            rhs = (V.adjoint() if twisted else V) @ J
            res = masked_residual((J @ V).matrix - rhs.matrix, mask)
            if res > worst:
                worst, wit = res, {"character": cname}
        rep.residual_check(f"{name}: {rel}", anchor, worst, tol, wit)
    return rep


# --------------------------------------------------------------- necessity

def necessity_bound(D: ComplexOperator, J: ComplexOperator, u: ComplexOperator, eps_prime: int):
    """||[D, u]|| <= ||DJ - eps' JD|| + ||D u J - eps' u J D||.

    [D, u] J = (D u J - eps' u J D) - u (D J - eps' J D), with u and J isometric, so
    both real-structure relations holding forces [D, u] = 0.
    """
    r1 = op_norm((D @ J - eps_prime * (J @ D)).matrix.toarray())
    r2 = op_norm((D @ u @ J - eps_prime * (u @ J @ D)).matrix.toarray())
    lhs = op_norm(commutator(D, u))
    return lhs, r1 + r2


def check_reduced_order_conditions(r: RealCrossedStructure, order: int, sign: int = 1, g_max: int = 2,
                                   margin: int | None = None) -> Report:
    """Order conditions for the scalar reduction D (x) 1 + sign i (1 (x) M_l) with j on H (x) l^2(G).

    This is the form in which the crossed order conditions reduce to the base ones
    term by term; on the graded operator D_hat with J_out the mixed terms produce
    anticommutators instead (see :func:`check_crossed_order_conditions`).
    """
    c = r.crossed
    if c.parity != EVEN_FROM_ODD:
        raise TableRowMismatch("the scalar reduction only applies to crossed triples with a C^2 factor")
    margin = 2 * g_max + 2 if margin is None else margin
    tol = c.tolerance.threshold()
    gens = c.generators(g_max)
    ops = [c.core_rep_basis(i, g) for i, g in gens]
    Dred = c.core_D() + (sign * 1j) * c.core_Ml()
    mask = c.interior_mask(_clip_margin(c, margin), core=True)
    worst, failing = order_residuals(ops, Dred, r.j, order, mask, tol)
    wit = None
    if failing:
        p, q, res = failing[0]
        wit = {"a": gens[p], "b": gens[q], "residual": res}
    rep = Report()
    rep.residual_check(f"reduced order {order}", "order conditions for D (x) 1 +- i (x) M_l with the auxiliary j",
                       worst, tol, wit)
    return rep
