"""Hochschild chains over based algebras, the boundary, and orientation cycles.

A chain of degree n is a sparse map from index tuples to complex coefficients.
With the plain coefficient module a key is ``(m, a1, ..., an)``; with the
``op_pair`` module (coefficients in A (x) A^op) a key is ``(m, p, a1, ..., an)``
where ``m (x) p`` sits in the coefficient slot and ``p`` is the op-slot.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .algebra import AlgebraAction, BasedAlgebra, axpy
from .errors import (AlgebraMismatch, MissingJ, NotGInvariant, NotOrientation, ZeroWeightElement)
from .opalg import ComplexOperator, identity, masked_residual, relation_residual, window_mask

PLAIN = "plain"
OP_PAIR = "op_pair"


@dataclass(frozen=True, eq=False)
class HochschildChain:
    algebra: BasedAlgebra
    degree: int
    module: str = OP_PAIR
    coeffs: Mapping = field(default_factory=dict)

    def __post_init__(self):
        if self.module not in (PLAIN, OP_PAIR):
            raise ValueError("module must be 'plain' or 'op_pair'")
        if self.degree < 0:
            raise ValueError("degree must be nonnegative")
        width = self.degree + (2 if self.module == OP_PAIR else 1)
        clean = {}
        for key, c in self.coeffs.items():
            key = tuple(int(k) for k in key)
            if len(key) != width:
                raise ValueError(f"index tuple {key} does not fit a degree-{self.degree} {self.module} chain")
            if any(k < 0 or k >= self.algebra.dim for k in key):
                raise ValueError(f"index tuple {key} references a missing basis element")
            if c != 0:
                clean[key] = complex(c)
        object.__setattr__(self, "coeffs", clean)

    @property
    def offset(self) -> int:
        """Position of a1 in a key."""
        return 2 if self.module == OP_PAIR else 1

    def _like(self, coeffs, degree=None) -> "HochschildChain":
        return HochschildChain(self.algebra, self.degree if degree is None else degree, self.module, coeffs)

    def _check(self, other):
        if other.algebra is not self.algebra or other.module != self.module or other.degree != self.degree:
            raise AlgebraMismatch("chains live in different chain groups")

    def __add__(self, other):
        self._check(other)
        return self._like(axpy(dict(self.coeffs), other.coeffs))

    def __sub__(self, other):
        self._check(other)
        return self._like(axpy(dict(self.coeffs), other.coeffs, -1.0))

    def __mul__(self, c):
        return self._like({k: c * v for k, v in self.coeffs.items()})

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self * (1.0 / c)

    def __neg__(self):
        return self * -1.0

    def max_abs(self) -> float:
        return max((abs(v) for v in self.coeffs.values()), default=0.0)

    def is_zero(self, atol: float = 0.0) -> bool:
        return self.max_abs() <= atol

    def distance(self, other) -> float:
        return (self - other).max_abs()

    def to_json(self) -> dict:
        terms = [{"coeff": [v.real, v.imag], "indices": list(k)} for k, v in sorted(self.coeffs.items())]
        return {"module": self.module, "degree": self.degree,
                "basis": [str(lab) for lab in self.algebra.labels], "terms": terms}

    @classmethod
    def from_terms(cls, algebra, degree, module, terms) -> "HochschildChain":
        coeffs: dict = {}
        for t in terms:
            c = t["coeff"]
            c = complex(c[0], c[1]) if isinstance(c, (list, tuple)) else complex(c)
            key = tuple(t["indices"])
            coeffs[key] = coeffs.get(key, 0) + c
        return cls(algebra, degree, module, coeffs)


def zero_chain(algebra, degree, module=OP_PAIR) -> HochschildChain:
    return HochschildChain(algebra, degree, module, {})


def _expand(vectors) -> dict:
    """Multilinear expansion of a tensor of coordinate dicts into index tuples."""
    out: dict = {}
    for combo in itertools.product(*[list(v.items()) for v in vectors]):
        key = tuple(k for k, _ in combo)
        c = 1.0
        for _, v in combo:
            c *= v
        out[key] = out.get(key, 0) + c
    return out


def boundary(c: HochschildChain) -> HochschildChain:
    """b(m (x) a1..an) = m a1 (x) .. + sum (-1)^i .. a_i a_{i+1} .. + (-1)^n a_n m (x) a1..a_{n-1}.

    In the op_pair module the bimodule actions are a (m (x) p) b = a m b (x) p.
    """
    n = c.degree
    if n == 0:
        return zero_chain(c.algebra, 0, c.module)
    A = c.algebra
    off = c.offset
    out: dict = {}
    for key, coef in c.coeffs.items():
        head, a = key[:off], key[off:]
        m, op = head[0], head[1:]
        # m a1
        for k, v in A.product(m, a[0]).items():
            nk = (k, *op, *a[1:])
            out[nk] = out.get(nk, 0) + coef * v
        for i in range(1, n):
            sign = (-1) ** i
            for k, v in A.product(a[i - 1], a[i]).items():
                nk = (*head, *a[:i - 1], k, *a[i + 1:])
                out[nk] = out.get(nk, 0) + sign * coef * v
        sign = (-1) ** n
        for k, v in A.product(a[-1], m).items():
            nk = (k, *op, *a[:-1])
            out[nk] = out.get(nk, 0) + sign * coef * v
    return HochschildChain(A, n - 1, c.module, out)


def alpha_on_chain(c: HochschildChain, g, action: AlgebraAction) -> HochschildChain:
    """Apply alpha_g to the first coefficient slot and every tensor slot; the op-slot is left alone."""
    off = c.offset
    out: dict = {}
    for key, coef in c.coeffs.items():
        vecs = [action.apply(g, {key[0]: 1.0})]
        if off == 2:
            vecs.append({key[1]: 1.0})
        vecs += [action.apply(g, {k: 1.0}) for k in key[off:]]
        axpy(out, _expand(vecs), coef)
    return c._like(out)


def twist_op_slot(c: HochschildChain, g, action: AlgebraAction) -> HochschildChain:
    """c_g: alpha_g applied to the op-slot only."""
    if c.module != OP_PAIR:
        raise AlgebraMismatch("op-slot twist needs an op_pair chain")
    out: dict = {}
    for key, coef in c.coeffs.items():
        vecs = [{key[0]: 1.0}, action.apply(g, {key[1]: 1.0})] + [{k: 1.0} for k in key[2:]]
        axpy(out, _expand(vecs), coef)
    return c._like(out)


def is_g_invariant(c: HochschildChain, action: AlgebraAction, atol: float = 1e-12):
    """(True, None) or (False, witness element g)."""
    for g in action.group.elements:
        if g not in action.matrices:
            continue
        if alpha_on_chain(c, g, action).distance(c) > atol:
            return False, g
    return True, None


def promote_to_weak(c: HochschildChain) -> HochschildChain:
    """(a0 (x) a1..an) -> ((a0 (x) 1) (x) a1..an); needs the unit to be a basis element."""
    if c.module != OP_PAIR:
        unit = c.algebra.unit
        out: dict = {}
        for key, coef in c.coeffs.items():
            for u, cu in unit.items():
                nk = (key[0], u, *key[1:])
                out[nk] = out.get(nk, 0) + coef * cu
        return HochschildChain(c.algebra, c.degree, OP_PAIR, out)
    return c


# ------------------------------------------------------------- evaluation

def _dirac_and_j(t):
    """D and J (possibly None) of a triple-like object."""
    from .crossed import CrossedTriple
    from .realcx import RealCrossedStructure
    from .triples import SpectralTripleData

    if isinstance(t, RealCrossedStructure):
        return t.crossed.D_hat, t.J_out
    if isinstance(t, CrossedTriple):
        return t.D_hat, None
    if isinstance(t, SpectralTripleData):
        return t.D, t.J
    raise TypeError(f"cannot evaluate chains on {type(t).__name__}")


def pi_D(c: HochschildChain, t, strong: bool | None = None) -> ComplexOperator:
    """sum pi(a0) J pi(b0)* J^-1 [D, pi(a1)] ... [D, pi(an)] (weak form, op_pair chains)
    or sum pi(a0) [D, pi(a1)] ... (strong form, plain chains)."""
    D, J = _dirac_and_j(t)
    A = c.algebra
    if not A.has_rep:
        raise AlgebraMismatch("chain algebra carries no representation")
    if A.rep(0).dim != D.dim:
        raise AlgebraMismatch("chain algebra is represented on a different space than the triple")
    if strong is None:
        strong = c.module == PLAIN
    if strong and c.module == OP_PAIR:
        raise AlgebraMismatch("strong evaluation needs a plain chain; use the weak form for op_pair chains")
    if not strong and c.module == PLAIN:
        raise AlgebraMismatch("weak evaluation needs an op_pair chain")
    if not strong and J is None:
        raise MissingJ("weak evaluation needs a real structure")
    Dm = D.matrix
    comm, opslot = {}, {}
    Jinv = J.inverse() if J is not None else None
    total = None
    for key, coef in c.coeffs.items():
        m = A.rep(key[0]).matrix
        if not strong:
            p = key[1]
            if p not in opslot:
                opslot[p] = (J @ A.rep(p).adjoint() @ Jinv).matrix
            m = m @ opslot[p]
        for k in key[c.offset:]:
            if k not in comm:
                r = A.rep(k).matrix
                comm[k] = Dm @ r - r @ Dm
            m = m @ comm[k]
        total = coef * m if total is None else total + coef * m
    if total is None:
        return ComplexOperator(Dm * 0, D.space)
    return ComplexOperator(total, D.space)


# ------------------------------------------------------- twisted shuffle

def _group_labels(delta: HochschildChain):
    Q = delta.algebra
    return [Q.labels[k] for k in range(Q.dim)]


def twisted_shuffle(c: HochschildChain, delta: HochschildChain, B: BasedAlgebra) -> HochschildChain:
    """c x_alpha delta over the crossed product B.

    For delta = (d_g (x) d_h) (x) d_f of degree 1:
        sum_{j=1}^{n+1} (-1)^{j-1} (a0 d_g (x) b0 d_h) (x) alpha_f(a1) .. alpha_f(a_{j-1}) (x) d_f (x) a_j .. a_n.
    For a degree-0 delta = d_x (x) d_y the (untwisted) product (a0 d_x (x) b0 d_y) (x) a1 .. a_n.
    """
    A = getattr(B, "base", None)
    if A is None or c.algebra is not A:
        raise AlgebraMismatch("chain must live over the base algebra of the crossed product")
    if c.module != OP_PAIR or delta.module != OP_PAIR:
        raise AlgebraMismatch("twisted shuffle takes op_pair chains")
    Q = delta.algebra
    if getattr(Q, "group", None) is not B.group and getattr(Q, "group", None) != B.group:
        raise AlgebraMismatch("delta must live over the group algebra of the acting group")
    if delta.degree not in (0, 1):
        raise ValueError("delta must have degree 0 or 1")
    action = B.action
    glabels = _group_labels(delta)
    n = c.degree

    def at(vec: Mapping, g) -> dict:
        """embed an A-coordinate vector as a delta_g multiple in B"""
        return {B.index((k, g)): v for k, v in vec.items()}

    e = B.group.identity
    out: dict = {}
    for dkey, dcoef in delta.coeffs.items():
        g, h = glabels[dkey[0]], glabels[dkey[1]]
        for key, coef in c.coeffs.items():
            head = [at({key[0]: 1.0}, g), at({key[1]: 1.0}, h)]
            slots = key[2:]
            if delta.degree == 0:
                axpy(out, _expand(head + [at({k: 1.0}, e) for k in slots]), coef * dcoef)
                continue
            f = glabels[dkey[2]]
            df = at(A.unit, f)
            plain = [at({k: 1.0}, e) for k in slots]
            twisted = [at(action.apply(f, {k: 1.0}), e) for k in slots]
            for j in range(1, n + 2):
                vecs = head + twisted[:j - 1] + [df] + plain[j - 1:]
                axpy(out, _expand(vecs), (-1) ** (j - 1) * coef * dcoef)
    return HochschildChain(B, n + delta.degree, OP_PAIR, out)


def delta_cycle(Q: BasedAlgebra, g) -> HochschildChain:
    """Delta_g = (d_{g^-1} (x) d_e) (x) d_g over the group algebra Q."""
    G = Q.group
    return HochschildChain(Q, 1, OP_PAIR, {(Q.index(G.inv(g)), Q.index(G.identity), Q.index(g)): 1.0})


# ------------------------------------------------------------ orientation

@dataclass
class OrientationResult:
    chain: HochschildChain
    M: complex
    boundary_residual: float
    pi_residual: float
    expected: ComplexOperator
    margin: int


def orientation_normalisation(l_g: float, n: int, base_odd: bool) -> complex:
    return -1j * l_g * (n + 1) if base_odd else l_g * (n + 1)


def build_orientation(c: HochschildChain, real, g, base_algebra: BasedAlgebra | None = None,
                      margin: int | None = None, check: bool = True) -> OrientationResult:
    """c_hat = (1/M) c x_alpha Delta_g for a Hat real structure over the Pi2Gamma crossed triple.

    ``c`` is a weak (op_pair) orientation cycle over the base based algebra whose
    representation is the base triple's algebra.  The result carries the
    residuals of b(c_hat) = 0 and pi_Dhat(c_hat) = chi_hat on the interior window.
    """
    from .groups import classify_weight
    from .crossed import crossed_algebra

    crossed = real.crossed
    w = crossed.weight
    flags = classify_weight(w).flags
    if not flags["homomorphism"]:
        raise ZeroWeightElement("orientation construction needs a homomorphism weight")
    lg = w(g)
    if abs(lg) <= 1e-12:
        raise ZeroWeightElement(f"l({g}) = 0")
    c = promote_to_weak(c)
    A = c.algebra
    B, action, Q = crossed_algebra(crossed, A)
    ok, bad = is_g_invariant(c, action)
    if not ok:
        raise NotGInvariant(f"chain is not G-invariant (alpha_{bad}(c) != c)")
    base = crossed.base
    tol = base.tolerance.threshold()
    base_margin = 2 * (c.degree + 1)
    window = base.interior(base_margin) if base.hilbert_group is not None and not base.hilbert_group.is_finite else None
    chi = base.grading if base.grading is not None else identity(base.space)
    r = relation_residual(pi_D(c, base.replace(J=real.base_J)), chi, window)
    if r > max(tol, 1e-8):
        raise NotOrientation(f"base chain is not an orientation cycle (residual {r:.2e})")
    M = orientation_normalisation(lg, c.degree, not base.even)
    c_hat = twisted_shuffle(c, delta_cycle(Q, g), B) / M
    if margin is None:
        margin = 2 * (c.degree + 2) + 2 * crossed.group.word_length(g)
    expected = crossed.grading_hat if crossed.grading_hat is not None else identity(crossed.space)
    bres = boundary(c_hat).max_abs()
    pres = masked_residual((pi_D(c_hat, real) - expected).matrix, window_mask(crossed.interior(margin)))
    res = OrientationResult(c_hat, M, bres, pres, expected, margin)
    if check and (bres > 1e-12 or pres > max(tol, 1e-8)):
        raise NotOrientation(f"constructed chain fails: |b(c)| = {bres:.2e}, |pi_D(c) - chi| = {pres:.2e}")
    return res


def dual_coaction_components(c: HochschildChain) -> dict:
    """Split a chain over a crossed product by the product of the group labels of its slots.

    The dual coaction sends a d_g0 (x) ... (x) a_n d_gn to the same chain tensored
    with d_{g0 ... gn} (op-slot excluded); invariance means only the identity
    component survives.
    """
    B = c.algebra
    G = B.group
    off = c.offset
    comps: dict = {}
    for key, coef in c.coeffs.items():
        slots = (key[0],) + tuple(key[off:])
        prod = G.identity
        for k in slots:
            prod = G.mul_strict(prod, B.labels[k][1])
        comps.setdefault(prod, {})[key] = coef
    return {g: c._like(v) for g, v in comps.items()}


def dual_action_on_chain(c: HochschildChain, character) -> HochschildChain:
    """Pontryagin-dual action: each monomial picks up conj(chi(g0 ... gn)), op-slot excluded."""
    B = c.algebra
    out = {}
    for g, comp in dual_coaction_components(c).items():
        phase = np.conj(character(g))
        for key, coef in comp.coeffs.items():
            out[key] = coef * phase
    return c._like(out)


def leibniz_residual(c: HochschildChain, delta: HochschildChain, B: BasedAlgebra, sign: int = 1) -> float:
    """max |b(c x delta) - (sign * bc x delta + c x b delta)| coefficientwise.

    ``sign = 1`` is the identity as usually stated; ``sign = -1`` is the form that
    holds with the shuffle as defined here, for G-invariant c and delta supported
    on (d_f^-1 (x) d_h) (x) d_f.
    """
    lhs = boundary(twisted_shuffle(c, delta, B))
    rhs = twisted_shuffle(c, boundary(delta), B)
    if c.degree > 0:
        rhs = rhs + sign * twisted_shuffle(boundary(c), delta, B)
    return (lhs - rhs).max_abs()
