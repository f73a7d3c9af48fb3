"""Small hand-built triples: one per KO row, the rotation torus, random chains."""
from __future__ import annotations

import numpy as np

from .algebra import AlgebraAction, BasedAlgebra
from .groups import GroupModel, Weight, WindowedZ, cyclic
from .hochschild import OP_PAIR, HochschildChain, alpha_on_chain
from .opalg import SIGMA_1, SIGMA_2, SIGMA_3, ComplexOperator, HilbertSpace, diagonal, identity
from .triples import SpectralTripleData, group_triple

I2 = np.eye(2)

# (D, J-matrix) on C^2 for the odd rows; J acts as v -> J conj(v)
ODD_ROWS = {7: (I2, I2), 3: (I2, SIGMA_2), 5: (SIGMA_1, SIGMA_2), 1: (SIGMA_1, SIGMA_3)}
# J-matrix on C^4 = C^2 (x) C^2 with chi = sigma_3 (x) 1 and D = sigma_1 (x) 1
EVEN_ROWS = {0: np.kron(I2, I2), 4: np.kron(I2, SIGMA_2), 6: np.kron(SIGMA_1, I2), 2: np.kron(SIGMA_1, SIGMA_2)}


def ko_row_triple(n: int, group: GroupModel | None = None, unitaries=None) -> SpectralTripleData:
    """Scalar algebra on C^2 (odd n) or C^4 (even n) with signs of KO row n."""
    n %= 8
    if n % 2:
        D, J = ODD_ROWS[n]
        space, chi = HilbertSpace(2), None
    else:
        space = HilbertSpace(4)
        D, J = np.kron(SIGMA_1, I2), EVEN_ROWS[n]
        chi = ComplexOperator(np.kron(SIGMA_3, I2), space)
    one = identity(space)
    if group is not None and unitaries is None:
        unitaries = {g: one for g in group.elements}
    return SpectralTripleData(space, [one], ComplexOperator(D, space), grading=chi,
                              J=ComplexOperator(J, space, antilinear=True), unitaries=unitaries, group=group)


def rotation_unitaries(H: WindowedZ, G: WindowedZ, theta: float) -> dict:
    """u_g = diag(exp(i theta g k)) on l^2(H); Ad u_g(lambda_m) = exp(i theta g m) lambda_m."""
    ks = np.array(H.elements, dtype=float)
    return {g: diagonal(np.exp(1j * theta * g * ks), H.space()) for g in G.elements}


def phase_unitaries(space: HilbertSpace, G: WindowedZ, theta: float) -> dict:
    return {g: diagonal(np.full(space.dim, np.exp(1j * theta * g)), space) for g in G.elements}


def torus_base(N: int = 12, theta: float = 2 * np.pi * 0.3, radius: int = 2) -> SpectralTripleData:
    """Windowed group triple of Z with l = inclusion, J_G, and the rotation action of windowed Z."""
    H = WindowedZ(N)
    t = group_triple(H, Weight.inclusion(H), radius)
    return t.replace(unitaries=rotation_unitaries(H, H, theta), group=H)


def even_tilde_base(N: int = 12, theta: float = 2 * np.pi * 0.3) -> SpectralTripleData:
    """C^2 with chi = sigma_3, D = sigma_1, J = complex conjugation, scalar algebra, phase action."""
    space = HilbertSpace(2)
    G = WindowedZ(N)
    return SpectralTripleData(space, [identity(space)], ComplexOperator(SIGMA_1, space),
                              grading=ComplexOperator(SIGMA_3, space), J=ComplexOperator(I2, space, antilinear=True),
                              unitaries=phase_unitaries(space, G, theta), group=G)


def z2_base() -> SpectralTripleData:
    """Group triple of Z_2 with l = (0, 1), acted on by Z_2 through u_t = sigma_3."""
    G = cyclic(2)
    t = group_triple(G, Weight(G, [0.0, 1.0]))
    us = {0: identity(t.space), 1: ComplexOperator(SIGMA_3, t.space)}
    return t.replace(unitaries=us, group=G)


def noninvariant_base() -> SpectralTripleData:
    """M_2 on C^2, D = sigma_3, Z_2 acting through u_t = sigma_1 (so [D, u_t] != 0)."""
    space = HilbertSpace(2)
    basis = [ComplexOperator(np.outer(I2[i], I2[j]), space) for i in range(2) for j in range(2)]
    G = cyclic(2)
    us = {0: identity(space), 1: ComplexOperator(SIGMA_1, space)}
    return SpectralTripleData(space, basis, ComplexOperator(SIGMA_3, space), unitaries=us, group=G)


def random_chain(A: BasedAlgebra, degree: int, rng: np.random.Generator, terms: int = 3,
                 module: str = OP_PAIR) -> HochschildChain:
    """Gaussian-integer coefficients on random basis tuples."""
    width = degree + (2 if module == OP_PAIR else 1)
    coeffs: dict = {}
    for _ in range(terms):
        key = tuple(int(k) for k in rng.integers(0, A.dim, width))
        coeffs[key] = coeffs.get(key, 0) + complex(*rng.integers(-3, 4, 2))
    return HochschildChain(A, degree, module, coeffs)


def invariant_part(c: HochschildChain, action: AlgebraAction) -> HochschildChain:
    """Average over a finite group, or keep the fixed monomials of a diagonal action on windowed Z."""
    G = action.group
    if G.is_finite:
        out = c * 0
        for g in G.elements:
            out = out + alpha_on_chain(c, g, action)
        return out / G.order
    # diagonal action: alpha_1 multiplies each monomial by a phase; keep the fixed ones
    moved = alpha_on_chain(c, 1, action)
    keep = {k: v for k, v in c.coeffs.items() if abs(moved.coeffs.get(k, 0) - v) < 1e-12}
    return HochschildChain(c.algebra, c.degree, c.module, keep)


def shuffle_delta(Q: BasedAlgebra, rng: np.random.Generator, terms: int = 2, matched: bool = False,
                  radius: int | None = None) -> HochschildChain:
    """Random degree-1 chain (d_g (x) d_h) (x) d_f over the group algebra.

    ``matched`` restricts to g = f^-1, the shape of Delta_f; ``radius`` bounds |g|, |h|, |f| on windowed Z.
    """
    G = Q.group
    elems = [g for g in Q.labels if G.is_finite or radius is None or G.word_length(g) <= radius]
    coeffs: dict = {}
    for _ in range(terms):
        f = elems[int(rng.integers(len(elems)))]
        h = elems[int(rng.integers(len(elems)))]
        g = G.inv(f) if matched else elems[int(rng.integers(len(elems)))]
        key = (Q.index(g), Q.index(h), Q.index(f))
        coeffs[key] = coeffs.get(key, 0) + complex(*rng.integers(-3, 4, 2))
    return HochschildChain(Q, 1, OP_PAIR, coeffs)
