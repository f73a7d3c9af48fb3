"""Linear and antilinear operators on explicit finite-dimensional Hilbert spaces.

An antilinear operator is stored as a matrix ``M`` together with a flag; its
action is ``v -> M @ conj(v)``.  Composition rules follow from that:

    L1 @ L2 -> A B        (linear)
    L  @ K  -> A M        (antilinear)
    K  @ L  -> M conj(B)  (antilinear)
    K1 @ K2 -> M1 conj(M2) (linear)

Matrices are kept in scipy CSR form; every group-algebra operator built by
this package is a weighted permutation, so sparse storage keeps the crossed
spaces (a few thousand dimensions) cheap.  Dense arrays are produced on
demand for eigensolves and norms.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .errors import MixedParity, NonConvergence, ParityMismatch, SpaceMismatch


@dataclass(frozen=True)
class HilbertSpace:
    dim: int
    labels: tuple | None = None

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.dim!r}")
        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != self.dim:
                raise ValueError("labels must have length dim")
            if len(set(labels)) != len(labels):
                raise ValueError("labels must be pairwise distinct")
            object.__setattr__(self, "labels", labels)

    def tensor(self, other: "HilbertSpace") -> "HilbertSpace":
        labels = None
        if self.labels is not None and other.labels is not None:
            labels = tuple((a, b) for a in self.labels for b in other.labels)
        return HilbertSpace(self.dim * other.dim, labels)

    def direct_sum(self, other: "HilbertSpace") -> "HilbertSpace":
        return HilbertSpace(self.dim + other.dim)


@dataclass(frozen=True)
class Tolerance:
    """Entrywise comparison threshold: ``residual <= abs_eps + rel_eps * scale``."""

    abs_eps: float = 1e-9
    rel_eps: float = 0.0

    def __post_init__(self):
        if self.abs_eps < 0 or self.rel_eps < 0:
            raise ValueError("tolerances must be nonnegative")

    @classmethod
    def exact(cls) -> "Tolerance":
        return cls(0.0, 0.0)

    def threshold(self, scale: float = 1.0) -> float:
        return self.abs_eps + self.rel_eps * scale

    def allows(self, residual: float, scale: float = 1.0) -> bool:
        return residual <= self.threshold(scale)


def _as_csr(matrix) -> sp.csr_matrix:
    if sp.issparse(matrix):
        out = sp.csr_matrix(matrix, dtype=complex)
    else:
        arr = np.asarray(matrix, dtype=complex)
        if arr.ndim != 2:
            raise ValueError("operator matrix must be two-dimensional")
        out = sp.csr_matrix(arr)
    out.eliminate_zeros()
    return out


class ComplexOperator:
    """A linear or antilinear operator on a :class:`HilbertSpace`."""

    __slots__ = ("space", "matrix", "antilinear")
    __array_ufunc__ = None

    def __init__(self, matrix, space: HilbertSpace | None = None, antilinear: bool = False):
        m = _as_csr(matrix)
        if m.shape[0] != m.shape[1]:
            raise ValueError(f"operator matrix must be square, got shape {m.shape}")
        if space is None:
            space = HilbertSpace(m.shape[0])
        if space.dim != m.shape[0]:
            raise SpaceMismatch(f"matrix side {m.shape[0]} does not match space dim {space.dim}")
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "antilinear", bool(antilinear))

    def __setattr__(self, name, value):
        raise AttributeError("ComplexOperator is immutable")

    @property
    def dim(self) -> int:
        return self.space.dim

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def __repr__(self):
        kind = "antilinear" if self.antilinear else "linear"
        return f"ComplexOperator(dim={self.dim}, {kind}, nnz={self.matrix.nnz})"

    def _check_space(self, other: "ComplexOperator"):
        if self.space.dim != other.space.dim:
            raise SpaceMismatch(f"dims {self.space.dim} and {other.space.dim} differ")

    def apply(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=complex)
        if self.antilinear:
            v = np.conj(v)
        return self.matrix @ v

    def __matmul__(self, other):
        if not isinstance(other, ComplexOperator):
            return self.apply(other)
        self._check_space(other)
        rhs = other.matrix.conj() if self.antilinear else other.matrix
        return ComplexOperator(self.matrix @ rhs, self.space, self.antilinear != other.antilinear)

    def __add__(self, other: "ComplexOperator"):
        self._check_space(other)
        if self.antilinear != other.antilinear:
            raise ParityMismatch("cannot add a linear and an antilinear operator")
        return ComplexOperator(self.matrix + other.matrix, self.space, self.antilinear)

    def __sub__(self, other: "ComplexOperator"):
        self._check_space(other)
        if self.antilinear != other.antilinear:
            raise ParityMismatch("cannot subtract a linear and an antilinear operator")
        return ComplexOperator(self.matrix - other.matrix, self.space, self.antilinear)

    def __neg__(self):
        return ComplexOperator(-self.matrix, self.space, self.antilinear)

    def __mul__(self, c):
        # (K c) v = K(c v) = conj(c) K v
        c = complex(c)
        if self.antilinear:
            c = c.conjugate()
        return ComplexOperator(self.matrix * c, self.space, self.antilinear)

    def __rmul__(self, c):
        return ComplexOperator(self.matrix * complex(c), self.space, self.antilinear)

    def __truediv__(self, c):
        return self * (1.0 / complex(c))

    def adjoint(self) -> "ComplexOperator":
        """Hilbert adjoint.  For antilinear K = M conj, <Kx, y> = conj<x, K*y> gives K* = M^T conj."""
        m = self.matrix.transpose() if self.antilinear else self.matrix.conj().transpose()
        return ComplexOperator(m, self.space, self.antilinear)

    @property
    def H(self) -> "ComplexOperator":
        return self.adjoint()

    def inverse(self) -> "ComplexOperator":
        m = self.matrix
        if _max_abs(m.conj().T @ m - sp.identity(self.dim)) < 1e-13:
            # unitary matrix part: the inverse is the adjoint, stays sparse
            return self.adjoint()
        try:
            inv = np.linalg.inv(self.dense())
        except np.linalg.LinAlgError as exc:
            raise NonConvergence(f"operator is not invertible: {exc}") from exc
        if self.antilinear:
            # K^{-1} = conj(M^{-1}) conj, since K (conj(M^{-1}) conj v) = M M^{-1} v
            inv = np.conj(inv)
        return ComplexOperator(inv, self.space, self.antilinear)

    def with_space(self, space: HilbertSpace) -> "ComplexOperator":
        return ComplexOperator(self.matrix, space, self.antilinear)

    def max_abs(self) -> float:
        if self.matrix.nnz == 0:
            return 0.0
        return float(np.abs(self.matrix.data).max())


def identity(space) -> ComplexOperator:
    if isinstance(space, int):
        space = HilbertSpace(space)
    return ComplexOperator(sp.identity(space.dim, dtype=complex, format="csr"), space)


def zeros(space) -> ComplexOperator:
    if isinstance(space, int):
        space = HilbertSpace(space)
    return ComplexOperator(sp.csr_matrix((space.dim, space.dim), dtype=complex), space)


def cc(dim: int) -> ComplexOperator:
    """Entrywise complex conjugation on C^dim."""
    return ComplexOperator(sp.identity(dim, dtype=complex, format="csr"), HilbertSpace(dim), antilinear=True)


def diagonal(values, space: HilbertSpace | None = None) -> ComplexOperator:
    values = np.asarray(values, dtype=complex)
    return ComplexOperator(sp.diags(values, format="csr"), space or HilbertSpace(len(values)))


SIGMA_1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_3 = np.array([[1, 0], [0, -1]], dtype=complex)


def pauli(k: int) -> ComplexOperator:
    mats = {0: np.eye(2, dtype=complex), 1: SIGMA_1, 2: SIGMA_2, 3: SIGMA_3}
    return ComplexOperator(mats[k])


def tensor(a: ComplexOperator, b: ComplexOperator) -> ComplexOperator:
    """Kronecker product; both factors must share parity."""
    if a.antilinear != b.antilinear:
        raise MixedParity("tensor product of a linear and an antilinear operator")
    return ComplexOperator(sp.kron(a.matrix, b.matrix, format="csr"), a.space.tensor(b.space), a.antilinear)


def tensor_all(*ops: ComplexOperator) -> ComplexOperator:
    return reduce(tensor, ops)


def direct_sum(a: ComplexOperator, b: ComplexOperator) -> ComplexOperator:
    if a.antilinear != b.antilinear:
        raise MixedParity("direct sum of a linear and an antilinear operator")
    return ComplexOperator(sp.block_diag((a.matrix, b.matrix), format="csr"), a.space.direct_sum(b.space), a.antilinear)


def commutator(a: ComplexOperator, b: ComplexOperator, anti: bool = False) -> ComplexOperator:
    """ab - ba, or ab + ba when ``anti``.  Linear operands only."""
    a._check_space(b)
    if a.antilinear or b.antilinear:
        raise ParityMismatch("commutator is defined here for linear operators only")
    ab = a.matrix @ b.matrix
    ba = b.matrix @ a.matrix
    return ComplexOperator(ab + ba if anti else ab - ba, a.space)


def relation_residual(lhs: ComplexOperator, rhs: ComplexOperator, window: ComplexOperator | None = None) -> float:
    """Largest entry of P (lhs - rhs) P, P the window projection (identity if absent)."""
    lhs._check_space(rhs)
    if lhs.antilinear != rhs.antilinear:
        raise ParityMismatch("relation between operators of different parity")
    diff = lhs.matrix - rhs.matrix
    if window is not None:
        lhs._check_space(window)
        p = window.matrix
        diff = p @ diff @ p
    return _max_abs(diff)


def masked_residual(diff: sp.spmatrix, mask: np.ndarray | None) -> float:
    """Max entry of ``diff`` restricted to rows and columns where ``mask`` is true.

    Equivalent to :func:`relation_residual` with a diagonal 0/1 window, but
    avoids two sparse products in the inner loops of the crossed checks.
    """
    if mask is None:
        return _max_abs(diff)
    coo = sp.coo_matrix(diff)
    if coo.nnz == 0:
        return 0.0
    keep = mask[coo.row] & mask[coo.col]
    if not keep.any():
        return 0.0
    return float(np.abs(coo.data[keep]).max())


def _max_abs(m) -> float:
    if sp.issparse(m):
        m = sp.csr_matrix(m)
        if m.nnz == 0:
            return 0.0
        return float(np.abs(m.data).max())
    m = np.asarray(m)
    return float(np.abs(m).max()) if m.size else 0.0


def window_mask(window: ComplexOperator | None) -> np.ndarray | None:
    """Boolean mask of a diagonal 0/1 projection."""
    if window is None:
        return None
    return np.abs(window.matrix.diagonal()) > 0.5


def spectrum(a: ComplexOperator) -> list[complex]:
    """Eigenvalues with multiplicity, sorted by real then imaginary part."""
    if a.antilinear:
        raise ParityMismatch("spectrum of an antilinear operator is not defined here")
    m = a.dense()
    try:
        if np.allclose(m, m.conj().T, atol=1e-12, rtol=0):
            vals = np.linalg.eigvalsh(m).astype(complex)
        else:
            vals = np.linalg.eigvals(m)
    except np.linalg.LinAlgError as exc:
        raise NonConvergence(str(exc)) from exc
    order = np.lexsort((vals.imag, vals.real))
    return [complex(v) for v in vals[order]]


def op_norm(a: ComplexOperator | np.ndarray) -> float:
    """Operator (spectral) norm."""
    m = a.dense() if isinstance(a, ComplexOperator) else np.asarray(a)
    if m.size == 0:
        return 0.0
    try:
        return float(np.linalg.norm(m, 2))
    except np.linalg.LinAlgError as exc:
        raise NonConvergence(str(exc)) from exc


def is_unitary(a: ComplexOperator, tol: Tolerance = Tolerance()) -> bool:
    """Matrix part unitary (an antilinear isometry has a unitary matrix)."""
    m = a.matrix
    return _max_abs(m.conj().T @ m - sp.identity(a.dim)) <= tol.threshold()


def is_self_adjoint(a: ComplexOperator, tol: Tolerance = Tolerance()) -> bool:
    return relation_residual(a, a.adjoint()) <= tol.threshold()


def random_vector(dim: int, rng: np.random.Generator) -> np.ndarray:
    return rng.standard_normal(dim) + 1j * rng.standard_normal(dim)


def span_coordinates(basis: Sequence[ComplexOperator], target: ComplexOperator):
    """Least-squares coordinates of ``target`` in span(basis) and the entrywise residual.

    Solved through the (small) Gram matrix of the vectorized basis so that large
    sparse operators never need to be densified.
    """
    a = sp.hstack([b.matrix.reshape((-1, 1)) for b in basis], format="csc")
    t = target.matrix.reshape((-1, 1))
    gram = (a.conj().T @ a).toarray()
    rhs = (a.conj().T @ t).toarray().ravel()
    coords = np.linalg.lstsq(gram, rhs, rcond=None)[0]
    resid = _max_abs(a @ sp.csc_matrix(coords.reshape(-1, 1)) - t)
    return coords, resid
