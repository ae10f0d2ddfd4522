"""Gaudin hamiltonians as dense matrices in the ``f^J v_M`` basis."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, InvarianceError, PreconditionError
from .sl2rep import (TensorVector, WeightVector, as_weights, full_basis, level_basis,
                     shapovalov_diagonal)

#: residual allowed when restricting an operator to an invariant subspace
INVARIANCE_TOL = 1e-10


@dataclass(frozen=True)
class PointConfig:
    """Pairwise distinct marked points ``z_1, ..., z_n``."""

    z: tuple

    def __post_init__(self):
        z = tuple(complex(x) for x in self.z)
        for i in range(len(z)):
            for j in range(i + 1, len(z)):
                if z[i] == z[j]:
                    raise DomainError(f"marked points {i} and {j} coincide ({z[i]})")
        object.__setattr__(self, "z", z)

    @property
    def n(self) -> int:
        return len(self.z)

    def array(self) -> np.ndarray:
        return np.array(self.z, dtype=complex)

    def __iter__(self):
        return iter(self.z)

    def __len__(self):
        return len(self.z)

    def __getitem__(self, i):
        return self.z[i]


def as_points(z) -> PointConfig:
    return z if isinstance(z, PointConfig) else PointConfig(tuple(z))


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """A square matrix together with the basis it is written in.

    ``basis`` is a tuple of tensor indices for operators on ``L^{(x)M}`` (or
    one weight level of it when ``level`` is set), or ``None`` for matrices
    written in a basis of singular vectors.
    """

    matrix: np.ndarray
    weights: WeightVector
    basis: tuple | None
    level: int | None = None

    def __post_init__(self):
        a = np.asarray(self.matrix)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise PreconditionError(f"operator matrix must be square, got shape {a.shape}")
        if self.basis is not None and len(self.basis) != a.shape[0]:
            raise PreconditionError("basis size does not match the matrix")
        object.__setattr__(self, "matrix", a)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def apply(self, v: TensorVector) -> TensorVector:
        if self.basis is None:
            raise PreconditionError("operator is not written in a tensor basis")
        out = self.matrix @ v.to_array(self.basis)
        coords = {J: c for J, c in zip(self.basis, out) if c != 0}
        return TensorVector(self.weights, coords, v.level)

    def to_json(self) -> dict:
        return {"weights": list(self.weights.m), "level": self.level,
                "basis": None if self.basis is None else [list(J) for J in self.basis],
                "matrix": [[[complex(c).real, complex(c).imag] for c in row] for row in self.matrix]}


def _basis_for(M: WeightVector, level: int | None) -> tuple:
    return full_basis(M) if level is None else level_basis(M, level)


def casimir_pair(M, i: int, j: int, level: int | None = None) -> OperatorMatrix:
    """``Omega_ij = e (x) f + f (x) e + h (x) h / 2`` on factors ``i < j``."""
    M = as_weights(M)
    if not 0 <= i < j < M.n:
        raise PreconditionError(f"need 0 <= i < j < {M.n}, got ({i}, {j})")
    basis = _basis_for(M, level)
    index = {J: r for r, J in enumerate(basis)}
    mi, mj = M.m[i], M.m[j]
    mat = np.zeros((len(basis), len(basis)))
    for c, J in enumerate(basis):
        a, b = J[i], J[j]
        mat[c, c] += 0.5 * (mi - 2 * a) * (mj - 2 * b)
        if a >= 1 and b < mj:  # e on i, f on j
            K = list(J)
            K[i], K[j] = a - 1, b + 1
            mat[index[tuple(K)], c] += a * (mi - a + 1)
        if b >= 1 and a < mi:  # f on i, e on j
            K = list(J)
            K[i], K[j] = a + 1, b - 1
            mat[index[tuple(K)], c] += b * (mj - b + 1)
    return OperatorMatrix(mat, M, basis, level)


def hamiltonian(M, z, i: int, level: int | None = None) -> OperatorMatrix:
    """``H_i(z) = sum_{j != i} Omega_ij / (z_i - z_j)``."""
    M, z = as_weights(M), as_points(z)
    if z.n != M.n:
        raise PreconditionError(f"{z.n} points given for {M.n} tensor factors")
    if not 0 <= i < M.n:
        raise PreconditionError(f"factor {i} out of range")
    basis = _basis_for(M, level)
    mat = np.zeros((len(basis), len(basis)), dtype=complex)
    for j in range(M.n):
        if j == i:
            continue
        omega = casimir_pair(M, min(i, j), max(i, j), level).matrix
        mat += omega / (z[i] - z[j])
    return OperatorMatrix(mat, M, basis, level)


def hamiltonians(M, z, level: int | None = None) -> list:
    M = as_weights(M)
    return [hamiltonian(M, z, i, level) for i in range(M.n)]


def _columns(vectors: Sequence[TensorVector], basis: tuple) -> np.ndarray:
    return np.column_stack([v.to_array(basis) for v in vectors])


def restrict_to_singular(op: OperatorMatrix, vectors: Sequence[TensorVector],
                         tol: float = INVARIANCE_TOL) -> OperatorMatrix:
    """Matrix of ``op`` on ``span(vectors)``, checking that the span is invariant.

    Raises
    ------
    InvarianceError
        If ``op`` maps the span outside itself by more than ``tol`` (relative).
    """
    if op.basis is None:
        raise PreconditionError("operator is not written in a tensor basis")
    if not vectors:
        return OperatorMatrix(np.zeros((0, 0), dtype=complex), op.weights, None, op.level)
    levels = {v.level for v in vectors}
    if len(levels) != 1:
        raise PreconditionError("singular vectors must share one weight level")
    B = _columns(vectors, op.basis)
    image = op.matrix @ B
    coeffs, *_ = np.linalg.lstsq(B, image, rcond=None)
    resid = invariance_residual(op, vectors, coeffs)
    if resid > tol:
        raise InvarianceError(f"span is not invariant: residual {resid:.3e}")
    return OperatorMatrix(coeffs, op.weights, None, levels.pop())


def invariance_residual(op: OperatorMatrix, vectors: Sequence[TensorVector],
                        coeffs: np.ndarray | None = None) -> float:
    """``max|op B - B C| / (max|op| max|B|)`` for the best coefficient matrix ``C``."""
    B = _columns(vectors, op.basis)
    image = op.matrix @ B
    if coeffs is None:
        coeffs, *_ = np.linalg.lstsq(B, image, rcond=None)
    scale = max(max_norm(op.matrix), 1e-300) * max(np.abs(B).max(), 1e-300)
    return float(np.abs(image - B @ coeffs).max() / scale)


def max_norm(a: np.ndarray) -> float:
    """Max-absolute-entry norm used for all operator tolerances."""
    a = np.asarray(a)
    return float(np.abs(a).max()) if a.size else 0.0


def commutator_defect(a: OperatorMatrix, b: OperatorMatrix) -> float:
    """``max|[A, B]| / (max|A| max|B|)``."""
    A, B = a.matrix, b.matrix
    denom = max_norm(A) * max_norm(B)
    if denom == 0:
        return 0.0
    return max_norm(A @ B - B @ A) / denom


def shapovalov_symmetry_defect(op: OperatorMatrix) -> float:
    """Defect of ``B(H u, v) = B(u, H v)``: ``max|G H - H^T G| / (max|G| max|H|)``."""
    if op.basis is None:
        raise PreconditionError("operator is not written in a tensor basis")
    g = shapovalov_diagonal(op.weights, op.basis)
    GH = g[:, None] * op.matrix
    denom = g.max() * max_norm(op.matrix)
    if denom == 0:
        return 0.0
    return float(max_norm(GH - GH.T) / denom)


def dense_spectrum(op: OperatorMatrix) -> np.ndarray:
    """Eigenvalues by dense diagonalization (cross-check only)."""
    return np.linalg.eigvals(op.matrix)
