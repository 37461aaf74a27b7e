"""
Small-matrix numerics for single qubits.

Bloch vector <-> density matrix conversion, a closed-form 2x2 Hermitian
eigensolver, the PSD matrix square root and binary/von Neumann entropies.
Everything is double precision; two tolerances are used throughout:
``ALGEBRA_TOL`` for exact identities and ``EIGEN_TOL`` for eigen/sqrt
reconstructions and for clamping tiny negative eigenvalues.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    BlochOutOfBall,
    DomainError,
    NegativeEigenvalue,
    NotAState,
    NotHermitian,
)

ALGEBRA_TOL = 1e-12
EIGEN_TOL = 1e-10

IDENTITY2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = np.stack([SIGMA_X, SIGMA_Y, SIGMA_Z])


def is_hermitian(m, tol=ALGEBRA_TOL) -> bool:
    m = np.asarray(m)
    return bool(np.max(np.abs(m - m.conj().T)) <= tol)


def bloch_to_density(n) -> np.ndarray:
    """Return rho = (I + n.sigma)/2 for a Bloch vector ``n`` with |n| <= 1."""
    n = np.asarray(n, dtype=float)
    if n.shape != (3,):
        raise BlochOutOfBall(f"Bloch vector must have 3 components, got shape {n.shape}")
    norm = np.linalg.norm(n)
    if norm > 1 + ALGEBRA_TOL:
        raise BlochOutOfBall(f"|n| = {float(norm)!r} exceeds 1")
    return 0.5 * (IDENTITY2 + np.einsum("i,ijk->jk", n, PAULI))


def pauli_coefficients(m) -> tuple[complex, np.ndarray]:
    """Coefficients (c, v) with m = c I + v.sigma; complex in general."""
    m = np.asarray(m, dtype=complex)
    c = 0.5 * np.trace(m)
    v = 0.5 * np.einsum("ijk,kj->i", PAULI, m)
    return c, v


def density_to_bloch(rho) -> np.ndarray:
    """Bloch vector n_i = Tr(rho sigma_i) of a valid qubit density matrix."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise NotAState(f"expected a 2x2 matrix, got shape {rho.shape}")
    if not is_hermitian(rho, EIGEN_TOL):
        raise NotAState("density matrix is not Hermitian")
    tr = np.trace(rho)
    if abs(tr - 1) > EIGEN_TOL:
        raise NotAState(f"trace {tr!r} != 1")
    n = np.real(np.einsum("ijk,kj->i", PAULI, rho))
    # eigenvalues are (1 +- |n|)/2
    if np.linalg.norm(n) > 1 + 2 * EIGEN_TOL:
        raise NotAState("density matrix has negative eigenvalues")
    return n


class EigenPair2(NamedTuple):
    """Eigenvalues (descending) and eigenvectors (as columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def eigen_hermitian_2(m) -> EigenPair2:
    """Closed-form eigendecomposition of a 2x2 Hermitian matrix.

    Writing ``m = c I + b.sigma`` the eigenvalues are ``c +- |b|`` and the
    top eigenvector is the +1 eigenvector of ``b_hat.sigma``.
    """
    m = np.asarray(m, dtype=complex)
    if m.shape != (2, 2):
        raise NotHermitian(f"expected a 2x2 matrix, got shape {m.shape}")
    if not is_hermitian(m, EIGEN_TOL):
        raise NotHermitian("matrix is not Hermitian")
    c, b = pauli_coefficients(m)
    c, b = c.real, b.real
    beta = float(np.linalg.norm(b))
    values = np.array([c + beta, c - beta])
    if beta <= 1e-300:
        return EigenPair2(values, np.eye(2, dtype=complex))
    x, y, z = b / beta
    # pick the branch that avoids cancellation near the south pole
    if z >= 0:
        top = np.array([1 + z, x + 1j * y]) / np.sqrt(2 * (1 + z))
    else:
        top = np.array([x - 1j * y, 1 - z]) / np.sqrt(2 * (1 - z))
    bottom = np.array([-np.conj(top[1]), np.conj(top[0])])
    return EigenPair2(values, np.column_stack([top, bottom]))


def clamp_eigenvalues(values, tol=EIGEN_TOL) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if np.any(values < -tol):
        raise NegativeEigenvalue(f"eigenvalue {values.min()!r} below -{tol}")
    return np.where(values < 0, 0.0, values)


def matrix_sqrt_psd(m) -> np.ndarray:
    """Hermitian PSD square root of a 2x2 Hermitian PSD matrix."""
    values, vectors = eigen_hermitian_2(m)
    roots = np.sqrt(clamp_eigenvalues(values))
    return (vectors * roots) @ vectors.conj().T


def _xlog2x(x):
    x = np.asarray(x, dtype=float)
    safe = np.where(x > 0, x, 1.0)
    return np.where(x > 0, x * np.log2(safe), 0.0)


def binary_entropy(x):
    """H(x) = -x log2 x - (1-x) log2(1-x) in bits, with 0 log 0 = 0.

    Accepts scalars or arrays. Values within 1e-12 outside [0, 1] are clipped
    (rounding in (1 +- |n|)/2); anything further out raises DomainError.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(arr < -ALGEBRA_TOL) or np.any(arr > 1 + ALGEBRA_TOL) or np.any(np.isnan(arr)):
        raise DomainError("binary entropy argument outside [0, 1]")
    arr = np.clip(arr, 0.0, 1.0)
    h = -_xlog2x(arr) - _xlog2x(1.0 - arr)
    return float(h) if np.ndim(h) == 0 else h


def von_neumann_entropy(rho) -> float:
    """Entropy in bits of a (small) density matrix."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape == (2, 2):
        values = eigen_hermitian_2(rho).eigenvalues
    else:
        values = np.linalg.eigvalsh(rho)
    values = clamp_eigenvalues(values)
    return float(-np.sum(_xlog2x(values)))


@dataclass(frozen=True)
class QubitState:
    """Single-qubit state held as its Bloch vector."""

    bloch: np.ndarray

    def __post_init__(self):
        n = np.array(self.bloch, dtype=float)
        if n.shape != (3,):
            raise BlochOutOfBall(f"Bloch vector must have 3 components, got shape {n.shape}")
        if np.linalg.norm(n) > 1 + ALGEBRA_TOL:
            raise BlochOutOfBall(f"|n| = {float(np.linalg.norm(n))!r} exceeds 1")
        n.setflags(write=False)
        object.__setattr__(self, "bloch", n)

    @classmethod
    def from_density(cls, rho) -> "QubitState":
        n = density_to_bloch(rho)
        norm = np.linalg.norm(n)
        if norm > 1:
            n = n / norm
        return cls(n)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.bloch))

    @property
    def purity(self) -> float:
        return 0.5 * (1 + self.norm**2)

    def density_matrix(self) -> np.ndarray:
        return bloch_to_density(self.bloch)

    def __eq__(self, other):
        if not isinstance(other, QubitState):
            return NotImplemented
        return bool(np.array_equal(self.bloch, other.bloch))

    def __hash__(self):
        return hash(self.bloch.tobytes())


MAXIMALLY_MIXED = QubitState(np.zeros(3))
MAX_COHERENT = QubitState(np.ones(3) / np.sqrt(3))
