"""
Basis-dependent coherence of a qubit and the three-basis complementarity sums.

Three measures are provided, each as a closed form in the Bloch vector:

* l1-norm:            C_i = sqrt(n_j^2 + n_k^2)
* relative entropy:   C_i = H((1 + n_i)/2) - H((1 + |n|)/2)
* skew information:   C_i = (n_j^2 + n_k^2)(1 - sqrt(1 - |n|^2)) / |n|^2

Summed over the three Pauli bases they obey the bounds sqrt(6),
``RELATIVE_ENTROPY_BOUND`` (~2.2320) and 2 respectively.

The closed forms accept either a :class:`QubitState` or an array of Bloch
vectors of shape ``(..., 3)`` and broadcast over the leading axes. The
``*_from_matrix`` functions evaluate the definitions directly on density
matrices; they are slower and exist to cross-check the closed forms.
"""
from __future__ import annotations

import enum

import numpy as np

from .qubit_core import (
    PAULI,
    QubitState,
    binary_entropy,
    matrix_sqrt_psd,
    von_neumann_entropy,
)

SQRT3 = np.sqrt(3.0)

# maximum of the relative-entropy sum, reached at n = (1, 1, 1)/sqrt(3)
RELATIVE_ENTROPY_BOUND = float(
    -SQRT3 * (1 + SQRT3) / 2 * np.log2((1 + SQRT3) / (2 * SQRT3))
    - SQRT3 * (SQRT3 - 1) / 2 * np.log2((SQRT3 - 1) / (2 * SQRT3))
)


class Measure(enum.Enum):
    L1 = "l1"
    ENTROPY = "entropy"
    SKEW = "skew"

    @property
    def bound(self) -> float:
        return _BOUNDS[self]

    @classmethod
    def parse(cls, value) -> "Measure":
        if isinstance(value, Measure):
            return value
        key = str(value).lower().replace("-", "_")
        aliases = {
            "l1": cls.L1,
            "entropy": cls.ENTROPY,
            "relative_entropy": cls.ENTROPY,
            "relativeentropy": cls.ENTROPY,
            "skew": cls.SKEW,
            "skew_information": cls.SKEW,
            "skewinformation": cls.SKEW,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown coherence measure {value!r}") from None


_BOUNDS = {
    Measure.L1: float(np.sqrt(6.0)),
    Measure.ENTROPY: RELATIVE_ENTROPY_BOUND,
    Measure.SKEW: 2.0,
}


class Axis(enum.IntEnum):
    X = 0
    Y = 1
    Z = 2

    @classmethod
    def parse(cls, value) -> "Axis":
        if isinstance(value, str):
            return cls[value.upper()]
        return cls(value)


AXES = (Axis.X, Axis.Y, Axis.Z)


def bloch_array(state) -> np.ndarray:
    if isinstance(state, QubitState):
        return state.bloch
    return np.asarray(state, dtype=float)


def _scalarize(value):
    return float(value) if np.ndim(value) == 0 else value


def _unit(axis) -> np.ndarray:
    return np.eye(3)[int(Axis.parse(axis))]


def _cross_sq(n, direction):
    return np.sum(np.cross(n, direction) ** 2, axis=-1)


def _skew_radial_factor(norm_sq):
    """(1 - sqrt(1 - x)) / x, continued to 1/2 at x = 0."""
    x = np.clip(norm_sq, 0.0, 1.0)
    # algebraically equal to 1/(1 + sqrt(1-x)) which has no 0/0
    return 1.0 / (1.0 + np.sqrt(1.0 - x))


def l1_along(n, direction):
    """l1 coherence in the eigenbasis of ``direction . sigma`` (unit direction)."""
    return _scalarize(np.sqrt(_cross_sq(n, direction)))


def entropy_along(n, direction):
    n = np.asarray(n, dtype=float)
    proj = np.clip(np.sum(n * direction, axis=-1), -1.0, 1.0)
    norm = np.clip(np.linalg.norm(n, axis=-1), 0.0, 1.0)
    value = binary_entropy((1 + proj) / 2) - binary_entropy((1 + norm) / 2)
    return _scalarize(np.maximum(value, 0.0))


def skew_along(n, direction):
    """Skew information -1/2 Tr[sqrt(rho), r.sigma]^2 for any real 3-vector ``direction``."""
    n = np.asarray(n, dtype=float)
    norm_sq = np.sum(n * n, axis=-1)
    return _scalarize(_cross_sq(n, direction) * _skew_radial_factor(norm_sq))


_ALONG = {Measure.L1: l1_along, Measure.ENTROPY: entropy_along, Measure.SKEW: skew_along}


def coherence_along(state, direction, measure):
    return _ALONG[Measure.parse(measure)](bloch_array(state), np.asarray(direction, dtype=float))


def l1_coherence(state, axis):
    return l1_along(bloch_array(state), _unit(axis))


def relative_entropy_coherence(state, axis):
    return entropy_along(bloch_array(state), _unit(axis))


def skew_coherence(state, axis):
    """Skew-information coherence; 0 at the maximally mixed state."""
    return skew_along(bloch_array(state), _unit(axis))


def coherence(state, axis, measure):
    return coherence_along(state, _unit(axis), measure)


def coherence_profile(state, measure) -> np.ndarray:
    """Coherences in the X, Y, Z bases, stacked on the last axis."""
    n = bloch_array(state)
    return np.stack([coherence_along(n, _unit(a), measure) for a in AXES], axis=-1)


def complementarity_sum(state, measure):
    """Sum of the chosen coherence over the three Pauli bases."""
    return _scalarize(np.sum(coherence_profile(state, measure), axis=-1))


def skew_sum_closed_form(state):
    """2 (1 - sqrt(1 - |n|^2)); depends only on the Bloch radius."""
    n = bloch_array(state)
    norm_sq = np.clip(np.sum(n * n, axis=-1), 0.0, 1.0)
    return _scalarize(2 * (1 - np.sqrt(1 - norm_sq)))


# definition-level evaluations on density matrices


def _basis_change(axis):
    _, vectors = np.linalg.eigh(PAULI[int(Axis.parse(axis))])
    return vectors


def l1_coherence_from_matrix(rho, axis) -> float:
    """Sum of absolute off-diagonal entries of rho in the sigma_axis eigenbasis."""
    v = _basis_change(axis)
    rotated = v.conj().T @ np.asarray(rho, dtype=complex) @ v
    return float(np.sum(np.abs(rotated)) - np.sum(np.abs(np.diag(rotated))))


def relative_entropy_coherence_from_matrix(rho, axis) -> float:
    """S(rho_D) - S(rho) with rho_D the decohered state in the sigma_axis eigenbasis."""
    v = _basis_change(axis)
    rho = np.asarray(rho, dtype=complex)
    rotated = v.conj().T @ rho @ v
    dephased = np.diag(np.diag(rotated))
    return von_neumann_entropy(dephased) - float(-np.sum(
        [lam * np.log2(lam) for lam in np.linalg.eigvalsh(rho) if lam > 0]
    ))


def skew_information_from_matrix(rho, observable) -> float:
    """-1/2 Tr([sqrt(rho), K]^2) evaluated with matrices."""
    root = matrix_sqrt_psd(rho)
    k = np.asarray(observable, dtype=complex)
    comm = root @ k - k @ root
    return float(-0.5 * np.trace(comm @ comm).real)


def skew_coherence_from_matrix(rho, axis) -> float:
    return skew_information_from_matrix(rho, PAULI[int(Axis.parse(axis))])
