"""
Skew information of general qubit observables and non-local speed limits.

For K = c I + r.sigma and a state with Bloch vector n,

    C_K(rho) = -1/2 Tr[sqrt(rho), K]^2 = (1 - sqrt(1 - |n|^2)) |n x r|^2 / |n|^2.

For a triple of observables the sum of C_K over the triple is bounded by a
constant ``m`` that depends on the observables only. Using the evolution-time
bound T_b = (hbar/sqrt2) arccos A(rho1, rho2) / sqrt(C_H(rho1)) with the
affinity A = Tr(sqrt(rho1) sqrt(rho2)), the steering inequality

    1/2 sum p (arccos A_{K_r} / T_b(K_r))^2 <= 2 m / hbar^2

holds for every single-system description. hbar = 1 throughout.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize

from .bipartite import TwoQubitState, conditional_ensemble
from .coherence import bloch_array, skew_along, skew_information_from_matrix
from .errors import DegenerateObservable, StationaryState
from .qubit_core import IDENTITY2, PAULI, QubitState, matrix_sqrt_psd

STATIONARY_TOL = 1e-12
VIOLATION_BAND = 1e-9


@dataclass(frozen=True, eq=False)
class Observable:
    """K = c I + r.sigma."""

    c: float
    r: np.ndarray

    def __post_init__(self):
        r = np.array(self.r, dtype=float)
        if r.shape != (3,):
            raise ValueError(f"observable needs 3 Pauli coefficients, got shape {r.shape}")
        r.setflags(write=False)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "c", float(self.c))

    @classmethod
    def from_json(cls, data: dict) -> "Observable":
        return cls(data.get("c", 0.0), data["r"])

    @classmethod
    def from_matrix(cls, m) -> "Observable":
        m = np.asarray(m, dtype=complex)
        c = 0.5 * np.trace(m).real
        r = 0.5 * np.real(np.einsum("ijk,kj->i", PAULI, m))
        return cls(c, r)

    def to_json(self) -> dict:
        return {"c": self.c, "r": self.r.tolist()}

    def matrix(self) -> np.ndarray:
        return self.c * IDENTITY2 + np.einsum("i,ijk->jk", self.r, PAULI)

    def axis(self) -> np.ndarray:
        """Bloch direction of the top eigenvector of K."""
        norm = np.linalg.norm(self.r)
        if norm < 1e-15:
            raise DegenerateObservable("observable is proportional to the identity")
        return self.r / norm


def observable_skew(state, K: Observable):
    """Skew information of ``K`` in ``state``; the identity part drops out."""
    return skew_along(bloch_array(state), K.r)


def observable_skew_from_matrix(rho, K: Observable) -> float:
    return skew_information_from_matrix(rho, K.matrix())


def _skew_gram(observables) -> np.ndarray:
    # on the unit sphere sum_r |n x r_r|^2 = n^T (sum_r |r_r|^2 I - r_r r_r^T) n
    return sum(np.dot(k.r, k.r) * np.eye(3) - np.outer(k.r, k.r) for k in observables)


def complementarity_constant(triple) -> float:
    """Maximum of sum_r C_{K_r} over the Bloch ball.

    The radial factor is largest on the unit sphere, where the sum is a
    quadratic form; ``m`` is its largest eigenvalue.
    """
    observables = getattr(triple, "observables", triple)
    return float(np.linalg.eigvalsh(_skew_gram(observables))[-1])


def complementarity_constant_grid(triple, resolution=64, polish=True) -> float:
    """Direct maximisation over pure states on a (theta, phi) grid.

    ``polish`` refines the best grid point with a local optimiser.
    """
    if resolution < 64:
        raise ValueError("resolution must be at least 64")
    observables = getattr(triple, "observables", triple)
    theta = np.linspace(0, np.pi, resolution)
    phi = np.linspace(0, 2 * np.pi, 2 * resolution, endpoint=False)
    th, ph = np.meshgrid(theta, phi, indexing="ij")

    def total(n):
        return sum(observable_skew(n, k) for k in observables)

    def sphere(t, p):
        return np.stack([np.sin(t) * np.cos(p), np.sin(t) * np.sin(p), np.cos(t)], axis=-1)

    values = total(sphere(th, ph))
    i, j = np.unravel_index(np.argmax(values), values.shape)
    best = float(values[i, j])
    if polish:
        res = minimize(lambda x: -float(total(sphere(x[0], x[1]))), [th[i, j], ph[i, j]],
                       method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-14})
        best = max(best, -float(res.fun))
    return best


@dataclass(frozen=True, eq=False)
class ObservableTriple:
    K1: Observable
    K2: Observable
    K3: Observable

    @property
    def observables(self) -> tuple:
        return (self.K1, self.K2, self.K3)

    @cached_property
    def m(self) -> float:
        return complementarity_constant(self)

    @classmethod
    def pauli(cls) -> "ObservableTriple":
        e = np.eye(3)
        return cls(Observable(0, e[0]), Observable(0, e[1]), Observable(0, e[2]))

    @classmethod
    def from_json(cls, data) -> "ObservableTriple":
        items = data["observables"] if isinstance(data, dict) else data
        if len(items) != 3:
            raise ValueError("an observable triple needs exactly three observables")
        return cls(*(Observable.from_json(d) for d in items))

    def to_json(self) -> dict:
        return {"observables": [k.to_json() for k in self.observables], "m": self.m}


# K1 = I/2 + 2 sx, K2 = sx + 2 sy, K3 = I + sy
EXAMPLE_TRIPLE = ObservableTriple(
    Observable(0.5, [2, 0, 0]),
    Observable(0.0, [1, 2, 0]),
    Observable(1.0, [0, 1, 0]),
)


def _as_density(state) -> np.ndarray:
    if isinstance(state, QubitState):
        return state.density_matrix()
    m = np.asarray(state)
    if m.shape == (3,):
        return QubitState(m).density_matrix()
    return QubitState.from_density(m).density_matrix()


def affinity(rho1, rho2) -> float:
    """Tr(sqrt(rho1) sqrt(rho2)) for two qubit states."""
    a = np.trace(matrix_sqrt_psd(_as_density(rho1)) @ matrix_sqrt_psd(_as_density(rho2)))
    return float(np.clip(a.real, 0.0, 1.0))


def affinity_angle(rho1, rho2) -> float:
    """arccos A(rho1, rho2), evaluated as 2 arcsin(||sqrt(rho1) - sqrt(rho2)||_F / 2).

    Uses 1 - A = ||sqrt(rho1) - sqrt(rho2)||_F^2 / 2 for unit-trace states,
    which stays accurate where arccos is ill-conditioned (A near 1).
    """
    diff = matrix_sqrt_psd(_as_density(rho1)) - matrix_sqrt_psd(_as_density(rho2))
    dist = float(np.sqrt(np.sum(np.abs(diff) ** 2)))
    return 2 * math.asin(min(1.0, dist / 2))


def evolution_operator(H: Observable, t) -> np.ndarray:
    """U = exp(i H t) in closed form."""
    norm = np.linalg.norm(H.r)
    gen = np.einsum("i,ijk->jk", H.r / norm, PAULI) if norm > 0 else np.zeros((2, 2))
    return np.exp(1j * H.c * t) * (np.cos(norm * t) * IDENTITY2 + 1j * np.sin(norm * t) * gen)


def evolve(state, H: Observable, t) -> QubitState:
    u = evolution_operator(H, t)
    rho = u @ _as_density(state) @ u.conj().T
    return QubitState.from_density(0.5 * (rho + rho.conj().T))


class SpeedLimit(NamedTuple):
    T_b: float
    evolved: QubitState
    affinity: float
    angle: float
    skew: float


def qsl_bound(H: Observable, rho1, t) -> SpeedLimit:
    """Lower bound T_b on the time to reach U(t) rho1 U(t)^dag."""
    if t < 0:
        raise ValueError("evolution time must be non-negative")
    start = rho1 if isinstance(rho1, QubitState) else QubitState.from_density(_as_density(rho1))
    skew = float(observable_skew(start, H))
    if skew <= STATIONARY_TOL:
        raise StationaryState(f"skew information {skew!r} of the state under H is zero")
    end = evolve(start, H, t)
    angle = affinity_angle(start, end)
    t_b = angle / (math.sqrt(2) * math.sqrt(skew))
    return SpeedLimit(t_b, end, affinity(start, end), angle, skew)


def speed_ratio_sq(H: Observable, rho1, t) -> float:
    """(arccos A / T_b)^2, which equals 2 C_H(rho1) whenever T_b > 0."""
    lim = qsl_bound(H, rho1, t)
    if lim.T_b == 0.0:
        # U(t) returned to rho1: the ratio is 0/0, continue with its value elsewhere
        return 2 * lim.skew
    return (lim.angle / lim.T_b) ** 2


class QSLTerm(NamedTuple):
    alice_observable: int
    outcome: int
    bob_observable: int
    probability: float
    ratio_sq: float


@dataclass(frozen=True)
class QSLReport:
    functional_value: float
    m: float
    terms: tuple
    dropped: tuple = ()

    @property
    def bound(self) -> float:
        return 2 * self.m

    @property
    def violated(self) -> bool:
        return self.functional_value > self.bound + VIOLATION_BAND

    def to_json(self) -> dict:
        return {
            "functional_value": self.functional_value,
            "m": self.m,
            "bound": self.bound,
            "violated": self.violated,
            "terms": [t._asdict() for t in self.terms],
        }


def nonlocal_qsl_functional(state: TwoQubitState, triple: ObservableTriple, t=1.0) -> QSLReport:
    """Alice measures in the eigenbasis of K_s; Bob's conditional states evolve under K_r, r != s.

    Each term is p * (arccos A / T_b)^2 evaluated from an actual evolution
    of duration ``t``; stationary branches contribute 0.
    """
    observables = triple.observables
    axes = np.stack([k.axis() for k in observables])
    ensemble = conditional_ensemble(state, axes)
    terms = []
    for entry in ensemble.entries:
        s = int(entry.alice_axis)
        for r, K in enumerate(observables):
            if r == s:
                continue
            try:
                ratio = speed_ratio_sq(K, entry.state, t)
            except StationaryState:
                ratio = 0.0
            terms.append(QSLTerm(s + 1, entry.outcome, r + 1, entry.probability, ratio))
    value = 0.5 * math.fsum(x.probability * x.ratio_sq for x in terms)
    return QSLReport(value, triple.m, tuple(terms), ensemble.dropped)
