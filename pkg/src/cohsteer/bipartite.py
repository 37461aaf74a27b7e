"""
Two-qubit states in Bloch-Fano form and Alice-side projective measurements.

A state is stored as ``(r, s, T)`` with

    eta = 1/4 (I x I + r.sigma x I + I x s.sigma + sum_ij T_ij sigma_i x sigma_j)

so ``r`` is Alice's Bloch vector, ``s`` Bob's and ``T[i, j] = Tr(eta sigma_i x
sigma_j)`` the correlation matrix. The 4x4 matrix is derived on demand.

When Alice projects onto the pure state with Bloch vector ``sign * u`` the
outcome has probability ``(1 + sign r.u)/2`` and Bob is left with Bloch vector
``(s + sign T^T u)/(1 + sign r.u)``. :func:`conditional_ensemble` uses that
formula; :func:`conditional_ensemble_partial_trace` computes the same states
with explicit projectors and partial traces.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .coherence import AXES, Axis
from .errors import DomainError, NotAState, SingularFilter, ZeroTrace
from .qubit_core import (
    ALGEBRA_TOL,
    EIGEN_TOL,
    IDENTITY2,
    PAULI,
    QubitState,
    is_hermitian,
)

ZERO_PROBABILITY = 1e-12

_EMBED_A = np.stack([np.kron(p, IDENTITY2) for p in PAULI])
_EMBED_B = np.stack([np.kron(IDENTITY2, p) for p in PAULI])
_EMBED_AB = np.stack([[np.kron(p, q) for q in PAULI] for p in PAULI])


def _as_vector(v, name) -> np.ndarray:
    v = np.array(v, dtype=float)
    if v.shape != (3,):
        raise NotAState(f"{name} must have 3 components, got shape {v.shape}")
    return v


@dataclass(frozen=True, eq=False)
class TwoQubitState:
    """Two-qubit state as (Alice Bloch r, Bob Bloch s, correlation matrix T)."""

    r: np.ndarray
    s: np.ndarray
    T: np.ndarray
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        r = _as_vector(self.r, "r")
        s = _as_vector(self.s, "s")
        t = np.array(self.T, dtype=float)
        if t.shape != (3, 3):
            raise NotAState(f"T must be 3x3, got shape {t.shape}")
        for name, arr in (("r", r), ("s", s), ("T", t)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.validate:
            if np.linalg.norm(r) > 1 + ALGEBRA_TOL or np.linalg.norm(s) > 1 + ALGEBRA_TOL:
                raise NotAState("local Bloch vectors must lie in the unit ball")
            smallest = np.linalg.eigvalsh(self.density_matrix())[0]
            if smallest < -EIGEN_TOL:
                raise NotAState(f"density matrix has eigenvalue {smallest!r}")

    @classmethod
    def from_density(cls, rho4, validate=True) -> "TwoQubitState":
        return two_qubit_from_density(rho4, validate=validate)

    def density_matrix(self) -> np.ndarray:
        rho = np.kron(IDENTITY2, IDENTITY2).astype(complex)
        rho += np.einsum("i,ijk->jk", self.r, _EMBED_A)
        rho += np.einsum("i,ijk->jk", self.s, _EMBED_B)
        rho += np.einsum("ij,ijkl->kl", self.T, _EMBED_AB)
        return rho / 4

    def marginal_a(self) -> QubitState:
        return QubitState(self.r)

    def marginal_b(self) -> QubitState:
        return QubitState(self.s)

    def is_product(self, tol=1e-10) -> bool:
        return bool(np.max(np.abs(self.T - np.outer(self.r, self.s))) <= tol)

    def allclose(self, other: "TwoQubitState", atol=1e-10) -> bool:
        return (
            np.allclose(self.r, other.r, atol=atol)
            and np.allclose(self.s, other.s, atol=atol)
            and np.allclose(self.T, other.T, atol=atol)
        )

    def to_json(self) -> dict:
        return {"r": self.r.tolist(), "s": self.s.tolist(), "T": self.T.tolist()}

    @classmethod
    def from_json(cls, data: dict) -> "TwoQubitState":
        """Accept {"r", "s", "T"} or {"matrix": [[{"re", "im"}, ...], ...]}.

        A bare 4x4 list of {"re", "im"} records is accepted as well.
        """
        if isinstance(data, dict) and {"r", "s", "T"} <= set(data):
            return cls(data["r"], data["s"], data["T"])
        rows = data.get("matrix") if isinstance(data, dict) else data
        if rows is None:
            raise NotAState("state JSON needs r/s/T or a 4x4 matrix")
        rho = np.array(
            [[complex(e["re"], e.get("im", 0.0)) if isinstance(e, dict) else complex(e)
              for e in row] for row in rows]
        )
        return two_qubit_from_density(rho)


def density_to_json(rho4) -> list:
    return [[{"re": float(e.real), "im": float(e.imag)} for e in row] for row in np.asarray(rho4)]


def two_qubit_from_density(rho4, validate=True) -> TwoQubitState:
    """Extract (r, s, T) from a 4x4 density matrix with Pauli traces."""
    rho = np.asarray(rho4, dtype=complex)
    if rho.shape != (4, 4):
        raise NotAState(f"expected a 4x4 matrix, got shape {rho.shape}")
    if not is_hermitian(rho, EIGEN_TOL):
        raise NotAState("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > EIGEN_TOL:
        raise NotAState(f"trace {np.trace(rho)!r} != 1")
    if np.linalg.eigvalsh(rho)[0] < -EIGEN_TOL:
        raise NotAState("density matrix is not positive semidefinite")
    r = np.real(np.einsum("ijk,kj->i", _EMBED_A, rho))
    s = np.real(np.einsum("ijk,kj->i", _EMBED_B, rho))
    t = np.real(np.einsum("abjk,kj->ab", _EMBED_AB, rho))
    return TwoQubitState(_fit_ball(r), _fit_ball(s), t, validate=validate)


def _fit_ball(v):
    norm = np.linalg.norm(v)
    return v / norm if norm > 1 else v


def product_state(a, b) -> TwoQubitState:
    a = QubitState(a).bloch if not isinstance(a, QubitState) else a.bloch
    b = QubitState(b).bloch if not isinstance(b, QubitState) else b.bloch
    return TwoQubitState(a, b, np.outer(a, b))


def maximally_mixed() -> TwoQubitState:
    return TwoQubitState(np.zeros(3), np.zeros(3), np.zeros((3, 3)))


def max_coherent_product() -> TwoQubitState:
    """rho_max x rho_max with rho_max = (I + (sx + sy + sz)/sqrt3)/2."""
    n = np.ones(3) / np.sqrt(3)
    return product_state(n, n)


def singlet() -> TwoQubitState:
    return werner_state(1.0)


def werner_state(p) -> TwoQubitState:
    """p |psi-><psi-| + (1 - p) I/4, psi- = (|01> - |10>)/sqrt2.

    With the Pauli convention used here the correlation matrix is -p I.
    """
    p = float(p)
    if not 0 <= p <= 1:
        raise DomainError(f"Werner weight p={p} outside [0, 1]")
    return TwoQubitState(np.zeros(3), np.zeros(3), -p * np.eye(3))


def pure_state(vector) -> TwoQubitState:
    """Two-qubit state of a (not necessarily normalised) 4-vector."""
    v = np.asarray(vector, dtype=complex)
    norm = np.linalg.norm(v)
    if norm == 0:
        raise NotAState("zero state vector")
    v = v / norm
    return two_qubit_from_density(np.outer(v, v.conj()))


def psi_alpha_vector(alpha) -> np.ndarray:
    """Normalised sqrt(a)|++> + sqrt(1 - a)|00>.

    The squared norm of the bare superposition is 1 + sqrt(a(1 - a)); the
    vector is divided by its computed norm.
    """
    alpha = float(alpha)
    if not 0 <= alpha <= 1:
        raise DomainError(f"alpha={alpha} outside [0, 1]")
    plus = np.array([1.0, 1.0]) / np.sqrt(2)
    zero = np.array([1.0, 0.0])
    v = np.sqrt(alpha) * np.kron(plus, plus) + np.sqrt(1 - alpha) * np.kron(zero, zero)
    return (v / np.linalg.norm(v)).astype(complex)


def psi_alpha_state(alpha) -> TwoQubitState:
    return pure_state(psi_alpha_vector(alpha))


def linear_entropy_of_marginal(state: TwoQubitState, scale=1.0) -> float:
    """S_L = scale * (1 - Tr rho_B^2) = scale * (1 - |s|^2)/2.

    ``scale=1`` reproduces S_L(a) = a(1 - a) / (2 (sqrt(a(1 - a)) + 1)^2) for
    the psi_alpha family.
    """
    return float(scale * 0.5 * (1 - np.dot(state.s, state.s)))


def psi_alpha_linear_entropy(alpha):
    """Closed form of the marginal linear entropy of psi_alpha."""
    x = np.asarray(alpha, dtype=float) * (1 - np.asarray(alpha, dtype=float))
    return x / (2 * (np.sqrt(x) + 1) ** 2)


# measurements


def ket_bloch(ket) -> np.ndarray:
    """Bloch vector(s) of normalised kets, shape (..., 2) -> (..., 3)."""
    ket = np.asarray(ket, dtype=complex)
    a, b = ket[..., 0], ket[..., 1]
    off = np.conj(a) * b
    return np.stack([2 * off.real, 2 * off.imag, np.abs(a) ** 2 - np.abs(b) ** 2], axis=-1)


def triad_kets(theta, phi) -> np.ndarray:
    """Kets of the rotated triad, shape (..., 3 bases, 2 outcomes, 2).

    |z+> = cos(t/2)|0> + e^{i phi} sin(t/2)|1>, |z-> the orthogonal state
    -e^{-i phi} sin(t/2)|0> + cos(t/2)|1>; the x and y bases are
    (|z+> +- |z->)/sqrt2 and (|z+> +- i|z->)/sqrt2. (0, 0) gives the Pauli
    eigenbases with outcome 0 on the +1 eigenvector.
    """
    theta, phi = np.broadcast_arrays(np.asarray(theta, dtype=float), np.asarray(phi, dtype=float))
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    zp = np.stack([c + 0j, np.exp(1j * phi) * s], axis=-1)
    zm = np.stack([-np.exp(-1j * phi) * s, c + 0j], axis=-1)
    root = np.sqrt(0.5)
    bases = [
        [(zp + zm) * root, (zp - zm) * root],
        [(zp + 1j * zm) * root, (zp - 1j * zm) * root],
        [zp, zm],
    ]
    return np.stack([np.stack(b, axis=-2) for b in bases], axis=-3)


def triad_axes(theta, phi) -> np.ndarray:
    """Bloch directions of outcome 0 of each basis, shape (..., 3, 3).

    Row j is u_j; outcome 1 of basis j has Bloch vector -u_j.
    """
    return ket_bloch(triad_kets(theta, phi)[..., 0, :])


@dataclass(frozen=True)
class MeasurementTriad:
    """Three mutually unbiased projective bases for Alice, set by (theta, phi)."""

    theta: float = 0.0
    phi: float = 0.0

    def kets(self) -> np.ndarray:
        return triad_kets(self.theta, self.phi)

    def axes(self) -> np.ndarray:
        return triad_axes(self.theta, self.phi)

    def projectors(self) -> np.ndarray:
        k = self.kets()
        return np.einsum("bai,baj->baij", k, k.conj())


PAULI_TRIAD = MeasurementTriad(0.0, 0.0)


def random_triad(rng) -> MeasurementTriad:
    rng = np.random.default_rng(rng)
    return MeasurementTriad(float(np.arccos(rng.uniform(-1, 1))), float(rng.uniform(0, 2 * np.pi)))


class ConditionalEntry(NamedTuple):
    alice_axis: Axis
    outcome: int
    probability: float
    state: QubitState


@dataclass(frozen=True)
class ConditionalEnsemble:
    """Bob's conditional states for each Alice basis and outcome.

    ``axes`` holds the Bloch directions Alice measured along (row j for basis
    j). Branches with probability below ``ZERO_PROBABILITY`` are listed in
    ``dropped`` as (axis, outcome) pairs instead of ``entries``.
    """

    entries: tuple
    axes: np.ndarray
    dropped: tuple = ()

    def for_axis(self, axis) -> list:
        return [e for e in self.entries if e.alice_axis == Axis.parse(axis)]

    def average_bloch(self, axis) -> np.ndarray:
        return sum(e.probability * e.state.bloch for e in self.for_axis(axis))


def measurement_axes(triad) -> np.ndarray:
    if triad is None:
        return PAULI_TRIAD.axes()
    if isinstance(triad, MeasurementTriad):
        return triad.axes()
    axes = np.asarray(triad, dtype=float)
    if axes.shape != (3, 3):
        raise ValueError(f"measurement axes must be 3x3, got {axes.shape}")
    return axes / np.linalg.norm(axes, axis=1, keepdims=True)


def conditional_ensemble(state: TwoQubitState, triad=None) -> ConditionalEnsemble:
    """Bob's six conditional states from the Bloch-form update.

    ``triad`` is a :class:`MeasurementTriad`, a 3x3 array whose rows are
    measurement directions, or None for the Pauli bases.
    """
    axes = measurement_axes(triad)
    entries, dropped = [], []
    for j, u in zip(AXES, axes):
        for a, sign in ((0, 1.0), (1, -1.0)):
            weight = 1 + sign * np.dot(state.r, u)
            p = weight / 2
            if p <= ZERO_PROBABILITY:
                dropped.append((j, a))
                continue
            bloch = (state.s + sign * state.T.T @ u) / weight
            entries.append(ConditionalEntry(j, a, float(p), QubitState(_fit_ball(bloch))))
    return ConditionalEnsemble(tuple(entries), axes, tuple(dropped))


def conditional_ensemble_partial_trace(state: TwoQubitState, triad=None) -> ConditionalEnsemble:
    """Same ensemble via Tr_A[(P x I) eta (P x I)] / p with explicit projectors."""
    if triad is None or isinstance(triad, MeasurementTriad):
        kets = (triad or PAULI_TRIAD).kets()
    else:
        kets = _kets_from_axes(measurement_axes(triad))
    rho = state.density_matrix()
    entries, dropped = [], []
    for j in AXES:
        for a in (0, 1):
            k = kets[j, a]
            proj = np.kron(np.outer(k, k.conj()), IDENTITY2)
            post = proj @ rho @ proj
            bob = np.einsum("ijik->jk", post.reshape(2, 2, 2, 2))
            p = float(np.trace(bob).real)
            if p <= ZERO_PROBABILITY:
                dropped.append((j, a))
                continue
            entries.append(ConditionalEntry(j, a, p, QubitState.from_density(bob / p)))
    return ConditionalEnsemble(tuple(entries), ket_bloch(kets[:, 0]), tuple(dropped))


def _kets_from_axes(axes) -> np.ndarray:
    theta = np.arccos(np.clip(axes[:, 2], -1, 1))
    phi = np.arctan2(axes[:, 1], axes[:, 0])
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    up = np.stack([c + 0j, np.exp(1j * phi) * s], axis=-1)
    down = np.stack([-np.exp(-1j * phi) * s, c + 0j], axis=-1)
    return np.stack([up, down], axis=1)


# closed-form conditional quantities for the Pauli triad


def alpha_coefficients(state: TwoQubitState) -> np.ndarray:
    """alpha[a, j, i] = s_i + (-1)^a t_ji (Alice axis j, Bob component i)."""
    return np.stack([state.s[None, :] + state.T, state.s[None, :] - state.T])


def gamma_coefficients(state: TwoQubitState) -> np.ndarray:
    """gamma[a, k] = 1 + (-1)^a r_k; outcome probability is gamma/2."""
    return np.stack([1 + state.r, 1 - state.r])


def conditional_eigenvalues(state: TwoQubitState) -> np.ndarray:
    """lambda[a, j, +/-] = 1/2 +- sqrt(sum_i alpha[a, j, i]^2) / (2 gamma[a, j])."""
    alpha = alpha_coefficients(state)
    gamma = gamma_coefficients(state)
    half = np.linalg.norm(alpha, axis=-1) / (2 * gamma)
    return np.stack([0.5 + half, 0.5 - half], axis=-1)


def conditional_diagonals(state: TwoQubitState) -> np.ndarray:
    """beta[a, j, i, +/-] = 1/2 +- alpha[a, j, i] / (2 gamma[a, j])."""
    alpha = alpha_coefficients(state)
    gamma = gamma_coefficients(state)
    half = alpha / (2 * gamma[..., None])
    return np.stack([0.5 + half, 0.5 - half], axis=-1)


# local operations


def apply_local_operator(state: TwoQubitState, op, side="bob") -> TwoQubitState:
    """(K x I) eta (K x I)^dag (or I x K) renormalised."""
    op = np.asarray(op, dtype=complex)
    side = _side(side)
    k = np.kron(op, IDENTITY2) if side == "alice" else np.kron(IDENTITY2, op)
    out = k @ state.density_matrix() @ k.conj().T
    tr = np.trace(out).real
    if tr < 1e-14:
        raise ZeroTrace(f"filtered trace {tr!r}")
    out = out / tr
    out = 0.5 * (out + out.conj().T)
    return two_qubit_from_density(out)


def filter_operator(theta) -> np.ndarray:
    theta = float(theta)
    c, s = np.cos(theta), np.sin(theta)
    if not 0 < theta < np.pi / 2 or c < 1e-12 or s < 1e-12:
        raise SingularFilter(f"filter angle {theta} must lie strictly inside (0, pi/2)")
    return np.diag([1 / c, 1 / s]).astype(complex)


def local_filter(state: TwoQubitState, theta, side="bob") -> TwoQubitState:
    """Apply F(theta) = diag(1/cos theta, 1/sin theta) on one side and renormalise."""
    return apply_local_operator(state, filter_operator(theta), side)


def _side(side) -> str:
    key = str(side).lower()
    if key in ("a", "alice"):
        return "alice"
    if key in ("b", "bob"):
        return "bob"
    raise ValueError(f"side must be 'alice' or 'bob', got {side!r}")


# separable sampling


def random_bloch(rng, size=None, pure=False) -> np.ndarray:
    """Bloch vectors uniform in the ball (or on the sphere when ``pure``)."""
    rng = np.random.default_rng(rng)
    shape = (3,) if size is None else (*np.atleast_1d(size), 3)
    v = rng.normal(size=shape)
    v /= np.linalg.norm(v, axis=-1, keepdims=True)
    if not pure:
        v *= rng.random(size=shape[:-1] + (1,)) ** (1 / 3)
    return v


def sample_separable(num_terms=None, rng_seed=0, pure=False, max_terms=8) -> TwoQubitState:
    """Random convex mixture of product states.

    Weights are Dirichlet(1, ..., 1); local Bloch vectors are uniform in the
    ball, or on the sphere with ``pure=True``. ``num_terms=None`` draws the
    number of terms uniformly from 1..max_terms. ``rng_seed`` may be an int
    or a ``numpy.random.Generator``.
    """
    rng = np.random.default_rng(rng_seed)
    if num_terms is None:
        num_terms = int(rng.integers(1, max_terms + 1))
    if num_terms < 1:
        raise DomainError("num_terms must be >= 1")
    weights = rng.dirichlet(np.ones(num_terms))
    a = random_bloch(rng, num_terms, pure)
    b = random_bloch(rng, num_terms, pure)
    r = weights @ a
    s = weights @ b
    t = np.einsum("k,ki,kj->ij", weights, a, b)
    return TwoQubitState(r, s, t)
