"""
Coherence steering functionals and the scans built on them.

For a measurement triad with directions u_x, u_y, u_z the functional is

    1/2 * sum_{j, a} p(a|j) * sum_{i != j} C_i(eta_B|j,a)

and a value above the single-system bound of the measure (sqrt 6, ~2.232,
2) signals a non-local advantage of coherence. Bob evaluates coherence in
the fixed Pauli bases unless ``bob_frame="triad"``.

:func:`steering_functional` builds a full :class:`SteeringReport` from the
conditional ensemble. :func:`functional_values` evaluates the same sum
directly on arrays of (r, s, T) and triad axes and is used by the scans.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import bisect

from .bipartite import (
    PAULI_TRIAD,
    ZERO_PROBABILITY,
    MeasurementTriad,
    TwoQubitState,
    conditional_ensemble,
    local_filter,
    measurement_axes,
    random_triad,
    sample_separable,
    triad_axes,
    werner_state,
)
from .coherence import AXES, Axis, Measure, binary_entropy, coherence_along
from .errors import NoCrossing

VIOLATION_BAND = 1e-9
DEFAULT_P_TOL = 1e-6
MAX_BISECTIONS = 60


class Term(NamedTuple):
    alice_axis: Axis
    outcome: int
    bob_axis: Axis
    probability: float
    coherence: float


@dataclass(frozen=True)
class SteeringReport:
    measure: Measure
    functional_value: float
    bound: float
    terms: tuple
    dropped: tuple = ()

    @property
    def margin(self) -> float:
        return self.functional_value - self.bound

    @property
    def violated(self) -> bool:
        return self.margin > VIOLATION_BAND

    @property
    def inconclusive(self) -> bool:
        """Within the exclusion band around the bound."""
        return abs(self.margin) <= VIOLATION_BAND

    def to_json(self) -> dict:
        return {
            "measure": self.measure.value,
            "functional_value": self.functional_value,
            "bound": self.bound,
            "violated": self.violated,
            "inconclusive": self.inconclusive,
            "terms": [
                {
                    "alice_axis": t.alice_axis.name,
                    "outcome": t.outcome,
                    "bob_axis": t.bob_axis.name,
                    "probability": t.probability,
                    "coherence": t.coherence,
                }
                for t in self.terms
            ],
            "dropped": [[ax.name, a] for ax, a in self.dropped],
        }


def _bob_directions(axes, bob_frame):
    if bob_frame == "pauli":
        return np.broadcast_to(np.eye(3), np.shape(axes))
    if bob_frame == "triad":
        return axes
    raise ValueError(f"bob_frame must be 'pauli' or 'triad', got {bob_frame!r}")


def steering_functional(state: TwoQubitState, triad=None, measure=Measure.L1,
                        bob_frame="pauli") -> SteeringReport:
    """Evaluate the coherence steering functional and compare with the bound."""
    measure = Measure.parse(measure)
    ensemble = conditional_ensemble(state, triad)
    bob_dirs = _bob_directions(ensemble.axes, bob_frame)
    terms = []
    for entry in ensemble.entries:
        for i in AXES:
            if i == entry.alice_axis:
                continue
            c = float(coherence_along(entry.state, bob_dirs[i], measure))
            terms.append(Term(entry.alice_axis, entry.outcome, i, entry.probability, c))
    value = 0.5 * math.fsum(t.probability * t.coherence for t in terms)
    return SteeringReport(measure, value, measure.bound, tuple(terms), ensemble.dropped)


def functional_values(r, s, T, axes, measure, bob_frame="pauli") -> np.ndarray:
    """Vectorised steering functional.

    ``r``, ``s`` have shape (..., 3), ``T`` (..., 3, 3) and ``axes``
    (..., 3, 3) with row j the direction of Alice's basis j; leading shapes
    broadcast.
    """
    measure = Measure.parse(measure)
    r, s, T, axes = (np.asarray(x, dtype=float) for x in (r, s, T, axes))
    bob_dirs = _bob_directions(axes, bob_frame)
    total = 0.0
    for j in range(3):
        u = axes[..., j, :]
        ru = np.sum(r * u, axis=-1)
        tu = np.einsum("...ij,...i->...j", T, u)
        for sign in (1.0, -1.0):
            weight = 1 + sign * ru
            p = weight / 2
            live = p > ZERO_PROBABILITY
            safe = np.where(live, weight, 1.0)[..., None]
            bob = (s + sign * tu) / safe
            norm = np.linalg.norm(bob, axis=-1, keepdims=True)
            bob = np.where(norm > 1, bob / np.maximum(norm, 1e-300), bob)
            for i in range(3):
                if i == j:
                    continue
                c = coherence_along(bob, bob_dirs[..., i, :], measure)
                total = total + np.where(live, p * c, 0.0)
    return 0.5 * np.asarray(total)


def state_functional(state: TwoQubitState, triad=None, measure=Measure.L1,
                     bob_frame="pauli") -> float:
    axes = measurement_axes(triad)
    return float(functional_values(state.r, state.s, state.T, axes, measure, bob_frame))


def werner_functional_closed_form(p, measure):
    """3p, 3(1 - H((1+p)/2)) and 3(1 - sqrt(1 - p^2)) for the Pauli triad."""
    measure = Measure.parse(measure)
    p = np.asarray(p, dtype=float)
    if measure is Measure.L1:
        out = 3 * p
    elif measure is Measure.ENTROPY:
        out = 3 * (1 - binary_entropy((1 + p) / 2))
    else:
        out = 3 * (1 - np.sqrt(1 - p**2))
    return float(out) if np.ndim(out) == 0 else out


def _first_crossing(g, lo, hi, tol, coarse=None):
    """Smallest x in [lo, hi] with g(x) > 0, located by scan then bisection."""
    grid = np.linspace(lo, hi, coarse) if coarse else np.array([lo, hi])
    values = [g(x) for x in grid]
    if values[0] > 0:
        return float(grid[0])
    for k in range(1, len(grid)):
        if values[k] > 0:
            return float(bisect(g, grid[k - 1], grid[k], xtol=tol, maxiter=MAX_BISECTIONS))
    raise NoCrossing("functional does not exceed its bound on the interval")


def werner_threshold(measure=Measure.L1, tol=DEFAULT_P_TOL) -> float:
    """Werner weight above which the Pauli-triad functional exceeds the bound."""
    measure = Measure.parse(measure)
    if tol <= 0:
        raise ValueError("tol must be positive")
    axes = PAULI_TRIAD.axes()

    def g(p):
        w = werner_state(p)
        return float(functional_values(w.r, w.s, w.T, axes, measure)) - measure.bound

    return _first_crossing(g, 0.0, 1.0, tol)


class FilterPoint(NamedTuple):
    theta: float
    critical_p: float


def filtered_werner_functional(p, theta, measure, side="bob", triad=None) -> float:
    return state_functional(local_filter(werner_state(p), theta, side), triad, measure)


def filter_sweep(measure=Measure.L1, side="bob", theta_grid=None, p_tol=DEFAULT_P_TOL,
                 coarse=21) -> list:
    """Critical Werner weight after local filtering, for each filter angle.

    The returned critical_p is NaN where no p <= 1 violates.
    """
    measure = Measure.parse(measure)
    if theta_grid is None:
        theta_grid = np.linspace(0.05, np.pi / 2 - 0.05, 61)
    out = []
    for theta in theta_grid:
        def g(p, theta=theta):
            return filtered_werner_functional(p, theta, measure, side) - measure.bound
        try:
            crit = _first_crossing(g, 0.0, 1.0, p_tol, coarse)
        except NoCrossing:
            crit = math.nan
        out.append(FilterPoint(float(theta), crit))
    return out


@dataclass(frozen=True)
class MubScan:
    state: TwoQubitState
    measure: Measure
    theta: np.ndarray
    phi: np.ndarray
    values: np.ndarray
    bob_frame: str = "pauli"

    @property
    def bound(self) -> float:
        return self.measure.bound

    @property
    def violated(self) -> np.ndarray:
        return self.values > self.bound + VIOLATION_BAND

    @property
    def any_violation(self) -> bool:
        return bool(self.violated.any())

    @property
    def violation_fraction(self) -> float:
        return float(self.violated.mean())

    @property
    def max_value(self) -> float:
        return float(self.values.max())

    @property
    def argmax(self) -> tuple:
        i, j = np.unravel_index(np.argmax(self.values), self.values.shape)
        return float(self.theta[i]), float(self.phi[j])

    def report(self, i, j) -> SteeringReport:
        triad = MeasurementTriad(float(self.theta[i]), float(self.phi[j]))
        return steering_functional(self.state, triad, self.measure, self.bob_frame)

    def rows(self):
        """(theta, phi, value, violated) in grid order."""
        viol = self.violated
        for i, th in enumerate(self.theta):
            for j, ph in enumerate(self.phi):
                yield float(th), float(ph), float(self.values[i, j]), bool(viol[i, j])


def mub_scan(state: TwoQubitState, measure=Measure.L1, theta_grid=None, phi_grid=None,
             bob_frame="pauli") -> MubScan:
    """Steering functional over a rectangular (theta, phi) grid of triads."""
    measure = Measure.parse(measure)
    theta = np.linspace(0, np.pi, 181) if theta_grid is None else np.asarray(theta_grid, float)
    phi = np.linspace(0, 2 * np.pi, 361) if phi_grid is None else np.asarray(phi_grid, float)
    axes = triad_axes(theta[:, None], phi[None, :])
    values = functional_values(state.r, state.s, state.T, axes, measure, bob_frame)
    return MubScan(state, measure, theta, phi, values, bob_frame)


@dataclass(frozen=True)
class HarnessSummary:
    num_pairs: int
    max_value: dict
    violations: dict
    seed: int

    @property
    def passed(self) -> bool:
        return all(v == 0 for v in self.violations.values())

    def to_json(self) -> dict:
        return {
            "num_pairs": self.num_pairs,
            "seed": self.seed,
            "passed": self.passed,
            "measures": {
                m.value: {
                    "max_value": self.max_value[m],
                    "bound": m.bound,
                    "violations": self.violations[m],
                }
                for m in Measure
            },
        }


def separable_harness(num_states=10_000, num_triads=1, rng_seed=0, pure=False) -> HarnessSummary:
    """Sample separable states and triads; count violations for every measure."""
    rng = np.random.default_rng(rng_seed)
    rs, ss, ts, axes = [], [], [], []
    for _ in range(num_states):
        st = sample_separable(None, rng, pure=pure)
        for _ in range(num_triads):
            tri = random_triad(rng)
            rs.append(st.r)
            ss.append(st.s)
            ts.append(st.T)
            axes.append(tri.axes())
    n = len(rs)
    max_value, violations = {}, {}
    for m in Measure:
        if n == 0:
            max_value[m], violations[m] = None, 0
            continue
        vals = functional_values(np.array(rs), np.array(ss), np.array(ts), np.array(axes), m)
        max_value[m] = float(vals.max())
        violations[m] = int(np.sum(vals > m.bound + VIOLATION_BAND))
    return HarnessSummary(n, max_value, violations, int(rng_seed))
