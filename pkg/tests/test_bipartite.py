import json
import math

import numpy as np
import pytest

from cohsteer.bipartite import (
    PAULI_TRIAD,
    MeasurementTriad,
    TwoQubitState,
    alpha_coefficients,
    conditional_diagonals,
    conditional_eigenvalues,
    conditional_ensemble,
    conditional_ensemble_partial_trace,
    density_to_json,
    gamma_coefficients,
    linear_entropy_of_marginal,
    local_filter,
    max_coherent_product,
    maximally_mixed,
    product_state,
    psi_alpha_linear_entropy,
    psi_alpha_state,
    psi_alpha_vector,
    random_triad,
    sample_separable,
    singlet,
    triad_axes,
    two_qubit_from_density,
    werner_state,
)
from cohsteer.coherence import AXES, Axis
from cohsteer.errors import DomainError, NotAState, SingularFilter
from cohsteer.qubit_core import IDENTITY2, PAULI

from conftest import random_bloch, random_two_qubit_density

SINGLET_VEC = np.array([0, 1, -1, 0]) / np.sqrt(2)


def test_maximally_mixed_decomposition():
    st = two_qubit_from_density(np.eye(4) / 4)
    assert np.all(st.r == 0) and np.all(st.s == 0) and np.all(st.T == 0)


def test_singlet_decomposition():
    st = two_qubit_from_density(np.outer(SINGLET_VEC, SINGLET_VEC))
    np.testing.assert_allclose(st.r, 0, atol=1e-15)
    np.testing.assert_allclose(st.s, 0, atol=1e-15)
    np.testing.assert_allclose(st.T, -np.eye(3), atol=1e-15)


def test_werner_matrix_and_decomposition():
    for p in (0.0, 0.3, 0.5, 1.0):
        rho = p * np.outer(SINGLET_VEC, SINGLET_VEC) + (1 - p) / 4 * np.eye(4)
        np.testing.assert_allclose(werner_state(p).density_matrix(), rho, atol=1e-15)
        st = two_qubit_from_density(rho)
        np.testing.assert_allclose(np.abs(st.T), p * np.eye(3), atol=1e-15)
    np.testing.assert_allclose(werner_state(0).density_matrix(), np.eye(4) / 4)
    vals = np.linalg.eigvalsh(werner_state(0.5).density_matrix())
    np.testing.assert_allclose(vals, [1 / 8, 1 / 8, 1 / 8, 5 / 8], atol=1e-15)
    with pytest.raises(DomainError):
        werner_state(1.2)


def test_round_trip_random(rng):
    for _ in range(200):
        rho = random_two_qubit_density(rng)
        st = two_qubit_from_density(rho)
        np.testing.assert_allclose(st.density_matrix(), rho, atol=1e-12)
        for i in range(3):
            assert st.r[i] == pytest.approx(np.trace(rho @ np.kron(PAULI[i], IDENTITY2)).real, abs=1e-12)
            assert st.s[i] == pytest.approx(np.trace(rho @ np.kron(IDENTITY2, PAULI[i])).real, abs=1e-12)
            for j in range(3):
                assert st.T[i, j] == pytest.approx(
                    np.trace(rho @ np.kron(PAULI[i], PAULI[j])).real, abs=1e-12)


def test_invalid_states():
    with pytest.raises(NotAState):
        TwoQubitState([0, 0, 0], [0, 0, 0], 2 * np.eye(3))
    with pytest.raises(NotAState):
        TwoQubitState([1.5, 0, 0], [0, 0, 0], np.zeros((3, 3)))
    with pytest.raises(NotAState):
        two_qubit_from_density(np.eye(4))


def test_json_round_trip(rng):
    st = two_qubit_from_density(random_two_qubit_density(rng))
    again = TwoQubitState.from_json(json.loads(json.dumps(st.to_json())))
    assert again.allclose(st, atol=1e-15)
    via_matrix = TwoQubitState.from_json({"matrix": density_to_json(st.density_matrix())})
    assert via_matrix.allclose(st, atol=1e-12)
    assert TwoQubitState.from_json(density_to_json(st.density_matrix())).allclose(st, atol=1e-12)


def test_psi_alpha():
    zero = np.zeros((4, 4))
    zero[0, 0] = 1
    np.testing.assert_allclose(psi_alpha_state(0).density_matrix(), zero, atol=1e-15)
    np.testing.assert_allclose(psi_alpha_state(1).density_matrix(), np.full((4, 4), 0.25), atol=1e-15)
    for a in np.linspace(0, 1, 21):
        rho = psi_alpha_state(a).density_matrix()
        assert np.trace(rho @ rho).real == pytest.approx(1, abs=1e-10)
        bare = np.sqrt(a) * np.full(4, 0.5) + np.sqrt(1 - a) * np.eye(4)[0]
        assert np.dot(bare, bare) == pytest.approx(1 + math.sqrt(a * (1 - a)), abs=1e-12)
        assert np.linalg.norm(psi_alpha_vector(a)) == pytest.approx(1, abs=1e-15)
    with pytest.raises(DomainError):
        psi_alpha_state(-0.1)


def test_linear_entropy_scale_and_curve():
    assert linear_entropy_of_marginal(max_coherent_product()) == pytest.approx(0, abs=1e-15)
    assert linear_entropy_of_marginal(psi_alpha_state(0)) == pytest.approx(0, abs=1e-15)
    # scale fixed from alpha = 1/2, then checked on the whole curve
    scale = psi_alpha_linear_entropy(0.5) / linear_entropy_of_marginal(psi_alpha_state(0.5))
    assert scale == pytest.approx(1, abs=1e-12)
    for a in np.linspace(0, 1, 41):
        assert linear_entropy_of_marginal(psi_alpha_state(a), scale) == pytest.approx(
            psi_alpha_linear_entropy(a), abs=1e-12)
    # 1 - Tr rho_B^2 from the partial trace
    rho = psi_alpha_state(0.47).density_matrix()
    rho_b = np.einsum("ijik->jk", rho.reshape(2, 2, 2, 2))
    assert linear_entropy_of_marginal(psi_alpha_state(0.47)) == pytest.approx(
        1 - np.trace(rho_b @ rho_b).real, abs=1e-12)
    assert psi_alpha_linear_entropy(0.47) == pytest.approx(0.055422102054, abs=1e-11)


def test_triad_pauli_point():
    np.testing.assert_allclose(PAULI_TRIAD.axes(), np.eye(3), atol=1e-15)
    for j in range(3):
        evals, evecs = np.linalg.eigh(PAULI[j])
        proj = PAULI_TRIAD.projectors()[j]
        np.testing.assert_allclose(proj[0], np.outer(evecs[:, 1], evecs[:, 1].conj()), atol=1e-15)
        np.testing.assert_allclose(proj[1], np.outer(evecs[:, 0], evecs[:, 0].conj()), atol=1e-15)


def test_triad_mutually_unbiased(rng):
    for _ in range(100):
        tri = random_triad(rng)
        k = tri.kets()
        for b in range(3):
            np.testing.assert_allclose(k[b].conj() @ k[b].T, np.eye(2), atol=1e-12)
            for c in range(3):
                if b != c:
                    overlaps = np.abs(k[b].conj() @ k[c].T) ** 2
                    np.testing.assert_allclose(overlaps, 0.5, atol=1e-10)
        axes = tri.axes()
        np.testing.assert_allclose(axes @ axes.T, np.eye(3), atol=1e-12)
        assert np.linalg.det(axes) == pytest.approx(1, abs=1e-12)


def test_triad_axes_vectorised():
    th = np.linspace(0, np.pi, 5)[:, None]
    ph = np.linspace(0, 2 * np.pi, 7)[None, :]
    grid = triad_axes(th, ph)
    assert grid.shape == (5, 7, 3, 3)
    np.testing.assert_allclose(grid[2, 3], MeasurementTriad(th[2, 0], ph[0, 3]).axes())


def test_werner_conditional_example():
    p = 0.7
    ens = conditional_ensemble_partial_trace(werner_state(p))
    entry = [e for e in ens.entries if e.alice_axis == Axis.Z and e.outcome == 0][0]
    assert entry.probability == pytest.approx(0.5, abs=1e-15)
    np.testing.assert_allclose(entry.state.bloch, [0, 0, -p], atol=1e-15)
    alpha = alpha_coefficients(werner_state(p))
    np.testing.assert_allclose(entry.state.bloch, alpha[0, 2] / gamma_coefficients(werner_state(p))[0, 2])


def test_product_and_mixed_conditionals(rng):
    a, b = random_bloch(rng, 2)
    st = product_state(a, b)
    for e in conditional_ensemble(st, random_triad(rng)).entries:
        np.testing.assert_allclose(e.state.bloch, b, atol=1e-12)
    for e in conditional_ensemble(maximally_mixed(), random_triad(rng)).entries:
        assert e.probability == pytest.approx(0.5)
        np.testing.assert_allclose(e.state.bloch, 0, atol=1e-15)


def test_ensemble_matches_partial_trace(rng):
    for _ in range(200):
        st = two_qubit_from_density(random_two_qubit_density(rng))
        tri = random_triad(rng) if rng.random() < 0.7 else PAULI_TRIAD
        fast = conditional_ensemble(st, tri)
        slow = conditional_ensemble_partial_trace(st, tri)
        np.testing.assert_allclose(fast.axes, slow.axes, atol=1e-12)
        assert len(fast.entries) == len(slow.entries)
        for e, f in zip(fast.entries, slow.entries):
            assert (e.alice_axis, e.outcome) == (f.alice_axis, f.outcome)
            assert e.probability == pytest.approx(f.probability, abs=1e-12)
            np.testing.assert_allclose(e.state.bloch, f.state.bloch, atol=1e-10)


def test_ensemble_with_arbitrary_axes(rng):
    st = two_qubit_from_density(random_two_qubit_density(rng))
    axes = rng.normal(size=(3, 3))
    fast = conditional_ensemble(st, axes)
    slow = conditional_ensemble_partial_trace(st, axes)
    for e, f in zip(fast.entries, slow.entries):
        np.testing.assert_allclose(e.state.bloch, f.state.bloch, atol=1e-10)


def test_no_signalling(rng):
    for _ in range(1000):
        st = two_qubit_from_density(random_two_qubit_density(rng))
        ens = conditional_ensemble(st, random_triad(rng))
        for ax in AXES:
            entries = ens.for_axis(ax)
            assert sum(e.probability for e in entries) == pytest.approx(1, abs=1e-12)
            np.testing.assert_allclose(ens.average_bloch(ax), st.s, atol=1e-10)


def test_pauli_closed_forms_against_partial_trace(rng):
    for _ in range(300):
        st = two_qubit_from_density(random_two_qubit_density(rng))
        ens = conditional_ensemble_partial_trace(st)
        alpha, gamma = alpha_coefficients(st), gamma_coefficients(st)
        lam, beta = conditional_eigenvalues(st), conditional_diagonals(st)
        for e in ens.entries:
            j, a = int(e.alice_axis), e.outcome
            assert e.probability == pytest.approx(gamma[a, j] / 2, abs=1e-10)
            np.testing.assert_allclose(e.state.bloch, alpha[a, j] / gamma[a, j], atol=1e-10)
            rho = e.state.density_matrix()
            np.testing.assert_allclose(np.linalg.eigvalsh(rho)[::-1], lam[a, j], atol=1e-10)
            for i in range(3):
                vals, vecs = np.linalg.eigh(PAULI[i])
                d = np.real(np.diag(vecs.conj().T @ rho @ vecs))[::-1]
                np.testing.assert_allclose(d, beta[a, j, i], atol=1e-10)


def test_zero_probability_branch_dropped():
    st = product_state([0, 0, 1], [1, 0, 0])
    ens = conditional_ensemble(st)
    assert ens.dropped == ((Axis.Z, 1),)
    assert len(ens.entries) == 5
    slow = conditional_ensemble_partial_trace(st)
    assert slow.dropped == ((Axis.Z, 1),)


def test_local_filter_identity_at_quarter_pi(rng):
    st = two_qubit_from_density(random_two_qubit_density(rng))
    for side in ("alice", "bob"):
        assert local_filter(st, math.pi / 4, side).allclose(st, atol=1e-12)


def test_local_filter_valid_and_inverse(rng):
    for _ in range(50):
        st = two_qubit_from_density(random_two_qubit_density(rng))
        theta = rng.uniform(0.05, math.pi / 2 - 0.05)
        for side in ("alice", "bob"):
            out = local_filter(st, theta, side)
            rho = out.density_matrix()
            assert np.trace(rho).real == pytest.approx(1, abs=1e-12)
            assert np.linalg.eigvalsh(rho).min() > -1e-10
            back = local_filter(out, math.pi / 2 - theta, side)
            assert back.allclose(st, atol=1e-10)


def test_local_filter_matches_matrix_definition():
    theta, p = 0.5, 0.85
    f = np.diag([1 / math.cos(theta), 1 / math.sin(theta)])
    k = np.kron(np.eye(2), f)
    rho = k @ werner_state(p).density_matrix() @ k.T
    rho /= np.trace(rho)
    np.testing.assert_allclose(local_filter(werner_state(p), theta, "bob").density_matrix(), rho,
                               atol=1e-12)


@pytest.mark.parametrize("theta", [0.0, math.pi / 2, -0.1, 2.0])
def test_singular_filter(theta):
    with pytest.raises(SingularFilter):
        local_filter(singlet(), theta)


def test_sample_separable():
    st = sample_separable(1, rng_seed=3, pure=True)
    np.testing.assert_allclose(st.T, np.outer(st.r, st.s), atol=1e-15)
    assert np.linalg.norm(st.r) == pytest.approx(1) and np.linalg.norm(st.s) == pytest.approx(1)
    a = sample_separable(None, rng_seed=11)
    b = sample_separable(None, rng_seed=11)
    assert a.allclose(b, atol=0)
    for seed in range(200):
        rho = sample_separable(None, rng_seed=seed).density_matrix()
        assert np.trace(rho).real == pytest.approx(1, abs=1e-12)
        assert np.linalg.eigvalsh(rho).min() > -1e-12
    with pytest.raises(DomainError):
        sample_separable(0)
