import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from quasiherm.errors import (ConsistencyError, DegeneracyError,
                              FactorizationError, ParameterError,
                              SelfOrthogonalityError)
from quasiherm.evolution import StatePair
from quasiherm.metric import metric_at
from quasiherm.model import RadiusModel, stationary_schedule
from quasiherm.observables import (SELF_ORTHOGONALITY_TOL, BiorthonormalSystem,
                                   biorthonormalize, dyadic_projector,
                                   expectation, make_observable,
                                   quasi_hermiticity_residual,
                                   radius_as_observable)

N2_HALF = RadiusModel(2, stationary_schedule(0.5))


def _hermitian(rng, n):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return a + a.conj().T


def test_metric_as_lambda_tilde_gives_identity():
    model = RadiusModel(4)
    theta = metric_at(0.4, model).matrix
    obs = make_observable(theta, 0.4, model)
    np.testing.assert_allclose(obs.lam, np.eye(4), atol=1e-12)


def test_n2_example():
    obs = make_observable(np.diag([1.0, -1.0]), 0.0, N2_HALF)
    theta_inv = np.array([[1, 0.5], [0.5, 1]]) / 0.75
    np.testing.assert_allclose(obs.lam, theta_inv @ np.diag([1, -1]), atol=1e-14)
    w = obs.eigenvalues()
    assert np.max(np.abs(w.imag)) < 1e-12


def test_singular_lambda_tilde():
    obs = make_observable(np.diag([0.0, 1.0, 2.0]), 0.5, RadiusModel(3))
    assert abs(np.linalg.det(obs.lam)) < 1e-12
    assert obs.residual <= 1e-10


def test_non_hermitian_input():
    with pytest.raises(ParameterError):
        make_observable(np.array([[0, 1], [0, 0]]), 0.5, RadiusModel(2))


def test_radius_observable_n2():
    assert radius_as_observable(0.0, N2_HALF).residual <= 1e-12


def test_radius_observable_n6():
    assert radius_as_observable(0.3, RadiusModel(6)).residual <= 1e-10


def test_radius_observable_at_ep():
    with pytest.raises(FactorizationError):
        radius_as_observable(0.0, RadiusModel(3))


def test_radius_observable_catches_wrong_metric():
    # a deliberately inconsistent metric trips the consistency seal
    assert quasi_hermiticity_residual(RadiusModel(3).matrix(0.5), np.eye(3)) > 1e-3
    with pytest.raises(ConsistencyError):
        radius_as_observable(0.5, RadiusModel(3), tol=-1.0)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(2, 6), t=st.floats(0.1, 0.9), seed=st.integers(0, 2 ** 32 - 1))
def test_spectral_reality(n, t, seed):
    rng = np.random.default_rng(seed)
    obs = make_observable(_hermitian(rng, n), t, RadiusModel(n))
    w = obs.eigenvalues()
    assert np.max(np.abs(w.imag)) <= 1e-9 * max(1.0, np.max(np.abs(w)))
    assert obs.residual <= 1e-10


def test_hermitian_case_orthonormal(rng):
    h = _hermitian(rng, 4)
    sysm = biorthonormalize(h, np.eye(4))
    np.testing.assert_allclose(sysm.left, sysm.right, atol=1e-12)
    np.testing.assert_allclose(sysm.right.conj().T @ sysm.right, np.eye(4), atol=1e-12)


def test_n2_biorthonormal():
    theta = metric_at(0.0, N2_HALF).matrix
    h = np.linalg.solve(theta, np.diag([1.0, 2.0]))
    sysm = biorthonormalize(h, theta)
    np.testing.assert_allclose(sysm.overlaps(), np.eye(2), atol=1e-12)
    np.testing.assert_allclose(sysm.completeness(), np.eye(2), atol=1e-12)


@pytest.mark.parametrize('n', range(2, 7))
def test_left_vectors_match_adjoint_eigensolve(n, rng):
    model = RadiusModel(n)
    t = 0.45
    theta = metric_at(t, model).matrix
    h = np.linalg.solve(theta, _hermitian(rng, n))
    sysm = biorthonormalize(h, theta)
    w, v = np.linalg.eig(h.conj().T)
    for m, e in enumerate(sysm.eigenvalues):
        j = np.argmin(np.abs(w - e))
        a, b = v[:, j], sysm.left[:, m]
        cos = abs(np.vdot(a, b)) / (np.linalg.norm(a) * np.linalg.norm(b))
        assert abs(1 - cos) < 1e-9
        np.testing.assert_allclose(h.conj().T @ b, e * b, atol=1e-9 * np.linalg.norm(b) * abs(e))
        # metric link |m>> ~ Theta |m>
        c = theta @ sysm.right[:, m]
        cos = abs(np.vdot(c, b)) / (np.linalg.norm(c) * np.linalg.norm(b))
        assert abs(1 - cos) < 1e-9


def test_phase_convention():
    model = RadiusModel(4)
    sysm = biorthonormalize(model.matrix(0.5), metric_at(0.5, model))
    for r in sysm.right_kets:
        assert np.linalg.norm(r) == pytest.approx(1.0)
        first = r[np.flatnonzero(np.abs(r) > 1e-12)[0]]
        assert abs(first.imag) < 1e-15 and first.real > 0


def test_near_ep_refuses_or_warns():
    model = RadiusModel(4)
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter('always')
        try:
            biorthonormalize(model.matrix(0.01), metric_at(0.01, model))
        except DegeneracyError:
            return
    assert any(issubclass(w.category, RuntimeWarning) for w in rec)


@pytest.mark.parametrize('n', range(3, 7))
@pytest.mark.parametrize('t', [1e-3, 1e-4, 1e-5])
def test_self_orthogonality_at_ep(n, t):
    model = RadiusModel(n)
    with pytest.raises(SelfOrthogonalityError):
        biorthonormalize(model.matrix(t), metric_at(t, model))


def test_n2_self_orthogonality_closer_in():
    # for N = 2 the eigenvector condition only grows like t^(-1/2)
    model = RadiusModel(2)
    biorthonormalize(model.matrix(1e-3), metric_at(1e-3, model))
    with pytest.raises(SelfOrthogonalityError):
        biorthonormalize(model.matrix(1e-7), metric_at(1e-7, model))


def test_degeneracy():
    with pytest.raises(DegeneracyError):
        biorthonormalize(np.eye(3), np.eye(3))


def test_complex_spectrum_refused():
    with pytest.raises(ConsistencyError):
        biorthonormalize(np.array([[0.0, 1.0], [-1.0, 0.0]]), np.eye(2))


def test_self_orthogonality_threshold_value():
    assert SELF_ORTHOGONALITY_TOL == pytest.approx(np.sqrt(np.finfo(float).eps / 1e-10))


def test_projector_hermitian_case():
    q, _ = np.linalg.qr(np.random.default_rng(3).normal(size=(3, 3)))
    sysm = biorthonormalize(q @ np.diag([1.0, 2, 3]) @ q.T, np.eye(3))
    for m in range(3):
        p = dyadic_projector(sysm, m)
        np.testing.assert_allclose(p, np.outer(q[:, m], q[:, m]), atol=1e-12)


def test_projector_algebra_n4():
    model = RadiusModel(4)
    sysm = biorthonormalize(model.matrix(0.5), metric_at(0.5, model))
    ps = [dyadic_projector(sysm, m) for m in range(4)]
    for m, p in enumerate(ps):
        np.testing.assert_allclose(p @ p, p, atol=1e-12)
        assert np.trace(p) == pytest.approx(1.0, abs=1e-12)
        for k, q in enumerate(ps):
            np.testing.assert_allclose(p @ q, p if k == m else 0 * p, atol=1e-10)
    np.testing.assert_allclose(sum(ps), np.eye(4), atol=1e-9)


def test_projector_errors():
    model = RadiusModel(2)
    sysm = biorthonormalize(model.matrix(0.5), metric_at(0.5, model))
    with pytest.raises(ParameterError):
        dyadic_projector(sysm, 2)
    bad = BiorthonormalSystem(np.array([[1.0, 0], [0, 1]]),
                              np.array([[0.0, 0], [1, 1]]), np.array([1.0, 2.0]))
    with pytest.raises(SelfOrthogonalityError):
        dyadic_projector(bad, 0)


def test_expectation_identity():
    model = RadiusModel(3)
    obs = make_observable(metric_at(0.5, model).matrix, 0.5, model)
    sp = StatePair.from_ket([1, 2, 3j], 0.5, model)
    assert expectation(sp, obs) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize('n', range(2, 7))
def test_radius_eigenstate_expectation(n):
    model = RadiusModel(n)
    t = 0.35
    obs = radius_as_observable(t, model)
    sysm = biorthonormalize(model.matrix(t), obs.theta)
    for m, e in enumerate(sysm.eigenvalues):
        sp = StatePair(sysm.right[:, m], sysm.left[:, m], t)
        assert expectation(sp, obs) == pytest.approx(e, abs=1e-9)
        val, imag = expectation(sp, obs, return_imag=True)
        assert abs(imag) <= 1e-9


def test_expectation_rescaling(rng):
    model = RadiusModel(4)
    obs = make_observable(_hermitian(rng, 4), 0.6, model)
    sp = StatePair.from_ket(rng.normal(size=4) + 1j * rng.normal(size=4), 0.6, model)
    scaled = StatePair(sp.ket * (2 - 1j), sp.ketket * 0.3j, 0.6)
    assert expectation(scaled, obs) == pytest.approx(expectation(sp, obs), abs=1e-9)


def test_expectation_errors():
    model = RadiusModel(2)
    obs = radius_as_observable(0.5, model)
    with pytest.raises(ParameterError):
        expectation(StatePair.from_ket([1, 0], 0.4, model), obs)
    with pytest.raises(ParameterError):
        expectation(StatePair(np.zeros(2), np.zeros(2), 0.5), obs)
