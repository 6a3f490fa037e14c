"""Shared oracles. None of these call the code path they are used to check."""
import numpy as np
import pytest
from scipy.linalg import expm, sqrtm


def ladder_x(n):
    """Symmetric spin-(n-1)/2 operator J_x in the |m> basis."""
    k = np.arange(1, n)
    c = np.sqrt(k * (n - k)) / 2.0
    return np.diag(c, 1) + np.diag(c, -1)


def closed_form_metric(n, tau):
    """(1 - tau^2)^((n-1)/2) exp(-2 artanh(tau) J_x).

    Independent of the coefficient solve: it follows from R being a
    non-unitary rotation of the diagonal spin matrix.
    """
    return (1.0 - tau * tau) ** ((n - 1) / 2.0) * expm(-2.0 * np.arctanh(tau) * ladder_x(n))


def binomial_eigenvalues(n, tau):
    """(1 - tau)^(k-1) (1 + tau)^(n-k), k = 1..n, sorted ascending."""
    k = np.arange(1, n + 1)
    return np.sort((1.0 - tau) ** (k - 1) * (1.0 + tau) ** (n - k))


def fd_derivative(f, t, h=1e-5):
    """Fourth-order central difference."""
    return (-f(t + 2 * h) + 8 * f(t + h) - 8 * f(t - h) + f(t - 2 * h)) / (12 * h)


def scipy_sqrt(theta):
    return np.real_if_close(sqrtm(theta))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
