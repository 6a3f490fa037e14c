"""
Dyson map Omega = Theta^(1/2) (Hermitian gauge) and the Coriolis operator
Sigma = i Omega^-1 dOmega/dt.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import FactorizationError, NearSingularError
from .metric import Metric, metric_at, metric_derivative
from .model import RadiusModel

__all__ = ['DysonMap', 'Coriolis', 'sqrt_metric', 'omega_derivative',
           'dyson_map', 'coriolis', 'compatibility_residual',
           'NEAR_EP_CUTOFF']

# Refuse metrics whose smallest eigenvalue is below this fraction of trace/N.
NEAR_EP_CUTOFF = 1e-10


@dataclass(frozen=True)
class DysonMap:
    omega: np.ndarray
    omega_inv: np.ndarray
    omega_dot: Optional[np.ndarray] = None
    t: Optional[float] = None
    # eigen-decomposition of omega, reused by the Sylvester solve
    eigvals: Optional[np.ndarray] = None
    eigvecs: Optional[np.ndarray] = None


@dataclass(frozen=True)
class Coriolis:
    sigma: np.ndarray
    t: float


def _check_metric(theta_matrix):
    w, v = np.linalg.eigh(theta_matrix)
    n = len(w)
    floor = NEAR_EP_CUTOFF * abs(np.sum(w)) / n
    if not w[0] > floor:
        raise FactorizationError(
            f"metric is not safely positive definite: smallest eigenvalue "
            f"{w[0]:.3e} <= {floor:.3e} (exceptional-point boundary)")
    return w, v


def sqrt_metric(theta):
    """Hermitian positive square root Omega of a metric and its inverse.

    Parameters
    ----------
    theta : Metric or ndarray
        Positive-definite Hermitian matrix.

    Returns
    -------
    DysonMap
        With `omega` and `omega_inv` set; `omega_dot` is left empty.
    """
    mat = theta.matrix if isinstance(theta, Metric) else np.asarray(theta)
    w, v = _check_metric(mat)
    s = np.sqrt(w)
    omega = (v * s) @ v.conj().T
    omega_inv = (v / s) @ v.conj().T
    return DysonMap(omega, omega_inv, eigvals=s, eigvecs=v)


def omega_derivative(theta_dot, omega, rtol=1e-14):
    """Solve Omega X + X Omega = theta_dot for X = dOmega/dt.

    In the eigenbasis of Omega (eigenvalues w) the solution is
    X_ab = theta_dot_ab / (w_a + w_b).

    Parameters
    ----------
    theta_dot : ndarray
    omega : ndarray or DysonMap
        Positive-definite Hermitian square root.
    """
    if isinstance(omega, DysonMap) and omega.eigvals is not None:
        w, v = omega.eigvals, omega.eigvecs
    else:
        om = omega.omega if isinstance(omega, DysonMap) else np.asarray(omega)
        w, v = np.linalg.eigh(om)
    denom = w[:, None] + w[None, :]
    if np.min(denom) <= rtol * np.max(np.abs(denom)):
        raise NearSingularError(
            f"Sylvester denominator {np.min(denom):.3e} is near zero")
    td = v.conj().T @ np.asarray(theta_dot) @ v
    return v @ (td / denom) @ v.conj().T


def dyson_map(t, model: RadiusModel):
    """Omega, its inverse and its time derivative at `t`."""
    theta = metric_at(t, model)
    dm = sqrt_metric(theta)
    odot = omega_derivative(metric_derivative(t, model), dm)
    return DysonMap(dm.omega, dm.omega_inv, odot, float(t), dm.eigvals, dm.eigvecs)


def coriolis(t, model: RadiusModel, dyson: Optional[DysonMap] = None):
    """Coriolis operator Sigma(t) = i Omega^-1(t) dOmega/dt."""
    dm = dyson if dyson is not None else dyson_map(t, model)
    return Coriolis(1j * dm.omega_inv @ dm.omega_dot, float(t))


def compatibility_residual(t, hamiltonian, model: RadiusModel):
    """||i dTheta/dt - (G^H Theta - Theta G)||_F with G = H - Sigma.

    Vanishes whenever `hamiltonian` is quasi-Hermitian with respect to the
    metric at `t`; this is what makes the pair of Schrodinger equations
    propagate the relation |psi>> = Theta |psi> exactly.
    """
    theta = metric_at(t, model).matrix
    theta_dot = metric_derivative(t, model)
    sig = coriolis(t, model).sigma
    g = np.asarray(hamiltonian) - sig
    lhs = 1j * theta_dot
    rhs = g.conj().T @ theta - theta @ g
    return float(np.linalg.norm(lhs - rhs))
