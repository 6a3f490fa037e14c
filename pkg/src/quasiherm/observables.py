"""
Quasi-Hermitian observables, biorthonormal eigenbases and expectation values.
"""
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dyson import NEAR_EP_CUTOFF
from .errors import (ConsistencyError, DegeneracyError, FactorizationError,
                     ParameterError, SelfOrthogonalityError)
from .evolution import StatePair
from .metric import Metric, metric_at
from .model import RadiusModel

__all__ = ['Observable', 'BiorthonormalSystem', 'make_observable',
           'radius_as_observable', 'biorthonormalize', 'dyadic_projector',
           'expectation', 'quasi_hermiticity_residual',
           'SELF_ORTHOGONALITY_TOL', 'ILL_CONDITIONED_TOL', 'DEGENERACY_TOL']

# Relative eigenvalue gap below which eigenvalues count as degenerate.
DEGENERACY_TOL = 1e-9
# |<<m|m>| / (||m>>|| ||m>||) is the inverse eigenvalue condition number
# kappa_m. Below this value kappa_m^2 * eps exceeds 1e-10 and the
# biorthonormality residual can no longer be guaranteed: raise.
SELF_ORTHOGONALITY_TOL = float(np.sqrt(np.finfo(float).eps / 1e-10))
# ... and below this only warns.
ILL_CONDITIONED_TOL = 1e-2
# Eigenvector-matrix condition number treated as numerical linear dependence.
DEPENDENCE_COND = 1e8
# Raw <<m|m> below this is treated as exact self-orthogonality.
RAW_OVERLAP_TOL = 1e-12


def quasi_hermiticity_residual(lam, theta):
    """||L^H Theta - Theta L||_F / (||Theta|| ||L||)."""
    lam = np.asarray(lam)
    theta = np.asarray(theta)
    scale = np.linalg.norm(theta) * np.linalg.norm(lam)
    if scale == 0.0:
        return 0.0
    return float(np.linalg.norm(lam.conj().T @ theta - theta @ lam) / scale)


@dataclass(frozen=True)
class Observable:
    lambda_tilde: np.ndarray
    lam: np.ndarray
    t: Optional[float]
    theta: np.ndarray

    @property
    def residual(self):
        return quasi_hermiticity_residual(self.lam, self.theta)

    def eigenvalues(self):
        return np.sort_complex(np.linalg.eigvals(self.lam))


def _positive_metric(t, model):
    theta = metric_at(t, model).matrix
    w = np.linalg.eigvalsh(theta)
    if not w[0] > NEAR_EP_CUTOFF * np.sum(w) / len(w):
        raise FactorizationError(
            f"metric at t={t} is not safely positive definite "
            f"(smallest eigenvalue {w[0]:.3e}); exceptional-point boundary")
    return theta


def _check_hermitian(a, what):
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ParameterError(f"{what} must be a square matrix")
    if np.linalg.norm(a - a.conj().T) > 1e-12 * max(1.0, np.linalg.norm(a)):
        raise ParameterError(f"{what} is not Hermitian")


def make_observable(lambda_tilde, t, model: RadiusModel, tol=1e-10):
    """Quasi-Hermitian observable Lambda = Theta^-1(t) lambda_tilde.

    Any Hermitian `lambda_tilde` yields an admissible observable for the
    metric at `t`.
    """
    _check_hermitian(lambda_tilde, 'lambda_tilde')
    lt = np.asarray(lambda_tilde)
    theta = _positive_metric(t, model)
    lam = np.linalg.solve(theta, lt)
    obs = Observable(lt, lam, float(t), theta)
    if obs.residual > tol:
        raise ConsistencyError(
            f"quasi-Hermiticity residual {obs.residual:.3e} exceeds {tol:.1e}")
    return obs


def radius_as_observable(t, model: RadiusModel, tol=1e-10):
    """The radius matrix R(t) itself, checked against the constructed metric.

    This is the consistency seal between the model family and the metric
    construction: failure means the two disagree.
    """
    theta = _positive_metric(t, model)
    r = model.matrix(t)
    obs = Observable(theta @ r, r, float(t), theta)
    if obs.residual > tol:
        raise ConsistencyError(
            f"R(t) is not quasi-Hermitian for the constructed metric at t={t}: "
            f"residual {obs.residual:.3e} > {tol:.1e}")
    return obs


@dataclass(frozen=True)
class BiorthonormalSystem:
    """Columns of `right` are |m>, columns of `left` are |m>>."""
    right: np.ndarray
    left: np.ndarray
    eigenvalues: np.ndarray

    @property
    def right_kets(self):
        return [self.right[:, m] for m in range(self.right.shape[1])]

    @property
    def left_kets(self):
        return [self.left[:, m] for m in range(self.left.shape[1])]

    def overlaps(self):
        """Matrix of <<m|n>."""
        return self.left.conj().T @ self.right

    def completeness(self):
        """sum_m |m><<m|."""
        return self.right @ self.left.conj().T


def _phase_fix(v):
    # unit norm, first non-negligible component real positive
    v = v / np.linalg.norm(v)
    idx = np.flatnonzero(np.abs(v) > 1e-12 * np.max(np.abs(v)))[0]
    return v * (abs(v[idx]) / v[idx])


def biorthonormalize(h, theta):
    """Biorthonormal eigenbasis of a quasi-Hermitian `h`.

    Right eigenvectors come from an eigensolve of `h`; the left partners are
    obtained as Theta |m>, rescaled so that <<m|n> = delta_mn.

    Raises
    ------
    DegeneracyError
        Eigenvalues coincide to relative precision 1e-9.
    SelfOrthogonalityError
        Some |m>> is numerically orthogonal to |m> (vicinity of an EP).
    """
    h = np.asarray(h)
    th = theta.matrix if isinstance(theta, Metric) else np.asarray(theta)
    n = h.shape[0]
    w, v = np.linalg.eig(h)
    order = np.lexsort((w.imag, w.real))
    w, v = w[order], v[:, order]
    right = np.column_stack([_phase_fix(v[:, m]) for m in range(n)])
    # dependence first: at an EP round-off also splits the spectrum into
    # complex pairs, which would otherwise be misreported as a non-real h
    sv = np.linalg.svd(right, compute_uv=False)
    if sv[-1] * DEPENDENCE_COND <= sv[0]:
        raise SelfOrthogonalityError(
            "right eigenvectors are numerically linearly dependent "
            f"(condition {sv[0] / max(sv[-1], 1e-300):.3e})")
    scale = max(np.max(np.abs(w)), np.finfo(float).tiny)
    if np.max(np.abs(w.imag)) > 1e-9 * scale:
        raise ConsistencyError(
            f"spectrum is not real (max |Im| = {np.max(np.abs(w.imag)):.3e}); "
            "h is not quasi-Hermitian for this metric")
    if n > 1:
        gaps = np.abs(np.diff(w.real))
        if np.min(gaps) < DEGENERACY_TOL * scale:
            raise DegeneracyError(
                f"eigenvalues degenerate to relative gap {np.min(gaps) / scale:.3e}")

    img = th @ right
    raw = np.einsum('ij,ij->j', img.conj(), right)
    cosines = np.abs(raw) / np.linalg.norm(img, axis=0)
    worst = float(np.min(cosines))
    if worst < SELF_ORTHOGONALITY_TOL or np.min(np.abs(raw)) < RAW_OVERLAP_TOL:
        raise SelfOrthogonalityError(
            f"left and right eigenvectors are nearly orthogonal (cosine "
            f"{worst:.3e}); exceptional-point vicinity")
    if worst < ILL_CONDITIONED_TOL:
        warnings.warn(f"biorthonormal basis is ill-conditioned (cosine {worst:.3e})",
                      RuntimeWarning, stacklevel=2)
    left = img / raw.conj()
    return BiorthonormalSystem(right, left, w.real.copy())


def dyadic_projector(system: BiorthonormalSystem, m):
    """pi_m = |m><<m| / <<m|m>."""
    n = system.right.shape[1]
    if not 0 <= m < n:
        raise ParameterError(f"index {m} out of range for {n} states")
    r = system.right[:, m]
    l = system.left[:, m]  # noqa: E741
    raw = np.vdot(l, r)
    cos = abs(raw) / (np.linalg.norm(l) * np.linalg.norm(r))
    if abs(raw) < RAW_OVERLAP_TOL or cos < SELF_ORTHOGONALITY_TOL:
        raise SelfOrthogonalityError(
            f"<<m|m> = {abs(raw):.3e} (cosine {cos:.3e}): state {m} is "
            "self-orthogonal")
    return np.outer(r, l.conj()) / raw


def expectation(state: StatePair, observable: Observable, return_imag=False):
    """Physical expectation Re[<<psi|L|psi> / <<psi|psi>].

    With ``return_imag=True`` the (diagnostic) imaginary residue is returned
    as a second value.
    """
    if (state.t is not None and observable.t is not None
            and abs(state.t - observable.t) > 1e-12 * max(1.0, abs(state.t))):
        raise ParameterError(
            f"state at t={state.t} but observable at t={observable.t}")
    norm = np.vdot(state.ketket, state.ket)
    if abs(norm) < 1e-300:
        raise ParameterError("vanishing physical norm")
    val = np.vdot(state.ketket, observable.lam @ state.ket) / norm
    if return_imag:
        return float(val.real), float(val.imag)
    return float(val.real)
