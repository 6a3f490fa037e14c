"""
Time-dependent radius matrices and their spectral diagnostics.

The family is the real tridiagonal N x N matrix

    R[k, k]   = (2k - N - 1) + sigma(t)          k = 1..N
    R[k, k+1] = +sqrt(k (N - k)) * tau(t)
    R[k+1, k] = -sqrt(k (N - k)) * tau(t)

whose spectrum is sigma +/- (2k - N - 1) sqrt(1 - tau^2): real for |tau| < 1,
N-fold degenerate (an exceptional point) at |tau| = 1 and complex beyond.
"""
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from numpy.polynomial import Polynomial

from .errors import (DimensionError, InsufficientDataError, NumericError,
                     ScheduleError)

__all__ = ['Schedule', 'default_schedule', 'polynomial_schedule',
           'stationary_schedule', 'RadiusModel', 'radius_matrix',
           'build_radius_matrix', 'SpectrumReport', 'spectrum',
           'ep_scaling_fit', 'ladder_coefficients']

ScalarFn = Callable[[float], float]


@dataclass(frozen=True)
class Schedule:
    """Kinematics of the model: coupling tau(t) and shift sigma(t).

    Derivatives are supplied analytically; they are never obtained by
    finite differences inside the library.
    """
    tau: ScalarFn
    sigma: ScalarFn
    tau_dot: ScalarFn
    sigma_dot: ScalarFn
    name: str = 'custom'
    params: dict = field(default_factory=dict, compare=False)

    def values(self, t):
        """Return ``(tau, sigma)`` at time `t`, checking finiteness."""
        tau, sigma = float(self.tau(t)), float(self.sigma(t))
        if not (np.isfinite(tau) and np.isfinite(sigma)):
            raise ScheduleError(
                f"schedule {self.name!r} is not finite at t={t!r}: "
                f"tau={tau!r}, sigma={sigma!r}")
        return tau, sigma


def default_schedule(n):
    """tau(t) = 1 - t and sigma(t) = 2 n sqrt(1 - tau^2).

    For |tau| > 1 (that is t < 0 or t > 2) the shift is continued by zero so
    that it stays real; the spectrum is then complex, as it should be before
    the degeneracy.
    """
    n = int(n)

    def tau(t):
        return 1.0 - t

    def sigma(t):
        return 2.0 * n * np.sqrt(max(0.0, 1.0 - tau(t) ** 2))

    def tau_dot(t):
        return -1.0

    def sigma_dot(t):
        tt = tau(t)
        s = 1.0 - tt * tt
        if s < 0.0:
            return 0.0
        if s == 0.0:
            return np.inf
        # d/dt sqrt(1 - tau^2) = -tau tau_dot / sqrt(1 - tau^2)
        return 2.0 * n * tt / np.sqrt(s)

    return Schedule(tau, sigma, tau_dot, sigma_dot, name='default',
                    params={'n': n})


def polynomial_schedule(tau_coeffs, sigma_coeffs=(0.0,)):
    """Polynomial tau(t), sigma(t) given by ascending coefficient lists."""
    p_tau = Polynomial(np.asarray(tau_coeffs, dtype=float))
    p_sig = Polynomial(np.asarray(sigma_coeffs, dtype=float))
    if not (np.all(np.isfinite(p_tau.coef)) and np.all(np.isfinite(p_sig.coef))):
        raise ScheduleError("polynomial schedule coefficients must be finite")
    d_tau, d_sig = p_tau.deriv(), p_sig.deriv()
    return Schedule(
        lambda t: float(p_tau(t)), lambda t: float(p_sig(t)),
        lambda t: float(d_tau(t)), lambda t: float(d_sig(t)),
        name='polynomial',
        params={'tau': [float(c) for c in p_tau.coef],
                'sigma': [float(c) for c in p_sig.coef]})


def stationary_schedule(tau, sigma=0.0):
    """Constant tau and sigma; the Coriolis term vanishes identically."""
    tau, sigma = float(tau), float(sigma)
    zero = lambda t: 0.0  # noqa: E731
    return Schedule(lambda t: tau, lambda t: sigma, zero, zero,
                    name='stationary', params={'tau': tau, 'sigma': sigma})


def ladder_coefficients(n):
    """Off-diagonal magnitudes sqrt(k (n - k)), k = 1..n-1."""
    k = np.arange(1, n)
    return np.sqrt(k * (n - k))


def radius_matrix(n, tau, sigma=0.0):
    """Radius matrix for explicit values of tau and sigma."""
    n = int(n)
    if n < 2:
        raise DimensionError(f"matrix dimension must be >= 2, got {n}")
    if not (np.isfinite(tau) and np.isfinite(sigma)):
        raise ScheduleError(f"non-finite tau={tau!r} or sigma={sigma!r}")
    c = ladder_coefficients(n) * tau
    m = np.diag(2.0 * np.arange(1, n + 1) - n - 1 + sigma)
    m += np.diag(c, 1) - np.diag(c, -1)
    return m


@dataclass(frozen=True)
class RadiusModel:
    """The matrix family of dimension `n` driven by `schedule`.

    ``RadiusModel(4)`` uses the default schedule for N = 4.
    """
    n: int
    schedule: Optional[Schedule] = None

    def __post_init__(self):
        if int(self.n) < 2:
            raise DimensionError(f"matrix dimension must be >= 2, got {self.n}")
        object.__setattr__(self, 'n', int(self.n))
        if self.schedule is None:
            object.__setattr__(self, 'schedule', default_schedule(self.n))

    def tau(self, t):
        return self.schedule.values(t)[0]

    def tau_dot(self, t):
        return float(self.schedule.tau_dot(t))

    def matrix(self, t):
        tau, sigma = self.schedule.values(t)
        return radius_matrix(self.n, tau, sigma)

    def spectrum(self, t, reality_tol=1e-10):
        return spectrum(self.matrix(t), reality_tol=reality_tol)


def build_radius_matrix(n, t, schedule=None):
    """Radius matrix R^(n)(t).

    Parameters
    ----------
    n : int
        Matrix dimension, at least 2.
    t : float
        Time.
    schedule : Schedule, optional
        Defaults to :func:`default_schedule` for dimension `n`.

    Returns
    -------
    ndarray, shape (n, n)
        Real matrix with antisymmetric off-diagonal part.
    """
    if int(n) < 2:
        raise DimensionError(f"matrix dimension must be >= 2, got {n}")
    return RadiusModel(n, schedule).matrix(t)


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: np.ndarray
    min_gap: float
    eigvec_condition: float
    is_real: bool
    reality_tol: float = 1e-10

    @property
    def max_imag(self):
        return float(np.max(np.abs(self.eigenvalues.imag)))

    @property
    def spectral_radius(self):
        return float(np.max(np.abs(self.eigenvalues)))


def _sorted_eig(matrix):
    try:
        w, v = np.linalg.eig(matrix)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigensolver did not converge: {exc}") from exc
    order = np.lexsort((w.imag, w.real))
    return w[order], v[:, order]


def spectrum(matrix, reality_tol=1e-10):
    """Full eigen-analysis of a square matrix.

    `reality_tol` is relative to the spectral radius. The eigenvector
    condition number is the 2-norm condition number of the matrix of
    unit-normalized right eigenvectors; it diverges at an exceptional point.
    """
    m = np.asarray(matrix)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NumericError("matrix has non-finite entries")
    w, v = _sorted_eig(m)
    v = v / np.linalg.norm(v, axis=0)
    sv = np.linalg.svd(v, compute_uv=False)
    cond = np.inf if sv[-1] == 0.0 else float(sv[0] / sv[-1])
    n = len(w)
    if n > 1:
        d = np.abs(w[:, None] - w[None, :])
        min_gap = float(d[~np.eye(n, dtype=bool)].min())
    else:
        min_gap = 0.0
    scale = float(np.max(np.abs(w)))
    is_real = bool(np.max(np.abs(w.imag)) <= reality_tol * scale)
    return SpectrumReport(w, min_gap, max(cond, 1.0), is_real, reality_tol)


def ep_scaling_fit(n, t_samples: Sequence[float], schedule=None):
    """Exponent p in min_gap ~ t^p, fitted by least squares in log-log.

    With the default schedule the gap is proportional to sqrt(2t - t^2),
    so p tends to 1/2 as t -> 0+.
    """
    ts = np.asarray(t_samples, dtype=float).ravel()
    if len(np.unique(ts)) < 4:
        raise InsufficientDataError(
            f"need at least 4 distinct samples, got {len(np.unique(ts))}")
    if np.any(ts <= 0.0) or np.any(ts > 0.2):
        raise InsufficientDataError("samples must lie in (0, 0.2]")
    model = RadiusModel(n, schedule)
    gaps = np.array([model.spectrum(t).min_gap for t in ts])
    if np.any(gaps <= 0.0):
        raise NumericError("vanishing eigenvalue gap; cannot fit a power law")
    slope, _ = np.polyfit(np.log(ts), np.log(gaps), 1)
    return float(slope)
