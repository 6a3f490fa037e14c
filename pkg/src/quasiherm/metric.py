"""
Hilbert-space metrics Theta solving R^T Theta = Theta R.

Two independent routes are provided:

* :func:`build_polynomial_metric` expands Theta(tau) = sum_j M(j) (-tau)^(j-1)
  with the banded coefficient layout indexed by the alpha arrays and
  M(1) = I, and solves for the coefficients by matching powers of tau;
* :func:`solve_metric_pointwise` works at a single matrix, extracting the
  null space of the vectorized Dieudonne equation.

Both land on the branch whose eigenvalues are given by
:func:`theorem2_eigenvalues`.
"""
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Optional

import numpy as np
import scipy.sparse as sp

from .errors import (DimensionError, NoPositiveMetricError, NumericError,
                     StructureError)
from .model import RadiusModel, ladder_coefficients, spectrum

__all__ = ['Metric', 'AlphaArrays', 'PolynomialMetric', 'theorem2_coefficients',
           'theorem2_eigenvalues', 'build_polynomial_metric',
           'polynomial_metric', 'solve_metric_pointwise', 'metric_at',
           'metric_derivative', 'positivity_tolerance', 'positivity_domain',
           'dieudonne_residual', 'is_exceptional']


def is_exceptional(report, matrix):
    """True when eigenvalues cannot be separated at double precision.

    By the Bauer-Fike bound an eigenvalue may move by kappa * eps * ||R||
    under round-off (kappa the eigenvector condition number). Once that
    exceeds the smallest gap the matrix is numerically defective.
    """
    bound = report.eigvec_condition * np.finfo(float).eps * np.linalg.norm(matrix, 2)
    return bool(bound >= report.min_gap)


@dataclass(frozen=True)
class Metric:
    matrix: np.ndarray
    tau_value: float
    coeffs: Optional[tuple] = None

    @property
    def n(self):
        return self.matrix.shape[0]

    def eigenvalues(self):
        return np.linalg.eigvalsh(self.matrix)

    def is_positive(self):
        w = self.eigenvalues()
        return bool(w[0] > positivity_tolerance(self.matrix))


def positivity_tolerance(theta):
    """Smallest eigenvalue must exceed ``1e-12 * trace / N``."""
    theta = np.asarray(theta)
    return 1e-12 * abs(np.trace(theta).real) / theta.shape[0]


def dieudonne_residual(r_matrix, theta):
    """Relative Frobenius residual ||R^H Theta - Theta R|| / ||Theta||."""
    r = np.asarray(r_matrix)
    th = np.asarray(theta)
    return float(np.linalg.norm(r.conj().T @ th - th @ r) / np.linalg.norm(th))


# -- closed-form eigenvalues -------------------------------------------------

def _binom(a, b):
    return comb(a, b) if 0 <= b <= a else 0


@lru_cache(maxsize=None)
def _theorem2_table(n):
    c = np.zeros((n, n), dtype=np.int64)
    for k in range(1, n + 1):
        for m in range(1, n + 1):
            c[k - 1, m - 1] = sum((-1) ** (p - 1) * _binom(k - 1, p - 1)
                                  * _binom(n - k, m - p)
                                  for p in range(1, k + 1))
    c.setflags(write=False)
    return c


def theorem2_coefficients(n):
    """Integer matrix C[k-1, m-1] of the binomial eigenvalue formula."""
    if int(n) < 2:
        raise DimensionError(f"matrix dimension must be >= 2, got {n}")
    return _theorem2_table(int(n)).copy()


def theorem2_eigenvalues(n, tau):
    """theta_k = sum_m C_km tau^(m-1), k = 1..n (unsorted, in k order)."""
    c = theorem2_coefficients(n)
    powers = float(tau) ** np.arange(int(n))
    return c @ powers


# -- polynomial route --------------------------------------------------------

@dataclass(frozen=True)
class AlphaArrays:
    """Non-vanishing entries of M(k) arranged as k x (N-k+1) arrays.

    Entry ``arrays[k-1][i-1, c-1]`` is alpha_ic(k), located in M(k) at row
    ``c+i-1`` and column ``c+k-i`` (one-based).
    """
    arrays: tuple

    @property
    def n(self):
        return len(self.arrays)

    @staticmethod
    def position(n, k, i, c):
        """Zero-based (row, col) of alpha_ic(k) in M(k)."""
        return c + i - 2, c + k - i - 1

    def to_matrices(self):
        n = self.n
        out = []
        for k, arr in enumerate(self.arrays, start=1):
            m = np.zeros((n, n))
            for i in range(1, k + 1):
                for c in range(1, n - k + 2):
                    m[self.position(n, k, i, c)] = arr[i - 1, c - 1]
            out.append(m)
        return out


def _alpha_unknowns(n):
    """Map each symmetric pair of alpha positions to an unknown index."""
    index = {}
    for k in range(1, n + 1):
        for i in range(1, k + 1):
            for c in range(1, n - k + 2):
                a, b = AlphaArrays.position(n, k, i, c)
                key = (k, min(a, b), max(a, b))
                if key not in index:
                    index[key] = len(index)
    return index


@dataclass(frozen=True)
class PolynomialMetric:
    """Theta(tau) = sum_j M(j) (-tau)^(j-1) for a fixed dimension."""
    coeffs: tuple
    alphas: AlphaArrays

    @property
    def n(self):
        return self.coeffs[0].shape[0]

    def __call__(self, tau):
        # Horner in x = -tau
        x = -float(tau)
        out = np.zeros_like(self.coeffs[0])
        for m in reversed(self.coeffs):
            out = out * x + m
        return out

    def dtau(self, tau):
        """d Theta / d tau."""
        x = -float(tau)
        out = np.zeros_like(self.coeffs[0])
        for j in range(len(self.coeffs) - 1, 0, -1):
            out = out * x + j * self.coeffs[j]
        return -out

    def metric(self, tau):
        return Metric(self(tau), float(tau), self.coeffs)

    def sparse_coeffs(self):
        return [sp.csr_array(m) for m in self.coeffs]


@lru_cache(maxsize=None)
def polynomial_metric(n):
    """Solve for the coefficient matrices M(1..n); cached per dimension."""
    n = int(n)
    if n < 2:
        raise DimensionError(f"matrix dimension must be >= 2, got {n}")
    d = np.diag(2.0 * np.arange(1, n + 1) - n - 1)
    c = ladder_coefficients(n)
    kmat = np.diag(c, 1) - np.diag(c, -1)
    index = _alpha_unknowns(n)

    # Coefficient of tau^p in R^T Theta - Theta R, p = 0..n:
    #   (-1)^p [D, M(p+1)] + (-1)^p {K, M(p)} = 0
    nblocks = n + 1
    a = np.zeros((nblocks * n * n + n, len(index)))
    for (j, r, s), col in index.items():
        e = np.zeros((n, n))
        e[r, s] = e[s, r] = 1.0
        comm = (d @ e - e @ d).ravel()
        anti = (kmat @ e + e @ kmat).ravel()
        p = j - 1
        a[p * n * n:(p + 1) * n * n, col] += (-1) ** p * comm
        p = j
        a[p * n * n:(p + 1) * n * n, col] += (-1) ** p * anti
        if j == 1:
            a[nblocks * n * n + r, col] = 1.0
    rhs = np.zeros(a.shape[0])
    rhs[-n:] = 1.0

    sol, _, rank, _ = np.linalg.lstsq(a, rhs, rcond=None)
    if rank < len(index):
        raise StructureError(
            f"coefficient system for N={n} is rank deficient "
            f"({rank} < {len(index)})")
    resid = np.linalg.norm(a @ sol - rhs)
    if resid > 1e-9 * np.sqrt(n):
        raise StructureError(f"inconsistent coefficient system, residual {resid:.3e}")

    coeffs = [np.zeros((n, n)) for _ in range(n)]
    for (j, r, s), col in index.items():
        coeffs[j - 1][r, s] = coeffs[j - 1][s, r] = sol[col]
    # M(1) is diagonal by the ansatz and normalized to 1: exactly I
    coeffs[0] = np.eye(n)
    # clean solver round-off on structurally-determined values
    for m in coeffs:
        m[np.abs(m) < 1e-13] = 0.0
        m.setflags(write=False)

    arrays = []
    for k in range(1, n + 1):
        arr = np.zeros((k, n - k + 1))
        for i in range(1, k + 1):
            for cc in range(1, n - k + 2):
                arr[i - 1, cc - 1] = coeffs[k - 1][AlphaArrays.position(n, k, i, cc)]
        arr.setflags(write=False)
        arrays.append(arr)
    return PolynomialMetric(tuple(coeffs), AlphaArrays(tuple(arrays)))


def build_polynomial_metric(n):
    """Coefficient matrices of the polynomial metric and their alpha arrays.

    Returns
    -------
    coeffs : list of scipy.sparse.csr_array
        M(1) = I, M(2), ..., M(n).
    alphas : AlphaArrays
    """
    pm = polynomial_metric(n)
    return pm.sparse_coeffs(), pm.alphas


# -- pointwise route ---------------------------------------------------------

def _sym_basis(n):
    iu = np.triu_indices(n)
    weights = np.where(iu[0] == iu[1], 1.0, 2.0)
    return iu, weights


def _vectorized(op, n):
    """Matrix of the linear map X -> op(X) over symmetric X."""
    iu, _ = _sym_basis(n)
    cols = []
    for r, s in zip(*iu):
        e = np.zeros((n, n))
        e[r, s] = e[s, r] = 1.0
        cols.append(op(e).ravel())
    return np.array(cols).T


def _null(a, rel=1e-11):
    u, s, vh = np.linalg.svd(a)
    if s.size == 0 or s[0] == 0.0:
        return np.eye(a.shape[1])
    rank = int(np.sum(s > rel * s[0]))
    return vh[rank:].conj().T


def solve_metric_pointwise(r_matrix, tau):
    """Metric for a single radius matrix.

    The Dieudonne equation alone leaves an N-parameter family. The branch is
    pinned by requiring Theta to commute with the Hermitian matrix
    R^T R - R R^T (which for this family is proportional to the symmetric
    ladder operator), projecting the identity onto the remaining null space
    and fixing the overall scale by the trace of the closed-form eigenvalues.

    Raises
    ------
    StructureError
        EP input (defective matrix) or a degenerate solution family.
    NoPositiveMetricError
        Complex spectrum.
    """
    r = np.asarray(r_matrix, dtype=float)
    n = r.shape[0]
    if r.ndim != 2 or r.shape != (n, n) or n < 2:
        raise DimensionError(f"expected an N x N matrix with N >= 2, got {r.shape}")
    rep = spectrum(r)
    if is_exceptional(rep, r):
        raise StructureError(
            f"input is at an exceptional point (eigenvector condition "
            f"{rep.eigvec_condition:.3e}, gap {rep.min_gap:.3e}); "
            "the metric degenerates")
    if not rep.is_real:
        raise NoPositiveMetricError(
            f"spectrum is complex (max |Im| = {rep.max_imag:.3e}); "
            "no positive-definite metric exists")

    dieu = _vectorized(lambda e: r.T @ e - e @ r, n)
    family = _null(dieu)
    if family.shape[1] != n:
        raise StructureError(
            f"solution family has dimension {family.shape[1]}, expected {n}")

    comm = r.T @ r - r @ r.T
    cnorm = np.linalg.norm(comm)
    if cnorm > 1e-14 * max(1.0, np.linalg.norm(r)) ** 2:
        comm = comm / cnorm
        pinned = _null(np.vstack([dieu, _vectorized(lambda e: comm @ e - e @ comm, n)]))
    else:
        pinned = family

    iu, w = _sym_basis(n)
    ident = (iu[0] == iu[1]).astype(float)
    gram = pinned.T @ (w[:, None] * pinned)
    coef = np.linalg.solve(gram, pinned.T @ (w * ident))
    v = pinned @ coef
    theta = np.zeros((n, n))
    theta[iu] = v
    theta = theta + theta.T - np.diag(np.diag(theta))

    target = float(np.sum(theorem2_eigenvalues(n, tau)))
    tr = np.trace(theta)
    if abs(tr) < 1e-300:
        raise StructureError("metric candidate has vanishing trace")
    theta *= target / tr

    if dieudonne_residual(r, theta) > 1e-10:
        raise NumericError(
            f"Dieudonne residual {dieudonne_residual(r, theta):.3e} exceeds 1e-10")
    # positivity is reported by Metric.is_positive, not enforced here: close
    # to the EP the smallest eigenvalue drops below double-precision resolution
    return Metric(theta, float(tau))


# -- time-dependent helpers --------------------------------------------------

def metric_at(t, model: RadiusModel):
    """Polynomial-route metric at time `t` for `model`."""
    return polynomial_metric(model.n).metric(model.tau(t))


def metric_derivative(t, model: RadiusModel):
    """d Theta / dt = (d Theta / d tau) * tau_dot, analytic."""
    pm = polynomial_metric(model.n)
    return pm.dtau(model.tau(t)) * model.tau_dot(t)


def positivity_domain(n, t_grid, schedule=None):
    """Per-time flag: all metric eigenvalues exceed the positivity tolerance."""
    model = RadiusModel(n, schedule)
    pm = polynomial_metric(model.n)
    out = []
    for t in t_grid:
        theta = pm(model.tau(t))
        w = np.linalg.eigvalsh(theta)
        out.append((float(t), bool(w[0] > positivity_tolerance(theta))))
    return out
