"""
State and operator evolution in the non-Hermitian interaction picture.

States come in pairs: |psi> obeys i d/dt |psi> = G |psi> and the conjugate
ket |psi>> obeys i d/dt |psi>> = G^H |psi>>, with G = H - Sigma. The physical
norm <<psi|psi> is conserved for any G.
"""
import warnings
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional

import numpy as np
from scipy.integrate import solve_ivp

from .dyson import DysonMap, dyson_map, omega_derivative, sqrt_metric
from .errors import NumericError, ParameterError
from .metric import metric_at, polynomial_metric
from .model import RadiusModel

__all__ = ['StatePair', 'HamiltonianSpec', 'Trajectory', 'OperatorTrajectory',
           'Kinematics', 'assemble_generator', 'textbook_hamiltonian',
           'evolve_pair', 'evolve_heisenberg', 'textbook_crosscheck',
           'crosscheck_series', 'rk4_step', 'NEAR_EP_WINDOW']

# Default lower bound for evolution windows.
NEAR_EP_WINDOW = 0.05


@dataclass(frozen=True)
class StatePair:
    """The ket |psi> and its conjugate partner |psi>> at time `t`."""
    ket: np.ndarray
    ketket: np.ndarray
    t: Optional[float] = None

    @classmethod
    def from_ket(cls, ket, t, model: RadiusModel, normalize=True):
        """Pair with |psi>> = Theta(t) |psi>, optionally of unit physical norm."""
        ket = np.asarray(ket, dtype=complex)
        ketket = metric_at(t, model).matrix @ ket
        if normalize:
            nrm = np.vdot(ketket, ket).real
            if not nrm > 0.0:
                raise ParameterError("physical norm of the initial ket is not positive")
            ket = ket / np.sqrt(nrm)
            ketket = ketket / np.sqrt(nrm)
        return cls(ket, ketket, float(t))

    @property
    def norm(self):
        """Physical norm <<psi|psi> (complex; real up to round-off)."""
        return complex(np.vdot(self.ketket, self.ket))


@dataclass(frozen=True)
class HamiltonianSpec:
    """Hermitian energy parametrization A(t); the Hamiltonian is Theta^-1 A."""
    a_matrix: Callable[[float], np.ndarray]
    label: str = 'custom'

    @classmethod
    def constant(cls, a, label='constant'):
        a = np.array(a, dtype=complex)
        a.setflags(write=False)
        return cls(lambda t: a, label)

    @classmethod
    def diagonal(cls, entries):
        return cls.constant(np.diag(np.asarray(entries, dtype=float)),
                            label='diagonal')

    @classmethod
    def default(cls, n):
        """A = diag(1, 2, ..., n)."""
        return cls.diagonal(np.arange(1, n + 1, dtype=float))

    def a(self, t):
        a = np.asarray(self.a_matrix(t), dtype=complex)
        if np.linalg.norm(a - a.conj().T) > 1e-12 * max(1.0, np.linalg.norm(a)):
            raise ParameterError(f"A(t) is not Hermitian at t={t!r}")
        return a


class Kinematics:
    """Memoized per-time quantities (metric, Dyson map, Sigma, H, G).

    Integrators evaluate each grid point several times; this keeps one
    eigen-decomposition per distinct time.
    """

    def __init__(self, model: RadiusModel, h_spec: Optional[HamiltonianSpec] = None,
                 maxsize=8):
        self.model = model
        self.h_spec = h_spec
        self._poly = polynomial_metric(model.n)
        self._cache = {}
        self._maxsize = maxsize

    def metric(self, t):
        """Theta(t) alone, bypassing the cache."""
        return self._poly(self.model.tau(t))

    def at(self, t):
        t = float(t)
        hit = self._cache.get(t)
        if hit is not None:
            return hit
        tau = self.model.tau(t)
        theta = self._poly(tau)
        dm = sqrt_metric(theta)
        odot = omega_derivative(self._poly.dtau(tau) * self.model.tau_dot(t), dm)
        dm = DysonMap(dm.omega, dm.omega_inv, odot, t, dm.eigvals, dm.eigvecs)
        sig = 1j * dm.omega_inv @ odot
        frame = {'theta': theta, 'dyson': dm, 'sigma': sig}
        if self.h_spec is not None:
            h = np.linalg.solve(theta, self.h_spec.a(t))
            frame['h'] = h
            frame['g'] = h - sig
        if len(self._cache) >= self._maxsize:
            self._cache.pop(next(iter(self._cache)))
        self._cache[t] = frame
        return frame


def assemble_generator(t, h_spec: HamiltonianSpec, model: RadiusModel):
    """G(t) = Theta^-1(t) A(t) - Sigma(t)."""
    return Kinematics(model, h_spec).at(t)['g']


def textbook_hamiltonian(t, h_spec: HamiltonianSpec, model: RadiusModel,
                         route='direct'):
    """Hermitian Hamiltonian of the textbook picture.

    ``route='direct'`` returns Omega H Omega^-1; ``route='generator'`` returns
    Omega G Omega^-1 + i dOmega/dt Omega^-1. The two agree identically since
    H = G + Sigma.
    """
    fr = Kinematics(model, h_spec).at(t)
    dm: DysonMap = fr['dyson']
    if route == 'direct':
        return dm.omega @ fr['h'] @ dm.omega_inv
    if route == 'generator':
        return (dm.omega @ fr['g'] @ dm.omega_inv
                + 1j * dm.omega_dot @ dm.omega_inv)
    raise ParameterError(f"unknown route {route!r}")


def rk4_step(f, t, y, h, t_next=None):
    """One classical Runge-Kutta step for y' = f(t, y).

    `t_next` (default ``t + h``) is passed to the last stage verbatim so that
    callers memoizing on time see identical grid values.
    """
    if t_next is None:
        t_next = t + h
    tm = t + 0.5 * h
    k1 = f(t, y)
    k2 = f(tm, y + 0.5 * h * k1)
    k3 = f(tm, y + 0.5 * h * k2)
    k4 = f(t_next, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _grid(t0, t1, step, allow_near_ep):
    if not step > 0.0:
        raise ParameterError(f"step must be positive, got {step!r}")
    if not t1 > t0:
        raise ParameterError(f"window must satisfy t0 < t1, got ({t0}, {t1})")
    if t0 < 0.0:
        raise ParameterError(
            f"window starts at t0={t0} < 0, before the exceptional point; "
            "evolution is only defined for t > 0")
    if t0 < NEAR_EP_WINDOW:
        if not allow_near_ep:
            raise ParameterError(
                f"window starts at t0={t0} inside the near-EP zone "
                f"[0, {NEAR_EP_WINDOW}); pass allow_near_ep=True to override")
        warnings.warn(f"evolving from t0={t0}, close to the exceptional point",
                      RuntimeWarning, stacklevel=3)
    nsteps = max(1, int(round((t1 - t0) / step)))
    # grid points computed from the index so memoized times coincide exactly
    return nsteps, (t1 - t0) / nsteps


@dataclass
class Trajectory:
    grid: np.ndarray
    kets: np.ndarray
    ketkets: np.ndarray
    norms: np.ndarray
    consistency: np.ndarray
    expectations: Dict[str, np.ndarray] = field(default_factory=dict)
    step: Optional[float] = None

    @property
    def states(self):
        return [StatePair(k, kk, float(t))
                for t, k, kk in zip(self.grid, self.kets, self.ketkets)]

    @property
    def norm_drift(self):
        """max |<<psi|psi>(t) - <<psi|psi>(t0)| over the grid."""
        if len(self.norms) == 0:
            return 0.0
        return float(np.max(np.abs(self.norms - self.norms[0])))

    @classmethod
    def empty(cls, n=0):
        z = np.zeros((0, n), dtype=complex)
        return cls(np.zeros(0), z, z.copy(), np.zeros(0), np.zeros(0))


@dataclass
class OperatorTrajectory:
    grid: np.ndarray
    matrices: np.ndarray
    step: Optional[float] = None


def _expect(ketket, op, ket):
    return np.vdot(ketket, op @ ket) / np.vdot(ketket, ket)


def _integrate(rhs, y0, grid, method):
    """Values of y on `grid` for y' = rhs(t, y), y(grid[0]) = y0.

    `y0` may be an array of any shape; the adaptive branch flattens it.
    """
    y = np.array(y0, dtype=complex)
    out = np.empty((len(grid),) + y.shape, dtype=complex)
    out[0] = y
    if method == 'rk4':
        for i in range(len(grid) - 1):
            y = rk4_step(rhs, grid[i], y, grid[i + 1] - grid[i], grid[i + 1])
            if not np.all(np.isfinite(y)):
                raise NumericError(
                    f"non-finite solution at t={grid[i + 1]:.6g}",
                    last_good_time=float(grid[i]))
            out[i + 1] = y
    elif method == 'adaptive':
        shape = y.shape
        sol = solve_ivp(lambda t, v: rhs(t, v.reshape(shape)).ravel(),
                        (grid[0], grid[-1]), y.ravel(), method='DOP853',
                        t_eval=grid, rtol=1e-10, atol=1e-10)
        if not sol.success or not np.all(np.isfinite(sol.y)):
            last = float(sol.t[-1]) if sol.t.size else float(grid[0])
            raise NumericError(f"adaptive integration failed: {sol.message}",
                               last_good_time=last)
        out = sol.y.T.reshape(out.shape)
    else:
        raise ParameterError(f"unknown method {method!r}")
    return out


def _time_grid(t0, t1, step, allow_near_ep):
    nsteps, h = _grid(t0, t1, step, allow_near_ep)
    grid = t0 + h * np.arange(nsteps + 1)
    grid[-1] = t1
    return grid, h


def evolve_pair(initial: StatePair, h_spec: HamiltonianSpec, model: RadiusModel,
                t0, t1, step, observables=None, method='rk4',
                allow_near_ep=False):
    """Integrate the conjugate pair of Schrodinger equations.

    Parameters
    ----------
    initial : StatePair
        State at `t0`.
    h_spec : HamiltonianSpec
    model : RadiusModel
    t0, t1 : float
        Window; must lie after the exceptional point at t = 0.
    step : float
        Nominal step; adjusted slightly so that the grid ends exactly at `t1`.
    observables : dict of str -> callable, optional
        ``name -> f(t)`` returning an operator matrix; the physical
        expectation <<psi|L|psi> / <<psi|psi> is recorded for each.
    method : {'rk4', 'adaptive'}
        Fixed-step classical RK4 (default) or an adaptive DOP853 run with
        rtol = atol = 1e-10, sampled on the same grid.
    allow_near_ep : bool
        Permit windows starting in [0, 0.05) (warns).

    Returns
    -------
    Trajectory
    """
    grid, h = _time_grid(t0, t1, step, allow_near_ep)
    kin = Kinematics(model, h_spec)
    n = model.n
    ket0 = np.asarray(initial.ket, dtype=complex)
    kk0 = np.asarray(initial.ketket, dtype=complex)
    if ket0.shape != (n,) or kk0.shape != (n,):
        raise ParameterError(f"state vectors must have shape ({n},)")
    observables = dict(observables or {})

    def rhs(t, y):
        g = kin.at(t)['g']
        return np.concatenate([-1j * (g @ y[:n]), -1j * (g.conj().T @ y[n:])])

    ys = _integrate(rhs, np.concatenate([ket0, kk0]), grid, method)
    kets, kks = ys[:, :n], ys[:, n:]
    norms = np.einsum('ij,ij->i', kks.conj(), kets)
    cons = np.empty(len(grid))
    expect = {name: np.empty(len(grid)) for name in observables}
    for i, t in enumerate(grid):
        theta = kin.metric(t)
        cons[i] = np.linalg.norm(kks[i] - theta @ kets[i])
        for name, fn in observables.items():
            expect[name][i] = _expect(kks[i], np.asarray(fn(t)), kets[i]).real
    return Trajectory(grid, kets, kks, norms.real, cons, expect, h)


def evolve_heisenberg(a_initial, model: RadiusModel, t0, t1, step,
                      method='rk4', allow_near_ep=False):
    """Integrate i dA/dt = A Sigma - Sigma A from A(t0) = a_initial."""
    grid, h = _time_grid(t0, t1, step, allow_near_ep)
    kin = Kinematics(model)
    a = np.array(a_initial, dtype=complex)
    if a.shape != (model.n, model.n):
        raise ParameterError(f"operator must have shape ({model.n}, {model.n})")

    def rhs(t, x):
        s = kin.at(t)['sigma']
        return -1j * (x @ s - s @ x)

    return OperatorTrajectory(grid, _integrate(rhs, a, grid, method), h)


def crosscheck_series(initial: StatePair, h_spec: HamiltonianSpec,
                      model: RadiusModel, t0, t1, step, a=None,
                      method='rk4', allow_near_ep=False):
    """Both sides of <<psi|A(t)|psi> = <psi_SP|a|psi_SP> along the grid.

    The left side uses the integrated state pair and the Heisenberg-evolved
    A(t) with A(t0) = Omega^-1(t0) a Omega(t0); the right side evolves
    Omega(t0)|psi(t0)> under the Hermitian Omega H Omega^-1 on the same grid.

    Returns
    -------
    grid, nip, textbook : ndarray
    """
    n = model.n
    if a is None:
        a = np.diag([(-1.0) ** k for k in range(n)])
    a = np.asarray(a, dtype=complex)
    if np.linalg.norm(a - a.conj().T) > 1e-12 * max(1.0, np.linalg.norm(a)):
        raise ParameterError("textbook observable must be Hermitian")
    traj = evolve_pair(initial, h_spec, model, t0, t1, step, method=method,
                       allow_near_ep=allow_near_ep)
    dm0 = dyson_map(t0, model)
    ops = evolve_heisenberg(dm0.omega_inv @ a @ dm0.omega, model, t0, t1, step,
                            method=method, allow_near_ep=allow_near_ep)

    kin = Kinematics(model, h_spec)

    def rhs(t, y):
        fr = kin.at(t)
        dm = fr['dyson']
        return -1j * (dm.omega @ (fr['h'] @ (dm.omega_inv @ y)))

    grid = traj.grid
    ys = _integrate(rhs, dm0.omega @ np.asarray(initial.ket, dtype=complex),
                    grid, method)
    sp_side = np.einsum('ij,jk,ik->i', ys.conj(), a, ys)
    nip_side = np.array([np.vdot(kk, op @ k) for kk, op, k in
                         zip(traj.ketkets, ops.matrices, traj.kets)])
    return grid, nip_side, sp_side


def textbook_crosscheck(initial: StatePair, h_spec: HamiltonianSpec,
                        model: RadiusModel, t0, t1, step, a=None,
                        method='rk4', allow_near_ep=False):
    """Largest |<<psi|A(t)|psi> - <psi_SP|a|psi_SP>| over the grid.

    `a` defaults to diag(1, -1, 1, ...).
    """
    _, lhs, rhs = crosscheck_series(initial, h_spec, model, t0, t1, step, a,
                                    method, allow_near_ep)
    return float(np.max(np.abs(lhs - rhs)))
