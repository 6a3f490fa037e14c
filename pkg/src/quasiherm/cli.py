"""
Command-line scenarios: spectrum, metric, evolve and verify.

A scenario is a YAML (or JSON, which YAML also reads) mapping::

    n: 4                      # matrix dimension, >= 2 (required)
    schedule: default         # or a mapping, see below
    hamiltonian: [1, 2, 3, 4] # diagonal of A, or {matrix: [[...], ...]}
    window: [0.1, 0.9]        # (t0, t1), t0 < t1
    step: 0.001               # evolution step, > 0
    points: 101               # samples for spectrum / metric modes
    outputs: [norm, consistency, energy, radius]
    initial: [1, 1, 1, 1]     # initial ket at t0 (normalized physically)
    method: rk4               # rk4 | adaptive; verify defaults to adaptive
    samples: 10               # random times probed in verify mode
    seed: 0

Schedules are ``default``, ``{kind: polynomial, tau: [c0, c1, ...],
sigma: [...], tau_dot: [...], sigma_dot: [...]}`` (ascending coefficients;
the derivative lists are optional and checked against the value lists) or
``{kind: stationary, tau: 0.5, sigma: 0.0}``. Complex matrix entries may be
written as strings such as ``"1+2j"``.
"""
import argparse
import csv
import io
import json
import os
import platform
import sys
import warnings
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
import scipy
import yaml
from numpy.polynomial import Polynomial

from . import __version__
from .dyson import compatibility_residual, dyson_map
from .errors import (ConfigError, ConsistencyError, DegeneracyError,
                     ParameterError, QuasiHermError)
from .evolution import (NEAR_EP_WINDOW, HamiltonianSpec, Kinematics, StatePair,
                        crosscheck_series, evolve_heisenberg, evolve_pair,
                        textbook_hamiltonian)
from .metric import (dieudonne_residual, polynomial_metric,
                     positivity_tolerance, solve_metric_pointwise,
                     theorem2_eigenvalues)
from .model import (RadiusModel, default_schedule, polynomial_schedule,
                    stationary_schedule)
from .observables import biorthonormalize, radius_as_observable

__all__ = ['ScenarioConfig', 'Table', 'RunResult', 'parse_config',
           'run_scenario', 'write_outputs', 'main', 'MODES', 'OUTPUTS',
           'TOLERANCES', 'EXIT_OK', 'EXIT_INVARIANT', 'EXIT_USAGE',
           'EXIT_NUMERIC']

MODES = ('spectrum', 'metric', 'evolve', 'verify')
OUTPUTS = ('norm', 'consistency', 'energy', 'radius')
KEYS = ('n', 'schedule', 'hamiltonian', 'window', 'step', 'points', 'outputs',
        'initial', 'method', 'samples', 'seed')

EXIT_OK, EXIT_INVARIANT, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

TOLERANCES = {
    'radius_quasi_hermiticity': 1e-10,
    'dieudonne': 1e-10,
    'closed_form_eigenvalues': 1e-9,
    'solver_agreement': 1e-9,
    'metric_positivity': 0.0,
    'compatibility': 1e-8,
    'textbook_hermiticity': 1e-9,
    'textbook_routes': 1e-9,
    'norm_drift': 1e-8,
    'consistency': 1e-7,
    'heisenberg_conjugation': 1e-6,
    'cross_picture': 1e-6,
    'biorthonormality': 1e-10,
    'bicompleteness': 1e-9,
}


@dataclass(frozen=True)
class ScenarioConfig:
    n: int
    schedule: dict = field(default_factory=lambda: {'kind': 'default'})
    hamiltonian: Optional[list] = None
    window: Tuple[float, float] = (0.1, 0.9)
    step: float = 1e-3
    points: int = 101
    outputs: Tuple[str, ...] = OUTPUTS
    initial: Optional[list] = None
    method: Optional[str] = None
    samples: int = 10
    seed: int = 0

    def model(self):
        sch = self.schedule
        kind = sch['kind']
        if kind == 'default':
            return RadiusModel(self.n, default_schedule(self.n))
        if kind == 'polynomial':
            return RadiusModel(self.n, polynomial_schedule(sch['tau'], sch['sigma']))
        return RadiusModel(self.n, stationary_schedule(sch['tau'], sch['sigma']))

    def a_matrix(self):
        if self.hamiltonian is None:
            return np.diag(np.arange(1.0, self.n + 1))
        a = np.array(self.hamiltonian, dtype=complex)
        return np.diag(a) if a.ndim == 1 else a

    def h_spec(self):
        return HamiltonianSpec.constant(self.a_matrix(), label='config')

    def initial_ket(self):
        if self.initial is None:
            return np.ones(self.n, dtype=complex)
        return np.array(self.initial, dtype=complex)

    def echo(self):
        """Plain-data copy of the configuration for JSON output."""
        return {
            'n': self.n,
            'schedule': self.schedule,
            'hamiltonian': _plain(self.hamiltonian),
            'window': list(self.window),
            'step': self.step,
            'points': self.points,
            'outputs': list(self.outputs),
            'initial': _plain(self.initial),
            'method': self.method,
            'samples': self.samples,
            'seed': self.seed,
        }


def _plain(x):
    if x is None:
        return None
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, complex):
        return str(x) if x.imag else x.real
    return x


# -- parsing ---------------------------------------------------------------

def _number(value, key, kind=float):
    if isinstance(value, bool):
        raise ConfigError(f"{key} must be a number, got {value!r}", key)
    if kind is int:
        if isinstance(value, int):
            return value
        if isinstance(value, float) and value.is_integer():
            return int(value)
        raise ConfigError(f"{key} must be an integer, got {value!r}", key)
    if kind is complex:
        try:
            return complex(value.replace(' ', '') if isinstance(value, str) else value)
        except (TypeError, ValueError):
            raise ConfigError(f"{key} must be a number, got {value!r}", key) from None
    # YAML 1.1 reads "1e-3" as a string
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{key} must be a number, got {value!r}", key) from None
    if not np.isfinite(out):
        raise ConfigError(f"{key} must be finite, got {value!r}", key)
    return out


def _number_list(value, key, kind=float):
    if not isinstance(value, (list, tuple)) or len(value) == 0:
        raise ConfigError(f"{key} must be a non-empty list", key)
    return [_number(v, f"{key}[{i}]", kind) for i, v in enumerate(value)]


def _parse_schedule(raw):
    if raw is None or raw == 'default':
        return {'kind': 'default'}
    if isinstance(raw, str):
        raise ConfigError(f"schedule: unknown preset {raw!r}", 'schedule')
    if not isinstance(raw, dict):
        raise ConfigError("schedule must be 'default' or a mapping", 'schedule')
    kind = raw.get('kind', 'polynomial')
    allowed = {'default': {'kind'},
               'polynomial': {'kind', 'tau', 'sigma', 'tau_dot', 'sigma_dot'},
               'stationary': {'kind', 'tau', 'sigma'}}
    if kind not in allowed:
        raise ConfigError(f"schedule.kind: unknown kind {kind!r}", 'schedule.kind')
    for k in raw:
        if k not in allowed[kind]:
            raise ConfigError(f"schedule.{k}: unknown key for kind {kind!r}",
                              f"schedule.{k}")
    if kind == 'default':
        return {'kind': 'default'}
    if kind == 'stationary':
        if 'tau' not in raw:
            raise ConfigError("schedule.tau is required", 'schedule.tau')
        return {'kind': 'stationary',
                'tau': _number(raw['tau'], 'schedule.tau'),
                'sigma': _number(raw.get('sigma', 0.0), 'schedule.sigma')}
    if 'tau' not in raw:
        raise ConfigError("schedule.tau is required", 'schedule.tau')
    out = {'kind': 'polynomial',
           'tau': _number_list(raw['tau'], 'schedule.tau'),
           'sigma': _number_list(raw.get('sigma', [0.0]), 'schedule.sigma')}
    for name in ('tau', 'sigma'):
        dkey = f"{name}_dot"
        if dkey in raw:
            given = Polynomial(_number_list(raw[dkey], f"schedule.{dkey}"))
            expected = Polynomial(out[name]).deriv()
            m = max(len(given.coef), len(expected.coef))
            diff = np.zeros(m)
            diff[:len(given.coef)] += given.coef
            diff[:len(expected.coef)] -= expected.coef
            if np.max(np.abs(diff)) > 1e-12 * max(1.0, np.max(np.abs(expected.coef))):
                raise ConfigError(
                    f"schedule.{dkey} is inconsistent with schedule.{name}",
                    f"schedule.{dkey}")
    return out


def _parse_hamiltonian(raw, n):
    if raw is None:
        return None
    if isinstance(raw, dict):
        if set(raw) - {'diagonal', 'matrix'} or len(raw) != 1:
            raise ConfigError("hamiltonian must have exactly one of 'diagonal' "
                              "or 'matrix'", 'hamiltonian')
        key, raw = next(iter(raw.items()))
        if key == 'matrix' and not (isinstance(raw, list) and raw
                                    and isinstance(raw[0], list)):
            raise ConfigError("hamiltonian.matrix must be a list of rows",
                              'hamiltonian.matrix')
    if not isinstance(raw, list) or not raw:
        raise ConfigError("hamiltonian must be a list", 'hamiltonian')
    if isinstance(raw[0], list):
        rows = [_number_list(r, f"hamiltonian[{i}]", complex)
                for i, r in enumerate(raw)]
        if len(rows) != n or any(len(r) != n for r in rows):
            raise ConfigError(f"hamiltonian matrix must be {n} x {n}", 'hamiltonian')
        a = np.array(rows)
        if np.linalg.norm(a - a.conj().T) > 1e-12 * max(1.0, np.linalg.norm(a)):
            raise ConfigError("hamiltonian matrix must be Hermitian", 'hamiltonian')
        return rows
    diag = _number_list(raw, 'hamiltonian')
    if len(diag) != n:
        raise ConfigError(f"hamiltonian diagonal must have {n} entries", 'hamiltonian')
    return diag


def parse_config(text):
    """Parse and validate a scenario from YAML or JSON text.

    Raises
    ------
    ConfigError
        For malformed text, unknown keys, type mismatches and violated
        invariants; ``.key`` names the offending entry.
    """
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed configuration: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a mapping")
    for k in raw:
        if k not in KEYS:
            raise ConfigError(f"{k}: unknown key", str(k))
    if 'n' not in raw:
        raise ConfigError("n is required", 'n')
    n = _number(raw['n'], 'n', int)
    if n < 2:
        raise ConfigError("n must be ≥ 2", 'n')

    kw = {'n': n, 'schedule': _parse_schedule(raw.get('schedule')),
          'hamiltonian': _parse_hamiltonian(raw.get('hamiltonian'), n)}
    if 'window' in raw:
        w = _number_list(raw['window'], 'window')
        if len(w) != 2:
            raise ConfigError("window must be [t0, t1]", 'window')
        if not w[0] < w[1]:
            raise ConfigError("t0 < t1 required", 'window')
        kw['window'] = (w[0], w[1])
    if 'step' in raw:
        kw['step'] = _number(raw['step'], 'step')
        if not kw['step'] > 0:
            raise ConfigError("step must be > 0", 'step')
    for key, lo in (('points', 2), ('samples', 1)):
        if key in raw:
            kw[key] = _number(raw[key], key, int)
            if kw[key] < lo:
                raise ConfigError(f"{key} must be ≥ {lo}", key)
    if 'seed' in raw:
        kw['seed'] = _number(raw['seed'], 'seed', int)
    if 'outputs' in raw:
        outs = raw['outputs']
        if not isinstance(outs, list) or not all(isinstance(o, str) for o in outs):
            raise ConfigError("outputs must be a list of names", 'outputs')
        for o in outs:
            if o not in OUTPUTS:
                raise ConfigError(f"outputs: unknown series {o!r}", 'outputs')
        kw['outputs'] = tuple(outs)
    if 'initial' in raw:
        ket = _number_list(raw['initial'], 'initial', complex)
        if len(ket) != n:
            raise ConfigError(f"initial must have {n} entries", 'initial')
        if not any(ket):
            raise ConfigError("initial ket must be nonzero", 'initial')
        kw['initial'] = ket
    if 'method' in raw:
        if raw['method'] not in ('rk4', 'adaptive'):
            raise ConfigError("method must be 'rk4' or 'adaptive'", 'method')
        kw['method'] = raw['method']
    return ScenarioConfig(**kw)


# -- output ----------------------------------------------------------------

@dataclass
class Table:
    header: List[str]
    rows: list


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return '1' if x else '0'
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), '.17g')


def _trajectory_table(traj):
    names = list(traj.expectations)
    header = ['t', 'norm', 'consistency'] + names
    rows = [[t, nrm, c] + [traj.expectations[k][i] for k in names]
            for i, (t, nrm, c) in enumerate(zip(traj.grid, traj.norms,
                                                traj.consistency))]
    return Table(header, rows)


def write_outputs(series, paths):
    """Write a table or trajectory as CSV, or a summary dict as JSON.

    Parameters
    ----------
    series : Table, Trajectory, dict or a list of these
    paths : str or list of str
        One destination per item of `series`.
    """
    if isinstance(paths, (str, os.PathLike)):
        series, paths = [series], [paths]
    if len(series) != len(paths):
        raise ParameterError("one path is required per output")
    for item, path in zip(series, paths):
        try:
            if isinstance(item, dict):
                text = json.dumps(item, indent=2, sort_keys=True,
                                  ensure_ascii=False, allow_nan=True) + '\n'
            else:
                table = item if isinstance(item, Table) else _trajectory_table(item)
                buf = io.StringIO()
                w = csv.writer(buf, lineterminator='\n')
                w.writerow(table.header)
                for row in table.rows:
                    w.writerow([_fmt(v) for v in row])
                text = buf.getvalue()
            with open(path, 'w', encoding='utf-8', newline='') as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


# -- scenarios -------------------------------------------------------------

@dataclass
class RunResult:
    status: int
    paths: List[str] = field(default_factory=list)
    message: str = ''
    summary: Optional[dict] = None


def _versions():
    return {'quasiherm': __version__, 'numpy': np.__version__,
            'scipy': scipy.__version__, 'python': platform.python_version()}


def _sample_times(cfg):
    t0, t1 = cfg.window
    return np.linspace(t0, t1, cfg.points)


def _spectrum_table(cfg, model):
    n = cfg.n
    header = ['t'] + [f"r{k}_{p}" for k in range(1, n + 1) for p in ('re', 'im')]
    rows = []
    for t in _sample_times(cfg):
        w = model.spectrum(t).eigenvalues
        rows.append([t] + [x for z in w for x in (z.real, z.imag)])
    return Table(header, rows)


def _metric_table(cfg, model):
    n = cfg.n
    pm = polynomial_metric(n)
    header = (['t'] + [f"theta{k}" for k in range(1, n + 1)]
              + ['positive', 'closed_form_dev'])
    rows = []
    for t in _sample_times(cfg):
        tau = model.tau(t)
        theta = pm(tau)
        w = np.linalg.eigvalsh(theta)
        ref = np.sort(theorem2_eigenvalues(n, tau))
        rows.append([t] + list(w) + [bool(w[0] > positivity_tolerance(theta)),
                                     float(np.max(np.abs(w - ref)))])
    return Table(header, rows)


def _evolve(cfg, model, method, force_ep):
    t0, t1 = cfg.window
    observables = {}
    kin = Kinematics(model, cfg.h_spec())
    if 'energy' in cfg.outputs:
        observables['energy'] = lambda t: kin.at(t)['h']
    if 'radius' in cfg.outputs:
        observables['radius'] = model.matrix
    init = StatePair.from_ket(cfg.initial_ket(), t0, model)
    traj = evolve_pair(init, cfg.h_spec(), model, t0, t1, cfg.step,
                       observables=observables, method=method,
                       allow_near_ep=force_ep)
    cols = ['t'] + [c for c in ('norm', 'consistency') if c in cfg.outputs] \
        + list(observables)
    full = _trajectory_table(traj)
    idx = [full.header.index(c) for c in cols]
    return traj, Table(cols, [[r[i] for i in idx] for r in full.rows])


def _check(name, residual, tolerance=None):
    tol = TOLERANCES[name] if tolerance is None else tolerance
    residual = float(residual)
    passed = bool(np.isfinite(residual) and residual <= tol)
    return {'name': name, 'residual': residual, 'tolerance': tol, 'passed': passed}


def _verify(cfg, model, force_ep):
    """Every invariant residual, each as {name, residual, tolerance, passed}."""
    n = cfg.n
    t0, t1 = cfg.window
    rng = np.random.default_rng(cfg.seed)
    ts = np.sort(rng.uniform(t0, t1, size=cfg.samples))
    pm = polynomial_metric(n)
    h_spec = cfg.h_spec()
    method = cfg.method or 'adaptive'
    checks = []

    quasi = diet = closed = agree = compat = herm = routes = 0.0
    min_theta = np.inf
    ortho = compl = 0.0
    for t in ts:
        tau = model.tau(t)
        r = model.matrix(t)
        theta = pm(tau)
        quasi = max(quasi, radius_as_observable(t, model, tol=np.inf).residual)
        diet = max(diet, dieudonne_residual(r, theta))
        w = np.linalg.eigvalsh(theta)
        closed = max(closed, np.max(np.abs(w - np.sort(theorem2_eigenvalues(n, tau))))
                     / max(1.0, np.max(np.abs(w))))
        agree = max(agree, np.linalg.norm(solve_metric_pointwise(r, tau).matrix - theta)
                    / np.linalg.norm(theta))
        min_theta = min(min_theta, w[0] / np.mean(w))
        kin = Kinematics(model, h_spec).at(t)
        theta_dot = pm.dtau(tau) * model.tau_dot(t)
        scale = np.linalg.norm(theta_dot)
        res = compatibility_residual(t, kin['h'], model)
        compat = max(compat, res / scale if scale > 0 else res)
        hd = textbook_hamiltonian(t, h_spec, model, 'direct')
        hg = textbook_hamiltonian(t, h_spec, model, 'generator')
        herm = max(herm, np.linalg.norm(hd - hd.conj().T) / np.linalg.norm(hd))
        routes = max(routes, np.linalg.norm(hd - hg) / np.linalg.norm(hd))
        try:
            sysm = biorthonormalize(kin['h'], theta)
            ortho = max(ortho, np.max(np.abs(sysm.overlaps() - np.eye(n))))
            compl = max(compl, np.max(np.abs(sysm.completeness() - np.eye(n))))
        except DegeneracyError:
            ortho = compl = np.inf
    checks += [_check('radius_quasi_hermiticity', quasi),
               _check('dieudonne', diet),
               _check('closed_form_eigenvalues', closed),
               _check('solver_agreement', agree),
               {'name': 'metric_positivity', 'residual': float(min_theta),
                'tolerance': 0.0, 'passed': bool(min_theta > 0.0)},
               _check('compatibility', compat),
               _check('textbook_hermiticity', herm),
               _check('textbook_routes', routes),
               _check('biorthonormality', ortho),
               _check('bicompleteness', compl)]

    init = StatePair.from_ket(cfg.initial_ket(), t0, model)
    traj = evolve_pair(init, h_spec, model, t0, t1, cfg.step, method=method,
                       allow_near_ep=force_ep)
    checks += [_check('norm_drift', traj.norm_drift),
               _check('consistency', np.max(traj.consistency))]

    a = np.diag([(-1.0) ** k for k in range(n)])
    d0 = dyson_map(t0, model)
    ops = evolve_heisenberg(d0.omega_inv @ a @ d0.omega, model, t0, t1, cfg.step,
                            method=method, allow_near_ep=force_ep)
    stride = max(1, len(ops.grid) // 50)
    heis = 0.0
    for t, mat in zip(ops.grid[::stride], ops.matrices[::stride]):
        d = dyson_map(t, model)
        heis = max(heis, np.linalg.norm(mat - d.omega_inv @ a @ d.omega))
    checks.append(_check('heisenberg_conjugation', heis))
    _, lhs, rhs = crosscheck_series(init, h_spec, model, t0, t1, cfg.step, a,
                                    method=method, allow_near_ep=force_ep)
    checks.append(_check('cross_picture', np.max(np.abs(lhs - rhs))))
    return checks, method, [float(t) for t in ts]


def _summary(cfg, mode, extra):
    out = {'mode': mode, 'config': cfg.echo(), 'versions': _versions()}
    out.update(extra)
    return out


def run_scenario(config: ScenarioConfig, mode, out_dir='.', force_ep=False):
    """Run one scenario and write its files into `out_dir`.

    Returns
    -------
    RunResult
        ``status`` is 0 on success, 1 when an invariant fails, 2 for usage
        errors (including refused windows) and 3 for numerical breakdown.
    """
    if mode not in MODES:
        return RunResult(EXIT_USAGE, message=f"unknown mode {mode!r}")
    cfg = config
    t0, t1 = cfg.window
    ctx = f"[{mode} n={cfg.n} window=({t0:g}, {t1:g})]"
    if mode in ('evolve', 'verify') and t0 < 0.0:
        return RunResult(EXIT_USAGE, message=(
            f"{ctx} refusing window starting at t0={t0:g} < 0: evolution is "
            "not defined before the exceptional point"))
    if t0 < NEAR_EP_WINDOW and not force_ep:
        return RunResult(EXIT_USAGE, message=(
            f"{ctx} window starts within {NEAR_EP_WINDOW} of the exceptional "
            "point at t=0; pass --force-ep to allow it"))
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    try:
        model = cfg.model()
        with warnings.catch_warnings():
            # --force-ep already acknowledged the near-EP warning
            if force_ep:
                warnings.simplefilter('ignore', RuntimeWarning)
            if mode == 'spectrum':
                table = _spectrum_table(cfg, model)
                summary = _summary(cfg, mode, {'columns': table.header})
            elif mode == 'metric':
                table = _metric_table(cfg, model)
                summary = _summary(cfg, mode, {
                    'columns': table.header,
                    'all_positive': all(bool(r[-2]) for r in table.rows)})
            elif mode == 'evolve':
                method = cfg.method or 'rk4'
                traj, table = _evolve(cfg, model, method, force_ep)
                notes = []
                if not traj.norm_drift <= TOLERANCES['norm_drift']:
                    notes.append(
                        f"norm drift {traj.norm_drift:.3e} exceeds "
                        f"{TOLERANCES['norm_drift']:.0e}; the generator is stiff "
                        "near t=0, use a smaller step or method: adaptive")
                summary = _summary(cfg, mode, {
                    'columns': table.header, 'method': method,
                    'norm_drift': traj.norm_drift,
                    'max_consistency': float(np.max(traj.consistency)),
                    'warnings': notes})
                for note in notes:
                    print(f"quasiherm: warning: {note}", file=sys.stderr)
            else:
                checks, method, ts = _verify(cfg, model, force_ep)
                ok = all(c['passed'] for c in checks)
                summary = _summary(cfg, mode, {
                    'method': method, 'sample_times': ts, 'checks': checks,
                    'passed': ok})
                path = os.path.join(out_dir, 'verify.json')
                write_outputs(summary, path)
                failed = [c['name'] for c in checks if not c['passed']]
                msg = (f"{ctx} all {len(checks)} checks passed" if ok else
                       f"{ctx} failed checks: {', '.join(failed)}")
                return RunResult(EXIT_OK if ok else EXIT_INVARIANT, [path], msg,
                                 summary)
        csv_path = os.path.join(out_dir, f"{mode}.csv")
        json_path = os.path.join(out_dir, f"{mode}.json")
        write_outputs([table, summary], [csv_path, json_path])
        paths = [csv_path, json_path]
    except (ConfigError, ParameterError) as exc:
        return RunResult(EXIT_USAGE, paths, f"{ctx} {exc}")
    except ConsistencyError as exc:
        return RunResult(EXIT_INVARIANT, paths, f"{ctx} {exc}")
    except (QuasiHermError, ArithmeticError, np.linalg.LinAlgError) as exc:
        where = getattr(exc, 'last_good_time', None)
        tail = f" (last good t={where:.6g})" if where is not None else ''
        return RunResult(EXIT_NUMERIC, paths,
                         f"{ctx} {type(exc).__name__}: {exc}{tail}")
    return RunResult(EXIT_OK, paths, f"{ctx} wrote {', '.join(paths)}", summary)


# -- command line ----------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def _build_parser():
    p = _Parser(prog='quasiherm',
                description='Quasi-Hermitian radius-matrix scenarios.')
    p.add_argument('mode', choices=MODES)
    p.add_argument('--config', help='YAML or JSON scenario file')
    p.add_argument('--out', default='.', help='output directory')
    p.add_argument('--step', help='override the evolution step')
    p.add_argument('--window', help='override the window as t0,t1')
    p.add_argument('--n', help='dimension when no config file is given')
    p.add_argument('--force-ep', action='store_true',
                   help='allow windows that reach the exceptional point')
    p.add_argument('--seed', help='override the seed')
    return p


def main(argv=None):
    """Entry point; returns the exit status."""
    try:
        args = _build_parser().parse_args(argv)
        if args.config:
            try:
                with open(args.config, encoding='utf-8') as fh:
                    text = fh.read()
            except OSError as exc:
                raise ConfigError(f"cannot read {args.config}: {exc.strerror}") from exc
            raw = yaml.safe_load(text) if text.strip() else {}
        else:
            raw = {}
        if not isinstance(raw, dict):
            raise ConfigError("configuration must be a mapping")
        if args.n is not None:
            raw['n'] = args.n
        if args.step is not None:
            raw['step'] = args.step
        if args.seed is not None:
            raw['seed'] = args.seed
        if args.window is not None:
            parts = args.window.split(',')
            if len(parts) != 2:
                raise ConfigError("--window must be t0,t1", 'window')
            raw['window'] = parts
        for key in ('n', 'seed'):
            if isinstance(raw.get(key), str):
                try:
                    raw[key] = int(raw[key])
                except ValueError:
                    raise ConfigError(f"{key} must be an integer", key) from None
        cfg = parse_config(json.dumps(raw))
    except ConfigError as exc:
        print(f"quasiherm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.force_ep and cfg.window[0] < NEAR_EP_WINDOW and args.mode != 'spectrum':
        print("quasiherm: warning: window reaches the exceptional point; "
              "results there are ill-conditioned", file=sys.stderr)
    result = run_scenario(cfg, args.mode, args.out, args.force_ep)
    print(result.message, file=sys.stderr if result.status else sys.stdout)
    return result.status


if __name__ == '__main__':
    sys.exit(main())
