import csv
import json
import os
import subprocess
import sys

import jsonschema
import numpy as np
import pytest

from quasiherm.cli import (EXIT_INVARIANT, EXIT_NUMERIC, EXIT_OK, EXIT_USAGE,
                           ScenarioConfig, Table, main, parse_config,
                           run_scenario, write_outputs)
from quasiherm.errors import ConfigError
from quasiherm.evolution import Trajectory
from quasiherm.schema import SUMMARY_SCHEMA


def _read_csv(path):
    with open(path, encoding='utf-8') as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=float) if len(rows) > 1 else None


def test_minimal_config_defaults():
    cfg = parse_config('n: 4')
    assert cfg == ScenarioConfig(n=4)
    assert cfg.window == (0.1, 0.9)
    assert cfg.step == 1e-3
    assert cfg.schedule == {'kind': 'default'}
    assert cfg.model().schedule.name == 'default'


def test_json_config():
    cfg = parse_config('{"n": 3, "window": [0.2, 0.7], "step": 0.01}')
    assert cfg.window == (0.2, 0.7) and cfg.step == 0.01


@pytest.mark.parametrize('text,key,msg', [
    ('n: 1', 'n', 'n must be ≥ 2'),
    ('{n: 3, window: [0.9, 0.1]}', 'window', 't0 < t1 required'),
    ('{n: 3, bogus: 1}', 'bogus', 'unknown key'),
    ('{n: three}', 'n', 'integer'),
    ('{n: 3, step: -1.0}', 'step', 'step'),
    ('{n: 3, step: fast}', 'step', 'number'),
    ('{n: 3, outputs: [norm, colour]}', 'outputs', 'colour'),
    ('{n: 3, hamiltonian: [1, 2]}', 'hamiltonian', '3 entries'),
    ('{n: 2, hamiltonian: {matrix: [[1, 1], [0, 1]]}}', 'hamiltonian', 'Hermitian'),
    ('{n: 3, schedule: warp}', 'schedule', 'preset'),
    ('{n: 3, schedule: {kind: polynomial, tau: [1, -1], tau_dot: [1]}}',
     'schedule.tau_dot', 'inconsistent'),
    ('{n: 3, schedule: {kind: stationary, tau: 0.5, speed: 1}}', 'schedule.speed', 'unknown'),
    ('{n: 3, method: euler}', 'method', 'rk4'),
    ('[1, 2]', None, 'mapping'),
    ('n: [', None, 'malformed'),
])
def test_parse_errors(text, key, msg):
    with pytest.raises(ConfigError, match=msg) as exc:
        parse_config(text)
    assert exc.value.key == key


def test_full_config():
    cfg = parse_config("""
n: 2
schedule: {kind: polynomial, tau: [1, -1], sigma: [0.5], tau_dot: [-1], sigma_dot: [0]}
hamiltonian: {matrix: [[1, "0.5j"], ["-0.5j", 2]]}
window: [0.2, 0.4]
step: 1e-3
outputs: [norm, radius]
initial: [1, "1j"]
seed: 7
""")
    assert cfg.step == 1e-3  # YAML 1.1 reads this as a string
    np.testing.assert_allclose(cfg.a_matrix(), [[1, 0.5j], [-0.5j, 2]])
    np.testing.assert_allclose(cfg.initial_ket(), [1, 1j])
    m = cfg.model()
    assert m.tau(0.3) == pytest.approx(0.7)


def test_spectrum_figure(tmp_path):
    cfg = parse_config('{n: 4, window: [0.0, 1.0], points: 51}')
    res = run_scenario(cfg, 'spectrum', str(tmp_path), force_ep=True)
    assert res.status == EXIT_OK
    header, data = _read_csv(tmp_path / 'spectrum.csv')
    assert header[:3] == ['t', 'r1_re', 'r1_im'] and len(header) == 9
    t = data[:, 0]
    re = data[:, 1::2]
    s = np.sqrt(2 * t - t * t)
    np.testing.assert_allclose(re[1:], np.outer(s[1:], [5, 7, 9, 11]), rtol=1e-9)
    assert np.max(np.abs(data[0, 1:])) < 1e-3


def test_spectrum_needs_force_ep(tmp_path):
    cfg = parse_config('{n: 4, window: [0.0, 1.0]}')
    assert run_scenario(cfg, 'spectrum', str(tmp_path)).status == EXIT_USAGE


def test_metric_mode(tmp_path):
    cfg = parse_config('{n: 3, points: 9}')
    res = run_scenario(cfg, 'metric', str(tmp_path))
    assert res.status == EXIT_OK
    header, data = _read_csv(tmp_path / 'metric.csv')
    assert header == ['t', 'theta1', 'theta2', 'theta3', 'positive', 'closed_form_dev']
    assert np.all(data[:, 4] == 1)
    assert np.max(data[:, 5]) < 1e-12


def test_evolve_mode(tmp_path):
    cfg = parse_config('{n: 2, window: [0.2, 0.4], step: 0.01}')
    res = run_scenario(cfg, 'evolve', str(tmp_path))
    assert res.status == EXIT_OK
    header, data = _read_csv(tmp_path / 'evolve.csv')
    assert header == ['t', 'norm', 'consistency', 'energy', 'radius']
    assert data.shape == (21, 5)
    np.testing.assert_allclose(data[:, 1], 1.0, atol=1e-10)


def test_evolve_output_selection(tmp_path):
    cfg = parse_config('{n: 2, window: [0.2, 0.3], step: 0.01, outputs: [radius]}')
    run_scenario(cfg, 'evolve', str(tmp_path))
    header, _ = _read_csv(tmp_path / 'evolve.csv')
    assert header == ['t', 'radius']


def test_evolve_refuses_pre_ep_window(tmp_path):
    cfg = parse_config('{n: 3, window: [-0.1, 0.5]}')
    for force in (False, True):
        res = run_scenario(cfg, 'evolve', str(tmp_path), force_ep=force)
        assert res.status == EXIT_USAGE
        assert 'exceptional point' in res.message
    assert not os.path.exists(tmp_path / 'evolve.csv')


def test_verify_n3_defaults(tmp_path):
    res = run_scenario(parse_config('n: 3'), 'verify', str(tmp_path))
    assert res.status == EXIT_OK, res.message
    summary = json.loads((tmp_path / 'verify.json').read_text(encoding='utf-8'))
    jsonschema.validate(summary, SUMMARY_SCHEMA)
    assert summary['passed'] and all(c['passed'] for c in summary['checks'])
    assert summary['config']['n'] == 3
    assert {'quasiherm', 'numpy', 'scipy', 'python'} <= set(summary['versions'])


def test_verify_fails_with_nonzero_exit(tmp_path):
    # coarse fixed-step RK4 violates the evolution tolerances
    cfg = parse_config('{n: 4, method: rk4, step: 0.01, samples: 2}')
    res = run_scenario(cfg, 'verify', str(tmp_path))
    assert res.status == EXIT_INVARIANT
    summary = json.loads((tmp_path / 'verify.json').read_text(encoding='utf-8'))
    assert not summary['passed']
    assert 'norm_drift' in res.message


def test_numeric_error_exit(tmp_path):
    # window ending at the EP from the far side: metric factorization fails
    cfg = parse_config('{n: 3, window: [1.5, 2.0], step: 0.01}')
    res = run_scenario(cfg, 'evolve', str(tmp_path))
    assert res.status == EXIT_NUMERIC
    assert 'n=3' in res.message


@pytest.mark.parametrize('mode', ['spectrum', 'metric', 'evolve'])
def test_summaries_validate(tmp_path, mode):
    cfg = parse_config('{n: 2, window: [0.2, 0.3], step: 0.01, points: 5}')
    assert run_scenario(cfg, mode, str(tmp_path)).status == EXIT_OK
    summary = json.loads((tmp_path / f'{mode}.json').read_text(encoding='utf-8'))
    jsonschema.validate(summary, SUMMARY_SCHEMA)


def test_deterministic_outputs(tmp_path):
    cfg = parse_config('{n: 3, window: [0.3, 0.5], step: 0.01, seed: 5, samples: 3}')
    blobs = []
    for k in range(2):
        d = tmp_path / str(k)
        for mode in ('evolve', 'verify'):
            run_scenario(cfg, mode, str(d))
        blobs.append([(d / f).read_bytes() for f in ('evolve.csv', 'evolve.json',
                                                      'verify.json')])
    assert blobs[0] == blobs[1]


def test_empty_trajectory_header_only(tmp_path):
    path = tmp_path / 'empty.csv'
    write_outputs(Trajectory.empty(2), str(path))
    assert path.read_text(encoding='utf-8') == 't,norm,consistency\n'


def test_round_trip_17_digits(tmp_path):
    rng = np.random.default_rng(0)
    vals = np.concatenate([rng.normal(size=50) * 10.0 ** rng.integers(-300, 300, 50),
                           [0.1, 1 / 3, np.pi, 5e-324, 1.7976931348623157e308]])
    path = tmp_path / 'rt.csv'
    write_outputs(Table(['x'], [[v] for v in vals]), str(path))
    _, back = _read_csv(path)
    assert np.array_equal(back[:, 0], vals)


def test_write_error_names_path(tmp_path):
    bad = tmp_path / 'missing' / 'x.csv'
    with pytest.raises(OSError, match='missing'):
        write_outputs(Table(['x'], []), str(bad))


def test_main_exit_codes(tmp_path, capsys):
    cfg = tmp_path / 'c.yaml'
    cfg.write_text('n: 2\nwindow: [0.2, 0.3]\nstep: 0.01\n', encoding='utf-8')
    assert main(['evolve', '--config', str(cfg), '--out', str(tmp_path)]) == 0
    assert main(['evolve', '--config', str(cfg), '--window', '-0.1,0.5',
                 '--out', str(tmp_path)]) == EXIT_USAGE
    assert main(['spectrum', '--config', str(tmp_path / 'nope.yaml')]) == EXIT_USAGE
    assert main(['explode']) == EXIT_USAGE
    assert main(['metric', '--n', '1']) == EXIT_USAGE
    assert 'n must be ≥ 2' in capsys.readouterr().err


def test_main_flag_overrides(tmp_path):
    assert main(['evolve', '--n', '2', '--window', '0.2,0.25', '--step', '0.01',
                 '--seed', '3', '--out', str(tmp_path)]) == 0
    summary = json.loads((tmp_path / 'evolve.json').read_text(encoding='utf-8'))
    assert summary['config']['window'] == [0.2, 0.25]
    assert summary['config']['seed'] == 3


def test_module_entry_point(tmp_path):
    out = subprocess.run([sys.executable, '-m', 'quasiherm', 'spectrum', '--n', '2',
                          '--out', str(tmp_path)], capture_output=True, text=True)
    assert out.returncode == 0, out.stderr
    assert (tmp_path / 'spectrum.csv').exists()
