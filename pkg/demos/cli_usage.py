"""
Driving scenarios from the command line
=======================================

The ``quasiherm`` command reads a YAML scenario and writes CSV tables and
a JSON summary. Here it is called through ``main`` so the script is
self-contained.
"""
import json
import os
import tempfile

from quasiherm.cli import main

#%%
# A scenario file for N = 3.

out = tempfile.mkdtemp()
cfg = os.path.join(out, 'scenario.yaml')
with open(cfg, 'w', encoding='utf-8') as fh:
    fh.write('n: 3\nwindow: [0.2, 0.8]\nstep: 1e-3\noutputs: [norm, energy]\n')

#%%
# Spectrum, metric and evolution tables.

for mode in ('spectrum', 'metric', 'evolve'):
    print(mode, main([mode, '--config', cfg, '--out', out]))
print(sorted(os.listdir(out)))

#%%
# ``verify`` runs every invariant check and exits non-zero on failure.

print('verify', main(['verify', '--config', cfg, '--out', out]))
with open(os.path.join(out, 'verify.json'), encoding='utf-8') as fh:
    summary = json.load(fh)
for check in summary['checks']:
    print(f"{check['name']:28s} {check['residual']:.1e} {check['passed']}")
