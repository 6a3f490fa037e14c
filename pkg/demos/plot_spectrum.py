"""
Radius spectrum after the exceptional point
===========================================

The radius matrix of the N-level toy universe has a real spectrum for
t in (0, 1). All eigenvalues coalesce at t = 0 and then spread out in
fixed proportions.
"""
import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt
import numpy as np

from quasiherm import RadiusModel, ep_scaling_fit

#%%
# Eigenvalue curves for N = 4 under the default schedule.

model = RadiusModel(4)
t = np.linspace(0.0, 1.0, 201)
r = np.array([model.spectrum(s).eigenvalues.real for s in t])

fig, ax = plt.subplots()
ax.plot(t, r)
ax.set_xlabel('t')
ax.set_ylabel('radius eigenvalue')
fig.savefig('spectrum_n4.png', dpi=120)

#%%
# The ratios stay at 5:7:9:11 for every t > 0.

print(r[100] / r[100, 0])

#%%
# Near t = 0 the gap opens like a square root. A log-log fit recovers
# the exponent.

ts = np.geomspace(1e-3, 1e-1, 9)
for n in (2, 4, 6):
    print(n, round(ep_scaling_fit(n, ts), 4))
