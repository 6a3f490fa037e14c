"""
The physical metric and its positivity
======================================

Two independent constructions of the metric: a polynomial in tau built
once per N, and a pointwise null-space solve. Both satisfy the Dieudonne
equation and share the closed-form spectrum.
"""
import numpy as np

from quasiherm import (RadiusModel, dieudonne_residual, polynomial_metric,
                       solve_metric_pointwise, theorem2_eigenvalues)

#%%
# Build both routes for N = 5 at t = 0.3.

model = RadiusModel(5)
t = 0.3
tau = model.tau(t)
theta_poly = polynomial_metric(5)(tau)
theta_point = solve_metric_pointwise(model.matrix(t), tau).matrix

print(np.max(np.abs(theta_poly - theta_point)))
print(dieudonne_residual(model.matrix(t), theta_poly))

#%%
# Metric eigenvalues follow (1 - tau)^(k-1) (1 + tau)^(N-k).

print(np.linalg.eigvalsh(theta_poly))
print(np.sort(theorem2_eigenvalues(5, tau)))

#%%
# The smallest eigenvalue behaves like t^(N-1) and closes at the
# exceptional point.

for t in (0.1, 0.01, 0.001):
    print(t, theorem2_eigenvalues(5, model.tau(t)).min())
