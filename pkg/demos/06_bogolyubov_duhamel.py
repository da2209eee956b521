#!/usr/bin/env python3
"""The two workhorse inequalities behind the disorder-ensemble analysis.

For H(t) = H0 + t H1 the free energy is concave in t (Duhamel: -f'' >= 0),
and the shift f(1) - f(0) is pinched between the Gibbs averages of H1 taken
in the perturbed and unperturbed states (Bogolyubov).  Both are checked here
on a transverse-field perturbation of a 4-site Hopfield instance, then on a
batch of random Hermitian pairs.
"""

import numpy as np

from qhopfield import (
    FieldMode,
    bogolyubov_bounds,
    curvature_duhamel,
    dense_hamiltonian,
    params_from_patterns,
    sample_patterns,
    verify_properties,
)

# Turning on the transverse field of a classical Hopfield instance.
xi = sample_patterns(4, 2, seed=8)
classical = params_from_patterns(xi, beta=2.0, d=0.0, field=FieldMode.uniform(0.1))
h0 = dense_hamiltonian(classical)
flip = np.zeros_like(h0)
idx = np.arange(h0.shape[0])
for i in range(4):
    flip[idx ^ (1 << i), idx] = -1.0  # H1 = -sum_i sx_i, i.e. d: 0 -> 1

bounds = bogolyubov_bounds(h0, flip, beta=2.0)
print("turning on the transverse field (d: 0 -> 1) on 4 sites:")
print(f"  lower bound  <H1>_pert / N = {bounds.lower:+.6f}")
print(f"  free-energy shift  df     = {bounds.delta_f:+.6f}")
print(f"  upper bound  <H1>_0 / N   = {bounds.upper:+.6f}")

for t in (0.0, 0.5, 1.0):
    curv = curvature_duhamel(h0, flip, beta=2.0, t=t)
    print(f"  concavity -f''(t={t:.1f})      = {curv:.6f}  (>= 0)")

print()
print("random-instance suites (200 trials each):")
for result in verify_properties(200, seed=0):
    print(f"  {result.suite:<12} {result.passed}/{result.trials} passed")
