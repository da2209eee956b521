#!/usr/bin/env python3
"""Trace the critical curve beta_c(d) and compare with its d -> 1 asymptote.

The ordered (retrieval) phase exists below the curve d = tanh(beta d); near
d = 1 the curve diverges like (1/2) log 1/(1-d).  Saves phase_diagram.png.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from qhopfield import asymptote_ratio, phase_curve

d_grid = np.concatenate([np.linspace(0.0, 0.9, 19), 1.0 - np.geomspace(0.05, 1e-6, 12)])
points = phase_curve(d_grid)

print(f"{'d':>10} {'beta_c':>12} {'residual':>10} {'beta_c/asymptote':>18}")
for pt in points[::4]:
    print(f"{pt.d:10.6f} {pt.beta_c:12.6f} {pt.residual:10.1e} {asymptote_ratio(pt):18.4f}")

ds = np.array([pt.d for pt in points])
betas = np.array([pt.beta_c for pt in points])
asymptote = 0.5 * np.log(1.0 / (1.0 - ds[1:]))

fig, ax = plt.subplots(figsize=(6, 4))
ax.plot(ds, betas, "o-", ms=3, label=r"$\beta_c(d)$: $d = \tanh(\beta d)$")
ax.plot(ds[1:], asymptote, "--", label=r"$\frac{1}{2}\log\frac{1}{1-d}$")
ax.set_xlabel("transverse field $d$")
ax.set_ylabel(r"$\beta_c$")
ax.set_yscale("log")
ax.axhline(1.0, color="gray", lw=0.5)
ax.legend()
ax.set_title("Quantum Hopfield mean-field critical curve")
fig.tight_layout()
fig.savefig("phase_diagram.png", dpi=150)
print("saved phase_diagram.png")
