"""
Transport defect versus viscous defect for a 1/|x| vortex
=========================================================

A radial vorticity is a steady Euler flow, so smoothing it and transporting it
loses no enstrophy.  Adding viscosity instead drains enstrophy at a rate that
stays finite as the viscosity vanishes and piles up at the origin.

Run with ``python demos/defect_counterexample.py`` (about half a minute).
"""

import math

import numpy as np

from enslab.defects import concentration_profile, heat_evolve, transport_defect, viscous_defect_field
from enslab.defects import viscous_defect_l1_spectral
from enslab.experiments import build_omega0, regularized_omega0
from enslab.fields import Grid2D, sample_radial

omega0 = build_omega0("bump_smoothstep")
print(f"omega0(0.25) = {omega0(0.25):.4f}   (equals 1/|x| inside the plateau)")

# %%
# Transport side.  The singular core is smoothed at scale delta so the grid
# can hold it; the mollified defect should be round-off small.
g = Grid2D(512, 4.0)
w = sample_radial(regularized_omega0(0.02), g, "point")
for eps in (0.06, 0.12, 0.24):
    z = transport_defect(w, eps)
    print(f"eps = {eps:5.2f}   ||Z_eps||_1 = {z.l1():.3e}")

# %%
# Viscous side, first through the Hankel transform of the radial profile.
# As nu -> 0 the total defect settles at 4 pi^3 / t.
t = 1.0
for nu in (1e-2, 1e-3, 1e-4, 1e-5, 1e-6):
    val = viscous_defect_l1_spectral(omega0, nu, t)
    print(f"nu = {nu:7.0e}   total defect = {val:9.4f}   ratio to 4 pi^3 = {val / (4 * math.pi**3):.5f}")

# %%
# The same heat flow on a grid.  The exact dissipation nu |grad omega|^2
# concentrates: nearly all of it sits inside a small disk.
g = Grid2D(1024, 4.0)
w0 = sample_radial(omega0, g, "mass")
for nu in (1e-2, 1e-3, 1e-4):
    Z = viscous_defect_field(heat_evolve(w0, nu, t), nu)
    total = Z.integral()
    prof = dict(concentration_profile(Z, [0.05, 0.1, 0.5]))
    share = np.array([prof[r] / total for r in (0.05, 0.1, 0.5)])
    print(f"nu = {nu:7.0e}   mass = {total:.4f}   share inside r = 0.05, 0.1, 0.5: {np.round(share, 4)}")
