"""
Orlicz, Lorentz and Besov norms on a grid
=========================================

The enstrophy-defect story needs norms finer than L^2: Zygmund spaces
L^2 (log L)^a, the Lorentz space L^(1,q), and the Besov norm B^0_(2,inf).
Here they are on simple fields, with the closed forms they should match.
"""

import numpy as np

from enslab.biotsavart import velocity_spectral
from enslab.defects import heat_evolve
from enslab.experiments import build_omega0
from enslab.fields import Grid2D, GridField, sample_radial
from enslab.funcspaces import (
    OrliczParams,
    besov_norm_sup,
    energy_spectrum,
    lorentz_norm_1q,
    luxemburg_norm,
    orlicz_modular,
    spectrum_slope,
)

g = Grid2D(128, 1.0)
x1, x2 = g.mesh()
disk = GridField(g, (np.hypot(x1, x2) < 0.5).astype(float))
area = disk.integral()

# %%
# For an indicator of a set E the L^(1,q) norm is |E| q^(-1/q).
print(f"|E| = {area:.5f}   L^(1,1) = {lorentz_norm_1q(disk, 1.0):.5f}   L^(1,2) = {lorentz_norm_1q(disk, 2.0):.5f}")

# %%
# Luxemburg norm: the modular of f / norm equals one.
P = OrliczParams(2.0, 0.5)
lam = luxemburg_norm(disk, P)
print(f"Luxemburg norm {lam:.6f}, modular at the norm {orlicz_modular(disk.with_data(disk.data / lam), P):.12f}")

# %%
# Besov sup over Littlewood-Paley blocks of the heat-evolved 1/|x| vortex.
w0 = sample_radial(build_omega0(), Grid2D(512, 4.0), "mass")
for nu in (1e-2, 1e-3, 1e-4):
    res = besov_norm_sup(heat_evolve(w0, nu, 1.0), 0)
    print(f"nu = {nu:6.0e}   sup_j ||Delta_j omega||_2 = {res.value:.4f} at j = {res.argmax_j}")

# %%
# Energy spectrum of the 1/|x| vortex.  Its vorticity sits at the edge of L^2
# and the spectrum falls like k^-3, the enstrophy-cascade scaling.
u = velocity_spectral(w0)
k, E = energy_spectrum(u)
print(f"slope of E(k) on [5, 40]: {spectrum_slope(k, E, 5.0, 40.0):.3f}")
