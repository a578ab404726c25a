"""
Velocity of log-singular vortices
=================================

Vorticity of the form 1/(|x| |log |x||^alpha) on the upper half disk is in L^2
for alpha > 1/2, yet its velocity on the horizontal axis is unbounded: it grows
like |log x1|^(1 - alpha).  This script prints the ratio to that rate.
"""

import math

import numpy as np

from enslab.biotsavart import u1_on_axis, velocity_radial_field, velocity_spectral
from enslab.fields import Grid2D, RadialProfile, sample_radial

# %%
# Sanity check first: the spectral Biot-Savart route against the closed form
# for a Rankine vortex.
# Cells cut by the vortex edge are averaged; a few cells either side of the
# jump carry Gibbs ringing and are left out of the comparison.
g = Grid2D(512, 4.0)
rankine = RadialProfile(lambda s: np.ones_like(s), 1.0, name="rankine")
w = sample_radial(rankine, g, "point", edge_rule="cell_average")
exact = velocity_radial_field(rankine, g)
num = velocity_spectral(w)
away = np.abs(g.radius() - 1.0) > 3.0 * g.h
err = np.abs(num.speed() - exact.speed())
print(f"Rankine velocity error: {err[away].max():.2e} away from the edge, {err.max():.2e} overall")

# %%
# Axis velocity ratios.  A positive floor as x1 -> 0 is the lower bound.
for alpha in (0.6, 0.75, 0.9):
    row = []
    for x1 in (1e-2, 1e-4, 1e-6):
        u = u1_on_axis(alpha, x1)
        row.append(u / abs(math.log(x1)) ** (1 - alpha))
    print(f"alpha = {alpha:4.2f}   u1 / |log x1|^(1-alpha) at x1 = 1e-2, 1e-4, 1e-6:", np.round(row, 4))
