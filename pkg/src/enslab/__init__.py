"""Enstrophy defects of two-dimensional incompressible flow.

Grids, radial profiles and singular quadrature (:mod:`enslab.fields`),
Biot-Savart velocities (:mod:`enslab.biotsavart`), Orlicz, Lorentz and
Besov norms (:mod:`enslab.funcspaces`), transport and viscous defects
(:mod:`enslab.defects`) and the experiment drivers
(:mod:`enslab.experiments`).
"""

__version__ = "0.1.0"

from .fields import Grid2D, GridField, QuadratureError, RadialProfile, ResolutionWarning, quad_radial, sample_radial
from .biotsavart import VelocityField, u1_on_axis, velocity_radial_field, velocity_spectral
from .funcspaces import OrliczParams, besov_norm_sup, lorentz_norm_1q, luxemburg_norm, orlicz_modular
from .defects import heat_evolve, transport_defect, viscous_defect_field, viscous_defect_l1_spectral

__all__ = [
    "Grid2D",
    "GridField",
    "OrliczParams",
    "QuadratureError",
    "RadialProfile",
    "ResolutionWarning",
    "VelocityField",
    "besov_norm_sup",
    "heat_evolve",
    "lorentz_norm_1q",
    "luxemburg_norm",
    "orlicz_modular",
    "quad_radial",
    "sample_radial",
    "transport_defect",
    "u1_on_axis",
    "velocity_radial_field",
    "velocity_spectral",
    "viscous_defect_field",
    "viscous_defect_l1_spectral",
]
