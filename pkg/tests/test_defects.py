import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from enslab.defects import (
    DefectSweepResult,
    Mollifier,
    bump,
    bump_test_function,
    concentration_profile,
    enstrophy_identity,
    hankel_radial,
    hankel_radial_many,
    heat_evolve,
    mollified_enstrophy_residual,
    mollify,
    symbol_error,
    transport_defect,
    viscous_defect_field,
    viscous_defect_l1_spectral,
)
from enslab.experiments import build_omega0, gaussian_profile, regularized_omega0
from enslab.fields import Grid2D, GridField, RadialProfile, ResolutionWarning, sample_radial
from enslab.funcspaces import distribution_function

G = Grid2D(256, 12.0)
X1, X2 = G.mesh()
R2 = X1**2 + X2**2
GAUSS = GridField(G, np.exp(-R2))


def gaussian_defect_plancherel(nu, t):
    return math.pi * nu / (1.0 + 4.0 * nu * t) ** 2


# --------------------------------------------------------------------------- mollification


def test_bump_shape():
    assert bump(0.0) == pytest.approx(math.exp(-1.0))
    assert bump(1.0) == 0.0 and bump(2.0) == 0.0


def test_mollifier_has_unit_mass_and_radius():
    m = Mollifier(0.5)
    assert m.support_radius == 0.5
    k = m.sampled(G)
    assert G.h**2 * k.sum() == pytest.approx(1.0, rel=1e-14)
    with pytest.raises(ValueError):
        Mollifier(0.0)


def test_mollify_constant_is_constant():
    f = GridField(G, np.full((256, 256), 3.5))
    assert np.allclose(mollify(f, 0.4).data, 3.5, rtol=1e-13)


def test_mollify_rejects_unresolved_scale():
    with pytest.raises(ValueError):
        mollify(GAUSS, G.h)


def test_mollify_gaussian_converges_quadratically():
    eps = np.array([0.3, 0.4, 0.5, 0.6])
    err = [math.sqrt(GAUSS.with_data(mollify(GAUSS, e).data - GAUSS.data).l2_squared()) for e in eps]
    rate = np.polyfit(np.log(eps), np.log(err), 1)[0]
    assert rate == pytest.approx(2.0, abs=0.1)


# --------------------------------------------------------------------------- transport defect


def test_transport_defect_of_zero():
    z = GridField(G, np.zeros((256, 256)))
    assert not np.any(transport_defect(z, 0.5).data)


@pytest.fixture(scope="module")
def nonradial():
    return GridField(G, np.exp(-((X1 - 0.4) ** 2) - 3.0 * X2**2) - 0.5 * np.exp(-2.0 * ((X1 + 0.6) ** 2 + (X2 - 0.5) ** 2)))


def test_transport_defect_of_radial_data_is_tiny():
    g = Grid2D(512, 4.0)
    w = sample_radial(regularized_omega0(0.02, "bump_smoothstep"), g, "point")
    z = transport_defect(w, 0.12)
    assert z.l1() < 1e-3 * 4.0 * math.pi**3


def test_transport_defect_vanishes_for_smooth_data(nonradial):
    eps = np.array([0.3, 0.4, 0.5, 0.6])
    l1 = np.array([transport_defect(nonradial, e).l1() for e in eps])
    assert np.all(np.diff(l1) > 0)
    rate = np.polyfit(np.log(eps), np.log(l1), 1)[0]
    assert rate > 1.0


def test_residual_balance_for_radial_steady_state():
    phi = bump_test_function(G, (0.3, -0.2), 2.0)
    rep = mollified_enstrophy_residual(GAUSS, 0.5, phi)
    assert rep.steadiness < 1e-10
    assert abs(rep.residual) < 1e-10 and abs(rep.closure) < 1e-10


def test_residual_rejects_unsteady_data(nonradial):
    with pytest.raises(ValueError, match="not steady"):
        mollified_enstrophy_residual(nonradial, 0.5, bump_test_function(G))


def test_residual_balance_closes_with_euler_tendency(nonradial):
    phi = bump_test_function(G, (0.2, 0.1), 1.5)
    rep = mollified_enstrophy_residual(nonradial, 0.5, phi, euler_tendency=True)
    assert abs(rep.pairing) > 1e-6
    assert abs(rep.closure) < 1e-9 * max(abs(rep.residual), abs(rep.pairing))


def test_residual_of_zero_vorticity():
    z = GridField(G, np.zeros((256, 256)))
    assert mollified_enstrophy_residual(z, 0.5, bump_test_function(G)).residual == 0.0


def test_bump_test_function_peak_and_support():
    phi = bump_test_function(G, (1.0, 0.0), 0.5)
    assert phi.sup() == pytest.approx(1.0, abs=1e-2)
    assert np.all(phi.data[np.hypot(X1 - 1.0, X2) >= 0.5] == 0.0)


# --------------------------------------------------------------------------- viscous defect


def test_heat_evolve_identity_at_zero():
    assert heat_evolve(GAUSS, 0.0, 1.0) is GAUSS
    with pytest.raises(ValueError):
        heat_evolve(GAUSS, -1.0, 1.0)


@pytest.mark.parametrize("nu,t", [(1e-2, 1.0), (0.1, 2.0), (1e-3, 0.5)])
def test_heat_evolve_gaussian(nu, t):
    a = 1.0 + 4.0 * nu * t
    assert np.max(np.abs(heat_evolve(GAUSS, nu, t).data - np.exp(-R2 / a) / a)) < 1e-8


def test_viscous_defect_of_constant_is_zero():
    c = GridField(G, np.full((256, 256), 2.0))
    assert np.max(np.abs(viscous_defect_field(c, 0.1).data)) < 1e-20


@pytest.mark.parametrize("nu,t", [(1e-2, 1.0), (0.05, 0.5)])
def test_viscous_defect_gaussian_closed_form(nu, t):
    z = viscous_defect_field(heat_evolve(GAUSS, nu, t), nu)
    assert np.all(z.data >= 0.0)
    assert z.integral() == pytest.approx(gaussian_defect_plancherel(nu, t), rel=1e-8)


@pytest.mark.parametrize("nu,t", [(1e-2, 1.0), (1e-4, 2.0), (0.3, 0.25)])
def test_spectral_defect_gaussian_closed_forms(nu, t):
    p = gaussian_profile()
    plan = viscous_defect_l1_spectral(p, nu, t, normalization="plancherel")
    assert plan == pytest.approx(gaussian_defect_plancherel(nu, t), rel=1e-8)
    limit = viscous_defect_l1_spectral(p, nu, t)
    assert limit == pytest.approx(math.pi**3 * nu / (t * nu + 0.5) ** 2, rel=1e-8)


def test_spectral_defect_edge_cases():
    p = gaussian_profile()
    assert viscous_defect_l1_spectral(p, 0.0, 1.0) == 0.0
    with pytest.raises(ValueError):
        viscous_defect_l1_spectral(p, 1e-2, 0.0)
    with pytest.raises(ValueError):
        viscous_defect_l1_spectral(p, 1e-2, 1.0, normalization="other")


def test_spectral_defect_approaches_limit_for_both_cutoffs():
    limits = [viscous_defect_l1_spectral(build_omega0(c), 1e-6, 1.0) for c in ("bump_smoothstep", "poly_smoothstep")]
    assert limits[0] == pytest.approx(4.0 * math.pi**3, rel=0.02)
    assert limits[1] == pytest.approx(limits[0], rel=0.01)


def test_enstrophy_identity_gaussian():
    with warnings.catch_warnings():
        warnings.simplefilter("error", ResolutionWarning)
        lhs, rhs, rel = enstrophy_identity(GAUSS, 1e-2, 1.0)
    assert rel < 1e-4
    assert rhs == pytest.approx(0.5 * math.pi / (1.0 + 4e-5), rel=1e-8)
    with pytest.raises(ValueError):
        enstrophy_identity(GAUSS, 1e-2, 1.0, t0=2.0)


def test_diffusion_changes_distribution_function():
    w = heat_evolve(GAUSS, 1e-2, 1.0)
    levels = (0.1, 0.5, 0.9)
    assert any(distribution_function(w, s) != distribution_function(GAUSS, s) for s in levels)


# --------------------------------------------------------------------------- Hankel transform


@settings(max_examples=25)
@given(st.floats(1e-2, 2e3))
def test_hankel_of_disk(k):
    disk = RadialProfile(lambda s: np.ones_like(s), 1.0)
    assert hankel_radial(disk, k) == pytest.approx(2.0 * math.pi * special.j1(k) / k, rel=1e-9, abs=1e-12)


def test_hankel_at_zero_is_mass():
    p = build_omega0("bump_smoothstep")
    assert hankel_radial(p, 0.0) == pytest.approx(2.0 * math.pi * p.enclosed(p.support), rel=1e-10)


def test_hankel_many_matches_scalar():
    p = build_omega0("bump_smoothstep")
    k = np.array([0.5, 3.0, 70.0])
    assert np.allclose(hankel_radial_many(p, k), [hankel_radial(p, x) for x in k], rtol=1e-12)
    with pytest.raises(ValueError):
        hankel_radial_many(p, [-1.0])


def test_symbol_of_singular_data():
    p = build_omega0("bump_smoothstep")
    e = symbol_error(p, np.geomspace(1e-2, 1e4, 101))
    assert np.max(np.abs(e)) <= 2.0 * math.pi + 1.0
    assert abs(symbol_error(p, 1e4)) < 0.01 * 2.0 * math.pi
    with pytest.raises(ValueError):
        symbol_error(p, 0.0)


# --------------------------------------------------------------------------- concentration


def test_concentration_of_bump():
    z = bump_test_function(G, radius=0.5)
    total = z.integral()
    for r, m in concentration_profile(z, [0.5, 1.0, 3.0]):
        assert m == pytest.approx(total, rel=1e-12)


def test_concentration_of_annulus():
    g = Grid2D(512, 2.0)
    rr = g.radius()
    z = GridField(g, ((rr >= 0.5) & (rr < 1.0)).astype(float))
    total = z.integral()
    (_, m),  = concentration_profile(z, [0.75])
    assert m / total == pytest.approx((0.75**2 - 0.25) / 0.75, abs=0.01)


def test_concentration_radii_validation():
    with pytest.raises(ValueError):
        concentration_profile(GAUSS, [1.0, 0.5])


def test_sweep_result_checks_consistency():
    DefectSweepResult(1e-3, 1.0, 2.0, ((0.1, 1.0), (0.5, 2.0)))
    with pytest.raises(ValueError):
        DefectSweepResult(1e-3, 1.0, 2.0, ((0.1, 1.5), (0.5, 1.0)))
    with pytest.raises(ValueError):
        DefectSweepResult(1e-3, 1.0, 1.0, ((0.1, 1.5),))
