import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate, special

from enslab.fields import (
    Grid2D,
    GridField,
    QuadratureError,
    RadialProfile,
    ResolutionWarning,
    fft_forward,
    fft_inverse,
    gauss_legendre,
    gradient_spectral,
    origin_value,
    panel_nodes,
    quad_log_scale,
    quad_radial,
    sample_radial,
    tail_fraction,
)


# --------------------------------------------------------------------------- grids


@pytest.mark.parametrize("n", [15, 8, 100, 48])
def test_grid_rejects_bad_sizes(n):
    with pytest.raises(ValueError):
        Grid2D(n, 1.0)


def test_grid_rejects_bad_width():
    with pytest.raises(ValueError):
        Grid2D(64, 0.0)


def test_grid_geometry():
    g = Grid2D(64, 2.0)
    assert g.h == pytest.approx(1.0 / 16)
    i, j = g.origin_index
    assert g.x[i] == 0.0 and g.x[0] == -2.0
    assert g.radius()[i, j] == 0.0
    assert g.k_nyquist == pytest.approx(math.pi / g.h)
    assert np.max(np.abs(g.k)) == pytest.approx(g.k_nyquist)


def test_gridfield_is_read_only_and_finite():
    g = Grid2D(16, 1.0)
    f = GridField(g, np.ones((16, 16)))
    with pytest.raises(ValueError):
        f.data[0, 0] = 2.0
    with pytest.raises(ValueError):
        GridField(g, np.full((16, 16), np.nan))
    with pytest.raises(ValueError):
        GridField(g, np.ones((8, 8)))


@given(st.integers(0, 2**31 - 1))
def test_plancherel(seed):
    rng = np.random.default_rng(seed)
    g = Grid2D(32, rng.uniform(0.5, 5.0))
    f = GridField(g, rng.normal(size=(32, 32)))
    F = fft_forward(f)
    assert F.l2_squared() == pytest.approx(f.l2_squared(), rel=1e-12)
    assert np.allclose(fft_inverse(F).data, f.data, atol=1e-12)


def test_gradient_of_trigonometric_field():
    g = Grid2D(64, math.pi)
    x1, x2 = g.mesh()
    f = GridField(g, np.sin(3 * x1) * np.cos(2 * x2))
    d1, d2 = gradient_spectral(f)
    assert np.allclose(d1.data, 3 * np.cos(3 * x1) * np.cos(2 * x2), atol=1e-11)
    assert np.allclose(d2.data, -2 * np.sin(3 * x1) * np.sin(2 * x2), atol=1e-11)


def test_gradient_warns_on_unresolved_field():
    g = Grid2D(32, 1.0)
    rng = np.random.default_rng(1)
    f = GridField(g, rng.normal(size=(32, 32)))
    assert tail_fraction(f) > 1e-6
    with pytest.warns(ResolutionWarning):
        gradient_spectral(f)


def test_gradient_is_silent_on_resolved_gaussian():
    g = Grid2D(128, 8.0)
    f = GridField(g, np.exp(-g.radius() ** 2))
    with warnings.catch_warnings():
        warnings.simplefilter("error", ResolutionWarning)
        gradient_spectral(f)


# --------------------------------------------------------------------------- quadrature

BATTERY = [
    (lambda s: np.log(s), 0.0, 1.0, [0.0], -1.0),
    (lambda s: s**-0.5, 0.0, 4.0, [0.0], 4.0),
    (lambda s: s**-0.9, 0.0, 1.0, [0.0], 10.0),
    (lambda s: np.log(np.abs(s - 0.3)), 0.0, 1.0, [0.3], 0.3 * math.log(0.3) + 0.7 * math.log(0.7) - 1.0),
    (lambda s: np.exp(-s), 0.0, np.inf, [], 1.0),
    (lambda s: 1.0 / (1.0 + s * s), 0.0, np.inf, [], 0.5 * math.pi),
    (lambda s: 1.0 / (s * np.log(s) ** 2), 0.0, 1.0 / 3.0, [0.0], 1.0 / math.log(3.0)),
    (lambda s: np.cos(40 * s), 0.0, 1.0, [], math.sin(40.0) / 40.0),
]


@pytest.mark.parametrize("f,a,b,sing,exact", BATTERY)
def test_quad_radial_battery(f, a, b, sing, exact):
    assert quad_radial(f, a, b, sing, rtol=1e-11) == pytest.approx(exact, rel=1e-9, abs=1e-12)


def test_quad_radial_rejects_nonintegrable():
    with pytest.raises(QuadratureError):
        quad_radial(lambda s: 1.0 / s, 0.0, 1.0, [0.0])


def test_quad_radial_accepts_scalar_integrands():
    assert quad_radial(lambda s: math.exp(s), 0.0, 1.0) == pytest.approx(math.e - 1.0, rel=1e-12)


def test_quad_radial_bad_interval():
    with pytest.raises(ValueError):
        quad_radial(np.exp, 1.0, 1.0)


@given(
    st.floats(0.1, 2.0), st.floats(-3.0, 3.0), st.floats(-3.0, 3.0), st.floats(0.05, 0.95)
)
def test_quad_radial_linear_and_additive(b, c1, c2, frac):
    f = lambda s: np.sqrt(s) * np.cos(s)  # noqa: E731
    g = lambda s: np.log(s)  # noqa: E731
    whole = quad_radial(lambda s: c1 * f(s) + c2 * g(s), 0.0, b, [0.0], rtol=1e-12)
    parts = c1 * quad_radial(f, 0.0, b, [0.0], rtol=1e-12) + c2 * quad_radial(g, 0.0, b, [0.0], rtol=1e-12)
    assert whole == pytest.approx(parts, rel=1e-9, abs=1e-11)
    m = frac * b
    split = quad_radial(g, 0.0, m, [0.0], rtol=1e-12) + quad_radial(g, m, b, rtol=1e-12)
    assert split == pytest.approx(quad_radial(g, 0.0, b, [0.0], rtol=1e-12), rel=1e-9, abs=1e-11)


@pytest.mark.parametrize("p", [1.2, 1.5, 3.0])
def test_quad_log_scale_barely_integrable(p):
    # int_0^{1/3} ds / (s log(1/s)^p) = log(3)^(1-p) / (p-1)
    val = quad_log_scale(lambda u: u**-p, 1.0 / 3.0)
    assert val == pytest.approx(math.log(3.0) ** (1 - p) / (p - 1), rel=1e-8)


def test_quad_radial_against_scipy_bessel_integral():
    ref = integrate.quad(lambda s: special.j0(5 * s) * s ** -0.5, 0, 2, limit=200)[0]
    assert quad_radial(lambda s: special.j0(5 * s) * s**-0.5, 0.0, 2.0, [0.0]) == pytest.approx(ref, rel=1e-8)


@pytest.mark.parametrize("m", [4, 16, 64])
def test_gauss_legendre_exact_for_polynomials(m):
    x, w = gauss_legendre(m)
    assert np.sum(w) == pytest.approx(2.0)
    assert np.dot(w, x ** (2 * m - 2)) == pytest.approx(2.0 / (2 * m - 1))


def test_panel_nodes_integrate_piecewise():
    x, w = panel_nodes(np.array([0.0, 0.5, 2.0]), 8)
    assert np.dot(w, np.exp(x)) == pytest.approx(math.e**2 - 1.0, rel=1e-13)


# --------------------------------------------------------------------------- radial profiles


def test_profile_validation():
    with pytest.raises(ValueError):
        RadialProfile(lambda s: s, 0.0)
    with pytest.raises(ValueError):
        RadialProfile(lambda s: s**-2, 1.0, singularity_order=2.0)


def test_profile_zero_beyond_support_and_enclosed():
    p = RadialProfile(lambda s: 1.0 / s, 2.0, singularity_order=1.0)
    assert p(3.0) == 0.0
    assert p(0.5) == 2.0
    assert p.enclosed(1.5) == pytest.approx(1.5)
    assert p.enclosed(5.0) == pytest.approx(2.0)
    assert p.singular_points() == [0.0, 2.0]


def test_origin_cell_average_of_inverse_radius():
    # mean of 1/|x| over the cell [-h/2, h/2]^2 is 4 log(1 + sqrt 2) / h
    p = RadialProfile(lambda s: 1.0 / s, 1.0, singularity_order=1.0)
    h = 0.01
    assert origin_value(p, h) * h == pytest.approx(4.0 * math.log(1.0 + math.sqrt(2.0)), rel=1e-9)


def test_origin_rules():
    p = RadialProfile(lambda s: np.exp(-s * s), 5.0)
    assert origin_value(p, 0.1, "point") == 1.0
    ca = origin_value(p, 0.1, "cell_average")
    rms = origin_value(p, 0.1, "rms")
    assert ca < 1.0 and rms >= ca
    with pytest.raises(ValueError):
        origin_value(RadialProfile(lambda s: 1 / s, 1.0, 1.0), 0.1, "point")
    with pytest.raises(ValueError):
        origin_value(p, 0.1, "nearest")


def test_sample_radial_mass_rule_preserves_integral():
    p = RadialProfile(lambda s: 1.0 / s, 1.0, singularity_order=1.0)
    g = Grid2D(256, 2.0)
    f = sample_radial(p, g, "mass")
    assert f.integral() == pytest.approx(2.0 * math.pi, rel=1e-12)


def test_sample_radial_requires_description_of_corners():
    p = RadialProfile(lambda s: np.exp(-s), 2.0, zero_beyond=False)
    with pytest.raises(ValueError):
        sample_radial(p, Grid2D(32, 2.0), "point")


def test_edge_cell_average_reduces_staircase_error():
    p = RadialProfile(lambda s: np.ones_like(s), 1.0)
    g = Grid2D(128, 2.0)
    point = abs(sample_radial(p, g, "point").integral() - math.pi)
    avg = abs(sample_radial(p, g, "point", edge_rule="cell_average").integral() - math.pi)
    assert avg < 0.05 * point
