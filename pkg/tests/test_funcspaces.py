import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from enslab.biotsavart import VelocityField, velocity_spectral
from enslab.experiments import build_omega0
from enslab.fields import Grid2D, GridField, sample_radial
from enslab.funcspaces import (
    LorentzConvergenceWarning,
    OrliczParams,
    TailSaturationWarning,
    besov_norm_sup,
    distribution_function,
    energy_spectrum,
    lorentz_norm_1q,
    lp_symbol,
    luxemburg_norm,
    maximal,
    maximal_at,
    orlicz_modular,
    product_lemma_check,
    rearrange,
    rearrange_from_distribution,
    spectrum_slope,
)

G32 = Grid2D(32, 1.0)
CELL = G32.h**2


def indicator(g, count, value=1.0, offset=0):
    data = np.zeros(g.n * g.n)
    data[offset : offset + count] = value
    return GridField(g, data.reshape(g.n, g.n))


fields = st.builds(
    lambda seed, scale: GridField(G32, scale * np.random.default_rng(seed).standard_normal((32, 32))),
    st.integers(0, 2**31 - 1),
    st.floats(0.01, 100.0),
)


# --------------------------------------------------------------------------- Young functions


@pytest.mark.parametrize("p,a", [(0.5, 0.0), (1.0, -0.1), (math.inf, 0.0)])
def test_orlicz_params_validation(p, a):
    with pytest.raises(ValueError):
        OrliczParams(p, a)


@pytest.mark.parametrize("p,a", [(1.0, 0.5), (2.0, 0.25), (2.0, 0.0), (1.5, 1.0)])
def test_inverse_of_young_function(p, a):
    P = OrliczParams(p, a)
    for y in (1e-6, 0.3, 7.0, 1e5):
        assert float(P.A(P.inverse(y))) == pytest.approx(y, rel=1e-9)
    assert P.inverse(0.0) == 0.0


# --------------------------------------------------------------------------- distribution and rearrangement


def test_distribution_of_unit_disk():
    g = Grid2D(256, 2.0)
    disk = GridField(g, (g.radius() <= 1.0).astype(float))
    assert distribution_function(disk, 0.5) == pytest.approx(math.pi, abs=8 * g.h)
    assert distribution_function(disk, 1.0) == 0.0
    assert distribution_function(disk, 2.0) == 0.0


def test_distribution_counts_two_levels():
    data = np.zeros((32, 32))
    data[:3, :] = 2.0
    data[5:7, :4] = 1.0
    f = GridField(G32, data)
    assert distribution_function(f, 1.5) == pytest.approx(96 * CELL)
    assert distribution_function(f, 0.5) == pytest.approx(104 * CELL)
    with pytest.raises(ValueError):
        distribution_function(f, -1.0)


def test_rearrangement_of_indicator():
    f = indicator(G32, 37, offset=100)
    fs = rearrange(f)
    E = 37 * CELL
    assert fs.measure == pytest.approx(E)
    assert fs(0.5 * E) == 1.0 and fs(1.01 * E) == 0.0
    assert np.allclose(maximal(fs), 1.0)
    assert maximal_at(fs, 2.0 * E) == pytest.approx(0.5)


@given(fields)
def test_distribution_determines_rearrangement(f):
    a = rearrange(f)
    b = rearrange_from_distribution(f)
    assert np.array_equal(a.values, b.values)


@given(fields)
def test_maximal_dominates_rearrangement(f):
    fs = rearrange(f)
    assert np.all(maximal(fs) >= fs.values - 1e-15 * fs.values[0])
    assert np.all(np.diff(maximal(fs)) <= 1e-12 * fs.values[0])


def test_maximal_at_rejects_nonpositive():
    with pytest.raises(ValueError):
        maximal_at(rearrange(indicator(G32, 4)), 0.0)


# --------------------------------------------------------------------------- Lorentz and Orlicz


def test_lorentz_of_indicator():
    # f** = 1 on [0, |E|]: (int_0^|E| s^2 ds / s)^(1/2) = |E| / sqrt 2
    f = indicator(G32, 50)
    E = 50 * CELL
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LorentzConvergenceWarning)
        assert lorentz_norm_1q(f, 2.0) == pytest.approx(E / math.sqrt(2.0), rel=1e-12)
        # q = 1: int_0^|E| s ds / s = |E|
        assert lorentz_norm_1q(f, 1.0) == pytest.approx(E, rel=1e-12)


def test_lorentz_q1_matches_direct_sum():
    # for q = 1 the norm is int_0^M (int_0^s f*) ds / s; check against a direct sum
    rng = np.random.default_rng(3)
    f = GridField(G32, np.abs(rng.normal(size=(32, 32))))
    fs = rearrange(f)
    P = fs.primitive()
    mid = fs.edges[:-1] + 0.5 * fs.cell
    ref = np.sum(fs.cell * (P[:-1] + 0.5 * fs.cell * fs.values) / mid)
    assert lorentz_norm_1q(f, 1.0) == pytest.approx(ref, rel=1e-12)


def test_lorentz_zero_and_range():
    z = GridField(G32, np.zeros((32, 32)))
    assert lorentz_norm_1q(z, 2.0) == 0.0
    with pytest.raises(ValueError):
        lorentz_norm_1q(z, 3.0)


@given(fields, st.integers(0, 2**31 - 1))
def test_rearrangement_invariance(f, seed):
    perm = np.random.default_rng(seed).permutation(f.data.size)
    g = f.with_data(f.data.ravel()[perm].reshape(f.data.shape))
    P = OrliczParams(2.0, 0.5)
    assert lorentz_norm_1q(g, 2.0) == pytest.approx(lorentz_norm_1q(f, 2.0), rel=1e-10)
    assert orlicz_modular(g, P) == pytest.approx(orlicz_modular(f, P), rel=1e-10)


@pytest.mark.parametrize("c", [0.3, 1.0, 17.0])
def test_modular_of_constant_field(c):
    P = OrliczParams(2.0, 0.25)
    f = indicator(G32, 64, c)
    assert orlicz_modular(f, P) == pytest.approx(64 * CELL * float(P.A(c)), rel=1e-13)


@pytest.mark.parametrize("P", [OrliczParams(1.0, 0.5), OrliczParams(2.0, 0.25), OrliczParams(2.0, 0.0)])
@pytest.mark.parametrize("c", [0.5, 4.0, 1e3])
def test_luxemburg_of_constant_field(P, c):
    # c / A^-1(1/|E|), A^-1 by an independent root finder
    E = 64 * CELL
    inv = brentq(lambda s: float(P.A(s)) - 1.0 / E, 0.0, 1e8, xtol=1e-300, rtol=1e-14)
    assert luxemburg_norm(indicator(G32, 64, c), P) == pytest.approx(c / inv, rel=1e-10)


def test_luxemburg_zero_field():
    assert luxemburg_norm(GridField(G32, np.zeros((32, 32))), OrliczParams(2.0)) == 0.0


@given(fields, st.floats(0.01, 100.0))
def test_luxemburg_homogeneity_and_modular_at_norm(f, lam):
    P = OrliczParams(2.0, 0.25)
    k = luxemburg_norm(f, P)
    assert luxemburg_norm(f.with_data(lam * f.data), P) == pytest.approx(lam * k, rel=1e-9)
    assert orlicz_modular(f.with_data(f.data / k), P) == pytest.approx(1.0, rel=1e-9)


@given(fields, fields)
def test_luxemburg_triangle_inequality(f, g):
    P = OrliczParams(1.0, 0.5)
    s = luxemburg_norm(f.with_data(f.data + g.data), P)
    assert s <= luxemburg_norm(f, P) + luxemburg_norm(g, P) + 1e-6


def test_product_lemma_on_indicator_and_zero():
    f = indicator(G32, 200)
    assert 0.0 < product_lemma_check(f, f) <= 1.0
    assert product_lemma_check(GridField(G32, np.zeros((32, 32))), f) == 0.0


@settings(max_examples=25)
@given(fields, fields)
def test_product_lemma_holds_on_random_pairs(f, g):
    assert product_lemma_check(f, g) <= 1.0


def test_lorentz_bounded_by_log_orlicz():
    # L log^1/2 L sits inside L^(1,2): the ratio stays bounded over random fields
    rng = np.random.default_rng(11)
    P = OrliczParams(1.0, 0.5)
    ratios = []
    for _ in range(100):
        f = GridField(G32, rng.standard_normal((32, 32)) * rng.uniform(0.1, 50.0))
        ratios.append(lorentz_norm_1q(f, 2.0) / (1.0 + luxemburg_norm(f, P)))
    assert max(ratios) < 2.0


# --------------------------------------------------------------------------- Littlewood-Paley


def test_lp_symbols_have_mandated_plateaus_and_supports():
    k = np.linspace(0.0, 64.0, 20001)
    assert np.all(lp_symbol(k[k <= 2 / 3], 0) == 1.0)
    assert np.all(lp_symbol(k[k >= 1.0], 0) == 0.0)
    for j in (1, 3, 5):
        r = k / 2.0**j
        sym = lp_symbol(k, j)
        assert np.all(sym[(r >= 2 / 3) & (r <= 4 / 3)] == 1.0)
        assert np.all(sym[(r <= 0.5) | (r >= 2.0)] == 0.0)


def test_besov_zero_field():
    assert besov_norm_sup(GridField(G32, np.zeros((32, 32)))).value == 0.0


@pytest.mark.parametrize("j", [2, 3, 4])
def test_besov_single_plateau_mode(j):
    g = Grid2D(64, math.pi)
    x1, _ = g.mesh()
    f = GridField(g, np.cos(2**j * x1))
    res = besov_norm_sup(f)
    assert res.value == pytest.approx(math.sqrt(f.l2_squared()), rel=1e-12)
    assert res.argmax_j == j
    assert besov_norm_sup(f, 1).value == pytest.approx(2**j * res.value, rel=1e-12)


def test_besov_rejects_other_smoothness():
    with pytest.raises(ValueError):
        besov_norm_sup(GridField(G32, np.zeros((32, 32))), 0.5)


def test_besov_warns_at_the_nyquist_block():
    rng = np.random.default_rng(0)
    with pytest.warns(TailSaturationWarning):
        res = besov_norm_sup(GridField(G32, rng.standard_normal((32, 32))))
    assert res.saturated


def test_besov_of_singular_data_is_stable_under_refinement():
    p = build_omega0("bump_smoothstep")
    vals = []
    for n in (256, 512):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TailSaturationWarning)
            vals.append(besov_norm_sup(sample_radial(p, Grid2D(n, 4.0), "mass")).value)
    assert math.isfinite(vals[0])
    assert vals[1] == pytest.approx(vals[0], rel=0.02)


# --------------------------------------------------------------------------- spectra


def test_energy_spectrum_of_zero_and_parseval():
    z = GridField(G32, np.zeros((32, 32)))
    _, E = energy_spectrum(VelocityField(z, z))
    assert not np.any(E)
    rng = np.random.default_rng(5)
    u = VelocityField(GridField(G32, rng.normal(size=(32, 32))), GridField(G32, rng.normal(size=(32, 32))))
    _, E = energy_spectrum(u, taper=0.0)
    assert E.sum() == pytest.approx(0.5 * (u.u1.l2_squared() + u.u2.l2_squared()), rel=1e-12)


def test_energy_spectrum_single_mode_shell():
    g = Grid2D(64, math.pi)
    x1, x2 = g.mesh()
    u = VelocityField(GridField(g, np.sin(5 * x2)), GridField(g, np.zeros((64, 64))))
    kappa, E = energy_spectrum(u, taper=0.0)
    assert kappa[np.argmax(E)] == 5.0
    assert E[5] == pytest.approx(E.sum(), rel=1e-12)


def test_energy_spectrum_rejects_bad_taper():
    z = GridField(G32, np.zeros((32, 32)))
    with pytest.raises(ValueError):
        energy_spectrum(VelocityField(z, z), taper=1.5)


def test_energy_spectrum_of_singular_data_decays_like_cube():
    w = sample_radial(build_omega0("bump_smoothstep"), Grid2D(512, 4.0), "mass")
    kappa, E = energy_spectrum(velocity_spectral(w))
    assert -3.5 <= spectrum_slope(kappa, E, 5.0, 40.0) <= -2.5


def test_spectrum_slope_needs_three_shells():
    with pytest.raises(ValueError):
        spectrum_slope(np.arange(5.0), np.ones(5), 1.0, 2.0)
    k = np.arange(1.0, 50.0)
    assert spectrum_slope(k, k**-3.0, 2.0, 40.0) == pytest.approx(-3.0)
