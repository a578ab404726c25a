"""Velocity from vorticity.

Three routes are provided: the closed radial form, a free-space spectral
convolution on a zero-padded grid, and one-dimensional integrals for the
half-disk data (velocity on the symmetry axis and its harmonic extension).

Conventions: ``K(x) = x_perp / (2 pi |x|^2)`` with ``x_perp = (-x2, x1)``, so
``u = grad_perp psi`` with ``psi = (1/2pi) log|.| * omega``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy import special as sc

from .fields import Grid2D, GridField, RadialProfile, quad_radial

DEFAULT_SUPPORT_TOL = 1e-10
TRUNCATION_FACTOR = 2.3  # kernel truncation radius in units of L


@dataclass(frozen=True, eq=False)
class VelocityField:
    """Velocity components on a common grid.

    ``circulation`` is the total vorticity the field was built from; the
    spectral route reports it because the far field of a nonzero mean is only
    represented inside the padded box.
    """

    u1: GridField
    u2: GridField
    circulation: float = math.nan

    def __post_init__(self):
        if self.u1.grid != self.u2.grid:
            raise ValueError("velocity components live on different grids")

    @property
    def grid(self) -> Grid2D:
        return self.u1.grid

    def speed(self) -> np.ndarray:
        return np.hypot(self.u1.data, self.u2.data)

    def divergence(self) -> GridField:
        n = self.grid.n
        k1, k2 = self.grid.rkmesh()
        d = 1j * k1 * np.fft.rfft2(self.u1.data) + 1j * k2 * np.fft.rfft2(self.u2.data)
        return GridField(self.grid, np.fft.irfft2(d, s=(n, n)))

    def relative_divergence(self) -> float:
        """``||div u||_2 / (||u||_2 * k_nyquist)``; zero for the zero field."""
        norm = math.sqrt(self.u1.l2_squared() + self.u2.l2_squared())
        if norm == 0.0:
            return 0.0
        return math.sqrt(self.divergence().l2_squared()) / (norm * self.grid.k_nyquist)


# ---------------------------------------------------------------------------
# radial closed form
# ---------------------------------------------------------------------------


def velocity_radial(p: RadialProfile, r: float) -> float:
    """Tangential speed ``(1/r) int_0^r s rho(s) ds`` of a radial vorticity."""
    if r < 0:
        raise ValueError("radius must be nonnegative")
    if r == 0:
        return 0.0
    return p.enclosed(r) / r


def radial_enclosed_table(p: RadialProfile, radii: np.ndarray) -> np.ndarray:
    """``int_0^r s rho ds`` for many radii, by cumulative quadrature between them."""
    radii = np.asarray(radii, dtype=float)
    order = np.argsort(radii, kind="stable")
    out = np.empty_like(radii)
    top = p.support
    pts = p.singular_points()
    acc = 0.0
    prev = 0.0
    for idx in order:
        r = min(radii[idx], top)
        if r > prev:
            inner = [q for q in pts if prev <= q <= r]
            acc += quad_radial(p.moment, prev, r, inner, rtol=1e-11)
            prev = r
        out[idx] = acc
    return out


def velocity_radial_field(p: RadialProfile, g: Grid2D) -> VelocityField:
    """Exact velocity of ``rho(|x|)`` sampled at the grid nodes."""
    x1, x2 = g.mesh()
    r = np.hypot(x1, x2)
    uniq, inv = np.unique(r, return_inverse=True)
    m = radial_enclosed_table(p, uniq)[inv].reshape(r.shape)
    with np.errstate(divide="ignore", invalid="ignore"):
        factor = np.where(r > 0, m / r**2, 0.0)
    return VelocityField(
        GridField(g, -x2 * factor), GridField(g, x1 * factor), 2.0 * math.pi * p.enclosed(p.support)
    )


# ---------------------------------------------------------------------------
# spectral convolution
# ---------------------------------------------------------------------------


def truncated_log_symbol(k: np.ndarray, R: float) -> np.ndarray:
    """Fourier transform of ``(1/2pi) log|x|`` restricted to ``|x| < R``."""
    k = np.asarray(k, dtype=float)
    out = np.empty_like(k)
    small = k * R < 1e-3
    ks = k[~small]
    kR = ks * R
    out[~small] = -(1.0 - sc.j0(kR)) / ks**2 + R * math.log(R) * sc.j1(kR) / ks
    # series about k = 0 to second order in (kR)^2
    z = (k[small] * R) ** 2
    logR = math.log(R)
    out[small] = R**2 * (0.5 * logR - 0.25) - z * R**2 * (logR / 16.0 - 1.0 / 64.0)
    return out


@lru_cache(maxsize=2)
def _velocity_multipliers(n: int, L: float, R_factor: float):
    big = Grid2D(2 * n, 2 * L)
    k1, k2 = big.rkmesh()
    G = truncated_log_symbol(np.hypot(k1, k2), R_factor * L)
    m1 = -1j * k2 * G
    m2 = 1j * k1 * G
    m1[:, -1] = 0.0
    m2[n, :] = 0.0
    m1.setflags(write=False)
    m2.setflags(write=False)
    return m1, m2


def check_support(omega: GridField, tol: float = DEFAULT_SUPPORT_TOL) -> None:
    """Require ``omega`` to be negligible outside the inner half ``[-L/2, L/2]^2``."""
    g = omega.grid
    x = np.abs(g.x)
    outer = (x[:, None] > 0.5 * g.L) | (x[None, :] > 0.5 * g.L)
    peak = float(np.abs(omega.data).max())
    if peak == 0.0:
        return
    spill = float(np.abs(omega.data[outer]).max()) if outer.any() else 0.0
    if spill > tol * peak:
        raise ValueError(
            f"vorticity not supported in the inner half [-{0.5 * g.L:g}, {0.5 * g.L:g}]^2: "
            f"outside values reach {spill / peak:.2e} of the peak (allowed {tol:.0e})"
        )


def velocity_spectral(
    omega: GridField, *, support_tol: float = DEFAULT_SUPPORT_TOL, R_factor: float = TRUNCATION_FACTOR
) -> VelocityField:
    """Free-space Biot-Savart velocity of a compactly supported vorticity.

    The data is zero-padded to twice the width and convolved with the
    Fourier transform of the logarithmic kernel truncated at radius
    ``R_factor * L``.  For data inside the inner half of the grid every
    source-target distance is below ``2.13 L`` and every periodic image is
    farther than ``2.5 L``, so any ``R_factor`` between those values gives
    the aperiodic convolution without wraparound, including the mean mode.

    Raises
    ------
    ValueError
        If ``omega`` is not negligible outside the inner half of the grid.
    """
    if not 2.13 <= R_factor <= 2.5:
        raise ValueError("truncation radius must lie in [2.13 L, 2.5 L]")
    check_support(omega, support_tol)
    g = omega.grid
    n = g.n
    pad = np.zeros((2 * n, 2 * n))
    lo = n // 2
    pad[lo : lo + n, lo : lo + n] = omega.data
    W = np.fft.rfft2(pad)
    del pad
    m1, m2 = _velocity_multipliers(n, g.L, R_factor)
    u1 = np.fft.irfft2(m1 * W, s=(2 * n, 2 * n))[lo : lo + n, lo : lo + n]
    u2 = np.fft.irfft2(m2 * W, s=(2 * n, 2 * n))[lo : lo + n, lo : lo + n]
    return VelocityField(GridField(g, u1), GridField(g, u2), omega.integral())


# ---------------------------------------------------------------------------
# half-disk data: axis integral and harmonic extension
# ---------------------------------------------------------------------------


def _axis_kernel(r: np.ndarray, x1: float) -> np.ndarray:
    """``(1/x1) log|(r+x1)/(r-x1)|`` for ``x1 > 0``, accurate when ``r/x1`` is extreme."""
    with np.errstate(divide="ignore"):
        return np.log1p(2.0 * np.minimum(r, x1) / np.abs(r - x1)) / x1


def axis_velocity_half_disk(p: RadialProfile, x1: float, *, rtol: float = 1e-9) -> float:
    """First velocity component on the axis for ``rho(|y|)`` restricted to ``y2 > 0``.

    Evaluates ``(1/2pi) int rho(r) r (1/x1) log|(r+x1)/(r-x1)| dr``, splitting
    at ``r = |x1|`` and at decades above it.
    """
    if x1 == 0:
        raise ValueError("axis velocity is evaluated at x1 != 0")
    x1 = abs(float(x1))
    top = p.support
    pts = [0.0] + [b for b in p.singular_points() if b > 0]
    if x1 < top:
        pts.append(x1)
        q = 10.0 * x1
        while q < top:
            pts.append(q)
            q *= 10.0
    f = lambda r: p.moment(r) * _axis_kernel(r, x1)  # noqa: E731
    return quad_radial(f, 0.0, top, pts, rtol=rtol) / (2.0 * math.pi)


def alpha_profile(alpha: float, radius: float = 1.0 / 3.0) -> RadialProfile:
    """``1 / (s |log s|^alpha)`` on ``(0, radius]``, zero outside."""
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    if not 0 < radius < 1:
        raise ValueError("radius must lie in (0, 1)")
    a = float(alpha)
    return RadialProfile(
        lambda s: 1.0 / (s * np.abs(np.log(s)) ** a),
        radius,
        singularity_order=1.0,
        name=f"alpha={a:g}",
        s_weighted=lambda s: np.abs(np.log(s)) ** -a,
    )


def alpha_enclosed(alpha: float, r) -> np.ndarray:
    """``int_0^r |log s|^-alpha ds = Gamma(1-alpha, log(1/r))`` for ``r < 1``."""
    r = np.asarray(r, dtype=float)
    with np.errstate(divide="ignore"):
        u = -np.log(r)
    return sc.gamma(1.0 - alpha) * sc.gammaincc(1.0 - alpha, u)


def u1_on_axis(alpha: float, x1: float, *, rtol: float = 1e-9) -> float:
    """Axis velocity of the half-disk vorticity ``1/(|y| |log|y||^alpha)`` on ``B+(0;1/3)``."""
    if not 0.5 < alpha < 1:
        raise ValueError(f"alpha must lie in (1/2, 1), got {alpha!r}")
    if not 0 < abs(x1) < 1.0 / 3.0:
        raise ValueError(f"need 0 < |x1| < 1/3, got {x1!r}")
    return axis_velocity_half_disk(_alpha_profile_cached(float(alpha)), x1, rtol=rtol)


@lru_cache(maxsize=32)
def _alpha_profile_cached(alpha: float) -> RadialProfile:
    return alpha_profile(alpha)


def poisson_halfplane_extension(
    boundary: Callable,
    x: Sequence[float],
    *,
    S: float = 10.0,
    breakpoints: Sequence[float] = (),
    rtol: float = 1e-9,
) -> float:
    """``-(1/pi) int_{|s|<=S} x2 b(s) / ((x1-s)^2 + x2^2) ds`` for ``x2 > 0``.

    Integrated in the angle ``phi`` with ``s = x1 + x2 tan(phi)``, which turns
    the Poisson kernel into the uniform measure ``d phi``.  Points where
    ``boundary`` is singular or kinked go in ``breakpoints``; ``S = inf`` is
    allowed for boundary data defined on the whole line.  See
    :func:`poisson_tail_bound` for the truncation error.
    """
    x1, x2 = float(x[0]), float(x[1])
    if not x2 > 0:
        raise ValueError("the harmonic extension is evaluated for x2 > 0")
    lo = math.atan((-S - x1) / x2) if math.isfinite(S) else -0.5 * math.pi
    hi = math.atan((S - x1) / x2) if math.isfinite(S) else 0.5 * math.pi
    cuts = [math.atan((b - x1) / x2) for b in breakpoints if -S < b < S]
    bvec = _vectorize_boundary(boundary)
    f = lambda phi: bvec(x1 + x2 * np.tan(phi))  # noqa: E731
    return -quad_radial(f, lo, hi, cuts, rtol=rtol) / math.pi


def poisson_tail_bound(x: Sequence[float], S: float, sup_boundary: float) -> float:
    """Bound on the part of the extension from ``|s| > S`` given ``sup|b|``."""
    x1, x2 = float(x[0]), float(x[1])
    if not math.isfinite(S):
        return 0.0
    covered = math.atan((S - x1) / x2) - math.atan((-S - x1) / x2)
    return sup_boundary * (math.pi - covered) / math.pi


def _vectorize_boundary(b: Callable) -> Callable[[np.ndarray], np.ndarray]:
    def g(s: np.ndarray) -> np.ndarray:
        try:
            out = np.asarray(b(s), dtype=float)
            if out.shape == np.shape(s):
                return out
        except (TypeError, ValueError):
            pass
        return np.array([float(b(float(v))) for v in np.ravel(s)]).reshape(np.shape(s))

    return g


def half_disk_velocity_u1(
    p: RadialProfile,
    x: Sequence[float],
    axis_function: Callable | None = None,
    *,
    enclosed: Callable | None = None,
    rtol: float = 1e-9,
) -> float:
    """First velocity component of ``rho(|y|) 1{y2>0}`` at a point with ``x2 > 0``.

    Uses ``u1 = u_rad,1 - v1``: the radial velocity of the full disk minus
    the harmonic extension of the axis velocity.  ``axis_function`` may be a
    fast (vectorized, tabulated) replacement for
    :func:`axis_velocity_half_disk`; ``enclosed`` a closed form for
    ``int_0^r s rho ds``.
    """
    x1, x2 = float(x[0]), float(x[1])
    r = math.hypot(x1, x2)
    m = float(enclosed(r)) if enclosed is not None else p.enclosed(r)
    u_rad = -x2 * m / r**2
    if axis_function is None:
        axis_function = lambda s: axis_velocity_half_disk(p, s) if s != 0 else 0.0  # noqa: E731
    v1 = poisson_halfplane_extension(
        axis_function, (x1, x2), S=math.inf, breakpoints=[0.0, -p.support, p.support], rtol=rtol
    )
    return u_rad - v1


# ---------------------------------------------------------------------------
# nonlinear pairing
# ---------------------------------------------------------------------------


def nonlinear_pairing(omega: GridField, Phi: VelocityField, *, support_tol: float = DEFAULT_SUPPORT_TOL) -> float:
    """``-int omega [K .* (Phi |omega|^2 / 2)]``, the weak form of ``u |omega|^2`` against ``Phi``.

    Each component of ``Phi |omega|^2 / 2`` is convolved with the full
    kernel via :func:`velocity_spectral`, and the dot product with ``K``
    keeps the matching component.
    """
    if Phi.grid != omega.grid:
        raise ValueError("test field and vorticity live on different grids")
    g = omega.grid
    half = 0.5 * omega.data**2
    F1 = GridField(g, Phi.u1.data * half)
    F2 = GridField(g, Phi.u2.data * half)
    if not np.any(F1.data) and not np.any(F2.data):
        return 0.0
    k1 = velocity_spectral(F1, support_tol=support_tol).u1.data
    k2 = velocity_spectral(F2, support_tol=support_tol).u2.data
    return float(-g.h**2 * np.sum(omega.data * (k1 + k2)))
