"""Concrete vorticities and the experiment drivers built on them.

Two families of data appear here.  The borderline vortex
``omega0(x) = phi(|x|) / |x|`` with a smooth cutoff ``phi`` drives the
defect experiments.  The log-corrected family ``1 / (|x| |log |x||^alpha)``
on the disk (or half disk) of radius 1/3, with ``1/2 < alpha < 1``, drives
the axis-velocity, cubic-integral and Zygmund experiments.  Everything that
can be reduced to one-dimensional radial integrals is computed that way;
grid routes are used only where the quantity is intrinsically
two-dimensional.

All drivers accept ``map_fn`` (default :func:`map`) so that independent
rows can be fanned out to a pool while keeping row order.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq, minimize_scalar
from scipy.special import j1

from .biotsavart import alpha_enclosed, alpha_profile, axis_velocity_half_disk, u1_on_axis
from .defects import (
    bump,
    concentration_profile,
    heat_evolve,
    hankel_radial_many,
    symbol_error,
    transport_defect,
    viscous_defect_field,
    viscous_defect_l1_spectral,
)
from .fields import (
    Grid2D,
    GridField,
    QuadratureError,
    RadialProfile,
    ResolutionWarning,
    gauss_legendre,
    origin_value,
    panel_nodes,
    quad_radial,
    sample_radial,
)
from .funcspaces import (
    OrliczParams,
    besov_norm_sup,
    lorentz_norm_1q,
    luxemburg_norm,
    maximal,
    orlicz_modular,
    product_lemma_check,
    rearrange,
)

FOUR_PI_CUBED = 4.0 * math.pi**3
R0_DEFAULT = 1.0 / 72.0
ALPHA_RADIUS = 1.0 / 3.0


# ---------------------------------------------------------------------------
# cutoffs and the borderline vortex
# ---------------------------------------------------------------------------

_XG, _WG = gauss_legendre(64)
_BUMP_MASS = float(np.dot(_WG, bump(_XG)))


def _bump_step(tau: np.ndarray) -> np.ndarray:
    # normalized primitive of the bump on [-1, -1 + 2 tau]; C-infinity
    tau = np.asarray(tau, dtype=float)
    out = np.array(tau >= 1.0, dtype=float)
    m = (tau > 0.0) & (tau < 1.0)
    # the bump is even, so evaluate the smaller half and reflect
    mid = tau[m]
    flip = mid > 0.5
    mid = np.where(flip, 1.0 - mid, mid)
    vals = np.empty(mid.size)
    for lo in range(0, mid.size, 65536):
        t = mid[lo : lo + 65536, None]
        vals[lo : lo + 65536] = (t * _WG * bump(-1.0 + (_XG + 1.0) * t)).sum(-1) / _BUMP_MASS
    out[m] = np.where(flip, 1.0 - vals, vals)
    return out


def _poly_step(tau: np.ndarray) -> np.ndarray:
    # C^3 septic smoothstep
    t = np.clip(tau, 0.0, 1.0)
    return t**4 * (35.0 - 84.0 * t + 70.0 * t**2 - 20.0 * t**3)


CUTOFFS: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "bump_smoothstep": _bump_step,
    "poly_smoothstep": _poly_step,
}


def cutoff(s, cutoff_id: str = "bump_smoothstep") -> np.ndarray:
    """Radial cutoff equal to 1 on ``[0, 1/2]`` and 0 from ``s = 1``."""
    if cutoff_id not in CUTOFFS:
        raise ValueError(f"unknown cutoff {cutoff_id!r}; choose from {sorted(CUTOFFS)}")
    s = np.asarray(s, dtype=float)
    out = CUTOFFS[cutoff_id]((1.0 - s) / 0.5)
    return out if out.ndim else float(out)


def build_omega0(cutoff_id: str = "bump_smoothstep") -> RadialProfile:
    """Borderline vortex ``phi(s) / s`` with the chosen cutoff."""
    cutoff(0.0, cutoff_id)
    return RadialProfile(
        lambda s: cutoff(s, cutoff_id) / s,
        1.0,
        singularity_order=1.0,
        breakpoints=(0.5,),
        name=f"omega0[{cutoff_id}]",
    )


def regularized_omega0(delta: float, cutoff_id: str = "bump_smoothstep") -> RadialProfile:
    """``phi(s) / sqrt(s^2 + delta^2)``, the smooth radial stand-in for ``omega0``."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    cutoff(0.0, cutoff_id)
    return RadialProfile(
        lambda s: cutoff(s, cutoff_id) / np.sqrt(s * s + delta * delta),
        1.0,
        breakpoints=(0.5,),
        name=f"omega0_delta={delta:g}[{cutoff_id}]",
    )


def gaussian_profile(width: float = 1.0) -> RadialProfile:
    """``exp(-(s/width)^2)`` described far enough out for any reasonable grid."""
    return RadialProfile(lambda s: np.exp(-((s / width) ** 2)), 64.0 * width, zero_beyond=False, name="gaussian")


# ---------------------------------------------------------------------------
# log-corrected family
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AlphaFamilySpec:
    """``1/(|x| |log|x||^alpha)`` on ``B(0;1/3)``, optionally truncated and/or halved.

    With ``n`` set, the profile is replaced by the plateau
    ``n / (log n)^alpha`` inside radius ``1/n`` (the profile is continuous
    there).  ``half_disk`` keeps only ``x2 > 0``.
    """

    alpha: float
    n: int | None = None
    half_disk: bool = False

    def __post_init__(self):
        if not 0.5 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (1/2, 1), got {self.alpha}")
        if self.n is not None and self.n < 10:
            raise ValueError(f"truncation n must be >= 10, got {self.n}")

    @property
    def plateau(self) -> float:
        if self.n is None:
            return math.inf
        return self.n / math.log(self.n) ** self.alpha

    @property
    def angle(self) -> float:
        return math.pi if self.half_disk else 2.0 * math.pi

    def profile(self) -> RadialProfile:
        if self.n is None:
            return alpha_profile(self.alpha, ALPHA_RADIUS)
        return truncated_alpha_profile(self.alpha, self.n)

    def value(self, r) -> np.ndarray:
        """Profile value at radius ``r`` (no half-disk mask)."""
        return np.asarray(self.profile()(r), dtype=float)

    def l2_squared(self) -> float:
        """Closed-form ``||omega||_2^2``."""
        a = self.alpha
        tail = math.log(3.0) ** (1.0 - 2.0 * a)
        if self.n is None:
            return self.angle * tail / (2.0 * a - 1.0)
        ln = math.log(self.n)
        body = (tail - ln ** (1.0 - 2.0 * a)) / (2.0 * a - 1.0)
        return self.angle * (body + 0.5 * (self.plateau / self.n) ** 2)

    def level_radius(self, s: float) -> float:
        """Radius of the level set ``{rho = s}`` (0 above the plateau, 1/3 below the edge value)."""
        if s < 0:
            raise ValueError("level must be nonnegative")
        edge = 3.0 / math.log(3.0) ** self.alpha
        if s < edge:
            return ALPHA_RADIUS
        if s >= self.plateau:
            return 0.0
        # s = e^u u^-alpha with u = log(1/r), increasing for u > alpha
        F = lambda u: u - self.alpha * math.log(u) - math.log(s)  # noqa: E731
        hi = max(2.0 * math.log(s), math.log(3.0) + 1.0)
        while F(hi) < 0:
            hi *= 2.0
        return math.exp(-brentq(F, math.log(3.0), hi, xtol=1e-14, rtol=1e-15))

    def distribution(self, s: float) -> float:
        """Closed-form measure of ``{|omega| > s}``."""
        return 0.5 * self.angle * self.level_radius(s) ** 2


def truncated_alpha_profile(alpha: float, n: int, radius: float = ALPHA_RADIUS) -> RadialProfile:
    """Alpha profile with the plateau ``n / (log n)^alpha`` on ``[0, 1/n]``."""
    c = n / math.log(n) ** alpha
    cut = 1.0 / n

    def func(s):
        s = np.asarray(s, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(s <= cut, c, 1.0 / (s * np.abs(np.log(s)) ** alpha))

    def weighted(s):
        s = np.asarray(s, dtype=float)
        return np.where(s <= cut, c * s, np.abs(np.log(np.maximum(s, cut))) ** -alpha)

    return RadialProfile(func, radius, breakpoints=(cut,), name=f"alpha={alpha:g},n={n}", s_weighted=weighted)


def remainder_profile(alpha: float, n: int) -> RadialProfile:
    """``W_n``: the untruncated minus the truncated profile, supported in ``[0, 1/n]``."""
    c = n / math.log(n) ** alpha
    cut = 1.0 / n

    def func(s):
        s = np.asarray(s, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.maximum(1.0 / (s * np.abs(np.log(s)) ** alpha) - c, 0.0)

    def weighted(s):
        s = np.asarray(s, dtype=float)
        with np.errstate(divide="ignore"):
            return np.maximum(np.abs(np.log(s)) ** -alpha - c * s, 0.0)

    return RadialProfile(func, cut, singularity_order=1.0, name=f"W_n alpha={alpha:g},n={n}", s_weighted=weighted)


def _cell_rms(p: RadialProfile, centers: np.ndarray, h: float, upper_only: np.ndarray, order: int = 16) -> np.ndarray:
    """RMS of ``rho`` over square cells; for ``upper_only`` cells, over the half above the axis."""
    xg, wg = gauss_legendre(order)
    out = np.empty(len(centers))
    for i, (c1, c2) in enumerate(centers):
        o1 = c1 + 0.5 * h * xg
        if upper_only[i]:
            o2 = c2 + 0.25 * h * (xg + 1.0)
            scale = 0.5
        else:
            o2 = c2 + 0.5 * h * xg
            scale = 1.0
        v = np.asarray(p(np.hypot(o1[:, None], o2[None, :])), dtype=float) ** 2
        out[i] = math.sqrt(scale * float(wg @ v @ wg) / 4.0)
    return out


def build_alpha_family(spec: AlphaFamilySpec, g: Grid2D, *, near_cells: int = 8) -> GridField:
    """Sample the log-corrected vorticity on a grid.

    Nodes are evaluated pointwise.  For the untruncated (singular) profile
    the nodes within ``near_cells`` cells of the origin carry the cell RMS
    instead, so that the L2 mass of the singular core is represented.  In the
    half-disk variant nodes with ``x2 < 0`` are zero and nodes on the axis
    carry the RMS over the upper half of their cell.
    """
    if spec.n is not None and g.h > 1.0 / (4.0 * spec.n):
        raise ValueError(f"grid spacing {g.h:g} does not resolve the truncation radius 1/{spec.n} (need h <= 1/(4n))")
    if g.L < ALPHA_RADIUS:
        raise ValueError("grid does not contain the support disk")
    p = spec.profile()
    x1, x2 = g.mesh()
    r = np.hypot(x1, x2)
    i0, j0 = g.origin_index
    r[i0, j0] = 1.0
    data = np.array(p(r), dtype=float)
    axis = x2 == 0.0
    if spec.half_disk:
        data[x2 < 0] = 0.0
        data[axis] /= math.sqrt(2.0)
    if spec.n is None:
        near = np.argwhere(r <= near_cells * g.h)
        near = near[~((near[:, 0] == i0) & (near[:, 1] == j0))]
        if spec.half_disk:
            near = near[g.x[near[:, 1]] >= 0.0]
        centers = np.column_stack((g.x[near[:, 0]], g.x[near[:, 1]]))
        upper = spec.half_disk & (centers[:, 1] == 0.0)
        data[near[:, 0], near[:, 1]] = _cell_rms(p, centers, g.h, upper)
    core = origin_value(p, g.h, "rms") if spec.n is None else spec.plateau
    data[i0, j0] = core / math.sqrt(2.0) if spec.half_disk else core
    return GridField(g, data)


# ---------------------------------------------------------------------------
# axis lower bound
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LimitcaseRow:
    alpha: float
    x1: float
    u1: float
    ratio: float


def _limitcase_row(args) -> LimitcaseRow:
    alpha, x1, rtol = args
    u = u1_on_axis(alpha, x1, rtol=rtol)
    return LimitcaseRow(alpha, x1, u, u / abs(math.log(x1)) ** (1.0 - alpha))


def limitcase_table(
    alphas: Sequence[float], x1_values: Sequence[float], *, rtol: float = 1e-9, map_fn=map
) -> list[LimitcaseRow]:
    """Axis velocity ``u1(x1, 0)`` and the ratio ``u1 / |log x1|^(1-alpha)``."""
    jobs = [(float(a), float(x), rtol) for a in alphas for x in x1_values]
    return list(map_fn(_limitcase_row, jobs))


def axis_ratio_infimum(rows: Iterable[LimitcaseRow], alpha: float) -> float:
    return min(r.ratio for r in rows if r.alpha == alpha)


# ---------------------------------------------------------------------------
# cubic integral for the truncated half-disk data
# ---------------------------------------------------------------------------


def _ring_kernel(r: float, s: np.ndarray) -> np.ndarray:
    """``(1/s) log|(r+s)/(r-s)|``; the half-circle average of the Poisson kernel times pi."""
    with np.errstate(divide="ignore"):
        return np.log1p(2.0 * np.minimum(r, s) / np.abs(r - s)) / s


class AxisTable:
    """Tabulated axis velocity of a half-disk radial vorticity.

    Piecewise cubic splines in ``log s`` between the profile's kinks, a
    constant below the table and the dipole decay ``s^-2`` above it.
    """

    def __init__(self, p: RadialProfile, *, per_decade: int = 48, s_top: float = 1e3, rtol: float = 1e-11):
        stops = sorted({*p.breakpoints, p.support})
        self.s_lo = stops[0] * 1e-3
        self.s_top = s_top
        edges = [self.s_lo, *stops, s_top]
        self.segments = []
        for a, b in zip(edges[:-1], edges[1:]):
            m = max(8, int(per_decade * math.log10(b / a)))
            s = np.geomspace(a, b, m)
            A = np.array([axis_velocity_half_disk(p, x, rtol=rtol) for x in s])
            self.segments.append((a, b, CubicSpline(np.log(s), A)))
        self.kinks = tuple(stops)
        self.a_lo = float(self.segments[0][2](math.log(self.s_lo)))
        self.a_top = float(self.segments[-1][2](math.log(s_top)))

    def __call__(self, s) -> np.ndarray:
        s = np.abs(np.asarray(s, dtype=float))
        out = np.empty_like(s)
        out[s < self.s_lo] = self.a_lo
        big = s > self.s_top
        out[big] = self.a_top * (self.s_top / s[big]) ** 2
        for a, b, sp in self.segments:
            m = (s >= a) & (s <= b)
            out[m] = sp(np.log(s[m]))
        return out

    def ring_mean(self, r: float, *, rtol: float = 1e-10) -> float:
        """``int_0^pi v1(r cos t, r sin t) dt`` for the harmonic extension ``v1``."""
        pts = sorted({0.0, r, *self.kinks, *(r * 10.0**k for k in range(-3, 4))})
        val = quad_radial(lambda s: self(s) * _ring_kernel(r, s), 0.0, math.inf, pts, rtol=rtol)
        return -2.0 / math.pi * val


def _truncated_enclosed(alpha: float, n: int) -> Callable[[float], float]:
    c = n / math.log(n) ** alpha
    base = c / (2.0 * n * n) - float(alpha_enclosed(alpha, 1.0 / n))

    def M(r: float) -> float:
        if r <= 1.0 / n:
            return 0.5 * c * r * r
        return base + float(alpha_enclosed(alpha, min(r, ALPHA_RADIUS)))

    return M


def _remainder_enclosed(alpha: float, n: int) -> Callable[[float], float]:
    c = n / math.log(n) ** alpha

    def M(r: float) -> float:
        r = min(r, 1.0 / n)
        if r <= 0:
            return 0.0
        return float(alpha_enclosed(alpha, r)) - 0.5 * c * r * r

    return M


@dataclass(frozen=True)
class CubicRow:
    n: int
    cubic: float
    error_Un: float
    error_full: float


@dataclass(frozen=True)
class CubicDivergenceResult:
    alpha: float
    rows: tuple
    r0: float

    @property
    def n(self) -> np.ndarray:
        return np.array([r.n for r in self.rows], dtype=float)

    @property
    def values(self) -> np.ndarray:
        return np.array([r.cubic for r in self.rows])

    def exponent_naive(self) -> float:
        """``p`` from fitting ``I = A + c (log n)^p``."""
        return fit_log_power(self.n, self.values)

    def exponent_expansion(self) -> float:
        """``p`` from fitting ``I = A + c (log n)^p + d (log n)^(p - (1 - alpha))``."""
        return fit_log_power(self.n, self.values, subleading=1.0 - self.alpha)


def _projected_residual(L: np.ndarray, y: np.ndarray, p: float, sub: float | None) -> float:
    cols = [np.ones_like(L), L**p] + ([] if sub is None else [L ** (p - sub)])
    X = np.column_stack(cols)
    coef = np.linalg.lstsq(X, y, rcond=None)[0]
    return float(np.sum((y - X @ coef) ** 2))


def fit_log_power(n, values, *, subleading: float | None = None) -> float:
    """Growth exponent ``p`` of ``values`` in ``log n`` by variable projection.

    Fits ``A + c L^p`` or, with ``subleading = q``, ``A + c L^p + d L^(p-q)``
    with ``L = log n``.  The linear coefficients are solved exactly for each
    trial ``p``; ``p`` is located on a grid over ``(0, 1)`` and refined with
    a bounded scalar minimization.  Near ``p = q`` the two-term model
    degenerates (its last column is constant), so that neighbourhood is
    excluded.
    """
    L = np.log(np.asarray(n, dtype=float))
    y = np.asarray(values, dtype=float)
    need = 3 if subleading is None else 4
    if L.size < need:
        raise ValueError(f"need at least {need} points for this fit")
    grid = np.arange(0.01, 1.0, 0.005)
    if subleading is not None:
        grid = grid[np.abs(grid - subleading) > 0.02]
    res = np.array([_projected_residual(L, y, p, subleading) for p in grid])
    i = int(np.argmin(res))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    if lo == hi:
        return float(grid[i])
    opt = minimize_scalar(lambda p: _projected_residual(L, y, p, subleading), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-8})
    return float(opt.x)


def _cubic_row(args) -> CubicRow:
    alpha, n, r0, panel = args
    c = n / math.log(n) ** alpha
    cut = 1.0 / n
    axis_n = AxisTable(truncated_alpha_profile(alpha, n))
    axis_w = AxisTable(remainder_profile(alpha, n))
    M_n = _truncated_enclosed(alpha, n)
    M_w = _remainder_enclosed(alpha, n)

    def ubar(r):  # int_0^pi u1^n(r, theta) d theta
        return -2.0 * M_n(r) / r - axis_n.ring_mean(r)

    def ebar(r):  # same for e_n = u1 - u1^n, the velocity of W_n
        return -2.0 * M_w(r) / r - axis_w.ring_mean(r)

    # plateau [0, 1/n]: rho^2 r = c^2 r
    xp, wp = panel_nodes(np.linspace(0.0, cut, 3), 16)
    # [1/n, 1/3] in u = log r: rho^2 r dr = |log r|^(-2 alpha) du
    lo, hi = math.log(cut), math.log(ALPHA_RADIUS)
    edges = np.linspace(lo, hi, int(math.ceil((hi - lo) / panel)) + 1)
    u, wu = panel_nodes(edges, 16)
    ro = np.exp(u)
    wo = wu * np.abs(u) ** (-2.0 * alpha)
    nodes = np.concatenate((xp, ro))
    weights = np.concatenate((wp * c * c * xp, wo))
    U = np.array([ubar(r) for r in nodes])
    E = np.array([ebar(r) for r in nodes])
    cubic = float(weights @ U)
    full = float(weights @ E)
    inner = n ** (-1.0 / 3.0)
    if inner < r0:
        eu, ew = panel_nodes(np.linspace(math.log(inner), math.log(r0), 1 + int(math.ceil(math.log(r0 / inner) / panel))), 16)
        er = np.exp(eu)
        err_U = float(np.dot(ew * np.abs(eu) ** (-2.0 * alpha), [ebar(r) for r in er]))
    else:
        err_U = 0.0
    return CubicRow(int(n), cubic, err_U, full)


def cubic_divergence_experiment(
    alpha: float, n_list: Sequence[int], *, r0: float = R0_DEFAULT, panel: float = 0.25, map_fn=map
) -> CubicDivergenceResult:
    """``I_n = int_{B+(0;1/3)} u1^n |omega^n_+|^2`` for the truncated half-disk data.

    The angular integral is done in closed form: the radial part of the
    velocity averages to ``-2 M(r) / r`` over the half circle and the
    harmonic extension of the axis velocity ``A`` to
    ``-(2/pi) int_0^inf A(s) (1/s) log|(r+s)/(r-s)| ds``.  What remains is a
    radial integral against ``rho_n(r)^2 r``.  The same reduction applied to
    the remainder ``W_n`` gives the truncation error ``int e_n |omega^n_+|^2``
    over ``B+(0;r0) minus B+(0;n^(-1/3))`` (zero while that set is empty)
    and over the whole half disk.

    Raises
    ------
    QuadratureError
        If ``I_n`` is not strictly increasing, which signals a quadrature failure.
    """
    if not 0.5 < alpha <= 2.0 / 3.0:
        raise ValueError(f"alpha must lie in (1/2, 2/3], got {alpha}")
    n_list = [int(n) for n in n_list]
    if any(b <= a for a, b in zip(n_list, n_list[1:])) or n_list[0] < 10:
        raise ValueError("n_list must be ascending integers >= 10")
    if not 0 < r0 <= R0_DEFAULT:
        raise ValueError(f"r0 must lie in (0, 1/72], got {r0}")
    rows = tuple(map_fn(_cubic_row, [(alpha, n, r0, panel) for n in n_list]))
    vals = [r.cubic for r in rows]
    if any(b <= a for a, b in zip(vals, vals[1:])):
        raise QuadratureError(f"cubic integral is not increasing in n: {vals}")
    return CubicDivergenceResult(alpha, rows, r0)


# ---------------------------------------------------------------------------
# Zygmund modulars (radial reductions in u = log(1/r))
# ---------------------------------------------------------------------------


def _log_rho(u, alpha):
    return u - alpha * np.log(u)


def _modular_density(u, alpha, kappa):
    """``A(rho) r^2`` in terms of ``u``: ``u^(-2 alpha) log(2 + rho)^(2 kappa)``."""
    ell = np.logaddexp(math.log(2.0), _log_rho(u, alpha))
    return u ** (-2.0 * alpha) * ell ** (2.0 * kappa)


def alpha_partial_modular(alpha: float, kappa: float, u_a: float, u_b: float, *, half_disk: bool = True) -> float:
    """``int A_{2,kappa}(omega)`` over the annulus ``exp(-u_b) < r < exp(-u_a)``."""
    ang = math.pi if half_disk else 2.0 * math.pi
    f = lambda v: _modular_density(np.exp(v), alpha, kappa) * np.exp(v)  # noqa: E731
    return ang * quad_radial(f, math.log(u_a), math.log(u_b), rtol=1e-11)


@dataclass(frozen=True)
class ZygmundRow:
    kappa: float
    level: int
    u_inner: float
    modular: float
    increment: float
    decay: float  # previous increment / this increment


@dataclass(frozen=True)
class ZygmundScan:
    alpha: float
    rows: tuple
    threshold: float

    def verdict(self, kappa: float) -> str:
        last = [r for r in self.rows if r.kappa == kappa][-1]
        return "bounded" if last.decay >= self.threshold else "divergent"


def zygmund_membership_scan(
    alpha: float,
    kappa_list: Sequence[float],
    *,
    levels: int = 6,
    step: float = 2.0,
    threshold: float = 1.5,
) -> ZygmundScan:
    """Modular of ``omega^alpha_+`` in ``L^2 (log L)^kappa`` with the inner radius refined.

    Inner radii are ``r_k = exp(-u_k)`` with ``u_k = log(3) 10^(step k)``.
    Each increment is the modular of the annulus between successive radii; a
    summable modular shows geometric decay of the increments, and the
    verdict is ``bounded`` when the last decay factor is at least
    ``threshold``.
    """
    if not 0.5 < alpha < 1:
        raise ValueError("alpha must lie in (1/2, 1)")
    if any(not 0 <= k < 0.5 for k in kappa_list):
        raise ValueError("kappa values must lie in [0, 1/2)")
    u = [math.log(3.0) * 10.0 ** (step * k) for k in range(levels + 1)]
    rows = []
    for kappa in kappa_list:
        total = 0.0
        prev = math.nan
        for k in range(1, levels + 1):
            inc = alpha_partial_modular(alpha, kappa, u[k - 1], u[k])
            total += inc
            rows.append(ZygmundRow(float(kappa), k, u[k], total, inc, prev / inc if k > 1 else math.nan))
            prev = inc
    return ZygmundScan(alpha, tuple(rows), threshold)


def _remainder_log_weighted(u, alpha, n):
    """``log(r W_n(r))`` at ``r = exp(-u)`` for ``u > log n``."""
    un = math.log(n)
    x = -(u - un) + alpha * np.log(u / un)
    with np.errstate(divide="ignore"):
        return -alpha * np.log(u) + np.log(-np.expm1(x))


# in v = log u the integrand decays like exp(-(2 alpha - 2 kappa - 1) v)
_V_FAR = 600.0


def remainder_modular(alpha: float, kappa: float, n: int, k: float = 1.0) -> float:
    """``int A_{2,kappa}(W_n / k)`` over the half disk, in ``v = log u``."""
    un = math.log(n)
    lk = math.log(k)

    def f(v):
        v = np.asarray(v, dtype=float)
        far = v > _V_FAR
        u = np.exp(np.where(far, un, v))
        with np.errstate(divide="ignore", invalid="ignore", under="ignore"):
            lrw = _remainder_log_weighted(u, alpha, n) - lk
            ell = np.logaddexp(math.log(2.0), lrw + u)
            val = np.exp(2.0 * lrw) * ell ** (2.0 * kappa) * u
        return np.where(far | ~np.isfinite(lrw), 0.0, val)

    return math.pi * quad_radial(f, math.log(un), math.inf, [math.log(un)], rtol=1e-11)


def remainder_luxemburg(alpha: float, kappa: float, n: int, *, rtol: float = 1e-10) -> float:
    """Luxemburg norm of ``W_n`` in ``L^2 (log L)^kappa`` from the radial modular."""
    g = lambda lk: math.log(remainder_modular(alpha, kappa, n, math.exp(lk)))  # noqa: E731
    lo, hi = -1.0, 1.0
    while g(lo) < 0:
        lo -= 2.0
    while g(hi) > 0:
        hi += 2.0
    return math.exp(brentq(g, lo, hi, xtol=rtol))


@dataclass(frozen=True)
class DecayRow:
    n: int
    norm: float
    modular_at_norm: float


def truncation_zygmund_decay(alpha: float, kappa: float, n_list: Sequence[int], *, map_fn=map) -> list[DecayRow]:
    """``||W_n||_{2,kappa}`` for ascending ``n`` (radial reduction, so ``n`` up to 1e8 is cheap)."""
    if not 0 <= kappa < alpha - 0.5:
        raise ValueError(f"need 0 <= kappa < alpha - 1/2, got kappa={kappa}, alpha={alpha}")

    def row(n):
        k = remainder_luxemburg(alpha, kappa, int(n))
        return DecayRow(int(n), k, remainder_modular(alpha, kappa, int(n), k))

    return list(map_fn(row, n_list))


def decay_rate_prediction(alpha: float, kappa: float, n) -> np.ndarray:
    """Leading-order ``||W_n||`` from ``modular(W/k) ~ pi k^-2 (log n)^(1+2kappa-2alpha) / (2alpha-2kappa-1)``."""
    q = 2.0 * alpha - 2.0 * kappa - 1.0
    return np.sqrt(math.pi / q * np.log(np.asarray(n, dtype=float)) ** (-q))


# ---------------------------------------------------------------------------
# counterexample: transport side vs viscous side
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TransportRow:
    n: int
    eps: float
    l1: float
    sup: float


@dataclass(frozen=True)
class ViscousRow:
    nu: float
    t: float
    l1_grid: float
    l1_spectral: float
    mass_r005: float
    mass_r01: float
    mass_r05: float
    l1_limit: float

    @property
    def outside_fraction(self) -> float:
        """Share of the grid defect outside ``B(0;0.1)``."""
        return (self.l1_grid - self.mass_r01) / self.l1_grid


def _transport_row(args) -> TransportRow:
    n, L, eps, delta, cutoff_id = args
    g = Grid2D(n, L)
    omega = sample_radial(regularized_omega0(delta, cutoff_id), g, "point")
    Z = transport_defect(omega, eps)
    return TransportRow(n, eps, Z.l1(), Z.sup())


def transport_table(
    n_list: Sequence[int], eps_list: Sequence[float], *, L: float = 4.0, delta: float = 0.02,
    cutoff_id: str = "bump_smoothstep", map_fn=map,
) -> list[TransportRow]:
    jobs = [(int(n), L, float(e), delta, cutoff_id) for n in n_list for e in eps_list]
    return list(map_fn(_transport_row, jobs))


_MASS_RADII = (0.05, 0.1, 0.5)


def _viscous_row(args) -> ViscousRow:
    nu, t, p, omega0 = args
    spectral = viscous_defect_l1_spectral(p, nu, t, normalization="plancherel")
    limit = viscous_defect_l1_spectral(p, nu, t, normalization="limit")
    if omega0 is None:
        nan = math.nan
        return ViscousRow(nu, t, nan, spectral, nan, nan, nan, limit)
    Z = viscous_defect_field(heat_evolve(omega0, nu, t), nu)
    masses = [m for _, m in concentration_profile(Z, _MASS_RADII)]
    return ViscousRow(nu, t, Z.integral(), spectral, *masses, limit)


def viscous_table(
    nu_list: Sequence[float], t_list: Sequence[float], *, n: int = 2048, L: float = 4.0,
    cutoff_id: str = "bump_smoothstep", nu_grid_min: float = 1e-5, map_fn=map,
) -> list[ViscousRow]:
    """Viscous defect rows; the grid route runs for ``nu >= nu_grid_min``."""
    p = build_omega0(cutoff_id)
    omega0 = sample_radial(p, Grid2D(n, L), "mass")
    jobs = [(float(nu), float(t), p, omega0 if nu >= nu_grid_min else None) for t in t_list for nu in nu_list]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ResolutionWarning)
        return list(map_fn(_viscous_row, jobs))


@dataclass(frozen=True)
class CounterexampleResult:
    transport: tuple
    viscous: tuple


def counterexample_experiment(
    *, nu_list, t_list, eps_list, transport_n=(1024, 2048), viscous_n=2048, L=4.0, delta=0.02,
    cutoff_id="bump_smoothstep", nu_grid_min=1e-5, map_fn=map,
) -> CounterexampleResult:
    """Table A (transport defect of the regularized radial data) and table B (viscous defect)."""
    a = transport_table(transport_n, eps_list, L=L, delta=delta, cutoff_id=cutoff_id, map_fn=map_fn)
    b = viscous_table(nu_list, t_list, n=viscous_n, L=L, cutoff_id=cutoff_id, nu_grid_min=nu_grid_min, map_fn=map_fn)
    return CounterexampleResult(tuple(a), tuple(b))


# ---------------------------------------------------------------------------
# symbol error and Besov scans
# ---------------------------------------------------------------------------


def disk_profile(radius: float = 1.0) -> RadialProfile:
    return RadialProfile(lambda s: np.ones_like(np.asarray(s, dtype=float)), radius, name="disk")


def symbol_scan(kappas: Sequence[float], cutoff_id: str = "bump_smoothstep") -> list[tuple[float, float]]:
    """``(kappa, kappa |omega0_hat(kappa)| - 2 pi)`` rows."""
    k = np.asarray(kappas, dtype=float)
    return list(zip(k.tolist(), np.atleast_1d(symbol_error(build_omega0(cutoff_id), k)).tolist()))


def disk_hankel_error(kappas: Sequence[float]) -> float:
    """Max deviation of the disk transform from ``2 pi J1(kappa) / kappa``."""
    k = np.asarray(kappas, dtype=float)
    return float(np.max(np.abs(hankel_radial_many(disk_profile(), k) - 2.0 * math.pi * j1(k) / k)))


@dataclass(frozen=True)
class BesovRow:
    nu: float
    value: float
    argmax_j: int
    top_j: int


def besov_scan(
    nu_list: Sequence[float], *, t: float = 1.0, n: int = 1024, L: float = 4.0, cutoff_id: str = "bump_smoothstep"
) -> list[BesovRow]:
    """``sup_j ||psi_j * omega_nu(t)||_2`` across viscosities."""
    omega0 = sample_radial(build_omega0(cutoff_id), Grid2D(n, L), "mass")
    out = []
    for nu in nu_list:
        res = besov_norm_sup(heat_evolve(omega0, nu, t), 0)
        out.append(BesovRow(float(nu), res.value, res.argmax_j, res.top_j))
    return out


# ---------------------------------------------------------------------------
# norm suite
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NormCheck:
    name: str
    value: float
    bound: float
    passed: bool


def _random_field(rng: np.random.Generator, g: Grid2D) -> GridField:
    # heavy-tailed, sparse-ish positive field with a random singular bump
    base = rng.lognormal(0.0, rng.uniform(0.3, 2.0), size=(g.n, g.n))
    mask = rng.random((g.n, g.n)) < rng.uniform(0.2, 1.0)
    r = np.hypot(*[x - c for x, c in zip(g.mesh(), rng.uniform(-0.5, 0.5, 2))])
    spike = rng.uniform(0.0, 3.0) / np.maximum(r, g.h) ** rng.uniform(0.0, 0.9)
    return GridField(g, rng.choice([-1.0, 1.0], size=(g.n, g.n)) * (base * mask + spike))


def norm_suite(*, seed: int = 0, n: int = 64, L: float = 1.0, pairs: int = 100) -> list[NormCheck]:
    """Structural checks on the Orlicz, Lorentz and rearrangement routines."""
    rng = np.random.default_rng(seed)
    g = Grid2D(n, L)
    P = OrliczParams(2.0, 0.25)
    checks = []
    f = _random_field(rng, g)
    nf = luxemburg_norm(f, P)
    hom = 0.0
    for lam in (-3.5, 0.01, 7.0, 1e4):
        hom = max(hom, abs(luxemburg_norm(f.with_data(lam * f.data), P) / (abs(lam) * nf) - 1.0))
    checks.append(NormCheck("luxemburg_homogeneity", hom, 1e-6, hom <= 1e-6))
    att = max(
        abs(orlicz_modular(h.with_data(h.data / luxemburg_norm(h, Q)), Q) - 1.0)
        for h in (f, _random_field(rng, g))
        for Q in (P, OrliczParams(1.0, 0.5), OrliczParams(2.0, 0.0))
    )
    checks.append(NormCheck("modular_attainment", att, 1e-6, att <= 1e-6))
    worst = max(product_lemma_check(_random_field(rng, g), _random_field(rng, g)) for _ in range(pairs))
    checks.append(NormCheck("product_lemma_ratio", worst, 1.0, worst <= 1.0))
    perm = f.with_data(rng.permutation(f.data.ravel()).reshape(f.data.shape))
    inv = max(
        abs(luxemburg_norm(perm, P) / nf - 1.0),
        abs(lorentz_norm_1q(perm, 1.5) / lorentz_norm_1q(f, 1.5) - 1.0),
        abs(lorentz_norm_1q(perm, 1.0) / lorentz_norm_1q(f, 1.0) - 1.0),
    )
    checks.append(NormCheck("rearrangement_invariance", inv, 1e-10, inv <= 1e-10))
    fs = rearrange(f)
    gap = float(np.min(maximal(fs) - fs.values))
    checks.append(NormCheck("maximal_dominates", gap, 0.0, gap >= 0.0))
    return checks
