"""Bessel functions of the first kind, orders zero and one.

Power series below ``|x| = 12`` and the Hankel asymptotic expansion above it.
Both branches are accurate to about 1e-10 absolute across the switch.
"""

from __future__ import annotations

import math

import numpy as np

SWITCH = 12.0

_NSERIES = 42
_J0_SERIES = np.array([(-1) ** k / math.factorial(k) ** 2 for k in range(_NSERIES)])
_J1_SERIES = np.array(
    [(-1) ** k / (math.factorial(k) * math.factorial(k + 1)) for k in range(_NSERIES)]
)


def _asymptotic_coeffs(order: int, nterms: int) -> np.ndarray:
    mu = 4.0 * order * order
    a = [1.0]
    for k in range(1, nterms):
        a.append(a[-1] * (mu - (2 * k - 1) ** 2) / (k * 8.0))
    return np.array(a)


_NASYM = 26
_A0 = _asymptotic_coeffs(0, _NASYM)
_A1 = _asymptotic_coeffs(1, _NASYM)


def _horner(coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    out = np.full_like(z, coeffs[-1])
    for c in coeffs[-2::-1]:
        out = out * z + c
    return out


def _hankel_pq(coeffs: np.ndarray, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # P = sum (-1)^k a_{2k} x^{-2k},  Q = sum (-1)^k a_{2k+1} x^{-2k-1}
    inv2 = 1.0 / (x * x)
    even = coeffs[0::2] * (-1.0) ** np.arange(len(coeffs[0::2]))
    odd = coeffs[1::2] * (-1.0) ** np.arange(len(coeffs[1::2]))
    return _horner(even, inv2), _horner(odd, inv2) / x


def _dispatch(x, small, large):
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    out = np.empty_like(ax)
    lo = ax <= SWITCH
    if lo.any():
        out[lo] = small(ax[lo])
    hi = ~lo
    if hi.any():
        out[hi] = large(ax[hi])
    return out


def j0(x):
    """Order-zero Bessel function of the first kind (vectorized)."""

    def small(a):
        return _horner(_J0_SERIES, 0.25 * a * a)

    def large(a):
        p, q = _hankel_pq(_A0, a)
        chi = a - 0.25 * math.pi
        return np.sqrt(2.0 / (math.pi * a)) * (p * np.cos(chi) - q * np.sin(chi))

    out = _dispatch(x, small, large)
    return out if out.ndim else float(out)


def j1(x):
    """Order-one Bessel function of the first kind (vectorized, odd in x)."""

    def small(a):
        return 0.5 * a * _horner(_J1_SERIES, 0.25 * a * a)

    def large(a):
        p, q = _hankel_pq(_A1, a)
        chi = a - 0.75 * math.pi
        return np.sqrt(2.0 / (math.pi * a)) * (p * np.cos(chi) - q * np.sin(chi))

    xa = np.asarray(x, dtype=float)
    out = _dispatch(xa, small, large) * np.sign(xa)
    return out if out.ndim else float(out)
