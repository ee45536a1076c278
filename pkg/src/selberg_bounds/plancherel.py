"""Plancherel density of hyperbolic n-space and spectral-side integrals.

The densities follow Parnovskii's closed forms.  Randol's printed version of
the odd-dimensional formula on the page that also states the trace formula
has a known misprint; it is not used here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import mpmath
import numpy as np
from numpy.polynomial import Polynomial

from .numerics import QuadResult, double_factorial, integrate_semi_infinite

__all__ = [
    "PlancherelDensity",
    "density",
    "density_polynomial",
    "spectral_integral",
    "weighted_integral",
]


@dataclass(frozen=True)
class PlancherelDensity:
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError("dimension must be an integer >= 2")

    @property
    def parity(self) -> str:
        return "even" if self.n % 2 == 0 else "odd"


def density_polynomial(pd: PlancherelDensity) -> Polynomial:
    """Polynomial ``P`` with ``Phi_n(r) = tanh(pi r) P(r)`` (even n) or ``P(r)`` (odd n)."""
    n = pd.n
    r = Polynomial([0.0, 1.0])
    if n % 2 == 0:
        poly = r / ((2 * math.pi) ** (n / 2) * double_factorial(n - 2))
        for k in range((n - 4) // 2 + 1):
            poly = poly * (r * r + (k + 0.5) ** 2)
    else:
        poly = Polynomial([1.0 / (2 ** ((n - 1) / 2) * math.pi ** ((n + 1) / 2)
                                  * double_factorial(n - 2))])
        for k in range((n - 3) // 2 + 1):
            poly = poly * (r * r + k * k)
    return poly


def density(pd: PlancherelDensity, r):
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("the Plancherel density is only evaluated on r >= 0")
    val = density_polynomial(pd)(r)
    if pd.n % 2 == 0:
        val = val * np.tanh(np.pi * r)
    return val if val.ndim else float(val)


def _power_cos_tail(q: int, omega: float, T: float) -> float:
    """``int_T^inf cos(omega r) r**-q dr`` for integer ``q >= 2``."""
    if omega == 0:
        return T ** (1 - q) / (q - 1)
    with mpmath.workdps(30):
        z = mpmath.mpc(0, -omega * T)
        val = mpmath.mpf(T) ** (1 - q) * mpmath.expint(q, z)
        return float(mpmath.re(val))


def _tail_from_terms(terms, poly: Polynomial, kappa: Optional[float]):
    amps, freqs, power = terms
    coeffs = poly.coef

    def tail(T: float):
        total = 0.0
        magnitude = 0.0
        for A, w in zip(amps, freqs):
            for i, p in enumerate(coeffs):
                if p == 0 or A == 0:
                    continue
                q = power - i
                if q < 2:
                    raise ValueError("tail integrand does not decay fast enough")
                piece = A * p * _power_cos_tail(q, float(w), T)
                total += piece
                magnitude += abs(piece)
        err = 1e-14 * magnitude
        if kappa is not None:
            # |1 - tanh(kappa r)| <= 2 exp(-2 kappa r); |h| <= sum|A| r^-power
            hsup = float(np.sum(np.abs(amps))) * T ** (-power)
            with mpmath.workdps(20):
                extra = sum(abs(p) * 2 * mpmath.gammainc(i + 1, 2 * kappa * T) / (2 * kappa) ** (i + 1)
                            for i, p in enumerate(coeffs))
            err += hsup * float(extra)
        return total, err

    return tail


def weighted_integral(h: Callable, poly: Polynomial, kappa: Optional[float], *,
                      tol: float = 1e-9, rtol: float = 0.0, envelope=None,
                      terms: Optional[tuple] = None,
                      panel_width: Optional[float] = None) -> QuadResult:
    """``int_0^inf h(r) w(r) dr`` with ``w = tanh(kappa r) poly(r)`` (or ``poly`` if kappa is None).

    ``terms = (amps, freqs, power)`` declares that on the real axis
    ``h(r) = r**-power * sum(amps * cos(freqs * r))``; the tail is then
    integrated in closed form through generalised exponential integrals.
    Otherwise an envelope ``(c, p[, r0])`` for ``|h w|`` must be supplied,
    and ``panel_width`` should resolve the oscillation of ``h``.
    """
    if kappa is None:
        def integrand(r):
            return h(r) * poly(r)
    else:
        def integrand(r):
            return h(r) * poly(r) * np.tanh(kappa * r)

    if terms is None:
        if envelope is None:
            raise ValueError("need either cosine terms or a decay envelope")
        return integrate_semi_infinite(integrand, tol, envelope=envelope, rtol=rtol,
                                       panel_width=panel_width)

    amps, freqs, power = terms
    freqs = np.abs(np.asarray(freqs, dtype=float))
    positive = freqs[freqs > 0]
    w_min = positive.min() if positive.size else 1.0
    w_max = positive.max() if positive.size else 1.0
    cutoff = max(15.0 if kappa is None else 40.0 / kappa, 4 * math.pi / w_min)
    panel = min(math.pi / (2 * w_max), cutoff / 64)
    tail = _tail_from_terms((np.asarray(amps, float), freqs, int(power)), poly, kappa)
    return integrate_semi_infinite(integrand, tol, tail=tail, cutoff=cutoff, rtol=rtol,
                                   panel_width=panel)


def spectral_integral(pd: PlancherelDensity, h: Callable, envelope=None, tol: float = 1e-9, *,
                      rtol: float = 0.0, terms: Optional[tuple] = None,
                      panel_width: Optional[float] = None) -> QuadResult:
    """``int_0^inf h(r) Phi_n(r) dr``."""
    kappa = math.pi if pd.n % 2 == 0 else None
    return weighted_integral(h, density_polynomial(pd), kappa, tol=tol, rtol=rtol,
                             envelope=envelope, terms=terms, panel_width=panel_width)


def density_envelope(pd: PlancherelDensity) -> tuple[float, int]:
    """``(c, d)`` with ``Phi_n(r) <= c r**d`` for ``r >= 1``."""
    poly = density_polynomial(pd)
    return float(np.sum(np.abs(poly.coef))), poly.degree()
