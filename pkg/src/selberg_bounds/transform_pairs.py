"""Convolution-power bump functions and their sinc-power Fourier transforms.

``g`` is the m-fold self-convolution of the indicator of ``[-a, a]`` with
``m = n + 2`` (n even) or ``n + 1`` (n odd) and ``a = epsilon / m``; its
transform is ``h(xi) = (2 sin(a xi) / xi)**m``.  The convention is the
non-unitary, angular-frequency one: ``h(xi) = int g(x) exp(-i xi x) dx``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .numerics import bspline_eval
from .reports import CheckReport

__all__ = [
    "BumpPair",
    "make_bump_pair",
    "eval_g",
    "eval_h",
    "verify_admissibility",
    "fourier_check",
    "cosine_transform",
]

_SERIES_CUTOFF = 1e-4


@dataclass(frozen=True)
class BumpPair:
    """Admissible pair ``(g, h)``.

    Build through :func:`make_bump_pair`; constructing one directly skips
    the parity rule for ``m`` (used by tests to inject bad pairs).
    """

    n: int
    epsilon: float
    m: int
    a: float

    @property
    def nu(self) -> float:
        return (self.n - 1) / 2

    @property
    def mass(self) -> float:
        """``h(0) = int g = (2a)**m``."""
        return (2 * self.a) ** self.m

    def g(self, x):
        x = np.asarray(x, dtype=float)
        out = np.asarray(bspline_eval(self.m, self.a, x), dtype=float)
        out = np.where(np.abs(x) >= self.epsilon, 0.0, out)
        return out if out.ndim else float(out)

    def h(self, xi):
        xi = np.asarray(xi)
        real_input = not np.iscomplexobj(xi)
        z = self.a * xi
        small = np.abs(z) < _SERIES_CUTOFF
        with np.errstate(divide="ignore", invalid="ignore"):
            direct = np.sin(z) / xi
        series = self.a * (1 - z * z / 6 + z ** 4 / 120)
        s = np.where(small, series, direct)
        out = (2 * s) ** self.m
        if real_input:
            out = np.real(out)
        return out if np.ndim(out) else out.item()

    def cosine_terms(self):
        """``(amps, freqs, m)`` with ``h(r) = r**-m * sum(amps * cos(freqs * r))`` on the reals."""
        m = self.m
        if m % 2:
            raise ValueError("cosine expansion requires an even convolution order")
        half = m // 2
        amps = [float(math.comb(m, half))]
        freqs = [0.0]
        for k in range(1, half + 1):
            amps.append(2.0 * (-1) ** k * math.comb(m, half - k))
            freqs.append(2.0 * k * self.a)
        return np.array(amps), np.array(freqs), m

    def knots(self) -> np.ndarray:
        """Non-negative breakpoints of the piecewise polynomial ``g``."""
        k = np.arange(self.m + 1)
        pts = np.abs((self.m - 2 * k) * self.a)
        return np.unique(pts)


def make_bump_pair(n: int, epsilon: float) -> BumpPair:
    if int(n) != n or n < 2:
        raise ValueError("dimension must be an integer >= 2")
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    m = n + 2 if n % 2 == 0 else n + 1
    return BumpPair(int(n), float(epsilon), m, float(epsilon) / m)


def eval_g(pair: BumpPair, x):
    return pair.g(x)


def eval_h(pair: BumpPair, xi):
    return pair.h(xi)


def cosine_transform(func: Callable, knots: Sequence[float], xis, order: int = 24) -> np.ndarray:
    """``int g(x) exp(-i xi x) dx`` for an even ``g`` supported in ``[-max(knots), max(knots)]``.

    Gauss-Legendre on each knot interval, subdivided so that no panel spans
    more than about one radian of the fastest oscillation.
    """
    xis = np.atleast_1d(np.asarray(xis, dtype=float))
    knots = np.unique(np.concatenate([[0.0], np.abs(np.asarray(knots, float))]))
    wmax = max(float(np.max(np.abs(xis))), 1.0)
    nodes, weights = np.polynomial.legendre.leggauss(order)
    xs, ws = [], []
    for lo, hi in zip(knots[:-1], knots[1:]):
        pieces = max(1, int(math.ceil((hi - lo) * wmax)))
        edges = np.linspace(lo, hi, pieces + 1)
        for a, b in zip(edges[:-1], edges[1:]):
            xs.append(0.5 * (a + b) + 0.5 * (b - a) * nodes)
            ws.append(0.5 * (b - a) * weights)
    x = np.concatenate(xs)
    w = np.concatenate(ws) * np.asarray(func(x), dtype=float)
    return 2.0 * (np.cos(np.outer(xis, x)) @ w)


def fourier_check(pair: BumpPair, xis, tol: float = 1e-8) -> CheckReport:
    xis = np.atleast_1d(np.asarray(xis, dtype=float))
    if np.any(np.abs(xis) > 50):
        raise ValueError("fourier_check samples must satisfy |xi| <= 50")
    numeric = cosine_transform(pair.g, pair.knots(), xis)
    closed = np.asarray(pair.h(xis), dtype=float)
    dev = np.abs(numeric - closed)
    worst = int(np.argmax(dev))
    passed = bool(dev.max() <= tol)
    return CheckReport(
        "fourier_duality", passed,
        {"n": pair.n, "epsilon": pair.epsilon, "samples": int(xis.size),
         "max_deviation": float(dev.max()), "tol": tol},
        None if passed else {"xi": float(xis[worst]), "numeric": float(numeric[worst]),
                             "closed_form": float(closed[worst])},
    )


def _decay_slope(pair: BumpPair, r_lo: float, r_hi: float, windows: int = 40) -> float:
    """Log-log slope of the windowed maximum of ``|h|`` on the real axis."""
    period = math.pi / pair.a
    starts = np.geomspace(r_lo, r_hi, windows)
    peaks = []
    for s in starts:
        r = np.linspace(s, s + period, 257)
        peaks.append(np.max(np.abs(pair.h(r))))
    slope = np.polyfit(np.log(starts), np.log(peaks), 1)[0]
    return float(slope)


def verify_admissibility(pair: BumpPair, r_max: Optional[float] = None, n_real: int = 10_000,
                         n_imag: int = 1_000, slack: float = 1e-12) -> CheckReport:
    """Evenness, sign, support and decay of the pair, sampled.

    The imaginary axis is sampled on ``[0, nu + 1]``.
    """
    if r_max is None:
        r_max = 200 * math.pi / pair.a
    details = {"n": pair.n, "epsilon": pair.epsilon, "m": pair.m}
    witness = None

    x = np.linspace(-1.5 * pair.epsilon, 1.5 * pair.epsilon, 4001)
    gx = pair.g(x)
    even = float(np.max(np.abs(gx - pair.g(-x))))
    outside = np.abs(x) >= pair.epsilon
    details["g_even_max_dev"] = even
    details["g_min"] = float(gx.min())
    details["g_max_outside_support"] = float(np.max(np.abs(gx[outside]))) if outside.any() else 0.0
    g_ok = even <= slack and gx.min() >= 0 and details["g_max_outside_support"] == 0.0
    if not g_ok:
        bad = int(np.argmin(gx)) if gx.min() < 0 else int(np.argmax(np.where(outside, np.abs(gx), 0)))
        witness = {"check": "g", "x": float(x[bad]), "g": float(gx[bad])}

    r = np.linspace(0.0, r_max, n_real)
    hr = np.asarray(pair.h(r), dtype=float)
    t = np.linspace(0.0, pair.nu + 1, n_imag)
    ht = pair.h(1j * t)
    scale = max(1.0, pair.mass)
    real_min = float(hr.min())
    imag_min = float(np.min(ht.real))
    imag_residue = float(np.max(np.abs(ht.imag)))
    details.update(h_real_min=real_min, h_imag_axis_min=imag_min, h_imag_axis_residue=imag_residue)
    h_ok = real_min >= -slack * scale and imag_min >= -slack * scale
    if not h_ok and witness is None:
        if real_min < -slack * scale:
            i = int(np.argmin(hr))
            witness = {"check": "h_real", "xi": float(r[i]), "h": float(hr[i])}
        else:
            i = int(np.argmin(ht.real))
            witness = {"check": "h_imag", "t": float(t[i]), "h": float(ht.real[i])}

    slope = _decay_slope(pair, 20 * math.pi / pair.a, r_max)
    details["decay_slope"] = slope
    details["decay_slope_limit"] = -(pair.n + 1) + 0.1
    decay_ok = slope <= -(pair.n + 1) + 0.1
    if not decay_ok and witness is None:
        witness = {"check": "decay", "slope": slope}

    return CheckReport("admissibility", bool(g_ok and h_ok and decay_ok), details, witness)
