"""Composite test kernels built from a bump pair, and their sign checks.

Three families are supported:

``KISS_SHIFT`` (shift ``R`` = systole)
    ``G(x) = (1+e^{nu eps}) g(x) + e^{nu eps} [g(x-R+eps) + g(x+R-eps)]/2 - [g(x-R) + g(x+R)]/2``
    with multiplier ``1 + e^{nu eps} + e^{nu eps} cos((R-eps) xi) - cos(R xi)``.
``COS_MINUS_ONE`` (shift ``L``)
    ``G(x) = [g(x-L) + g(x+L)]/2 - g(x)`` with multiplier ``cos(L xi) - 1``.
``ONE_PLUS_COS`` (shift ``L``)
    ``G(x) = g(x) + [g(x-L) + g(x+L)]/2`` with multiplier ``1 + cos(L xi)``.

On the imaginary axis the complex cosine turns into ``cosh`` on its own.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .reports import CheckReport
from .transform_pairs import BumpPair, cosine_transform

__all__ = [
    "KernelKind",
    "KernelFamily",
    "kiss_shift",
    "cos_minus_one",
    "one_plus_cos",
    "eval_G",
    "eval_H",
    "verify_sign_conditions",
    "SLACK",
]

SLACK = 1e-12


class KernelKind(enum.Enum):
    KISS_SHIFT = "kiss_shift"
    COS_MINUS_ONE = "cos_minus_one"
    ONE_PLUS_COS = "one_plus_cos"


@dataclass(frozen=True)
class KernelFamily:
    kind: KernelKind
    base: BumpPair
    shift: float

    @property
    def nu(self) -> float:
        return self.base.nu

    def multiplier_terms(self) -> tuple[np.ndarray, np.ndarray]:
        """``(coeffs, freqs)`` with multiplier ``sum(coeffs * cos(freqs * xi))``."""
        if self.kind is KernelKind.KISS_SHIFT:
            e = math.exp(self.nu * self.base.epsilon)
            return (np.array([1 + e, e, -1.0]),
                    np.array([0.0, self.shift - self.base.epsilon, self.shift]))
        if self.kind is KernelKind.COS_MINUS_ONE:
            return np.array([1.0, -1.0]), np.array([self.shift, 0.0])
        return np.array([1.0, 1.0]), np.array([0.0, self.shift])

    def multiplier(self, xi):
        coeffs, freqs = self.multiplier_terms()
        xi = np.asarray(xi)
        out = sum(c * np.cos(w * xi) for c, w in zip(coeffs, freqs))
        return out

    def G(self, x):
        g = self.base.g
        x = np.asarray(x, dtype=float)
        s = self.shift
        if self.kind is KernelKind.KISS_SHIFT:
            eps = self.base.epsilon
            e = math.exp(self.nu * eps)
            out = ((1 + e) * g(x) + e * (g(x - s + eps) + g(x + s - eps)) / 2
                   - (g(x - s) + g(x + s)) / 2)
        elif self.kind is KernelKind.COS_MINUS_ONE:
            out = (g(x - s) + g(x + s)) / 2 - g(x)
        else:
            out = g(x) + (g(x - s) + g(x + s)) / 2
        return out if np.ndim(out) else float(out)

    def H(self, xi):
        xi = np.asarray(xi)
        out = self.multiplier(xi) * self.base.h(xi)
        if not np.iscomplexobj(xi):
            out = np.real(out)
        return out if np.ndim(out) else out.item()

    def cosine_terms(self):
        """Real-axis expansion ``H(r) = r**-m sum(amps cos(freqs r))``."""
        amps, freqs, m = self.base.cosine_terms()
        coeffs, shifts = self.multiplier_terms()
        out_a, out_w = [], []
        for A, w in zip(amps, freqs):
            for c, s in zip(coeffs, shifts):
                out_a += [0.5 * A * c, 0.5 * A * c]
                out_w += [w + s, abs(w - s)]
        return np.array(out_a), np.array(out_w), m

    def knots(self) -> np.ndarray:
        base = self.base.knots()
        centres = [0.0, self.shift]
        if self.kind is KernelKind.KISS_SHIFT:
            centres.append(self.shift - self.base.epsilon)
        pts = np.concatenate([np.abs(c + sgn * base) for c in centres for sgn in (1, -1)])
        return np.unique(pts)

    def numeric_transform(self, xis) -> np.ndarray:
        return cosine_transform(self.G, self.knots(), xis)


def _family(kind: KernelKind, base: BumpPair, shift: float, check: bool) -> KernelFamily:
    if not shift > 0:
        raise ValueError("shift must be positive")
    if check and kind is KernelKind.KISS_SHIFT and shift < base.epsilon:
        raise ValueError("kissing kernel needs systole >= epsilon")
    return KernelFamily(kind, base, float(shift))


def kiss_shift(base: BumpPair, systole: float, *, check: bool = True) -> KernelFamily:
    return _family(KernelKind.KISS_SHIFT, base, systole, check)


def cos_minus_one(base: BumpPair, L: float) -> KernelFamily:
    return _family(KernelKind.COS_MINUS_ONE, base, L, True)


def one_plus_cos(base: BumpPair, L: float) -> KernelFamily:
    return _family(KernelKind.ONE_PLUS_COS, base, L, True)


def eval_G(f: KernelFamily, x):
    return f.G(x)


def eval_H(f: KernelFamily, xi):
    return f.H(xi)


def _scan(name: str, margin: Callable, scale: Callable, lo: float, hi: float, n: int,
          slack: float = SLACK) -> dict:
    """Sample ``margin`` (which must stay >= 0) and refine near zero.

    The allowed undershoot at a point is ``slack * max(1, scale(x))``.
    Samples within ten times that of zero are refined by bounded
    minimisation between their grid neighbours.
    """
    x = np.linspace(lo, hi, n)
    vals = np.asarray(margin(x), dtype=float)
    allow = slack * np.maximum(1.0, np.asarray(scale(x), dtype=float))
    worst_i = int(np.argmin(vals / allow))
    result = {"check": name, "samples": n, "min_margin": float(vals.min()),
              "refined": 0, "violations": int(np.sum(vals < -allow))}
    witness = None
    if result["violations"]:
        witness = {"check": name, "x": float(x[worst_i]), "margin": float(vals[worst_i])}
    near = np.nonzero(vals < 10 * allow)[0]
    for i in near[:200]:
        a = x[max(i - 1, 0)]
        b = x[min(i + 1, n - 1)]
        if b <= a:
            continue
        opt = minimize_scalar(lambda t: float(margin(np.array([t]))[0]), bounds=(a, b),
                              method="bounded", options={"xatol": 1e-13 * max(1.0, abs(b))})
        result["refined"] += 1
        local_allow = slack * max(1.0, float(np.asarray(scale(np.array([opt.x])))[0]))
        if opt.fun < -local_allow:
            result["violations"] += 1
            if witness is None:
                witness = {"check": name, "x": float(opt.x), "margin": float(opt.fun)}
        result["min_margin"] = min(result["min_margin"], float(opt.fun))
    result["witness"] = witness
    return result


def verify_sign_conditions(f: KernelFamily, n_points: int = 10_000,
                           r_max: Optional[float] = None) -> CheckReport:
    """Sample every sign fact the family must satisfy.

    Grids: ``x in [shift, shift + 10 eps]``, real ``xi in [0, r_max]`` and
    ``t in [0, nu]`` on the imaginary axis, ``n_points`` samples each.
    """
    base = f.base
    eps, nu = base.epsilon, f.nu
    if r_max is None:
        r_max = 40 * math.pi / base.a
    coeffs, freqs = f.multiplier_terms()
    absmult = float(np.sum(np.abs(coeffs)))
    details = {"kind": f.kind.value, "n": base.n, "epsilon": eps, "shift": f.shift, "r_max": r_max}
    checks = []

    def h_real(r):
        return np.asarray(base.h(r), dtype=float)

    def h_imag(t):
        return np.real(base.h(1j * np.asarray(t)))

    def cosh_mag(t):
        return np.sum([abs(c) * np.cosh(w * np.asarray(t)) for c, w in zip(coeffs, freqs)], axis=0)

    real_scale = lambda r: absmult * np.abs(h_real(r))
    imag_scale = lambda t: cosh_mag(t) * np.abs(h_imag(t))
    g_scale = lambda x: absmult * base.g(0.0) + 0 * np.asarray(x)

    if f.kind is KernelKind.KISS_SHIFT:
        if f.shift < eps:
            return CheckReport("sign_conditions", False, details,
                               {"check": "precondition", "shift": f.shift, "epsilon": eps,
                                "message": "systole must be at least epsilon"})
        e = math.exp(nu * eps)
        checks.append(_scan("G<=0 beyond systole", lambda x: -f.G(x), g_scale,
                            f.shift, f.shift + 10 * eps, n_points))
        checks.append(_scan("H>=0 on reals", lambda r: f.H(r), real_scale, 0.0, r_max, n_points))
        checks.append(_scan("H>=0 on i[0,nu]", lambda t: np.real(f.H(1j * t)), imag_scale,
                            0.0, nu, n_points))
        checks.append(_scan("multiplier>=0 on reals", lambda r: f.multiplier(r),
                            lambda r: absmult + 0 * r, 0.0, r_max, n_points))
        checks.append(_scan("multiplier<=2(1+e^{nu eps})", lambda r: 2 * (1 + e) - f.multiplier(r),
                            lambda r: absmult + 0 * r, 0.0, r_max, n_points))
        R = f.shift
        checks.append(_scan("e^{nu eps}cosh((R-eps)t)>=cosh(Rt)",
                            lambda t: e * np.cosh((R - eps) * t) - np.cosh(R * t),
                            lambda t: e * np.cosh((R - eps) * t) + np.cosh(R * t), 0.0, nu, n_points))
        details["G_at_shift"] = f.G(f.shift)
        details["minus_half_g0"] = -base.g(0.0) / 2
    elif f.kind is KernelKind.COS_MINUS_ONE:
        checks.append(_scan("H<=0 on reals", lambda r: -f.H(r), real_scale, 0.0, r_max, n_points))
        checks.append(_scan("H>=-2h on reals", lambda r: f.H(r) + 2 * h_real(r), real_scale,
                            0.0, r_max, n_points))
        checks.append(_scan("G>=0 beyond epsilon", lambda x: f.G(x), g_scale,
                            eps, f.shift + 10 * eps, n_points))
    else:
        checks.append(_scan("H>=0 on reals", lambda r: f.H(r), real_scale, 0.0, r_max, n_points))
        checks.append(_scan("H>=0 on i[0,nu]", lambda t: np.real(f.H(1j * t)), imag_scale,
                            0.0, nu, n_points))
        checks.append(_scan("H<=2h on reals", lambda r: 2 * h_real(r) - f.H(r), real_scale,
                            0.0, r_max, n_points))
        span = f.shift + 2 * eps
        checks.append(_scan("G>=0", lambda x: f.G(x), g_scale, 0.0, span, n_points))
        checks.append(_scan("G<=2g(0)", lambda x: 2 * base.g(0.0) - f.G(x), g_scale,
                            0.0, span, n_points))

    details["checks"] = [{k: v for k, v in c.items() if k != "witness"} for c in checks]
    bad = [c for c in checks if c["violations"]]
    return CheckReport("sign_conditions", not bad, details, bad[0]["witness"] if bad else None)
