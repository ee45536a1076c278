"""Special functions and adaptive quadrature shared by the other modules.

The integrator is a vectorised global-adaptive Gauss-Kronrod (7/15) rule.
Semi-infinite integrals are split into a head ``[0, T]`` handled adaptively
and a tail that is either bounded through a power-law envelope supplied by
the caller or evaluated by a caller-provided analytic routine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np

__all__ = [
    "QuadResult",
    "QuadratureError",
    "integrate",
    "integrate_semi_infinite",
    "log_integral",
    "li_standard",
    "li2_constant",
    "li_sandwich",
    "double_factorial",
    "bspline_eval",
    "ball_volume",
    "ball_volume_lower_bound",
]

# QUADPACK qk15 abscissae and weights.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# 15 nodes on [-1, 1]: mirrored pairs followed by the centre.
_NODES = np.concatenate([-_XGK[:-1], _XGK[:-1][::-1], [0.0]])
_K_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[:-1][::-1], [_WGK[-1]]])
_G_WEIGHTS = np.zeros(15)
for _i, _w in zip((1, 3, 5), _WG[:3]):
    _G_WEIGHTS[_i] = _w
    _G_WEIGHTS[13 - _i] = _w
_G_WEIGHTS[14] = _WG[3]

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class QuadResult:
    value: float
    error_estimate: float
    evaluations: int

    def __post_init__(self):
        if not self.error_estimate >= 0:
            raise ValueError("error_estimate must be non-negative")
        if self.evaluations < 1:
            raise ValueError("evaluations must be positive")

    def __float__(self) -> float:
        return float(self.value)


class QuadratureError(RuntimeError):
    """Raised when the evaluation budget runs out before the target is met."""

    def __init__(self, message: str, value: float, error_estimate: float, evaluations: int):
        super().__init__(f"{message} (best value {value!r}, error estimate {error_estimate:.3g}, "
                         f"{evaluations} evaluations)")
        self.value = value
        self.error_estimate = error_estimate
        self.evaluations = evaluations


def _gk_panels(f, lo: np.ndarray, hi: np.ndarray):
    centre = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = centre[:, None] + half[:, None] * _NODES[None, :]
    fx = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape)
    kron = half * (fx @ _K_WEIGHTS)
    gauss = half * (fx @ _G_WEIGHTS)
    resabs = half * (np.abs(fx) @ _K_WEIGHTS)
    return kron, np.abs(kron - gauss), resabs


def _adaptive(f, breakpoints: np.ndarray, tol: float, rtol: float, max_evals: int) -> QuadResult:
    lo = breakpoints[:-1].astype(float)
    hi = breakpoints[1:].astype(float)
    val, err, resabs = _gk_panels(f, lo, hi)
    evals = 15 * lo.size
    while True:
        total = float(val.sum())
        errsum = float(err.sum())
        # roundoff floor: no panel rule can beat a few ulps of the absolute mass
        floor = 50.0 * _EPS * float(resabs.sum())
        target = max(tol, rtol * abs(total), floor)
        if errsum <= target:
            return QuadResult(float(total), float(errsum), evals)
        if evals >= max_evals:
            raise QuadratureError("adaptive quadrature did not converge", total, errsum, evals)
        order = np.argsort(err)[::-1]
        excess = errsum - 0.5 * target
        cut = int(np.searchsorted(np.cumsum(err[order]), excess)) + 1
        pick = order[:max(cut, 1)]
        mid = 0.5 * (lo[pick] + hi[pick])
        width_ok = (hi[pick] - lo[pick]) > 4 * _EPS * np.maximum(np.abs(mid), 1e-300)
        pick, mid = pick[width_ok], mid[width_ok]
        if pick.size == 0:
            # panels cannot be split further; the estimate is as good as it gets
            return QuadResult(float(total), float(errsum), evals)
        new_lo = np.concatenate([lo[pick], mid])
        new_hi = np.concatenate([mid, hi[pick]])
        nv, ne, nr = _gk_panels(f, new_lo, new_hi)
        evals += 15 * new_lo.size
        keep = np.ones(lo.size, dtype=bool)
        keep[pick] = False
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        val = np.concatenate([val[keep], nv])
        err = np.concatenate([err[keep], ne])
        resabs = np.concatenate([resabs[keep], nr])


def _panel_grid(a: float, b: float, panel_width: Optional[float], scale: float,
                max_panels: int = 200_000) -> np.ndarray:
    """Initial breakpoints: geometric from ``a + scale`` outward, refined to ``panel_width``."""
    pts = [a]
    if b - a > 2 * scale:
        x = scale
        while a + x < b:
            pts.append(a + x)
            x *= 2.0
    pts.append(b)
    pts = np.array(pts)
    if panel_width is not None and panel_width > 0:
        refined = [pts[:1]]
        for lo, hi in zip(pts[:-1], pts[1:]):
            k = max(1, int(math.ceil((hi - lo) / panel_width)))
            refined.append(np.linspace(lo, hi, k + 1)[1:])
        pts = np.concatenate(refined)
        if pts.size > max_panels:
            pts = np.linspace(a, b, max_panels + 1)
    return pts


def integrate(f: Callable, a: float, b: float, tol: float = 1e-9, *, rtol: float = 0.0,
              breakpoints: Optional[Sequence[float]] = None, panel_width: Optional[float] = None,
              scale: float = 1.0, max_evals: int = 20_000_000) -> QuadResult:
    """Adaptive integral of a vectorised ``f`` over ``[a, b]``.

    Stops once the summed Gauss-Kronrod error estimate is below
    ``max(tol, rtol * |value|)``.
    """
    if not b > a:
        if a == b:
            return QuadResult(0.0, 0.0, 1)
        raise ValueError("integration limits must satisfy a <= b")
    if breakpoints is not None:
        pts = np.unique(np.clip(np.concatenate([[a, b], np.asarray(breakpoints, float)]), a, b))
    else:
        pts = _panel_grid(a, b, panel_width, scale)
    return _adaptive(f, pts, tol, rtol, max_evals)


def integrate_semi_infinite(f: Callable, tol: float = 1e-9, *,
                            envelope: Optional[tuple] = None,
                            tail: Optional[Callable[[float], tuple]] = None,
                            cutoff: Optional[float] = None,
                            rtol: float = 0.0,
                            panel_width: Optional[float] = None,
                            scale: float = 1.0,
                            max_evals: int = 20_000_000) -> QuadResult:
    """Integral of ``f`` over ``[0, inf)``.

    Exactly one tail strategy is used:

    * ``envelope=(c, p)`` or ``(c, p, r0)`` asserts ``|f(r)| <= c r**-p`` for
      ``r >= r0`` with ``p > 1``.  The cutoff ``T`` is chosen so that the tail
      bound ``c T**(1-p) / (p-1)`` is below half the error target and the
      bound is added to the error estimate.  Panels are capped at
      ``panel_width`` (default 1) so that oscillatory integrands are not
      aliased by wide panels; pass a smaller width for faster oscillation.
    * ``tail(T) -> (value, error)`` evaluates the tail analytically beyond
      ``cutoff``.
    """
    if tail is not None:
        if cutoff is None:
            raise ValueError("an analytic tail needs an explicit cutoff")
        head = integrate(f, 0.0, cutoff, tol / 2, rtol=rtol / 2, panel_width=panel_width,
                         scale=scale, max_evals=max_evals)
        tval, terr = tail(cutoff)
        return QuadResult(head.value + tval, head.error_estimate + terr, head.evaluations)
    if envelope is None:
        raise ValueError("either an envelope or an analytic tail is required")
    c, p = float(envelope[0]), float(envelope[1])
    r0 = float(envelope[2]) if len(envelope) > 2 else 1.0
    if not p > 1:
        raise ValueError("envelope exponent must exceed 1 for a finite tail")
    if c == 0:
        return QuadResult(0.0, 0.0, 1)
    if panel_width is None:
        panel_width = 1.0

    def cutoff_for(target):
        return max(r0, (c / ((p - 1) * target)) ** (1.0 / (p - 1)))

    t1 = cutoff_for(max(tol, 1e-300) / 2) if rtol == 0 else max(r0, 10.0 * scale)
    first = integrate(f, 0.0, t1, tol / 2, rtol=rtol / 2, panel_width=panel_width, scale=scale,
                      max_evals=max_evals)
    value, err, evals = first.value, first.error_estimate, first.evaluations
    target = max(tol, rtol * abs(value))
    T = cutoff_for(target / 2)
    if T > t1:
        more = integrate(f, t1, T, target / 4, rtol=rtol / 4, panel_width=panel_width,
                         scale=max(scale, t1), max_evals=max_evals)
        value += more.value
        err += more.error_estimate
        evals += more.evaluations
    bound = c * T ** (1 - p) / (p - 1)
    return QuadResult(value, err + bound, evals)


# ---------------------------------------------------------------- log integral

def _inv_log(u):
    return 1.0 / np.log(u)


def _li2_integrand(u):
    u = np.asarray(u, dtype=float)
    t = u - 1.0
    out = np.empty_like(u)
    near = np.abs(t) < 1e-3
    far = ~near
    with np.errstate(divide="ignore"):
        out[far] = np.where(u[far] == 0.0, 1.0, 1.0 / np.log(u[far]) - 1.0 / t[far])
    tn = t[near]
    # series of 1/log(1+t) - 1/t
    out[near] = 0.5 - tn / 12 + tn ** 2 / 24 - 19 * tn ** 3 / 720
    return out


@lru_cache(maxsize=None)
def li2_constant() -> QuadResult:
    """Principal-value ``li(2)``.

    PV of ``1/(u-1)`` over ``[0, 2]`` vanishes, so
    ``li(2) = int_0^2 (1/log u - 1/(u-1)) du`` with a regular integrand.
    """
    return integrate(_li2_integrand, 0.0, 2.0, 1e-14, breakpoints=[0.5, 1.0, 1.5])


def log_integral(x: float) -> float:
    """``int_2^x du / log u`` (lower limit 2)."""
    if not x > 1:
        raise ValueError("log_integral is only defined here for x > 1")
    if x == 2:
        return 0.0
    a, b = (2.0, float(x)) if x > 2 else (float(x), 2.0)
    res = integrate(_inv_log, a, b, 0.0, rtol=1e-13, scale=1.0)
    return res.value if x > 2 else -res.value


def li_standard(x: float) -> float:
    """Principal-value logarithmic integral from 0."""
    return log_integral(x) + li2_constant().value


def li_sandwich(xs: Sequence[float]) -> list[dict]:
    """Check ``x/L + x/L^2 <= li(x) <= x/L + x/L^2 + 3x/L^3`` (``L = log x``).

    The check runs under both normalisations; ``holds_standard`` is the one
    that the counting corollaries rely on.
    """
    c = li2_constant().value
    rows = []
    for x in xs:
        lx = math.log(x)
        lower = x / lx + x / lx ** 2
        upper = lower + 3 * x / lx ** 3
        off = log_integral(x)
        std = off + c
        rows.append({
            "x": float(x),
            "lower": lower,
            "upper": upper,
            "li_offset2": off,
            "li_standard": std,
            "holds_offset2": bool(lower <= off <= upper),
            "holds_standard": bool(lower <= std <= upper),
        })
    return rows


def li_upper_envelope(x: float) -> float:
    lx = math.log(x)
    return x / lx + x / lx ** 2 + 3 * x / lx ** 3


def li_lower_envelope(x: float) -> float:
    lx = math.log(x)
    return x / lx + x / lx ** 2


# ---------------------------------------------------------------- misc

def double_factorial(j: int) -> int:
    if j < 0:
        raise ValueError("double factorial needs j >= 0")
    return math.prod(range(j, 0, -2))


def bspline_eval(m: int, a: float, x):
    """m-fold self-convolution of the indicator of ``[-a, a]``.

    Truncated-power form evaluated at ``-|x|`` so that only the leftmost
    knots contribute near the support edge.  Exactly zero for ``|x| >= m a``.
    """
    if m < 1 or not a > 0:
        raise ValueError("need m >= 1 and a > 0")
    x = np.asarray(x, dtype=float)
    y = -np.abs(x)
    out = np.zeros_like(y)
    fact = math.factorial(m - 1)
    for k in range(m + 1):
        shift = (m - 2 * k) * a
        if shift <= 0:
            break
        t = y + shift
        mask = t > 0
        term = np.where(mask, np.where(mask, t, 0.0) ** (m - 1), 0.0)
        out += (-1) ** k * math.comb(m, k) * term
    out /= fact
    out[np.abs(x) >= m * a] = 0.0
    return out if out.ndim else float(out)


def ball_volume(n: int, r: float) -> float:
    """Volume of a radius-``r`` ball in hyperbolic ``n``-space."""
    if n < 2 or not r > 0:
        raise ValueError("need n >= 2 and r > 0")
    if n == 2:
        return 2 * math.pi * (math.cosh(r) - 1)
    if n == 3:
        return math.pi * (math.sinh(2 * r) - 2 * r)
    sphere = 2 * math.pi ** (n / 2) / math.gamma(n / 2)
    res = integrate(lambda x: np.sinh(x) ** (n - 1), 0.0, r, 0.0, rtol=1e-13)
    return sphere * res.value


def ball_volume_lower_bound(n: int, r: float) -> float:
    """``pi^(n/2)/Gamma(n/2) * e^((n-1) r) / ((n-1) 2^(n-1))``.

    This is below :func:`ball_volume` only for ``r`` past a threshold between
    1.09 and 1.33 when ``n <= 8`` (1.2279 for ``n = 2``); it is not a lower
    bound on all of ``r > 1/(n-1)``.
    """
    return math.pi ** (n / 2) / math.gamma(n / 2) * math.exp((n - 1) * r) / ((n - 1) * 2 ** (n - 1))
