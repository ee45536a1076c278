"""Explicit constants and bound evaluators.

Every evaluator returns a :class:`BoundReport` carrying the full constant
chain.  Each :class:`Constant` has an absolute error bar obtained by first
order propagation of the quadrature error estimates through the chain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.special import gamma

from .numerics import QuadResult, ball_volume, li_upper_envelope
from .plancherel import PlancherelDensity, spectral_integral, weighted_integral
from .transform_pairs import make_bump_pair

__all__ = [
    "Constant",
    "BoundReport",
    "ManifoldParams",
    "ExternalConstants",
    "MissingConstantError",
    "epsilon_n",
    "spectral_mass",
    "constant_A",
    "surface_kiss_constant",
    "surface_constants_report",
    "kiss_upper_bound",
    "corollary_constants",
    "corollary_volume_bound",
    "interval_constants_upper",
    "interval_count_upper",
    "cumulative_constant_upper",
    "cumulative_upper",
    "interval_constants_lower",
    "interval_count_lower",
    "cumulative_constants_lower",
    "cumulative_lower",
    "pgt_asymptotic",
    "thin_exponent",
    "SURFACE_EPSILON",
]

SURFACE_EPSILON = 2 * math.asinh(1.0)
DEFAULT_TOL = 1e-9


class MissingConstantError(ValueError):
    """An external constant needed by a bound is not configured."""


@dataclass(frozen=True)
class Constant:
    name: str
    value: float
    error: float = 0.0
    chain: dict = field(default_factory=dict)

    def __float__(self) -> float:
        return self.value

    @property
    def rel_error(self) -> float:
        return self.error / abs(self.value) if self.value else math.inf

    def to_dict(self) -> dict:
        out = {"value": self.value, "error": self.error}
        if self.chain:
            out["chain"] = self.chain
        return out


@dataclass
class BoundReport:
    name: str
    inputs: dict
    constants: dict
    values: dict
    verdicts: Optional[dict] = None
    notes: list = field(default_factory=list)

    @property
    def bound(self) -> float:
        return self.values["bound"]

    def to_dict(self) -> dict:
        out = {"name": self.name, "inputs": self.inputs,
               "constants": {k: v.to_dict() if isinstance(v, Constant) else v
                             for k, v in self.constants.items()},
               "values": self.values}
        if self.verdicts is not None:
            out["verdicts"] = self.verdicts
        if self.notes:
            out["notes"] = list(self.notes)
        return out


@dataclass(frozen=True)
class ManifoldParams:
    n: int
    vol: float
    sys: float
    delta: float = 0.5

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError("dimension must be an integer >= 2")
        for name in ("vol", "sys", "delta"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class ExternalConstants:
    """Dimension-indexed constants that are taken from the literature.

    ``W``: small-eigenvalue count per unit volume.  ``K``: tube-volume
    constant for short geodesics (n >= 3).  ``v``: volume lower bound.
    """

    W: dict = field(default_factory=dict)
    K: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        for label in ("W", "K", "v"):
            table = {int(k): float(x) for k, x in getattr(self, label).items() if x is not None}
            for k, x in table.items():
                if not x > 0:
                    raise ValueError(f"{label}_{k} must be positive")
            object.__setattr__(self, label, table)
        if not self.tol > 0:
            raise ValueError("tolerance must be positive")

    def get(self, label: str, n: int) -> float:
        table = getattr(self, label)
        if n not in table:
            raise MissingConstantError(f"{label}_{n} is not configured")
        return table[n]


def epsilon_n(n: int) -> float:
    return 4.0 ** (-(n + 3))


def thin_exponent(n: int) -> float:
    return ((n - 2) // 2) / ((n + 1) // 2)


def _prod_error(value: float, *parts: Constant) -> float:
    return abs(value) * sum(p.rel_error for p in parts if p.value)


# -------------------------------------------------------------- spectral pieces

@lru_cache(maxsize=256)
def _mass_cached(n: int, epsilon: float, tol: float) -> QuadResult:
    pair = make_bump_pair(n, epsilon)
    tiny = 1e-300
    return spectral_integral(PlancherelDensity(n), pair.h, tol=tiny, rtol=tol,
                             terms=pair.cosine_terms() if pair.m % 2 == 0 else None)


def spectral_mass(n: int, epsilon: float, tol: float = DEFAULT_TOL) -> Constant:
    """``int_0^inf h_eps(r) Phi_n(r) dr`` with relative accuracy ``tol``."""
    q = _mass_cached(int(n), float(epsilon), float(tol))
    return Constant("spectral_mass", q.value, q.error_estimate,
                    {"n": n, "epsilon": epsilon, "evaluations": q.evaluations})


def constant_A(n: int, tol: float = DEFAULT_TOL) -> Constant:
    """Kissing constant for systole at least ``4**-(n+3)``."""
    if int(n) != n or n < 2:
        raise ValueError("dimension must be an integer >= 2")
    eps = epsilon_n(n)
    pair = make_bump_pair(n, eps)
    mass = spectral_mass(n, eps, tol)
    g0 = pair.g(0.0)
    factor = 2 ** (n + 1) * (1 + math.exp(pair.nu * eps)) / g0
    value = factor * mass.value
    return Constant("A_n", value, factor * mass.error,
                    {"epsilon_n": eps, "g0": g0, "spectral_mass": mass.value,
                     "spectral_mass_error": mass.error, "prefactor": factor})


def surface_kiss_constant(epsilon: float = SURFACE_EPSILON, tol: float = DEFAULT_TOL,
                          variant: str = "tanh_pi_r") -> Constant:
    """Surface kissing constant ``2(1+e^{eps/2})/(pi g(0)) int h(r) r tanh(k r) dr``.

    ``variant`` picks ``k = pi`` (``"tanh_pi_r"``) or ``k = 1`` (``"tanh_r"``).
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    kappa = {"tanh_pi_r": math.pi, "tanh_r": 1.0}.get(variant)
    if kappa is None:
        raise ValueError(f"unknown variant {variant!r}")
    pair = make_bump_pair(2, epsilon)
    q = weighted_integral(pair.h, np.polynomial.Polynomial([0.0, 1.0]), kappa,
                          tol=1e-300, rtol=tol, terms=pair.cosine_terms())
    g0 = pair.g(0.0)
    factor = 2 * (1 + math.exp(epsilon / 2)) / (math.pi * g0)
    return Constant(f"C'_2[{variant}]", factor * q.value, factor * q.error_estimate,
                    {"epsilon": epsilon, "g0": g0, "integral": q.value, "variant": variant})


def surface_constants_report(epsilon: float = SURFACE_EPSILON, tol: float = DEFAULT_TOL,
                             reference: float = 10.1391) -> BoundReport:
    """Both tanh variants of the surface constant, with ``U = 2 pi C'``."""
    consts, values = {}, {}
    for variant in ("tanh_pi_r", "tanh_r"):
        c = surface_kiss_constant(epsilon, tol, variant)
        consts[f"C2_{variant}"] = c
        consts[f"U_{variant}"] = Constant(f"U[{variant}]", 2 * math.pi * c.value,
                                          2 * math.pi * c.error)
        values[f"deviation_from_reference_{variant}"] = c.value - reference
    match = min(("tanh_pi_r", "tanh_r"), key=lambda v: abs(values[f"deviation_from_reference_{v}"]))
    values["matching_variant"] = match
    values["C2"] = consts[f"C2_{match}"].value
    values["U"] = consts[f"U_{match}"].value
    notes = ["the general inequality carries tanh(pi r); the evaluated integral carries tanh(r)",
             f"only {match} reproduces the reference {reference}"]
    return BoundReport("surface_kiss_constant", {"epsilon": epsilon, "tol": tol}, consts,
                       values, notes=notes)


# -------------------------------------------------------------- kissing bound

def kiss_upper_bound(p: ManifoldParams, ext: ExternalConstants,
                     kiss: Optional[int] = None) -> BoundReport:
    """All applicable kissing-number bounds; the reported bound is their minimum."""
    n, vol, sys = p.n, p.vol, p.sys
    tol = ext.tol
    A = constant_A(n, tol)
    branches = {}
    errors = {}
    main = A.value * vol * math.exp((n - 1) * sys / 2) / sys
    branches["main"] = main
    errors["main"] = A.error * vol * math.exp((n - 1) * sys / 2) / sys
    constants = {"A_n": A}
    notes = []
    if n == 2 and sys <= SURFACE_EPSILON:
        branches["thin"] = 3 * vol / (2 * math.pi)
        errors["thin"] = 0.0
    elif n >= 3 and sys <= 4.0 ** (-(n + 2)):
        try:
            K = ext.get("K", n)
            branches["thin"] = 2 / K * vol * sys ** thin_exponent(n)
            errors["thin"] = 0.0
            constants["K_n"] = Constant("K_n", K)
        except MissingConstantError as exc:
            notes.append(f"thin branch applicable but unavailable: {exc}")
    if n == 2 and sys >= SURFACE_EPSILON:
        C2 = surface_kiss_constant(SURFACE_EPSILON, tol)
        constants["C2"] = C2
        branches["surface"] = C2.value * vol * math.sinh(sys / 2) / sys
        errors["surface"] = C2.error * vol * math.sinh(sys / 2) / sys
    best = min(branches, key=branches.get)
    values = {"bound": branches[best], "bound_error": errors[best], "branch": best,
              "branches": branches, "exponent": thin_exponent(n)}
    verdicts = None
    if kiss is not None:
        verdicts = {"kiss": kiss, "kiss_le_bound": bool(kiss <= branches[best]),
                    "per_branch": {k: bool(kiss <= v) for k, v in branches.items()}}
    return BoundReport("kiss_upper_bound", {"n": n, "vol": vol, "sys": sys}, constants,
                       values, verdicts, notes)


# ---------------------------------------------------------- volume corollary

def corollary_constants(n: int, ext: ExternalConstants) -> dict:
    """Constant chain giving ``kiss <= A'' vol**2 / log(1 + vol)``."""
    v = ext.get("v", n)
    A = constant_A(n, ext.tol)
    r_n = 1 / (n - 1)
    d_raw = math.pi ** (n / 2) / (gamma(n / 2) * (n - 1) * 2 ** (n - 1))
    # vol(B_r) e^{-(n-1) r} increases in r, so its value at r_n bounds it on [r_n, inf);
    # d_raw alone fails just above r_n
    d_ball = ball_volume(n, r_n) * math.exp(-1.0)
    d = min(v * (1 - 1e-9), d_raw, d_ball)
    # (1+x)^a <= x/d on [v, inf) needs a <= 1 as well
    a_n = min(math.log(v / d) / math.log1p(v), 1.0)
    eps = epsilon_n(n)
    if n == 2:
        thin = 3 / (2 * math.pi)
    else:
        thin = 2 / ext.get("K", n) * eps ** thin_exponent(n)
    nu = (n - 1) / 2
    # e^{nu s}/s is convex, so on [eps_n, 2 r_n] it peaks at an endpoint
    main = A.value * max(math.exp(nu * eps) / eps, math.exp(2 * nu * r_n) / (2 * r_n))
    b_n = max(thin, main)
    c_n = b_n * math.log1p(v) / v
    large = A.value * (n - 1) / (2 * a_n * d)
    A2 = max(c_n, large)
    # thin constants are exact; everything else scales linearly with A_n
    err = A2 * A.rel_error if (A2 == large or b_n == main) else 0.0
    return {"v_n": v, "r_n": r_n, "d_n_unclamped": d_raw, "d_n_ball": d_ball, "d_n": d, "a_n": a_n, "b_n": b_n,
            "c_n": c_n, "large_systole_constant": large, "A2": Constant("A''_n", A2, err),
            "A_n": A}


def corollary_volume_bound(n: int, vol: float, ext: ExternalConstants) -> BoundReport:
    v = ext.get("v", n)
    if vol < v:
        raise ValueError(f"volume {vol} is below the lower bound v_{n} = {v}")
    chain = corollary_constants(n, ext)
    A2 = chain.pop("A2")
    A = chain.pop("A_n")
    val = A2.value * vol ** 2 / math.log1p(vol)
    return BoundReport("corollary_volume_bound", {"n": n, "vol": vol},
                       {"A2": A2, "A_n": A, "chain": chain},
                       {"bound": val, "bound_error": A2.error * vol ** 2 / math.log1p(vol)})


# ---------------------------------------------------------- interval upper

def interval_constants_upper(n: int, delta: float, ext: ExternalConstants) -> dict:
    """Constant for the primitive count in ``[L - delta, L + delta]``."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    W = ext.get("W", n)
    eps = 2 * delta
    pair = make_bump_pair(n, eps)
    nu = pair.nu
    mu = pair.g(delta)
    K = float(np.real(pair.h(1j * nu)))
    mass = spectral_mass(n, eps, ext.tol)
    I = Constant("I", 2 * mass.value, 2 * mass.error)
    pref = 2 ** n * math.exp(3 * nu * delta) / (mu * delta)
    B = pref * (K * W + I.value)
    return {"epsilon": eps, "mu": mu, "K": K, "W_n": W, "I": I,
            "B": Constant("B", B, pref * I.error)}


def interval_count_upper(n: int, delta: float, vol: float, L: float,
                         ext: ExternalConstants) -> BoundReport:
    if not L > 0 or not vol > 0:
        raise ValueError("L and vol must be positive")
    c = interval_constants_upper(n, delta, ext)
    B = c["B"]
    shape = vol * math.exp((n - 1) * L) / L
    return BoundReport("interval_count_upper", {"n": n, "delta": delta, "vol": vol, "L": L},
                       c, {"bound": B.value * shape, "bound_error": B.error * shape},
                       notes=["requires systole >= 2 delta"])


# ---------------------------------------------------------- cumulative upper

def cumulative_constant_upper(n: int, delta: float, ext: ExternalConstants) -> dict:
    c = interval_constants_upper(n, delta, ext)
    B = c["B"]
    k = n - 1
    pieces = math.ceil(3 / (2 * delta))
    h = 3 / pieces
    centres = (np.arange(pieces) + 0.5) * h
    # each piece has half-width h/2 <= delta and is centred at c_i
    F = float(np.sum(B.value * np.exp(k * centres) / centres))
    F_err = F * B.rel_error
    short = F / (k * math.e)
    tail_factor = 1 / k + 1 / (3 * k ** 2) + 1 / (3 * k ** 3)
    long = B.value / delta * tail_factor
    Bp = short + long
    err = F_err / (k * math.e) + B.error / delta * tail_factor
    c.update({"pieces": pieces, "F": F, "short_part": short, "long_part": long,
              "B_prime": Constant("B'", Bp, err)})
    return c


def cumulative_upper(n: int, delta: float, vol: float, L: float, ext: ExternalConstants,
                     count: Optional[int] = None) -> BoundReport:
    if not L > 0 or not vol > 0:
        raise ValueError("L and vol must be positive")
    c = cumulative_constant_upper(n, delta, ext)
    Bp = c["B_prime"]
    shape = vol * math.exp((n - 1) * L) / L
    values = {"bound": Bp.value * shape, "bound_error": Bp.error * shape,
              "branch": "short" if L <= 3 else "long"}
    verdicts = None
    if count is not None:
        verdicts = {"count": count, "count_le_bound": bool(count <= values["bound"])}
    return BoundReport("cumulative_upper", {"n": n, "delta": delta, "vol": vol, "L": L}, c,
                       values, verdicts, ["requires systole >= 2 delta"])


# ---------------------------------------------------------- interval lower

def interval_constants_lower(n: int, delta: float, ext: ExternalConstants) -> dict:
    if not delta > 0:
        raise ValueError("delta must be positive")
    pair = make_bump_pair(n, delta)
    nu = pair.nu
    g0 = pair.g(0.0)
    h_root = float(np.real(pair.h(1j * nu)))
    mass = spectral_mass(n, delta, ext.tol)
    I = Constant("I", 2 * mass.value, 2 * mass.error)
    pref = (1 - math.exp(-delta)) ** (2 * nu) / (g0 * math.exp(nu * delta))
    up = cumulative_constant_upper(n, delta, ext)
    Bp = up["B_prime"]
    C = pref * h_root / 2
    corr = 4 * math.exp(nu * delta) * Bp.value
    D = pref * I.value + corr
    D_err = pref * I.error + 4 * math.exp(nu * delta) * Bp.error
    return {"g0": g0, "h_at_i_nu": h_root, "prefactor": pref, "I": I, "B_prime": Bp,
            "nonprimitive_correction": corr, "C": Constant("C", C), "D": Constant("D", D, D_err)}


def _crossover(C: float, D: float, vol: float, nu: float) -> float:
    """Smallest ``L`` with ``C e^{2 nu L} >= D vol e^{nu L}``."""
    return max(0.0, math.log(D * vol / C) / nu)


def interval_count_lower(n: int, delta: float, vol: float, L: float,
                         ext: ExternalConstants) -> BoundReport:
    if L < delta:
        raise ValueError("the interval lower bound needs L >= delta")
    if not vol > 0:
        raise ValueError("vol must be positive")
    c = interval_constants_lower(n, delta, ext)
    nu = (n - 1) / 2
    C, D = c["C"], c["D"]
    val = (C.value * math.exp(2 * nu * L) - D.value * vol * math.exp(nu * L)) / L
    err = D.error * vol * math.exp(nu * L) / L
    values = {"bound": val, "bound_error": err, "vacuous": val <= 0,
              "crossover_L": _crossover(C.value, D.value, vol, nu)}
    return BoundReport("interval_count_lower", {"n": n, "delta": delta, "vol": vol, "L": L}, c,
                       values, notes=["requires systole >= delta"])


# ---------------------------------------------------------- cumulative lower

def cumulative_constants_lower(n: int, delta: float, ext: ExternalConstants) -> dict:
    if delta > 6:
        raise ValueError("the cumulative lower bound needs delta <= 6")
    v = ext.get("v", n)
    c = interval_constants_lower(n, delta, ext)
    C, D = c["C"], c["D"]
    k = n - 1
    nu = k / 2
    Cp = C.value / (2 * delta * k)
    # li(e^{6k}) is a constant; spread it over vol e^{nu L}/L >= v e^{6 nu}/6
    head = C.value * li_upper_envelope(math.exp(6 * k)) * 6 / (2 * delta * v * math.exp(6 * nu))
    tail = D.value / (2 * delta) * (1 / nu + 1 / (6 * nu ** 2) + 1 / (12 * nu ** 3))
    tail_err = D.error / (2 * delta) * (1 / nu + 1 / (6 * nu ** 2) + 1 / (12 * nu ** 3))
    # below L = 6 the bound must be vacuous
    short = Cp * math.exp(6 * nu) / v
    Dp = max(head + tail, short)
    c.update({"v_n": v, "head_term": head, "tail_term": tail, "short_range_term": short,
              "C_prime": Constant("C'", Cp), "D_prime": Constant("D'", Dp,
                                                                tail_err if Dp != short else 0.0)})
    return c


def cumulative_lower(n: int, delta: float, vol: float, L: float, ext: ExternalConstants,
                     count: Optional[int] = None) -> BoundReport:
    if not L > 0 or not vol > 0:
        raise ValueError("L and vol must be positive")
    c = cumulative_constants_lower(n, delta, ext)
    nu = (n - 1) / 2
    Cp, Dp = c["C_prime"], c["D_prime"]
    val = (Cp.value * math.exp(2 * nu * L) - Dp.value * vol * math.exp(nu * L)) / L
    err = Dp.error * vol * math.exp(nu * L) / L
    values = {"bound": val, "bound_error": err, "vacuous": val <= 0,
              "crossover_L": _crossover(Cp.value, Dp.value, vol, nu)}
    verdicts = None
    if count is not None:
        verdicts = {"count": count, "count_ge_bound": bool(val <= 0 or count >= val)}
    return BoundReport("cumulative_lower", {"n": n, "delta": delta, "vol": vol, "L": L}, c,
                       values, verdicts, ["requires systole >= 2 delta"])


def pgt_asymptotic(n: int, L: float) -> float:
    if not L > 0:
        raise ValueError("L must be positive")
    return math.exp((n - 1) * L) / ((n - 1) * L)
