"""Holonomy factor of a closed geodesic and its two-sided determinant bound."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .reports import CheckReport

__all__ = [
    "HolonomySample",
    "holonomy_factor",
    "holonomy_bounds_check",
    "norm_of_length",
    "random_orthogonal",
]

_ORTHO_TOL = 1e-10


@dataclass(frozen=True)
class HolonomySample:
    n: int
    length: float
    rotation: np.ndarray

    def __post_init__(self):
        rot = np.atleast_2d(np.asarray(self.rotation, dtype=float))
        object.__setattr__(self, "rotation", rot)
        if rot.shape != (self.n - 1, self.n - 1):
            raise ValueError(f"rotation must be {(self.n - 1, self.n - 1)}, got {rot.shape}")
        if not self.length > 0:
            raise ValueError("length must be positive")
        if np.max(np.abs(rot.T @ rot - np.eye(self.n - 1))) > _ORTHO_TOL:
            raise ValueError("rotation is not orthogonal")


def norm_of_length(l: float) -> float:
    if not l > 0:
        raise ValueError("length must be positive")
    return math.exp(l)


def holonomy_factor(s: HolonomySample) -> float:
    """``|det(I - N^-1 P^-1)|`` with ``N = e^length``."""
    k = s.n - 1
    return float(abs(np.linalg.det(np.eye(k) - math.exp(-s.length) * s.rotation.T)))


def random_orthogonal(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed element of O(dim), improper ones included."""
    z = rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    return q * np.sign(np.diag(r))


def holonomy_bounds_check(n: int, trials: int, seed: int = 0, slack: float = 1e-10,
                          vectors: int = 0) -> CheckReport:
    """Random holonomies against ``(1-1/N)^(n-1) <= D <= (1+1/N)^(n-1) < 2^(n-1)``.

    With ``vectors > 0`` the per-vector norm bounds of ``I - N^-1 P^-1``
    are also sampled on that many random vectors per trial.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    rng = np.random.default_rng(seed)
    k = n - 1
    worst_lo = worst_hi = math.inf
    for i in range(trials):
        P = random_orthogonal(k, rng)
        length = rng.uniform(0.01, 10.0)
        inv_norm = math.exp(-length)
        D = holonomy_factor(HolonomySample(n, length, P))
        lo, hi = (1 - inv_norm) ** k, (1 + inv_norm) ** k
        worst_lo = min(worst_lo, D - lo)
        worst_hi = min(worst_hi, hi - D)
        ok = lo - slack <= D <= hi + slack and hi < 2 ** k
        if ok and vectors:
            A = np.eye(k) - inv_norm * P.T
            v = rng.standard_normal((k, vectors))
            ratio = np.linalg.norm(A @ v, axis=0) / np.linalg.norm(v, axis=0)
            ok = bool(np.all(ratio >= 1 - inv_norm - slack) and np.all(ratio <= 1 + inv_norm + slack))
        if not ok:
            return CheckReport("holonomy_bounds", False,
                               {"n": n, "trials_run": i + 1, "seed": seed},
                               {"length": length, "D": D, "lower": lo, "upper": hi,
                                "rotation": P.tolist()})
    return CheckReport("holonomy_bounds", True,
                       {"n": n, "trials": trials, "seed": seed,
                        "min_lower_margin": worst_lo, "min_upper_margin": worst_hi})
