"""Vectorised hyperbolic-plane helpers.

Matrices are stored as ``(N, 4)`` float arrays of row-major ``(a, b, c, d)``.
Points of the upper half-plane are complex numbers.  The disk picture is
always the Poincare disk centred at a chosen basepoint ``p`` (``p -> 0``);
the Klein picture uses the same centring.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "act",
    "matmul4",
    "inverse4",
    "cosh_displacement",
    "to_disk_point",
    "disk_to_klein",
    "klein_to_disk",
    "klein_to_hyperboloid",
    "hyperboloid_distance",
    "axis_endpoints",
    "disk_act",
]


def matmul4(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    a1, b1, c1, d1 = x[..., 0], x[..., 1], x[..., 2], x[..., 3]
    a2, b2, c2, d2 = y[..., 0], y[..., 1], y[..., 2], y[..., 3]
    return np.stack([a1 * a2 + b1 * c2, a1 * b2 + b1 * d2,
                     c1 * a2 + d1 * c2, c1 * b2 + d1 * d2], axis=-1)


def inverse4(x: np.ndarray) -> np.ndarray:
    return np.stack([x[..., 3], -x[..., 1], -x[..., 2], x[..., 0]], axis=-1)


def act(m: np.ndarray, z) -> np.ndarray:
    """Mobius action on upper half-plane points."""
    a, b, c, d = m[..., 0], m[..., 1], m[..., 2], m[..., 3]
    return (a * z + b) / (c * z + d)


def cosh_displacement(m: np.ndarray, p: complex) -> np.ndarray:
    q = act(m, p)
    return 1.0 + np.abs(q - p) ** 2 / (2.0 * p.imag * q.imag)


def to_disk_point(z, p: complex):
    return (z - p) / (z - np.conj(p))


def disk_to_klein(w):
    w = np.asarray(w)
    return 2 * w / (1 + np.abs(w) ** 2)


def klein_to_disk(k):
    k = np.asarray(k)
    r2 = np.clip(np.abs(k) ** 2, 0.0, 1.0)
    return k / (1 + np.sqrt(1 - r2))


def klein_to_hyperboloid(k) -> np.ndarray:
    """Klein points (complex) to hyperboloid vectors ``(x0, x1, x2)``."""
    k = np.asarray(k, dtype=complex)
    s = 1.0 / np.sqrt(1.0 - np.abs(k) ** 2)
    return np.stack([s, s * k.real, s * k.imag], axis=-1)


def minkowski(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return -x[..., 0] * y[..., 0] + x[..., 1] * y[..., 1] + x[..., 2] * y[..., 2]


def hyperboloid_distance(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.arccosh(np.maximum(-minkowski(x, y), 1.0))


def _disk_coefficients(m: np.ndarray, p: complex):
    """``(alpha, beta)`` of the disk form ``[[alpha, beta], [conj beta, conj alpha]]``.

    Normalised so that ``Re alpha >= 0``.
    """
    a, b, c, d = m[..., 0], m[..., 1], m[..., 2], m[..., 3]
    pc = np.conj(p)
    # T = [[1, -p], [1, -pc]] maps p to 0; G = T g T^-1, det T = p - pc
    det_t = p - pc
    alpha = ((-pc) * a - b + p * c * pc + p * d) / det_t
    beta = (p * a + b - p * (p * c + d)) / det_t
    flip = alpha.real < 0
    alpha = np.where(flip, -alpha, alpha)
    beta = np.where(flip, -beta, beta)
    return alpha, beta


def disk_act(m: np.ndarray, w, p: complex):
    alpha, beta = _disk_coefficients(m, p)
    return (alpha * w + beta) / (np.conj(beta) * w + np.conj(alpha))


def axis_endpoints(m: np.ndarray, p: complex):
    """Repelling and attracting fixed points on the unit circle (disk centred at ``p``)."""
    alpha, beta = _disk_coefficients(m, p)
    s = np.sqrt(np.maximum(alpha.real ** 2 - 1.0, 0.0))
    bc = np.conj(beta)
    repel = (1j * alpha.imag - s) / bc
    attract = (1j * alpha.imag + s) / bc
    return repel / np.abs(repel), attract / np.abs(attract)
