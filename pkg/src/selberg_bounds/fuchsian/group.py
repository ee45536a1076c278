"""Fuchsian groups given by generator matrices in SL(2, R).

Words are tuples of signed 1-based generator indices: ``2`` is the second
generator and ``-2`` its inverse.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

__all__ = [
    "GroupSpec",
    "FuchsianGroup",
    "MobiusElement",
    "GroupError",
    "load_group",
    "free_reduce",
    "cyclic_reduce",
    "invert_word",
    "evaluate_word",
    "translation_length",
    "trace_of_length",
    "DET_TOL",
]

DET_TOL = 1e-3
ELEMENT_DET_TOL = 1e-10
RELATOR_TOL = 1e-8


class GroupError(ValueError):
    """Invalid group data (bad determinant, elliptic generator, failed relator)."""


def free_reduce(word: Sequence[int]) -> tuple:
    out: list[int] = []
    for letter in word:
        if letter == 0:
            raise ValueError("generator indices are 1-based; 0 is not a letter")
        if out and out[-1] == -letter:
            out.pop()
        else:
            out.append(int(letter))
    return tuple(out)


def cyclic_reduce(word: Sequence[int]) -> tuple:
    w = list(free_reduce(word))
    while len(w) >= 2 and w[0] == -w[-1]:
        w = w[1:-1]
    return tuple(w)


def invert_word(word: Sequence[int]) -> tuple:
    return tuple(-x for x in reversed(word))


def translation_length(trace: float) -> float:
    """``2 arccosh(|tr| / 2)`` for a hyperbolic element."""
    t = abs(trace)
    if t <= 2:
        raise ValueError("translation length needs |trace| > 2")
    return 2.0 * math.acosh(t / 2.0)


def trace_of_length(length: float) -> float:
    return 2.0 * math.cosh(length / 2.0)


@dataclass(frozen=True)
class MobiusElement:
    matrix: np.ndarray
    word: tuple = ()

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float).reshape(2, 2)
        if abs(np.linalg.det(m) - 1) > ELEMENT_DET_TOL * max(1.0, float(np.abs(m).max()) ** 2):
            raise GroupError(f"determinant {np.linalg.det(m)} is not 1")
        if free_reduce(self.word) != tuple(self.word):
            raise ValueError("word must be freely reduced")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "word", tuple(int(x) for x in self.word))

    @property
    def trace(self) -> float:
        return float(self.matrix[0, 0] + self.matrix[1, 1])

    @property
    def length(self) -> float:
        return translation_length(self.trace)

    @property
    def key(self) -> tuple:
        """Sign-canonical rounded entries; equal keys mean the same isometry."""
        flat = self.matrix.ravel()
        lead = flat[int(np.argmax(np.abs(flat) > 1e-9))]
        m = -flat if lead < 0 else flat
        return tuple(float(x) for x in np.round(m, 7) + 0.0)

    def __eq__(self, other):
        if not isinstance(other, MobiusElement):
            return NotImplemented
        return self.key == other.key

    def __hash__(self):
        return hash(self.key)


@dataclass
class GroupSpec:
    """Raw group description as read from configuration."""

    label: str
    generators: list
    volume: Optional[float] = None
    relators: list = field(default_factory=list)
    basepoint: Optional[complex] = None
    note: str = ""

    @classmethod
    def from_dict(cls, label: str, data: dict) -> "GroupSpec":
        gens = [np.asarray(g, dtype=float).reshape(2, 2) for g in data["generators"]]
        bp = data.get("basepoint")
        if bp is not None:
            bp = complex(bp[0], bp[1])
        return cls(label, gens, data.get("volume"), [tuple(r) for r in data.get("relators", [])],
                   bp, data.get("note", ""))


@dataclass(frozen=True)
class FuchsianGroup:
    label: str
    generators: tuple
    inverses: tuple
    volume: Optional[float]
    relators: tuple
    basepoint: complex

    @property
    def rank(self) -> int:
        return len(self.generators)

    def letter(self, x: int) -> np.ndarray:
        return self.generators[x - 1] if x > 0 else self.inverses[-x - 1]

    def evaluate(self, word: Sequence[int]) -> np.ndarray:
        return evaluate_word(self, word)

    def element(self, word: Sequence[int]) -> MobiusElement:
        w = free_reduce(word)
        return MobiusElement(self.evaluate(w), w)


def evaluate_word(group: FuchsianGroup, word: Sequence[int]) -> np.ndarray:
    m = np.eye(2)
    for x in word:
        m = m @ group.letter(x)
    return m


# A point of the upper half-plane with no special symmetry; Dirichlet
# domains centred here have no sides lying on closed geodesics.
DEFAULT_BASEPOINT = complex(0.0731, 1.0419)


def load_group(gs: GroupSpec) -> FuchsianGroup:
    """Validate, normalise to determinant one, and precompute inverses."""
    if not gs.generators:
        raise GroupError(f"group {gs.label!r} has no generators")
    gens, invs = [], []
    for i, g in enumerate(gs.generators, start=1):
        g = np.asarray(g, dtype=float).reshape(2, 2)
        det = float(np.linalg.det(g))
        if not abs(det - 1) <= DET_TOL:
            raise GroupError(f"generator {i} has determinant {det}")
        g = g / math.sqrt(det)
        tr = abs(g[0, 0] + g[1, 1])
        if np.allclose(g, np.eye(2), atol=1e-12) or np.allclose(g, -np.eye(2), atol=1e-12):
            raise GroupError(f"generator {i} is the identity")
        if tr <= 2:
            raise GroupError(f"generator {i} is not hyperbolic (|trace| = {tr:.12g} <= 2)")
        gens.append(g)
        invs.append(np.array([[g[1, 1], -g[0, 1]], [-g[1, 0], g[0, 0]]]))
    group = FuchsianGroup(gs.label, tuple(gens), tuple(invs), gs.volume,
                          tuple(tuple(r) for r in gs.relators),
                          gs.basepoint if gs.basepoint is not None else DEFAULT_BASEPOINT)
    for r in group.relators:
        if any(abs(x) > group.rank or x == 0 for x in r):
            raise GroupError(f"relator {r} uses an unknown generator")
        m = group.evaluate(r)
        if not (np.allclose(m, np.eye(2), atol=RELATOR_TOL)
                or np.allclose(m, -np.eye(2), atol=RELATOR_TOL)):
            raise GroupError(f"relator {r} does not evaluate to +-identity")
    if group.basepoint.imag <= 0:
        raise GroupError("basepoint must lie in the upper half-plane")
    return group
