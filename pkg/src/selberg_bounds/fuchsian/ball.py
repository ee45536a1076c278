"""Breadth-first enumeration of group elements with exact-ish deduplication.

Elements are identified up to sign.  Keys are the sign-canonical entries
rounded on two grids offset by half a cell, so two floating-point copies of
one matrix always share at least one key while distinct elements of a
discrete group (whose entries differ by far more than a cell) never do.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .geometry2d import cosh_displacement, matmul4
from .group import FuchsianGroup, MobiusElement, free_reduce

__all__ = ["Ball", "enumerate_ball", "TorsionError", "element_keys", "KEY_CELL"]

KEY_CELL = 1e-6
TRACE_TORSION_TOL = 1e-8


class TorsionError(RuntimeError):
    """An enumerated element is elliptic or parabolic."""


def _canonical(m: np.ndarray) -> np.ndarray:
    lead_idx = np.argmax(np.abs(m) > 1e-9, axis=1)
    lead = m[np.arange(m.shape[0]), lead_idx]
    return np.where((lead < 0)[:, None], -m, m)


def element_keys(m: np.ndarray, cell: float = KEY_CELL):
    """Two void-typed key arrays (grids offset by half a cell)."""
    c = _canonical(m) / cell
    k1 = np.ascontiguousarray(np.floor(c).astype(np.int64)).view("V32").ravel()
    k2 = np.ascontiguousarray(np.floor(c + 0.5).astype(np.int64)).view("V32").ravel()
    return k1, k2


@dataclass
class Ball:
    """Result of a breadth-first enumeration.

    ``matrices[i]`` was reached from ``parent[i]`` by right multiplication
    with generator ``letters[gen[i]]``; the identity sits at index 0.
    """

    group: FuchsianGroup
    letters: list
    letter_words: list
    matrices: np.ndarray
    parent: np.ndarray
    gen: np.ndarray
    depth: np.ndarray
    complete: bool
    truncated_by: Optional[str]
    max_depth: int
    radius: Optional[float] = None
    trace_cap: Optional[float] = None
    _keys: Optional[tuple] = field(default=None, repr=False)

    def __len__(self) -> int:
        return int(self.matrices.shape[0])

    @property
    def traces(self) -> np.ndarray:
        return self.matrices[:, 0] + self.matrices[:, 3]

    def letter_path(self, i: int) -> list:
        out = []
        while i != 0:
            out.append(int(self.gen[i]))
            i = int(self.parent[i])
        return out[::-1]

    def word(self, i: int) -> tuple:
        w = []
        for li in self.letter_path(i):
            w.extend(self.letter_words[li])
        return free_reduce(w)

    def element(self, i: int) -> MobiusElement:
        return MobiusElement(self.matrices[i].reshape(2, 2), self.word(i))

    def elements(self, nontrivial: bool = True, trace_cap: Optional[float] = None) -> list:
        cap = self.trace_cap if trace_cap is None else trace_cap
        idx = range(1 if nontrivial else 0, len(self))
        if cap is not None:
            ok = np.abs(self.traces) <= cap
            idx = [i for i in idx if ok[i]]
        return [self.element(i) for i in idx]

    def keys(self):
        if self._keys is None:
            self._keys = element_keys(self.matrices)
        return self._keys

    def lookup(self, m: np.ndarray) -> np.ndarray:
        """Index of each query matrix in the ball, or -1."""
        k1, k2 = self.keys()
        q1, q2 = element_keys(np.atleast_2d(m))
        out = np.full(q1.shape[0], -1, dtype=np.int64)
        for ref, q in ((k1, q1), (k2, q2)):
            order = np.argsort(ref)
            sref = ref[order]
            pos = np.searchsorted(sref, q)
            pos = np.clip(pos, 0, sref.size - 1)
            hit = (sref[pos] == q) & (out < 0)
            out[hit] = order[pos[hit]]
        return out


def _letters_from_group(group: FuchsianGroup):
    letters, words = [], []
    for i in range(1, group.rank + 1):
        for s in (i, -i):
            letters.append(group.letter(s).ravel())
            words.append((s,))
    return letters, words


def _check_torsion(m: np.ndarray) -> None:
    tr = np.abs(m[:, 0] + m[:, 3])
    near_id = (np.abs(np.abs(m[:, 0]) - 1) < 1e-7) & (np.abs(m[:, 1]) < 1e-7) & \
              (np.abs(m[:, 2]) < 1e-7) & (np.abs(np.abs(m[:, 3]) - 1) < 1e-7)
    bad = (tr < 2 + TRACE_TORSION_TOL) & ~near_id
    if np.any(bad):
        i = int(np.argmax(bad))
        raise TorsionError(f"non-hyperbolic element with |trace| = {tr[i]:.12g}: {m[i].tolist()}")


def enumerate_ball(group: FuchsianGroup, max_word_length: int, trace_cap: Optional[float] = None,
                   *, element_cap: int = 5_000_000, radius: Optional[float] = None,
                   letters: Optional[Sequence[np.ndarray]] = None,
                   letter_words: Optional[Sequence[tuple]] = None,
                   basepoint: Optional[complex] = None) -> Ball:
    """All elements reachable by words of length ``<= max_word_length``.

    Deduplication keeps each isometry once, at its first depth.  With
    ``radius`` the search only expands elements moving ``basepoint`` by at
    most that distance (and only keeps those).  ``trace_cap`` filters what
    :meth:`Ball.elements` reports, not the search.  The identity is stored
    at index 0 but is never reported as an element.
    """
    if max_word_length < 1:
        raise ValueError("max_word_length must be at least 1")
    if letters is None:
        letters, letter_words = _letters_from_group(group)
    letters = np.asarray(letters, dtype=float).reshape(-1, 4)
    letter_words = list(letter_words)
    p = group.basepoint if basepoint is None else basepoint
    cosh_r = math.cosh(radius) if radius is not None else None

    mats = [np.array([[1.0, 0.0, 0.0, 1.0]])]
    parents = [np.array([-1])]
    gens = [np.array([-1])]
    depths = [np.array([0])]
    prev_keys = [element_keys(mats[0])]
    frontier = np.array([0])
    frontier_m = mats[0]
    total = 1
    complete = False
    truncated_by = None
    for d in range(1, max_word_length + 1):
        nl = letters.shape[0]
        cand = matmul4(np.repeat(frontier_m, nl, axis=0), np.tile(letters, (frontier_m.shape[0], 1)))
        par = np.repeat(frontier, nl)
        gen = np.tile(np.arange(nl), frontier_m.shape[0])
        if cosh_r is not None:
            keep = cosh_displacement(cand, p) <= cosh_r
            cand, par, gen = cand[keep], par[keep], gen[keep]
        if cand.shape[0] == 0:
            complete = True
            break
        k1, k2 = element_keys(cand)
        seen = np.zeros(cand.shape[0], dtype=bool)
        for o1, o2 in prev_keys[-2:]:
            seen |= np.isin(k1, o1) | np.isin(k2, o2)
        cand, par, gen, k1, k2 = cand[~seen], par[~seen], gen[~seen], k1[~seen], k2[~seen]
        _, first = np.unique(k1, return_index=True)
        first = np.sort(first)
        cand, par, gen, k1, k2 = cand[first], par[first], gen[first], k1[first], k2[first]
        _, first = np.unique(k2, return_index=True)
        first = np.sort(first)
        cand, par, gen, k1, k2 = cand[first], par[first], gen[first], k1[first], k2[first]
        if cand.shape[0] == 0:
            complete = True
            break
        _check_torsion(cand)
        if total + cand.shape[0] > element_cap:
            truncated_by = "element_cap"
            break
        idx = np.arange(total, total + cand.shape[0])
        mats.append(cand)
        parents.append(par)
        gens.append(gen)
        depths.append(np.full(cand.shape[0], d))
        prev_keys.append((k1, k2))
        total += cand.shape[0]
        frontier, frontier_m = idx, cand
    else:
        truncated_by = "depth"
    if truncated_by is None and not complete:
        truncated_by = "depth"
    return Ball(group, [l.copy() for l in letters], letter_words, np.concatenate(mats),
                np.concatenate(parents), np.concatenate(gens), np.concatenate(depths),
                complete, truncated_by if not complete else None, max_word_length,
                radius, trace_cap)
