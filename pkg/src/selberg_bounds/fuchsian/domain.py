"""Dirichlet fundamental polygon, built in the Klein model.

The bisector of ``p`` and ``g p`` is the Klein chord ``{x : x . u = tanh(d/2)}``
where ``u`` is the direction of ``g p`` seen from ``p`` and ``d`` their
distance, so the Dirichlet polygon is an intersection of Euclidean
half-planes and can be clipped with Sutherland-Hodgman.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .ball import Ball, enumerate_ball
from .geometry2d import (act, disk_act, hyperboloid_distance, inverse4,
                         klein_to_disk, klein_to_hyperboloid, minkowski, to_disk_point)
from .group import FuchsianGroup, GroupError

__all__ = ["DirichletDomain", "dirichlet_domain", "clip_chords"]

_BOUNDARY_MARGIN = 1e-12


@dataclass
class DirichletDomain:
    basepoint: complex
    vertices: np.ndarray        # Klein coordinates, counter-clockwise, complex
    side_matrices: np.ndarray   # (k, 4); side i runs from vertex i to vertex i+1
    side_words: list
    pairing: np.ndarray         # side i is mapped onto side pairing[i] by side_matrices[i]^-1
    angles: np.ndarray
    area: float
    circumradius: float
    pairing_ok: bool
    vertex_cycles: list

    @property
    def n_sides(self) -> int:
        return int(self.vertices.shape[0])

    def summary(self) -> dict:
        return {"sides": self.n_sides, "area": self.area, "circumradius": self.circumradius,
                "pairing_ok": self.pairing_ok,
                "vertex_cycle_angle_sums": [float(sum(self.angles[list(c)])) for c in self.vertex_cycles]}


def _clip(poly: list, labels: list, u: complex, t: float, label: int):
    """Clip a convex polygon by ``Re(conj(u) x) <= t``; edge labels follow their edges."""
    n = len(poly)
    out, out_labels = [], []
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        fa = (np.conj(u) * a).real - t
        fb = (np.conj(u) * b).real - t
        if fa <= 0:
            out.append(a)
            if fb <= 0:
                out_labels.append(labels[i])
            else:
                out_labels.append(labels[i])
                s = fa / (fa - fb)
                out.append(a + s * (b - a))
                out_labels.append(label)
        elif fb <= 0:
            s = fa / (fa - fb)
            out.append(a + s * (b - a))
            out_labels.append(labels[i])
    # drop degenerate (zero length) edges
    clean, clean_labels = [], []
    for i, v in enumerate(out):
        if clean and abs(v - clean[-1]) < 1e-15:
            clean_labels[-1] = out_labels[i]
            continue
        clean.append(v)
        clean_labels.append(out_labels[i])
    if len(clean) > 1 and abs(clean[0] - clean[-1]) < 1e-15:
        clean.pop()
        clean_labels.pop()
    return clean, clean_labels


def _polygon(ball: Ball, p: complex):
    m = ball.matrices[1:]
    w = to_disk_point(act(m, p), p)
    r = np.abs(w)
    dist = 2 * np.arctanh(np.minimum(r, 1 - 1e-16))
    order = np.argsort(dist)
    poly = [complex(-2, -2), complex(2, -2), complex(2, 2), complex(-2, 2)]
    labels = [-1, -1, -1, -1]
    for j in order:
        if poly and max(abs(v) for v in poly) < 1 and dist[j] / 2 > math.atanh(max(abs(v) for v in poly)):
            break
        u = w[j] / r[j]
        poly, labels = _clip(poly, labels, u, math.tanh(dist[j] / 2), int(j) + 1)
    return poly, labels


def _angles(verts: np.ndarray) -> np.ndarray:
    X = klein_to_hyperboloid(verts)
    k = X.shape[0]
    out = np.empty(k)
    for i in range(k):
        v, a, b = X[i], X[i - 1], X[(i + 1) % k]
        ta = a + minkowski(v, a) * v
        tb = b + minkowski(v, b) * v
        c = minkowski(ta, tb) / math.sqrt(minkowski(ta, ta) * minkowski(tb, tb))
        out[i] = math.acos(max(-1.0, min(1.0, c)))
    return out


def dirichlet_domain(group: FuchsianGroup, basepoint: Optional[complex] = None,
                     start_depth: int = 3, max_depth: int = 8) -> DirichletDomain:
    """Dirichlet polygon at ``basepoint`` from orbit points of short words.

    The candidate word length grows until the polygon is compact, its side
    pairings close up, and (if the group volume is known) its area matches.
    """
    p = group.basepoint if basepoint is None else basepoint
    last_error = "no candidates"
    for depth in range(start_depth, max_depth + 1):
        ball = enumerate_ball(group, depth, basepoint=p)
        poly, labels = _polygon(ball, p)
        if len(poly) < 3 or any(l < 0 for l in labels) or max(abs(v) for v in poly) >= 1 - _BOUNDARY_MARGIN:
            last_error = "polygon is not compact"
            continue
        dom = _assemble(ball, p, np.array(poly), labels)
        if not dom.pairing_ok:
            last_error = "side pairings do not close up"
            continue
        if group.volume is not None and abs(dom.area - group.volume) > 1e-6 * group.volume:
            last_error = f"area {dom.area} differs from volume {group.volume}"
            continue
        return dom
    raise GroupError(f"could not build a Dirichlet domain up to word length {max_depth}: {last_error}")


def _assemble(ball: Ball, p: complex, verts: np.ndarray, labels: list) -> DirichletDomain:
    idx = np.array(labels)
    sides = ball.matrices[idx]
    words = [ball.word(int(i)) for i in idx]
    k = verts.shape[0]
    angles = _angles(verts)
    area = float((k - 2) * math.pi - angles.sum())
    radius = float(np.max(np.arctanh(np.abs(verts))))
    # pairing: side i (bisector of p, s p) goes to the side whose element is s^-1
    inv = inverse4(sides)
    pairing = np.full(k, -1)
    ok = True
    disk_v = klein_to_disk(verts)
    for i in range(k):
        diffs = np.max(np.abs(sides - inv[i]), axis=1)
        diffs2 = np.max(np.abs(sides + inv[i]), axis=1)
        j = int(np.argmin(np.minimum(diffs, diffs2)))
        if min(diffs[j], diffs2[j]) > 1e-8:
            ok = False
            continue
        pairing[i] = j
        ends = disk_act(inv[i][None, :], disk_v[[i, (i + 1) % k]], p)
        target = disk_v[[j, (j + 1) % k]]
        # orientation reverses under the pairing
        if not (abs(ends[0] - target[1]) < 1e-8 and abs(ends[1] - target[0]) < 1e-8):
            ok = False
    cycles = _vertex_cycles(pairing, k) if ok else []
    return DirichletDomain(p, verts, sides, words, pairing, angles, area, radius, ok, cycles)


def _vertex_cycles(pairing: np.ndarray, k: int) -> list:
    """Vertex cycles under the side pairings (end of side i maps to start of side pairing[i])."""
    seen = set()
    cycles = []
    for v0 in range(k):
        if v0 in seen:
            continue
        cyc = []
        v = v0
        while v not in cyc:
            cyc.append(v)
            # vertex v starts side v and ends side v-1; side v-1 maps its end to start of partner
            side = (v - 1) % k
            v = int(pairing[side])
        seen.update(cyc)
        cycles.append(cyc)
    return cycles


def clip_chords(a: np.ndarray, b: np.ndarray, verts: np.ndarray):
    """Clip Klein chords ``a -> b`` to a convex counter-clockwise polygon.

    Returns entry/exit parameters ``t0 <= t1`` (``NaN`` when the chord
    misses), and the index of the edge through which each chord exits.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    dvec = b - a
    t0 = np.zeros(a.shape)
    t1 = np.ones(a.shape)
    exit_edge = np.full(a.shape, -1)
    entry_edge = np.full(a.shape, -1)
    k = verts.shape[0]
    for i in range(k):
        v, w = verts[i], verts[(i + 1) % k]
        e = w - v
        # inward normal for a counter-clockwise polygon
        nrm = 1j * e
        num = (np.conj(nrm) * (a - v)).real
        den = (np.conj(nrm) * dvec).real
        with np.errstate(divide="ignore", invalid="ignore"):
            t = -num / den
        leaving = den < 0
        entering = den > 0
        parallel_out = (den == 0) & (num < 0)
        upd = leaving & (t < t1)
        t1 = np.where(upd, t, t1)
        exit_edge = np.where(upd, i, exit_edge)
        upd = entering & (t > t0)
        t0 = np.where(upd, t, t0)
        entry_edge = np.where(upd, i, entry_edge)
        t0 = np.where(parallel_out, np.nan, t0)
    miss = ~(t0 < t1)
    t0 = np.where(miss, np.nan, t0)
    t1 = np.where(miss, np.nan, t1)
    return t0, t1, entry_edge, exit_edge


def chord_segment_length(a, b, t0, t1) -> np.ndarray:
    x = klein_to_hyperboloid(a + t0 * (b - a))
    y = klein_to_hyperboloid(a + t1 * (b - a))
    return hyperboloid_distance(x, y)
