"""Length spectrum of a cocompact Fuchsian group.

Pipeline:

1. Build a Dirichlet polygon ``F`` at the basepoint ``p`` (circumradius ``D``).
2. Every oriented conjugacy class of length ``<= L_max`` has a member whose
   axis crosses ``F``; such a member moves ``p`` by at most
   ``R = 2 asinh(cosh D sinh(L_max / 2))``.  Words in the side pairings
   reaching it stay within ``R + D`` of ``p`` at every prefix, so a
   breadth-first search pruned at that radius is exhaustive once its
   frontier empties.
3. Candidates are the enumerated elements of length ``<= L_max`` whose axis
   meets ``F``.  Following a closed geodesic out of ``F`` through side
   ``e`` and back in through its partner conjugates the element by the side
   pairing; the cycles of this walk are exactly the conjugacy classes.
4. Elements sharing an oriented axis are powers of the shortest one; that
   shortest length is the primitive length.

Two consistency checks ride along: the axis pieces of each class inside
``F`` add up to its primitive length, and every class has an inverse class
of the same length.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..reports import to_json
from .ball import Ball, enumerate_ball
from .domain import DirichletDomain, chord_segment_length, clip_chords, dirichlet_domain
from .geometry2d import axis_endpoints, cosh_displacement, inverse4, matmul4
from .group import FuchsianGroup, cyclic_reduce

__all__ = [
    "SpectrumEntry",
    "ConjugacyClass",
    "Spectrum",
    "length_spectrum",
    "empirical_counts",
    "HorizonError",
    "write_csv",
    "write_json",
    "conjugator_search",
]

LENGTH_MERGE_TOL = 1e-8
AXIS_TOL = 1e-7
AXIS_UNCERTAIN = 1e-6
VERTEX_TOL = 1e-10


class HorizonError(ValueError):
    """A count was requested beyond the range the enumeration certifies."""


@dataclass(frozen=True)
class SpectrumEntry:
    length: float
    multiplicity: int
    primitive: bool
    representative_word: tuple
    uncertain: bool = False

    def to_dict(self) -> dict:
        return {"length": self.length, "multiplicity": self.multiplicity,
                "primitive": self.primitive, "word": list(self.representative_word),
                "uncertain": self.uncertain}


@dataclass
class ConjugacyClass:
    length: float
    primitive_length: float
    power: int
    members: list
    word: tuple
    segment_sum: float
    first_depth: int
    inverse: int = -1
    uncertain: bool = False
    reasons: list = field(default_factory=list)

    @property
    def primitive(self) -> bool:
        return self.power == 1


@dataclass
class Spectrum:
    group_label: str
    L_max: float
    depth: int
    trace_cap: float
    entries: list
    classes: list
    complete: bool
    horizon: float
    heuristic: bool
    domain: DirichletDomain
    ball_size: int
    search_radius: float
    depth_reached: int
    diagnostics: dict

    @property
    def systole(self) -> float:
        strict = [e.length for e in self.entries if not e.uncertain]
        if not strict:
            raise ValueError("no closed geodesics found below L_max")
        return min(strict)

    @property
    def kiss(self) -> int:
        s = self.systole
        return sum(e.multiplicity for e in self.entries
                   if not e.uncertain and abs(e.length - s) <= LENGTH_MERGE_TOL)

    def unoriented_count(self) -> int:
        """Classes with ``g ~ g^-1`` merged."""
        seen, count = set(), 0
        for i, c in enumerate(self.classes):
            if i in seen:
                continue
            seen.update({i, c.inverse})
            count += 1
        return count

    def summary(self) -> dict:
        out = {"group": self.group_label, "L_max": self.L_max, "depth": self.depth,
               "depth_reached": self.depth_reached, "trace_cap": self.trace_cap,
               "complete": self.complete, "heuristic": self.heuristic, "horizon": self.horizon,
               "classes": len(self.classes), "entries": len(self.entries),
               "ball_size": self.ball_size, "search_radius": self.search_radius,
               "domain": self.domain.summary(), "diagnostics": self.diagnostics}
        try:
            out["systole"] = self.systole
            out["kiss"] = self.kiss
        except ValueError:
            out["systole"] = None
            out["kiss"] = 0
        return out


def _search_radius(D: float, L_max: float) -> tuple[float, float]:
    R = 2 * math.asinh(math.cosh(D) * math.sinh(L_max / 2))
    return R, R + D


def _axis_groups(rep: np.ndarray, att: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Label candidates by oriented axis; also return the worst near-miss distance."""
    n = rep.size
    ang = np.angle(rep)
    order = np.argsort(ang)
    label = np.full(n, -1)
    near_miss = np.zeros(n)
    next_label = 0
    sa = ang[order]
    for pos, i in enumerate(order):
        if label[i] >= 0:
            continue
        label[i] = next_label
        hi = np.searchsorted(sa, sa[pos] + AXIS_UNCERTAIN, side="right")
        for j in order[pos + 1:hi]:
            dist = max(abs(rep[j] - rep[i]), abs(att[j] - att[i]))
            if dist <= AXIS_TOL and label[j] < 0:
                label[j] = next_label
            elif dist < AXIS_UNCERTAIN:
                near_miss[i] = near_miss[j] = max(near_miss[i], dist)
        next_label += 1
    return label, near_miss


def length_spectrum(group: FuchsianGroup, L_max: float, depth: int, *,
                    trace_cap: Optional[float] = None, element_cap: int = 5_000_000,
                    basepoint: Optional[complex] = None,
                    domain: Optional[DirichletDomain] = None) -> Spectrum:
    """Oriented closed geodesics of length ``<= L_max``.

    ``depth`` caps the breadth-first search in side-pairing words.  The
    result is complete when the pruned search runs out of new elements
    before that; otherwise it is flagged heuristic with a reduced horizon.
    """
    if not L_max > 0:
        raise ValueError("L_max must be positive")
    cap_from_length = 2 * math.cosh(L_max / 2)
    trace_cap = cap_from_length if trace_cap is None else float(trace_cap)
    L_eff = min(L_max, 2 * math.acosh(max(trace_cap, 2.0) / 2)) if trace_cap > 2 else 0.0
    dom = domain if domain is not None else dirichlet_domain(group, basepoint)
    p = dom.basepoint
    _, radius = _search_radius(dom.circumradius, L_eff)
    ball = enumerate_ball(group, depth, letters=dom.side_matrices, letter_words=dom.side_words,
                          radius=radius, basepoint=p, element_cap=element_cap)
    depth_reached = int(ball.depth.max())

    tr = np.abs(ball.traces)
    cand = np.nonzero((tr <= trace_cap * (1 + 1e-12)) & (np.arange(len(ball)) > 0))[0]
    lengths = 2 * np.arccosh(tr[cand] / 2)
    rep, att = axis_endpoints(ball.matrices[cand], p)
    t0, t1, entry, exit_ = clip_chords(rep, att, dom.vertices)
    hit = ~np.isnan(t0)
    cand, lengths, rep, att = cand[hit], lengths[hit], rep[hit], att[hit]
    t0, t1, entry, exit_ = t0[hit], t1[hit], entry[hit], exit_[hit]
    seg = chord_segment_length(rep, att, t0, t1)
    pos = seg > 1e-12
    cand, lengths, rep, att, t0, t1, entry, exit_, seg = (x[pos] for x in
                                                         (cand, lengths, rep, att, t0, t1, entry, exit_, seg))
    nc = cand.size
    flags = [[] for _ in range(nc)]

    # exits close to a vertex make the walk ambiguous
    exit_pt = rep + t1 * (att - rep)
    vdist = np.min(np.abs(exit_pt[:, None] - dom.vertices[None, :]), axis=1)
    for i in np.nonzero(vdist < VERTEX_TOL)[0]:
        flags[i].append("exit near a polygon vertex")

    # walk: g -> s^-1 g s for the side s the axis leaves through
    s = dom.side_matrices[exit_]
    nxt_m = matmul4(matmul4(inverse4(s), ball.matrices[cand]), s)
    nxt_ball = ball.lookup(nxt_m)
    index_of = {int(b): i for i, b in enumerate(cand)}
    nxt = np.array([index_of.get(int(b), -1) for b in nxt_ball])
    for i in np.nonzero(nxt < 0)[0]:
        flags[i].append("walk left the candidate set")
    bad_entry = (nxt >= 0) & (entry[np.maximum(nxt, 0)] != dom.pairing[exit_])
    for i in np.nonzero(bad_entry)[0]:
        flags[i].append("walk entered through an unexpected side")

    # primitive lengths from shared oriented axes
    axis_label, near_miss = _axis_groups(rep, att)
    prim_len = np.empty(nc)
    for lab in np.unique(axis_label):
        members = axis_label == lab
        prim_len[members] = lengths[members].min()
    for i in np.nonzero(near_miss > 0)[0]:
        flags[i].append(f"ambiguous axis comparison ({near_miss[i]:.2e})")

    classes: list[ConjugacyClass] = []
    class_of = np.full(nc, -1)
    for start in range(nc):
        if class_of[start] >= 0:
            continue
        members = []
        i = start
        reasons = []
        while True:
            members.append(i)
            class_of[i] = len(classes)
            j = nxt[i]
            if j < 0:
                reasons.append("open walk")
                break
            if j == start:
                break
            if class_of[j] >= 0:
                reasons.append("walk merged into another cycle")
                break
            i = j
            if len(members) > nc:
                reasons.append("walk did not close")
                break
        midx = np.array(members)
        ell = float(np.mean(lengths[midx]))
        lam = float(np.mean(prim_len[midx]))
        k = max(1, int(round(ell / lam)))
        seg_sum = float(seg[midx].sum())
        for m in members:
            reasons.extend(flags[m])
        if np.ptp(lengths[midx]) > 1e-9 * max(1.0, ell):
            reasons.append("members disagree on length")
        if abs(ell - k * lam) > AXIS_TOL * max(1.0, ell):
            reasons.append("length is not a multiple of the primitive length")
        if abs(2 * math.cosh(k * lam / 2) - 2 * math.cosh(ell / 2)) > 1e-8 * math.cosh(ell / 2):
            reasons.append("power trace identity fails")
        if abs(seg_sum - lam) > 1e-7 * max(1.0, lam):
            reasons.append(f"axis pieces sum to {seg_sum:.12g}, not the primitive length")
        words = [ball.word(int(cand[m])) for m in members]
        word = cyclic_reduce(min(words, key=lambda w: (len(w), w)))
        classes.append(ConjugacyClass(ell, lam, k, [int(cand[m]) for m in members], word, seg_sum,
                                      int(ball.depth[cand[midx]].min()),
                                      uncertain=bool(reasons), reasons=sorted(set(reasons))))

    # inverse classes share the axis with reversed orientation
    inv_ball = ball.lookup(inverse4(ball.matrices[cand]))
    for c in classes:
        j = index_of.get(int(inv_ball[index_of[c.members[0]]]), -1)
        if j < 0:
            c.uncertain = True
            c.reasons.append("inverse class missing")
            continue
        c.inverse = int(class_of[j])
        if abs(classes[c.inverse].length - c.length) > 1e-9 * max(1.0, c.length):
            c.uncertain = True
            c.reasons.append("inverse class has a different length")

    order = sorted(range(len(classes)), key=lambda i: (classes[i].length, classes[i].word))
    new_pos = {old: new for new, old in enumerate(order)}
    classes = [classes[i] for i in order]
    for c in classes:
        if c.inverse >= 0:
            c.inverse = new_pos[c.inverse]

    entries = _entries(classes)
    complete = bool(ball.complete)
    horizon = L_max if complete else _heuristic_horizon(classes, depth_reached, L_max)
    diagnostics = {
        "candidates": int(nc),
        "uncertain_classes": int(sum(c.uncertain for c in classes)),
        "segment_oracle_classes": float(np.sum(seg / prim_len)),
        "truncated_by": ball.truncated_by,
        "unoriented_classes": None,
    }
    out = Spectrum(group.label, float(L_max), int(depth), float(trace_cap), entries, classes,
                   complete, float(horizon), not complete, dom, len(ball), float(radius),
                   depth_reached, diagnostics)
    out.diagnostics["unoriented_classes"] = out.unoriented_count()
    out._ball = ball  # kept for oracles; not part of the public record
    return out


def _heuristic_horizon(classes: list, depth_reached: int, L_max: float) -> float:
    """Shortest length among classes first met at the last two depths."""
    horizon = L_max
    for d in (depth_reached, depth_reached - 1):
        fresh = [c.length for c in classes if c.first_depth == d]
        if fresh:
            horizon = min(horizon, min(fresh))
    return horizon


def _entries(classes: list) -> list:
    entries = []
    i = 0
    n = len(classes)
    while i < n:
        j = i
        while j + 1 < n and classes[j + 1].length - classes[i].length <= LENGTH_MERGE_TOL:
            j += 1
        block = classes[i:j + 1]
        for prim in (True, False):
            grp = [c for c in block if c.primitive == prim]
            if not grp:
                continue
            for unc in (False, True):
                sub = [c for c in grp if c.uncertain == unc]
                if not sub:
                    continue
                rep = min(sub, key=lambda c: (len(c.word), c.word))
                entries.append(SpectrumEntry(float(np.mean([c.length for c in sub])), len(sub),
                                             prim, rep.word, unc))
        i = j + 1
    return entries


def empirical_counts(spectrum: Spectrum, interval: tuple, primitive_only: bool = True,
                     slack: bool = False) -> int:
    """Oriented classes with length in ``[a, b]``.

    Uncertain classes are only counted when ``slack`` is set.
    """
    a, b = interval
    if b > spectrum.horizon + 1e-12:
        raise HorizonError(f"upper end {b} exceeds the completeness horizon {spectrum.horizon}")
    if b < a:
        return 0
    total = 0
    for e in spectrum.entries:
        if primitive_only and not e.primitive:
            continue
        if e.uncertain and not slack:
            continue
        if a - 1e-12 <= e.length <= b + 1e-12:
            total += e.multiplicity
    return total


def conjugator_search(spectrum: Spectrum, max_classes: Optional[int] = None) -> dict:
    """Confirm the class partition by brute-force conjugation.

    For each class representative ``g`` every ``h`` in the enumerated ball
    with ``d(p, hp) <= 2D + l(g)/2`` is tried; the conjugates ``h g h^-1``
    whose axes cross the polygon must be exactly the members of the class.
    """
    ball: Ball = spectrum._ball
    dom = spectrum.domain
    p = dom.basepoint
    member_class = {}
    for ci, c in enumerate(spectrum.classes):
        for m in c.members:
            member_class[m] = ci
    disp = np.arccosh(np.maximum(cosh_displacement(ball.matrices, p), 1.0))
    mismatches = []
    checked = 0
    for ci, c in enumerate(spectrum.classes[:max_classes]):
        r = 2 * dom.circumradius + c.length / 2
        if r > spectrum.search_radius:
            mismatches.append({"class": ci, "reason": "conjugator radius exceeds the ball"})
            continue
        hs = ball.matrices[disp <= r]
        g = ball.matrices[c.members[0]][None, :]
        conj = matmul4(matmul4(hs, np.repeat(g, hs.shape[0], axis=0)), inverse4(hs))
        found = ball.lookup(conj)
        found = {int(b) for b in found if int(b) in member_class}
        expected = set(c.members)
        if found != expected:
            mismatches.append({"class": ci, "missing": len(expected - found),
                               "foreign": len(found - expected)})
        checked += 1
    return {"checked": checked, "mismatches": mismatches, "passed": not mismatches}


def write_csv(spectrum: Spectrum, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["length", "multiplicity", "primitive", "word"])
        for e in spectrum.entries:
            w.writerow([f"{e.length:.12g}", e.multiplicity, int(e.primitive),
                        " ".join(str(x) for x in e.representative_word)])


def write_json(spectrum: Spectrum, path) -> None:
    doc = {"summary": spectrum.summary(), "entries": [e.to_dict() for e in spectrum.entries]}
    with open(path, "w") as fh:
        fh.write(to_json(doc))
        fh.write("\n")
