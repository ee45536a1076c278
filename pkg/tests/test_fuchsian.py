import csv
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from selberg_bounds.bounds import ExternalConstants, ManifoldParams
from selberg_bounds.fuchsian import (GroupError, GroupSpec, HorizonError, MobiusElement,
                                     TorsionError, conjugator_search, cyclic_reduce,
                                     dirichlet_domain, empirical_counts, enumerate_ball,
                                     free_reduce, length_spectrum, load_group, trace_of_length,
                                     translation_length, validate_bounds, write_csv, write_json)
from selberg_bounds.fuchsian.group import invert_word

from conftest import BOLZA_SYSTOLE

EXT = ExternalConstants(W={2: 1 / (2 * math.pi)}, v={2: 4 * math.pi})

# oriented classes below length 8; lengths are the stabilised enumeration output
BOLZA_TABLE = [
    (3.0571418, 24, True), (4.8969049, 24, True), (5.8280708, 48, True),
    (6.1142837, 24, False), (6.6720058, 96, True), (7.1073759, 48, True),
    (7.2631635, 48, True), (7.5956918, 8, True), (7.8806923, 96, True),
]


class TestWords:
    def test_free_reduce(self):
        assert free_reduce([1, 2, -2, -1, 3]) == (3,)
        assert free_reduce([]) == ()
        with pytest.raises(ValueError):
            free_reduce([0])

    def test_cyclic_reduce(self):
        assert cyclic_reduce([1, 2, 3, -1]) == (2, 3)

    @settings(max_examples=60)
    @given(st.lists(st.sampled_from([1, -1, 2, -2, 3, -3]), max_size=20))
    def test_reduction_properties(self, w):
        r = free_reduce(w)
        assert free_reduce(r) == r
        assert all(a != -b for a, b in zip(r, r[1:]))
        assert free_reduce(list(r) + list(invert_word(r))) == ()


class TestTraceLength:
    @settings(max_examples=100)
    @given(st.floats(2.0 + 1e-6, 1e6))
    def test_round_trip(self, tr):
        assert trace_of_length(translation_length(tr)) == pytest.approx(tr, rel=1e-10)

    def test_not_hyperbolic(self):
        with pytest.raises(ValueError):
            translation_length(1.5)


class TestMobiusElement:
    def test_sign_identification(self):
        m = np.array([[2.0, 1.0], [1.0, 1.0]])
        assert MobiusElement(m) == MobiusElement(-m)
        assert len({MobiusElement(m), MobiusElement(-m)}) == 1

    def test_invariants(self):
        with pytest.raises(GroupError):
            MobiusElement(np.array([[2.0, 0.0], [0.0, 1.0]]))
        with pytest.raises(ValueError):
            MobiusElement(np.eye(2), (1, -1))


class TestLoadGroup:
    def test_bolza_fixture(self, bolza, config):
        assert bolza.rank == 4
        rel = config.group("bolza").relators[0]
        assert len(rel) == 8
        m = bolza.evaluate(rel)
        assert min(np.abs(m - np.eye(2)).max(), np.abs(m + np.eye(2)).max()) < 1e-8

    def test_identity_rejected(self):
        with pytest.raises(GroupError):
            load_group(GroupSpec("id", [np.eye(2)]))
        with pytest.raises(GroupError):
            load_group(GroupSpec("none", []))

    def test_rescaled_generator_normalised(self, config):
        gs = config.group("bolza")
        gens = [g * math.sqrt(1.0001) for g in gs.generators]
        g = load_group(GroupSpec("scaled", gens, gs.volume, gs.relators))
        assert all(abs(np.linalg.det(x) - 1) < 1e-14 for x in g.generators)

    def test_bad_determinant(self):
        with pytest.raises(GroupError):
            load_group(GroupSpec("bad", [np.array([[3.0, 0.0], [0.0, 0.5]])]))

    def test_elliptic_rejected(self):
        with pytest.raises(GroupError, match="not hyperbolic"):
            load_group(GroupSpec("ell", [np.array([[0.0, -1.0], [1.0, 0.0]])]))

    def test_relator_checked(self, config):
        gs = config.group("bolza")
        with pytest.raises(GroupError):
            load_group(GroupSpec("x", gs.generators, gs.volume, [(1, 2, -1, -2)]))


class TestBall:
    def test_depth_one(self, bolza):
        ball = enumerate_ball(bolza, 1)
        assert len(ball.elements()) == 8

    def test_dedup_and_words(self, bolza):
        ball = enumerate_ball(bolza, 3)
        els = ball.elements()
        assert len(set(els)) == len(els)
        for e in els[:200]:
            assert np.allclose(np.abs(bolza.evaluate(e.word)), np.abs(e.matrix), atol=1e-9)
            assert free_reduce(e.word) == e.word

    def test_relator_prefix_collision(self, bolza):
        # a relator of length 8 makes its two halves equal: depth-4 words collide
        ball = enumerate_ball(bolza, 4)
        assert len(ball) < 1 + 8 + 8 * 7 + 8 * 49 + 8 * 343

    def test_trace_cap_filters(self, bolza):
        ball = enumerate_ball(bolza, 4)
        cap = 2 * math.cosh(4.0)
        small = ball.elements(trace_cap=cap)
        large = ball.elements(trace_cap=cap * 10)
        assert set(small) <= set(large)
        assert all(abs(e.trace) <= cap for e in small)

    def test_element_cap(self, bolza):
        ball = enumerate_ball(bolza, 6, element_cap=1000)
        assert not ball.complete and ball.truncated_by == "element_cap"

    def test_lookup(self, bolza):
        ball = enumerate_ball(bolza, 3)
        idx = ball.lookup(-ball.matrices[5:9])
        assert list(idx) == [5, 6, 7, 8]
        assert ball.lookup(np.array([[7.0, 1.0, 6.0, 1.0]]))[0] == -1

    def test_torsion_guard(self):
        a = np.array([[2.0, 0.0], [0.0, 0.5]])
        b = np.array([[-1.0, 1.0], [-5.0, 4.0]])
        g = load_group(GroupSpec("torsion", [a, b]))
        with pytest.raises(TorsionError):
            enumerate_ball(g, 2)

    def test_bad_depth(self, bolza):
        with pytest.raises(ValueError):
            enumerate_ball(bolza, 0)


class TestDomain:
    def test_default_basepoint(self, bolza):
        d = dirichlet_domain(bolza)
        assert d.area == pytest.approx(4 * math.pi, rel=1e-9)
        assert d.pairing_ok
        assert d.n_sides == 18
        for cyc in d.vertex_cycles:
            assert sum(d.angles[list(cyc)]) == pytest.approx(2 * math.pi, abs=1e-8)

    def test_symmetric_basepoint_gives_octagon(self, bolza):
        d = dirichlet_domain(bolza, basepoint=1j)
        assert d.n_sides == 8
        assert np.allclose(d.angles, math.pi / 4, atol=1e-9)
        assert d.circumradius == pytest.approx(2.448452447, abs=1e-8)


class TestSpectrum:
    def test_systole(self, bolza_spectrum):
        assert bolza_spectrum.systole == pytest.approx(BOLZA_SYSTOLE, abs=1e-9)
        assert bolza_spectrum.systole == pytest.approx(3.0571418389620013, abs=1e-12)

    def test_table(self, bolza_spectrum):
        s = bolza_spectrum
        assert s.complete and s.horizon == 8.0
        got = [(round(e.length, 7), e.multiplicity, e.primitive) for e in s.entries]
        assert got == [(pytest.approx(l, abs=1e-7), m, p) for l, m, p in BOLZA_TABLE]
        assert not any(e.uncertain for e in s.entries)

    def test_segment_oracle(self, bolza_spectrum):
        s = bolza_spectrum
        assert s.diagnostics["segment_oracle_classes"] == pytest.approx(len(s.classes), abs=1e-6)
        for c in s.classes:
            assert c.segment_sum == pytest.approx(c.primitive_length, abs=1e-7)

    def test_orientation_identity(self, bolza_spectrum):
        s = bolza_spectrum
        non_self_inverse = sum(1 for i, c in enumerate(s.classes) if c.inverse != i)
        assert len(s.classes) == s.unoriented_count() + non_self_inverse // 2
        assert all(c.inverse >= 0 for c in s.classes)
        for c in s.classes:
            assert s.classes[c.inverse].length == pytest.approx(c.length, abs=1e-9)
            assert s.classes[c.inverse].inverse == s.classes.index(c)

    def test_powers(self, bolza_spectrum):
        s = bolza_spectrum
        prims = [e for e in s.entries if e.primitive]
        lengths = {round(e.length, 6): e for e in s.entries}
        for e in prims:
            if 2 * e.length <= s.L_max:
                doubled = lengths.get(round(2 * e.length, 6))
                assert doubled is not None and not doubled.primitive
        for e in s.entries:
            if not e.primitive:
                assert any(abs(e.length / p.length - round(e.length / p.length)) < 1e-7
                           for p in prims if p.length < e.length)

    def test_depth_stability(self, bolza, bolza_spectrum):
        again = length_spectrum(bolza, 8.0, bolza_spectrum.depth_reached + 1)
        assert [(e.length, e.multiplicity) for e in again.entries] == \
               [(pytest.approx(e.length, abs=1e-10), e.multiplicity) for e in bolza_spectrum.entries]

    def test_monotone_in_lmax(self, bolza_spectrum, bolza_spectrum6):
        for L in (4.0, 5.0, 6.0):
            assert empirical_counts(bolza_spectrum6, (0, L), False) == \
                   empirical_counts(bolza_spectrum, (0, L), False)

    def test_conjugation_invariance(self, bolza, bolza_spectrum6):
        rng = np.random.default_rng(3)
        t = rng.uniform(0.2, 0.8)
        h = np.array([[math.cosh(t), math.sinh(t)], [math.sinh(t), math.cosh(t)]])
        h = h @ np.array([[1.0, rng.uniform(-0.5, 0.5)], [0.0, 1.0]])
        hi = np.linalg.inv(h)
        gens = [h @ g @ hi for g in bolza.generators]
        g2 = load_group(GroupSpec("conj", gens, bolza.volume, list(bolza.relators)))
        s2 = length_spectrum(g2, 6.0, 14)
        assert [(e.length, e.multiplicity) for e in s2.entries] == \
               [(pytest.approx(e.length, abs=1e-7), e.multiplicity) for e in bolza_spectrum6.entries]

    def test_conjugator_oracle(self, bolza_spectrum6):
        res = conjugator_search(bolza_spectrum6)
        assert res["passed"], res["mismatches"][:3]
        assert res["checked"] == len(bolza_spectrum6.classes)

    def test_heuristic_when_depth_short(self, bolza):
        s = length_spectrum(bolza, 8.0, 4)
        assert not s.complete and s.heuristic
        assert s.horizon < 8.0
        with pytest.raises(HorizonError):
            empirical_counts(s, (0.0, 8.0))

    def test_bad_lmax(self, bolza):
        with pytest.raises(ValueError):
            length_spectrum(bolza, 0.0, 5)


class TestCounts:
    def test_examples(self, bolza_spectrum):
        s = bolza_spectrum
        assert empirical_counts(s, (5.0, 4.0)) == 0
        assert empirical_counts(s, (0.0, s.systole - 1e-9)) == 0
        assert empirical_counts(s, (s.systole, s.systole)) == s.kiss == 24

    def test_primitive_flag(self, bolza_spectrum):
        s = bolza_spectrum
        assert empirical_counts(s, (0, 8), True) == 392
        assert empirical_counts(s, (0, 8), False) == 416

    def test_beyond_horizon(self, bolza_spectrum):
        with pytest.raises(HorizonError):
            empirical_counts(bolza_spectrum, (0, 8.5))


class TestValidate:
    def test_bolza_passes(self, bolza_spectrum):
        s = bolza_spectrum
        r = validate_bounds(s, ManifoldParams(2, 4 * math.pi, s.systole), EXT)
        assert r.verdicts["passed"]
        checks = r.values["checks"]
        assert checks[0]["check"] == "kiss" and checks[0]["ok"]
        cumulative = [c for c in checks if c["check"] == "cumulative"]
        assert [c["L"] for c in cumulative] == [4, 5, 6, 7, 8]
        assert all(c["lower_vacuous"] for c in cumulative)

    def test_violation_detected(self, bolza_spectrum):
        s = bolza_spectrum
        # a tiny volume shrinks every upper bound below the observed counts
        r = validate_bounds(s, ManifoldParams(2, 1e-6, s.systole), EXT)
        assert not r.verdicts["passed"]

    def test_surfaces_only(self, bolza_spectrum):
        with pytest.raises(ValueError):
            validate_bounds(bolza_spectrum, ManifoldParams(3, 1.0, 1.0), EXT)


class TestExport:
    def test_csv(self, bolza_spectrum, tmp_path):
        p = tmp_path / "s.csv"
        write_csv(bolza_spectrum, p)
        rows = list(csv.DictReader(open(p)))
        assert list(rows[0]) == ["length", "multiplicity", "primitive", "word"]
        assert len(rows) == len(bolza_spectrum.entries)
        assert float(rows[0]["length"]) == pytest.approx(BOLZA_SYSTOLE, abs=1e-10)

    def test_json(self, bolza_spectrum, tmp_path):
        p = tmp_path / "s.json"
        write_json(bolza_spectrum, p)
        doc = json.loads(p.read_text())
        assert doc["summary"]["kiss"] == 24
        assert doc["summary"]["complete"] is True
        assert len(doc["entries"]) == 9
