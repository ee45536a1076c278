import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from selberg_bounds.transform_pairs import (BumpPair, cosine_transform, eval_g, eval_h,
                                            fourier_check, make_bump_pair, verify_admissibility)

pairs = st.builds(make_bump_pair, st.integers(2, 7), st.floats(0.05, 3.0))


class TestConstruction:
    @pytest.mark.parametrize("n,eps,m,a", [(2, 1, 4, 0.25), (3, 1, 4, 0.25), (5, 0.5, 6, 1 / 12),
                                          (4, 1, 6, 1 / 6), (7, 2, 8, 0.25)])
    def test_parity_rule(self, n, eps, m, a):
        p = make_bump_pair(n, eps)
        assert (p.m, p.a) == (m, pytest.approx(a))
        assert p.nu == (n - 1) / 2

    @pytest.mark.parametrize("args", [(2, 0.0), (2, -1.0), (1, 1.0), (2.5, 1.0)])
    def test_domain_errors(self, args):
        with pytest.raises(ValueError):
            make_bump_pair(*args)

    @settings(max_examples=50, deadline=None)
    @given(pairs)
    def test_invariants(self, p):
        assert p.m % 2 == 0 and p.m >= 4
        assert p.a * p.m == pytest.approx(p.epsilon, rel=1e-15)


class TestG:
    def test_surface_centre_value(self):
        p = make_bump_pair(2, 2 * math.asinh(1))
        assert eval_g(p, 0.0) == pytest.approx(2 * math.asinh(1) ** 3 / 3, abs=1e-14)
        assert eval_g(p, 0.0) == pytest.approx(0.456445400634959, abs=1e-14)

    @settings(max_examples=30, deadline=None)
    @given(pairs, st.floats(0, 1.5))
    def test_support_evenness_sign(self, p, frac):
        x = frac * p.epsilon
        assert eval_g(p, x) == eval_g(p, -x)
        assert eval_g(p, x) >= 0
        if frac >= 1:
            assert eval_g(p, x) == 0.0

    def test_non_increasing_grid(self):
        for n in (2, 3, 4, 5):
            p = make_bump_pair(n, 0.7)
            y = eval_g(p, np.linspace(0, 1.0, 10_000))
            assert np.all(np.diff(y) <= 1e-15)


class TestH:
    def test_zero(self):
        p = make_bump_pair(3, 1.3)
        assert eval_h(p, 0.0) == pytest.approx((2 * 1.3 / 4) ** 4, rel=1e-15)

    def test_surface_integrand_form(self):
        p = make_bump_pair(2, 2 * math.asinh(1))
        r = np.linspace(0.01, 30, 200)
        expected = 16 * np.sin(math.asinh(1) * r / 2) ** 4 / r ** 4
        assert np.allclose(eval_h(p, r), expected, rtol=1e-12, atol=0)

    def test_imaginary_axis(self):
        p = make_bump_pair(4, 0.9)
        t = np.linspace(0.01, 3, 50)
        val = eval_h(p, 1j * t)
        assert np.max(np.abs(val.imag)) < 1e-13 * np.max(np.abs(val))
        assert np.allclose(val.real, (2 * np.sinh(p.a * t) / t) ** p.m, rtol=1e-12)

    def test_series_branch_continuity(self):
        p = make_bump_pair(2, 1.0)
        cut = 1e-4 / p.a
        below, above = eval_h(p, cut * (1 - 1e-9)), eval_h(p, cut * (1 + 1e-9))
        assert abs(below - above) < 1e-13

    @settings(max_examples=40, deadline=None)
    @given(pairs, st.floats(-200, 200))
    def test_real_axis_bounds(self, p, xi):
        assert 0 <= eval_h(p, xi) <= eval_h(p, 0.0) * (1 + 1e-13)

    @settings(max_examples=40, deadline=None)
    @given(pairs, st.floats(0, 1), st.floats(0, 1))
    def test_imaginary_axis_monotone(self, p, s, ds):
        t1 = s * p.nu
        t2 = min(p.nu, t1 + ds * p.nu)
        h1 = eval_h(p, 1j * t1).real
        h2 = eval_h(p, 1j * t2).real
        assert h1 >= eval_h(p, 0.0) * (1 - 1e-13)
        assert h2 >= h1 * (1 - 1e-13)


class TestChecks:
    @pytest.mark.parametrize("n,eps", [(2, 1.0), (3, 0.2), (4, 0.5), (5, 0.05)])
    def test_admissible(self, n, eps):
        rep = verify_admissibility(make_bump_pair(n, eps))
        assert rep.passed, rep.witness

    def test_odd_order_is_rejected(self):
        bad = BumpPair(2, 1.0, 3, 1 / 3)
        rep = verify_admissibility(bad)
        assert not rep.passed
        assert rep.witness is not None

    def test_fourier_examples(self):
        assert fourier_check(make_bump_pair(2, 1.0), [0.0], tol=1e-10).passed
        assert fourier_check(make_bump_pair(2, 1.0), [3.7], tol=1e-8).passed
        rep = fourier_check(make_bump_pair(5, 0.5), np.linspace(0.1, 10, 100), tol=1e-8)
        assert rep.passed and rep.details["max_deviation"] < 1e-8

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_fourier_random(self, n):
        rng = np.random.default_rng(n)
        for eps in (0.3, 1.0, 2.5):
            rep = fourier_check(make_bump_pair(n, eps), rng.uniform(-50, 50, 100), tol=1e-8)
            assert rep.passed, rep.details

    def test_fourier_range_guard(self):
        with pytest.raises(ValueError):
            fourier_check(make_bump_pair(2, 1.0), [60.0])

    def test_cosine_transform_of_box(self):
        # int_{-1}^{1} e^{-i xi x} dx = 2 sin(xi) / xi
        xi = np.array([0.5, 3.0, 17.0])
        val = cosine_transform(lambda x: np.ones_like(x), [1.0], xi)
        assert np.allclose(val, 2 * np.sin(xi) / xi, atol=1e-13)
