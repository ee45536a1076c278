import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from selberg_bounds.trace_kernels import (KernelKind, cos_minus_one, eval_G, eval_H, kiss_shift,
                                          one_plus_cos, verify_sign_conditions)
from selberg_bounds.transform_pairs import make_bump_pair

S = 2 * math.asinh(1)


class TestEvaluation:
    def test_kiss_shift_at_R(self):
        for n, R in ((2, S), (2, 3.0571), (3, 1.0)):
            base = make_bump_pair(n, S if n == 2 else 0.5)
            f = kiss_shift(base, R)
            assert eval_G(f, R) == pytest.approx(-base.g(0.0) / 2, abs=1e-15)

    def test_kiss_shift_at_zero(self):
        base = make_bump_pair(3, 0.5)
        f = kiss_shift(base, 2.0)
        e = math.exp(base.nu * base.epsilon)
        assert eval_H(f, 0.0) == pytest.approx(2 * e * base.h(0.0), rel=1e-14)

    def test_cos_minus_one_values(self):
        base = make_bump_pair(2, 1.0)
        f = cos_minus_one(base, 4.0)
        assert eval_G(f, 4.0) == pytest.approx(base.g(0.0) / 2, abs=1e-15)
        assert eval_H(f, 0.0) == 0.0

    def test_one_plus_cos_values(self):
        base = make_bump_pair(3, 0.5)
        f = one_plus_cos(base, 5.0)
        assert eval_G(f, 0.0) == pytest.approx(base.g(0.0), abs=1e-15)
        assert eval_H(f, 0.0) == pytest.approx(2 * base.h(0.0), rel=1e-14)

    def test_kiss_shift_needs_R_ge_eps(self):
        with pytest.raises(ValueError):
            kiss_shift(make_bump_pair(2, 1.0), 0.5)

    def test_real_values_on_real_axis(self):
        xi = np.linspace(0, 40, 500)
        for f in (kiss_shift(make_bump_pair(2, S), 3.0), cos_minus_one(make_bump_pair(3, 1.0), 6.0),
                  one_plus_cos(make_bump_pair(2, 0.5), 6.0)):
            val = np.asarray(eval_H(f, xi.astype(complex)))
            assert np.max(np.abs(val.imag)) < 1e-13

    @settings(max_examples=40, deadline=None)
    @given(st.integers(2, 6), st.floats(0.05, 2.0), st.floats(1.0, 5.0), st.floats(0, 1))
    def test_kiss_multiplier_on_imaginary_axis(self, n, eps, ratio, s):
        base = make_bump_pair(n, eps)
        R = eps * ratio
        t = s * base.nu
        e = math.exp(base.nu * eps)
        assert e * math.cosh((R - eps) * t) - math.cosh(R * t) >= -1e-12 * math.cosh(R * t)


class TestComposites:
    @pytest.mark.parametrize("n", [2, 3])
    def test_duality(self, n):
        rng = np.random.default_rng(10 + n)
        fams = [kiss_shift(make_bump_pair(n, 0.5), 2.0), cos_minus_one(make_bump_pair(n, 1.0), 5.0),
                one_plus_cos(make_bump_pair(n, 0.5), 5.0)]
        for f in fams:
            xi = rng.uniform(0, 50, 50)
            assert np.max(np.abs(f.numeric_transform(xi) - f.H(xi))) < 1e-7


class TestSigns:
    def test_kiss_shift_at_threshold(self):
        rep = verify_sign_conditions(kiss_shift(make_bump_pair(2, S), S))
        assert rep.passed, rep.witness

    def test_one_plus_cos_three(self):
        rep = verify_sign_conditions(one_plus_cos(make_bump_pair(3, 0.5), 5.0))
        assert rep.passed, rep.witness

    def test_cos_minus_one(self):
        rep = verify_sign_conditions(cos_minus_one(make_bump_pair(2, 1.0), 7.0))
        assert rep.passed, rep.witness

    def test_precondition_violation_reported(self):
        f = kiss_shift(make_bump_pair(2, 1.0), 0.5, check=False)
        rep = verify_sign_conditions(f)
        assert not rep.passed
        assert rep.witness["check"] == "precondition"

    def test_odd_order_base_fails(self):
        from selberg_bounds.transform_pairs import BumpPair
        f = one_plus_cos(BumpPair(2, 1.0, 3, 1 / 3), 5.0)
        assert not verify_sign_conditions(f, n_points=2000).passed

    def test_kinds(self):
        assert {k.value for k in KernelKind} == {"kiss_shift", "cos_minus_one", "one_plus_cos"}
