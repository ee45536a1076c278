import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate as sint
from scipy.interpolate import BSpline

from selberg_bounds import bounds as B
from selberg_bounds.bounds import ExternalConstants, ManifoldParams
from selberg_bounds.numerics import ball_volume
from selberg_bounds.transform_pairs import make_bump_pair

S = 2 * math.asinh(1)
EXT = ExternalConstants(W={2: 1 / (2 * math.pi)}, v={2: 4 * math.pi})
BOLZA_SYS = 2 * math.acosh(1 + math.sqrt(2))


def surface_integral_oracle(eps, kappa):
    """int_0^inf h r tanh(kappa r) dr with int_0^inf h r dr = 16 a^2 log 2 (m = 4)."""
    p = make_bump_pair(2, eps)
    corr, _ = sint.quad(lambda r: p.h(r) * r * (1 - math.tanh(kappa * r)), 0, 60 / kappa,
                        epsabs=1e-15, epsrel=1e-13, limit=400)
    return 16 * p.a ** 2 * math.log(2) - corr


def mass_oracle(n, eps):
    p = make_bump_pair(n, eps)
    if n == 2:
        return surface_integral_oracle(eps, math.pi) / (2 * math.pi)
    # n = 3: Phi = r^2 / (2 pi^2) and int h r^2 = -pi g''(0)
    b = BSpline.basis_element(np.arange(p.m + 1), extrapolate=False).derivative(2)
    g2 = float(b(p.m / 2)) * (2 * p.a) ** (p.m - 3)
    return -g2 / (2 * math.pi)


class TestSpectralMass:
    @pytest.mark.parametrize("n,eps", [(2, B.epsilon_n(2)), (2, 0.5), (2, 1.0), (3, B.epsilon_n(3)),
                                       (3, 0.5)])
    def test_against_closed_forms(self, n, eps):
        m = B.spectral_mass(n, eps)
        assert m.value == pytest.approx(mass_oracle(n, eps), rel=1e-9)
        assert m.error <= 1e-9 * m.value


class TestConstantA:
    def test_frozen_values(self):
        assert B.constant_A(2).value == pytest.approx(21694.6585071, rel=1e-9)
        assert B.constant_A(3).value == pytest.approx(1025473093.18, rel=1e-9)

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_tolerance_convergence(self, n):
        a, b = B.constant_A(n, 1e-6), B.constant_A(n, 1e-9)
        assert abs(a.value - b.value) <= a.error + b.error + 1e-12 * b.value
        assert abs(a.value / b.value - 1) < 1e-6

    def test_rejects_bad_dimension(self):
        with pytest.raises(ValueError):
            B.constant_A(1)


class TestSurfaceConstant:
    def test_reference_variant(self):
        c = B.surface_kiss_constant(S, variant="tanh_pi_r")
        assert c.value == pytest.approx(10.139124037, abs=1e-8)
        assert abs(c.value - 10.1391) <= 5e-4
        assert abs(2 * math.pi * c.value - 63.71) <= 0.01

    def test_other_variant(self):
        c = B.surface_kiss_constant(S, variant="tanh_r")
        assert c.value == pytest.approx(9.27968, abs=1e-4)

    @pytest.mark.parametrize("variant,kappa", [("tanh_pi_r", math.pi), ("tanh_r", 1.0)])
    def test_against_oracle(self, variant, kappa):
        p = make_bump_pair(2, S)
        factor = 2 * (1 + math.exp(S / 2)) / (math.pi * p.g(0.0))
        expected = factor * surface_integral_oracle(S, kappa)
        assert B.surface_kiss_constant(S, variant=variant).value == pytest.approx(expected, rel=1e-9)

    def test_prefactor_identity(self):
        g0 = make_bump_pair(2, S).g(0.0)
        assert 2 * 16 / g0 == pytest.approx(48 / math.asinh(1) ** 3, rel=1e-12)

    def test_report(self):
        r = B.surface_constants_report(S)
        assert r.values["matching_variant"] == "tanh_pi_r"
        assert r.values["U"] == pytest.approx(63.70599518, abs=1e-6)

    def test_unknown_variant(self):
        with pytest.raises(ValueError):
            B.surface_kiss_constant(S, variant="sech")


class TestKissBound:
    def test_thin_branch_at_threshold(self):
        r = B.kiss_upper_bound(ManifoldParams(2, 4 * math.pi, S), EXT)
        assert r.values["branches"]["thin"] == pytest.approx(6.0)
        assert r.bound == pytest.approx(6.0)

    def test_bolza_systole(self):
        r = B.kiss_upper_bound(ManifoldParams(2, 4 * math.pi, BOLZA_SYS), EXT)
        assert r.values["branches"]["main"] == pytest.approx(411241.5707, rel=1e-8)
        assert r.values["branch"] == "surface"
        assert r.bound == pytest.approx(91.579349, rel=1e-6)

    def test_exponent(self):
        assert B.thin_exponent(3) == 0
        assert B.thin_exponent(4) == pytest.approx(1 / 2)
        assert B.thin_exponent(6) == pytest.approx(2 / 3)

    def test_thin_branch_needs_K(self):
        r = B.kiss_upper_bound(ManifoldParams(3, 5.0, 1e-5), EXT)
        assert "thin" not in r.values["branches"]
        assert any("K_3" in note for note in r.notes)
        ext = ExternalConstants(K={3: 0.5})
        r = B.kiss_upper_bound(ManifoldParams(3, 5.0, 1e-5), ext)
        assert r.values["branches"]["thin"] == pytest.approx(2 / 0.5 * 5.0)

    @settings(max_examples=15, deadline=None)
    @given(st.floats(0.05, 6.0), st.floats(1.0, 100.0))
    def test_bound_is_min_of_branches(self, sys_, vol):
        r = B.kiss_upper_bound(ManifoldParams(2, vol, sys_), EXT)
        assert r.bound == min(r.values["branches"].values())
        assert r.bound > 0


class TestCorollary:
    def test_frozen(self):
        c = B.corollary_constants(2, EXT)
        assert c["A2"].value == pytest.approx(4.612059896e6, rel=1e-8)
        assert c["a_n"] > 0
        assert c["d_n"] < c["v_n"]

    def test_d_n_is_a_valid_ball_bound(self):
        c = B.corollary_constants(2, EXT)
        for r in np.linspace(1.0, 10.0, 200):
            assert ball_volume(2, r) >= c["d_n"] * math.exp(r) * (1 - 1e-12)

    def test_a_n_inequality(self):
        c = B.corollary_constants(2, EXT)
        for x in np.geomspace(c["v_n"], 1e8, 200):
            assert (1 + x) ** c["a_n"] <= x / c["d_n"] * (1 + 1e-12)

    def test_dominates_kiss_bound(self):
        r = B.corollary_volume_bound(2, 4 * math.pi, EXT)
        for s in np.linspace(0.05, 8, 60):
            k = B.kiss_upper_bound(ManifoldParams(2, 4 * math.pi, s), EXT)
            assert k.values["branches"]["main"] <= r.bound or k.bound <= r.bound

    def test_volume_domain(self):
        with pytest.raises(ValueError):
            B.corollary_volume_bound(2, 1.0, EXT)

    def test_missing_v(self):
        with pytest.raises(B.MissingConstantError):
            B.corollary_constants(3, EXT)


class TestCounts:
    def test_cumulative_upper_frozen(self):
        vals = [B.cumulative_upper(2, 0.5, 4 * math.pi, L, EXT).bound for L in (4, 8, 12)]
        assert vals[0] == pytest.approx(238407.3415, rel=1e-8)
        assert vals[1] == pytest.approx(6508299.9001, rel=1e-8)
        assert vals[2] == pytest.approx(2.37e8, rel=1e-2)

    def test_cumulative_lower_chain(self):
        c = B.cumulative_constants_lower(2, 0.5, EXT)
        assert c["C_prime"].value == pytest.approx(0.0576062197, rel=1e-8)
        assert c["B_prime"].value == pytest.approx(1389.92646624, rel=1e-8)
        r = B.cumulative_lower(2, 0.5, 4 * math.pi, 12.0, EXT)
        assert r.values["vacuous"]
        assert r.values["crossover_L"] == pytest.approx(30.9253, abs=1e-3)
        above = B.cumulative_lower(2, 0.5, 4 * math.pi, 32.0, EXT)
        assert above.bound > 0

    def test_lower_below_upper(self):
        for L in (35.0, 40.0, 50.0):
            lo = B.cumulative_lower(2, 0.5, 4 * math.pi, L, EXT).bound
            hi = B.cumulative_upper(2, 0.5, 4 * math.pi, L, EXT).bound
            assert 0 < lo < hi

    def test_interval_lower_growth(self):
        r = B.interval_count_lower(2, 0.5, 4 * math.pi, 3.0, EXT)
        assert r.values["vacuous"]
        big = [B.interval_count_lower(2, 0.5, 4 * math.pi, L, EXT).bound for L in (80.0, 81.0)]
        assert 0 < big[0] < big[1]
        assert big[1] / big[0] == pytest.approx(math.exp(1) * 80 / 81, rel=1e-6)

    def test_interval_lower_needs_L_ge_delta(self):
        with pytest.raises(ValueError):
            B.interval_count_lower(2, 0.5, 4 * math.pi, 0.2, EXT)

    @settings(max_examples=8, deadline=None)
    @given(st.floats(0.1, 2.0))
    def test_cumulative_constant_grows_as_delta_shrinks(self, delta):
        a = B.cumulative_constant_upper(2, delta, EXT)["B_prime"].value
        b = B.cumulative_constant_upper(2, delta / 2, EXT)["B_prime"].value
        assert b >= a

    def test_missing_W(self):
        with pytest.raises(B.MissingConstantError):
            B.interval_count_upper(3, 0.5, 5.0, 4.0, EXT)

    def test_pgt(self):
        # e^((n-1) L) / ((n-1) L)
        assert B.pgt_asymptotic(2, math.log(4)) == pytest.approx(2.8853900817779268)
        assert B.pgt_asymptotic(3, 1.0) == pytest.approx(math.e ** 2 / 2)


class TestTypes:
    def test_manifold_params_validation(self):
        with pytest.raises(ValueError):
            ManifoldParams(2, -1.0, 1.0)
        with pytest.raises(ValueError):
            ManifoldParams(1, 1.0, 1.0)

    def test_external_constants_validation(self):
        with pytest.raises(ValueError):
            ExternalConstants(W={2: -1.0})
        assert ExternalConstants(W={"2": 0.5}).get("W", 2) == 0.5
        with pytest.raises(B.MissingConstantError):
            ExternalConstants().get("K", 3)
