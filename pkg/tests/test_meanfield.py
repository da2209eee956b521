import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qhopfield import (
    Branch,
    NumericalError,
    asymptote_ratio,
    critical_beta,
    f0,
    fixed_points,
    minimize_f0,
    phase_curve,
)


def bisect(func, lo, hi, steps=200):
    flo = func(lo)
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        if (func(mid) < 0) == (flo < 0):
            lo, flo = mid, func(mid)
        else:
            hi = mid
    return 0.5 * (lo + hi)


class TestF0:
    def test_free_spin(self):
        assert f0(0.0, beta=1.0, d=0.0, h=0.0) == pytest.approx(-math.log(2), abs=1e-15)

    def test_pure_transverse_field(self):
        for beta in (0.5, 2.0, 50.0):
            expected = -math.log(2 * math.cosh(beta)) / beta
            assert f0(0.0, beta=beta, d=1.0, h=0.0) == pytest.approx(expected, abs=1e-13)

    def test_zero_temperature_limit(self):
        beta = 1e4
        for m in (0.0, 0.3, 0.9):
            for d in (0.2, 0.8):
                limit = -math.hypot(m, d) + 0.5 * m * m
                assert f0(m, beta=beta, d=d, h=0.0) == pytest.approx(limit, abs=1e-3)

    def test_stable_at_huge_argument(self):
        value = f0(1.0, beta=1e4, d=1.0, h=0.5)
        assert math.isfinite(value)

    def test_vectorized_in_m(self):
        ms = np.linspace(0, 1, 11)
        values = f0(ms, beta=2.0, d=0.5, h=0.1)
        assert values.shape == (11,)
        assert values[0] == pytest.approx(f0(0.0, 2.0, 0.5, 0.1))

    def test_rejects_nonpositive_beta(self):
        with pytest.raises(ValueError, match="beta"):
            f0(0.1, beta=0.0, d=0.5)


class TestMinimizeF0:
    def test_high_temperature_is_trivial(self):
        sol = minimize_f0(0.5, 0.0, 0.0)
        assert sol.m_star == 0.0
        assert sol.branch is Branch.TRIVIAL
        assert sol.residual == 0.0

    def test_zero_temperature_minimizer(self):
        sol = minimize_f0(1e4, 0.6, 0.0)
        assert sol.m_star == pytest.approx(0.8, abs=1e-3)
        assert sol.branch is Branch.SYMMETRY_BROKEN

    def test_classical_curie_weiss_root(self):
        # d = 0, beta = 2: m* solves m = tanh(2m); independent bisection oracle.
        oracle = bisect(lambda m: m - math.tanh(2 * m), 0.5, 1.0)
        sol = minimize_f0(2.0, 0.0, 0.0)
        assert sol.m_star == pytest.approx(oracle, abs=1e-10)

    def test_residual_and_value_invariants(self):
        for beta, d, h in [(0.7, 0.3, 0.0), (2.0, 0.5, 0.1), (5.0, 0.9, 0.0), (1e4, 0.2, 0.3)]:
            sol = minimize_f0(beta, d, h)
            assert sol.residual <= 1e-10
            assert sol.f0_value <= f0(0.0, beta, d, h) + 1e-12

    def test_rejects_negative_h(self):
        with pytest.raises(ValueError, match="h must be >= 0"):
            minimize_f0(1.0, 0.5, -0.1)

    @settings(max_examples=40, deadline=None)
    @given(
        beta=st.floats(0.1, 20.0),
        d=st.floats(0.0, 2.0),
        h=st.floats(0.0, 0.5),
    )
    def test_minimizer_is_global_on_grid(self, beta, d, h):
        sol = minimize_f0(beta, d, h)
        grid = np.linspace(0.0, 1.0 + h, 401)
        assert sol.f0_value <= float(np.min(f0(grid, beta, d, h))) + 1e-9
        assert sol.residual <= 1e-10


class TestFixedPoints:
    def test_only_trivial_beyond_unit_field(self):
        for beta in (0.5, 3.0, 50.0):
            points = fixed_points(beta, 1.5, 0.0)
            assert [pt.m for pt in points] == [0.0]
            assert points[0].stable

    def test_only_trivial_at_high_temperature(self):
        for d in (0.0, 0.3, 0.9):
            points = fixed_points(0.8, d, 0.0)
            assert [pt.m for pt in points] == [0.0]

    def test_broken_pair_satisfies_collective_equation(self):
        points = fixed_points(5.0, 0.5, 0.0)
        nonzero = [pt for pt in points if pt.m != 0.0]
        assert len(nonzero) == 2
        for pt in nonzero:
            r = math.hypot(pt.m, 0.5)
            assert abs(r - math.tanh(5.0 * r)) < 1e-10
        assert all(pt.stable for pt in nonzero)

    def test_symmetric_under_sign_flip(self):
        points = fixed_points(3.0, 0.4, 0.0)
        ms = sorted(pt.m for pt in points)
        np.testing.assert_allclose(ms, sorted(-m for m in ms), atol=1e-9)

    def test_trivial_point_unstable_when_broken(self):
        points = fixed_points(5.0, 0.5, 0.0)
        trivial = [pt for pt in points if pt.m == 0.0]
        assert len(trivial) == 1 and not trivial[0].stable

    def test_minimizer_appears_among_fixed_points(self):
        for beta, d, h in [(2.0, 0.3, 0.0), (4.0, 0.6, 0.2), (1.2, 0.1, 0.05)]:
            sol = minimize_f0(beta, d, h)
            points = fixed_points(beta, d, h)
            assert min(abs(pt.m - sol.m_star) for pt in points) <= 1e-10


class TestCriticalBeta:
    def test_zero_field_limit(self):
        point = critical_beta(0.0)
        assert point.beta_c == 1.0
        assert point.residual == 0.0

    def test_half_field(self):
        point = critical_beta(0.5)
        assert point.residual < 1e-12
        assert point.beta_c == pytest.approx(math.atanh(0.5) / 0.5, abs=1e-12)

    def test_asymptote_near_unity(self):
        d = 1 - 1e-6
        point = critical_beta(d)
        ratio = asymptote_ratio(point)
        # Derived oracle: beta_c = atanh(d)/d gives ratio 1.0501727...;
        # the asymptote agrees with beta_c to 4.78% relative error.
        assert ratio == pytest.approx(1.0501727, abs=1e-6)
        assert abs(point.beta_c - point.beta_c / ratio) <= 0.05 * point.beta_c

    def test_rejects_out_of_domain(self):
        for d in (-0.1, 1.0, 1.5):
            with pytest.raises(ValueError, match="d must lie in"):
                critical_beta(d)

    def test_beta_c_at_least_one(self):
        for d in np.linspace(0.0, 0.99, 12):
            assert critical_beta(float(d)).beta_c >= 1.0


class TestPhaseCurve:
    def test_single_point_grid(self):
        points = phase_curve([0.0])
        assert len(points) == 1 and points[0].beta_c == 1.0

    def test_strictly_increasing_on_standard_grid(self):
        grid = [round(0.1 * k, 1) for k in range(1, 10)]
        betas = [pt.beta_c for pt in phase_curve(grid)]
        assert all(b2 > b1 for b1, b2 in zip(betas, betas[1:]))

    def test_refined_grid_agrees_pointwise(self):
        coarse = phase_curve([0.2, 0.4, 0.6])
        fine = phase_curve([0.2, 0.3, 0.4, 0.5, 0.6])
        assert coarse[0].beta_c == fine[0].beta_c
        assert coarse[1].beta_c == fine[2].beta_c
        assert coarse[2].beta_c == fine[4].beta_c

    def test_error_names_grid_index(self):
        with pytest.raises(ValueError, match=r"d_grid\[1\]"):
            phase_curve([0.5, 1.2])


class TestBifurcation:
    @pytest.mark.parametrize("d", [0.2, 0.5, 0.8])
    def test_branch_appears_only_above_critical_beta(self, d):
        beta_c = critical_beta(d).beta_c
        below = fixed_points(0.99 * beta_c, d, 0.0)
        assert [pt.m for pt in below] == [0.0]
        above = fixed_points(1.01 * beta_c, d, 0.0)
        nonzero_stable = [pt for pt in above if pt.m > 0 and pt.stable]
        assert len(nonzero_stable) == 1


class TestContinuityInH:
    def test_gap_shrinks_with_h(self):
        base = minimize_f0(2.0, 0.5, 0.0).f0_value
        gaps = [
            abs(minimize_f0(2.0, 0.5, h).f0_value - base) for h in (1e-2, 1e-3, 1e-4)
        ]
        assert gaps[0] > gaps[1] > gaps[2]

    def test_zero_temperature_law(self):
        for d in (0.1, 0.4, 0.7, 0.95):
            sol = minimize_f0(1e4, d, 0.0)
            assert abs(sol.m_star - math.sqrt(1 - d * d)) <= 1e-3
