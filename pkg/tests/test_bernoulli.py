import numpy as np
import pytest

from percolab import (
    build_box_graph,
    crossing_probability,
    estimate_pc_crossing,
    estimate_theta_derivative,
    estimate_theta_n,
    origin_to_boundary_event,
    enumerate_probability,
    theta_curve,
)

SEED = 20260823


class TestThetaEstimator:
    def test_degenerate_p(self):
        assert estimate_theta_n(2, 2, 0.0, 500, SEED).value == 0.0
        assert estimate_theta_n(2, 2, 1.0, 500, SEED).value == 1.0

    def test_reproducible(self):
        a = estimate_theta_n(2, 2, 0.5, 2000, SEED)
        b = estimate_theta_n(2, 2, 0.5, 2000, SEED)
        assert a == b

    def test_seed_changes_estimate(self):
        a = estimate_theta_n(2, 3, 0.5, 5000, SEED)
        b = estimate_theta_n(2, 3, 0.5, 5000, SEED + 1)
        assert a.value != b.value

    def test_matches_exact_small_box(self):
        # 4 sigma agreement with full enumeration on the radius-1 box
        g = build_box_graph(2, 1)
        for p in (0.3, 0.5, 0.7):
            truth = enumerate_probability(origin_to_boundary_event(g), p)
            est = estimate_theta_n(2, 1, p, 50_000, SEED)
            assert abs(est.value - truth) <= 4 * est.stderr

    def test_replicas_validation(self):
        with pytest.raises(ValueError):
            estimate_theta_n(2, 1, 0.5, 0, SEED)

    def test_stderr_is_binomial(self):
        est = estimate_theta_n(2, 1, 0.5, 4000, SEED)
        expected = np.sqrt(est.value * (1 - est.value) / 4000)
        assert est.stderr == pytest.approx(expected)


class TestCoupling:
    def test_curve_exactly_monotone_in_p(self):
        # shared uniforms make the empirical curve non-decreasing, not just
        # statistically so
        curve = theta_curve(2, [3], np.arange(0.05, 1.0, 0.05), 3000, SEED)
        vals = [r.estimate for r in curve.rows]
        assert all(a <= b for a, b in zip(vals, vals[1:]))

    def test_curve_monotone_in_n(self):
        curve = theta_curve(2, [1, 2, 3, 4], [0.5], 20_000, SEED)
        byn = {r.n: r.estimate for r in curve.rows}
        for small, large in [(1, 2), (2, 3), (3, 4)]:
            # larger boxes are harder to reach the boundary of (4 sigma slack)
            assert byn[large] <= byn[small] + 4 * 0.5 / np.sqrt(20_000)

    def test_derivative_positive_and_matches_exact(self):
        truth = 4 * (1 - 0.5) ** 3
        est = estimate_theta_derivative(2, 1, 0.5, 100_000, SEED)
        # centered difference bias at h=0.01 is far below the MC error
        assert abs(est.value - truth) <= 4 * est.stderr + 1e-3

    def test_derivative_domain_check(self):
        with pytest.raises(ValueError):
            estimate_theta_derivative(2, 1, 0.005, 100, SEED)


class TestCrossing:
    def test_degenerate_p(self):
        assert crossing_probability(8, 0.0, 200, SEED).value == 0.0
        assert crossing_probability(8, 1.0, 200, SEED).value == 1.0

    def test_self_duality_near_half(self):
        # left-right crossing of the square lattice is ~1/2 at p = 1/2
        est = crossing_probability(16, 0.5, 20_000, SEED)
        assert abs(est.value - 0.5) < 0.05

    def test_pc_bisection_small(self):
        est = estimate_pc_crossing(2, 16, 1000, SEED)
        assert 0.4 < est.value < 0.6

    def test_pc_requires_d2(self):
        with pytest.raises(ValueError):
            estimate_pc_crossing(3, 8, 100, SEED)
