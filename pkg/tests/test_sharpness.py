import numpy as np
import pytest

from percolab import (
    PercolabError,
    check_differential_inequality,
    constant_family,
    fit_exponential_decay,
    fit_linear_growth,
    partial_sums,
    tilted_ramp_family,
    validate_lemma_family,
)
from percolab.sharpness import (
    NOT_DECAYING_FLOOR,
    check_differential_inequality_continuum,
)

SEED = 777


class TestPartialSums:
    def test_discrete_geometric(self):
        th = [1.0, 0.5, 0.25, 0.125]
        table = partial_sums(th)
        assert np.allclose(table.sums, [1.0, 1.5, 1.75, 1.875])
        assert np.array_equal(table.scales, [1, 2, 3, 4])

    def test_discrete_errors_accumulate(self):
        table = partial_sums([1.0, 0.5], stderrs=[0.0, 0.1])
        assert np.allclose(table.stderrs, [0.0, 0.1])

    def test_continuum_trapezoid(self):
        r = np.linspace(0.0, 2.0, 201)
        table = partial_sums(r, mode="continuum", scales=r)  # integral of s ds
        assert table.sums[-1] == pytest.approx(2.0, abs=1e-6)
        assert table.sums[0] == 0.0

    def test_continuum_needs_grid(self):
        with pytest.raises(PercolabError):
            partial_sums([1.0, 0.5], mode="continuum")

    def test_length_mismatch(self):
        with pytest.raises(PercolabError):
            partial_sums([1.0, 0.5], mode="continuum", scales=[0.0, 1.0, 2.0])

    def test_bad_mode(self):
        with pytest.raises(ValueError):
            partial_sums([1.0], mode="other")


class TestDecayFit:
    def test_recovers_exact_rate(self):
        ns = np.array([4, 8, 12, 16])
        th = np.exp(-0.3 * ns + 1.0)
        fit = fit_exponential_decay(ns, th)
        assert fit.slope == pytest.approx(-0.3, abs=1e-12)
        assert fit.rate == pytest.approx(0.3, abs=1e-12)
        assert fit.r2 == pytest.approx(1.0)
        assert "NOT-DECAYING" not in fit.flags

    def test_flat_input_flagged(self):
        ns = np.array([4, 8, 12, 16])
        fit = fit_exponential_decay(ns, np.full(4, 0.6))
        assert "NOT-DECAYING" in fit.flags
        assert fit.slope + 4 * fit.slope_stderr >= NOT_DECAYING_FLOOR

    def test_zero_estimates_dropped(self):
        fit = fit_exponential_decay([2, 4, 6, 8], [0.5, 0.1, 0.02, 0.0])
        assert "ZERO-ESTIMATES-DROPPED" in fit.flags

    def test_too_few_points(self):
        with pytest.raises(PercolabError):
            fit_exponential_decay([4, 8], [0.1, 0.0])

    def test_noisy_inputs_inflate_stderr(self):
        ns = np.array([4, 8, 12, 16])
        th = np.exp(-0.3 * ns)
        quiet = fit_exponential_decay(ns, th, stderrs=np.zeros(4))
        noisy = fit_exponential_decay(ns, th, stderrs=0.3 * th)
        assert noisy.slope_stderr > quiet.slope_stderr


class TestGrowthFit:
    def test_exact_line(self):
        p = np.array([0.55, 0.6, 0.65, 0.7])
        th = 0.9 * (p - 0.5)
        fit = fit_linear_growth(p, th, np.zeros(4), 0.5)
        assert fit.rate == pytest.approx(0.9)
        assert fit.rate_low == pytest.approx(0.9)

    def test_uncertainty_widens_interval(self):
        p = np.array([0.55, 0.6, 0.65, 0.7])
        th = 0.9 * (p - 0.5)
        fit = fit_linear_growth(p, th, np.full(4, 0.01), 0.5)
        assert fit.rate_low < 0.9 < fit.rate

    def test_all_zero_flag(self):
        p = np.array([0.55, 0.6, 0.65])
        fit = fit_linear_growth(p, np.zeros(3), np.zeros(3), 0.5)
        assert "ALL-ZERO-INPUT" in fit.flags
        assert fit.rate == 0.0

    def test_needs_points_above_pc(self):
        with pytest.raises(PercolabError):
            fit_linear_growth([0.4, 0.45, 0.6], [0, 0, 0.1], [0, 0, 0], 0.5)


class TestDifferentialInequality:
    def test_small_grid_no_fail(self):
        cells = check_differential_inequality(
            2, [2, 4], [0.4, 0.5, 0.6], 0.25, 20_000, SEED
        )
        assert len(cells) == 6
        assert all(c.verdict in ("PASS", "INCONCLUSIVE") for c in cells)

    def test_cell_fields_consistent(self):
        cells = check_differential_inequality(2, [2], [0.5], 0.25, 5000, SEED)
        cell = cells[0]
        assert cell.lhs == cell.prime
        assert cell.slack == pytest.approx(cell.lhs - cell.rhs)
        assert cell.sigma >= 1.0  # Sigma starts from theta_0 = 1

    def test_huge_c_fails(self):
        # an absurd constant makes the inequality false; the verdict logic
        # must actually be able to say FAIL
        cells = check_differential_inequality(2, [4], [0.3], 50.0, 20_000, SEED)
        assert cells[0].verdict == "FAIL"

    def test_continuum_variant(self):
        lam = np.linspace(1.0, 2.0, 11)
        th = 1.0 - np.exp(-(lam - 0.8))  # smooth increasing curve
        se = np.full_like(th, 1e-4)
        sums = np.cumsum(th) * 0.1 + 1.0
        cells = check_differential_inequality_continuum(
            lam, th, se, sums, 0.01, scale_r=1.0, lambda_hat=1.0
        )
        assert cells
        assert all(c.verdict in ("PASS", "INCONCLUSIVE") for c in cells)


class TestLemmaValidator:
    def test_tilted_ramp_passes(self):
        f, fp = tilted_ramp_family()
        rep = validate_lemma_family(f, fp, c=0.1)
        assert rep.passed
        assert rep.hypothesis_ok
        lo, hi = rep.beta_interval
        assert lo <= 0.5 <= hi + 1e-9
        assert rep.growth_rate > 0

    def test_hypothesis_violation_raises(self):
        f, fp = tilted_ramp_family()
        with pytest.raises(PercolabError):
            validate_lemma_family(f, fp, c=5.0)

    def test_constant_family_edge_case(self):
        f, fp = constant_family()
        rep = validate_lemma_family(f, fp, c=0.0, require_hypothesis=False)
        # Sigma_n = n everywhere: the transition sits at the grid origin
        assert rep.beta_interval[0] == 0.0
        assert rep.passed
