import numpy as np
import pytest

from percolab import (
    Box,
    IntensitySpec,
    PercolabError,
    RadiusDist,
    grid_approximation,
    grid_count_tv,
    sample_marked,
    sample_ppp,
    unit_square,
    verify_count_independence,
    verify_mecke,
    verify_superposition,
    verify_void_probability,
)
from percolab.ppp import MECKE_FAMILIES, _poisson_chisquare, unit_ball_volume
from percolab.streams import substream

SEED = 99


class TestBox:
    def test_volume_and_contains(self):
        b = Box((0.0, 0.0), (2.0, 0.5))
        assert b.volume == pytest.approx(1.0)
        assert b.contains([[1.0, 0.25]])[0]
        assert not b.contains([[2.5, 0.25]])[0]

    def test_invalid(self):
        with pytest.raises(ValueError):
            Box((0.0, 0.0), (1.0, 0.0))

    def test_expand(self):
        b = unit_square().expand(0.5)
        assert b.lo == (-0.5, -0.5)
        assert b.volume == pytest.approx(4.0)

    def test_unit_ball_volume(self):
        assert unit_ball_volume(1) == pytest.approx(2.0)
        assert unit_ball_volume(2) == pytest.approx(np.pi)
        assert unit_ball_volume(3) == pytest.approx(4 * np.pi / 3)


class TestSampling:
    def test_deterministic(self):
        spec = IntensitySpec(5.0, unit_square())
        a = sample_ppp(spec, SEED, run=0)
        b = sample_ppp(spec, SEED, run=0)
        assert np.array_equal(a.points, b.points)

    def test_runs_differ(self):
        spec = IntensitySpec(5.0, unit_square())
        a = sample_ppp(spec, SEED, run=0)
        b = sample_ppp(spec, SEED, run=1)
        assert a.points.shape != b.points.shape or not np.array_equal(
            a.points, b.points
        )

    def test_points_in_window(self):
        w = Box((-1.0, 2.0), (1.0, 3.0))
        s = sample_ppp(IntensitySpec(20.0, w), SEED)
        assert w.contains(s.points).all()

    def test_count_law(self):
        spec = IntensitySpec(3.0, unit_square())
        counts = [sample_ppp(spec, SEED, run=i).points.shape[0] for i in range(4000)]
        mean = np.mean(counts)
        assert abs(mean - 3.0) <= 4 * np.sqrt(3.0 / 4000)
        _, _, ok = _poisson_chisquare(np.array(counts), 3.0)
        assert ok

    def test_zero_intensity(self):
        s = sample_ppp(IntensitySpec(0.0, unit_square()), SEED)
        assert s.points.shape[0] == 0

    def test_negative_intensity(self):
        with pytest.raises(ValueError):
            IntensitySpec(-1.0, unit_square())


class TestRadiusDist:
    def test_moments(self):
        assert RadiusDist.fixed(2.0).moment(2) == pytest.approx(4.0)
        u = RadiusDist.uniform(0.5, 1.5)
        assert u.moment(1) == pytest.approx(1.0)
        assert u.moment(2) == pytest.approx(13.0 / 12.0)
        p = RadiusDist.pareto(2.5, 1.0)
        assert p.moment(1) == pytest.approx(2.5 / 1.5)
        assert p.moment(2) == pytest.approx(5.0)
        assert p.moment(3) == float("inf")

    def test_sampling_matches_cdf(self):
        rng = substream(SEED, 50)
        for dist in (RadiusDist.uniform(0.5, 1.5), RadiusDist.pareto(2.5, 1.0)):
            x = dist.sample(rng, 50_000)
            for q in (0.8, 1.2, 2.0):
                emp = float(np.mean(x <= q))
                truth = float(dist.cdf(q))
                assert abs(emp - truth) <= 4 * np.sqrt(0.25 / 50_000) + 1e-9

    def test_encode_decode_roundtrip(self):
        for dist in (
            RadiusDist.fixed(1.0),
            RadiusDist.uniform(0.5, 1.5),
            RadiusDist.pareto(2.5, 1.0),
        ):
            assert RadiusDist.decode(dist.encode()) == dist

    def test_decode_rejects_unknown(self):
        with pytest.raises(ValueError):
            RadiusDist.decode("cauchy:1.0")

    def test_support_max(self):
        assert RadiusDist.fixed(2.0).support_max == 2.0
        assert RadiusDist.uniform(0.5, 1.5).support_max == 1.5
        assert RadiusDist.pareto(2.5, 1.0).support_max == float("inf")

    def test_marked_sample_padding(self):
        s = sample_marked(10.0, RadiusDist.fixed(1.0), unit_square(), SEED,
                          padding=1.0)
        padded = unit_square().expand(1.0)
        assert padded.contains(s.centers).all()
        assert np.all(s.radii == 1.0)
        assert s.padding == 1.0


class TestLaws:
    def test_void_probability(self):
        for res in verify_void_probability(1.5, unit_square(), 100_000, SEED):
            assert res.verdict == "PASS"

    def test_count_independence(self):
        a = Box((0.0, 0.0), (0.4, 0.4))
        b = Box((0.6, 0.6), (1.0, 1.0))
        res = verify_count_independence(10.0, unit_square(), a, b, 20_000, SEED)
        assert res.verdict == "PASS"

    def test_superposition(self):
        for res in verify_superposition(1.0, 2.0, unit_square(), 20_000, SEED):
            assert res.verdict == "PASS"

    def test_superposition_degenerate(self):
        for res in verify_superposition(2.0, 0.0, unit_square(), 20_000, SEED):
            assert res.verdict == "PASS"

    @pytest.mark.parametrize("family", MECKE_FAMILIES)
    def test_mecke(self, family):
        res = verify_mecke(2.0, unit_square(), family, 20_000, SEED)
        assert res.verdict == "PASS"
        assert abs(res.z) <= 4.0

    def test_mecke_unknown_family(self):
        with pytest.raises(PercolabError):
            verify_mecke(1.0, unit_square(), "other", 10, SEED)

    def test_mecke_margin_guard(self):
        with pytest.raises(PercolabError):
            verify_mecke(1.0, unit_square(), "pair-kernel", 10, SEED, rho0=0.6)


class TestGridApproximation:
    def test_parameter_guard(self):
        with pytest.raises(PercolabError):
            grid_approximation(2.0, 1.0, unit_square(), SEED)

    def test_sites_on_lattice(self):
        s = grid_approximation(0.25, 1.0, unit_square(), SEED)
        # occupied sites sit at cell centers
        frac = (s.points / 0.25) % 1.0
        assert np.allclose(frac, 0.5)

    def test_tv_decreases_with_eps(self):
        tvs = [grid_count_tv(eps, 1.0, unit_square(), 100_000, SEED)
               for eps in (0.2, 0.1, 0.05)]
        assert tvs[0] >= tvs[1] >= tvs[2]
        assert tvs[2] < 0.05
