import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ordscore.families import (
    FamilyKind, ScoreFamilyParams, ScoreGrid, ScoreRangeError, grid_levels,
    quantile_scores, rescale_scores, transform,
)
from ordscore.special import DomainError, norm_cdf, norm_quantile

SU, GH, SAS = FamilyKind.JOHNSON_SU, FamilyKind.G_AND_H, FamilyKind.SINH_ARCSINH


def bisect_quantile(p):
    lo, hi = -40.0, 40.0
    while hi - lo > 1e-13:
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if norm_cdf(mid) < p else (lo, mid)
    return 0.5 * (lo + hi)


class TestGridLevels:
    def test_k4(self):
        np.testing.assert_allclose(grid_levels(4), [0.2, 0.4, 0.6, 0.8], atol=1e-15)

    def test_k2(self):
        np.testing.assert_allclose(grid_levels(2), [1 / 3, 2 / 3], atol=1e-15)

    def test_k6(self):
        np.testing.assert_allclose(grid_levels(6), np.arange(1, 7) / 7, atol=1e-15)

    @pytest.mark.parametrize("K", [1, 0, -3, 2.5])
    def test_domain(self, K):
        with pytest.raises(DomainError):
            grid_levels(K)

    @pytest.mark.parametrize("K", range(2, 15))
    def test_symmetric(self, K):
        u = grid_levels(K)
        np.testing.assert_allclose(u + u[::-1], 1.0, atol=1e-15)


class TestParams:
    @pytest.mark.parametrize("kind, p2", [(SU, 0.0), (SU, -1.0), (SAS, 0.0), (GH, -0.1)])
    def test_invalid_second_parameter(self, kind, p2):
        with pytest.raises(DomainError):
            ScoreFamilyParams(kind, 0.0, p2)

    def test_h_zero_allowed(self):
        ScoreFamilyParams(GH, 0.3, 0.0)

    def test_parse_kind(self):
        assert ScoreFamilyParams("sinh-arcsinh", 0, 1).kind is SAS
        with pytest.raises(ValueError):
            FamilyKind.parse("beta")


class TestTransform:
    @given(st.floats(-30, 30))
    def test_gh_identity(self, z):
        assert transform(z, ScoreFamilyParams(GH, 0.0, 0.0)) == z

    @given(st.floats(-30, 30))
    def test_sas_identity(self, z):
        assert transform(z, ScoreFamilyParams(SAS, 0.0, 1.0)) == pytest.approx(z, rel=1e-14, abs=1e-15)

    def test_su_closed_form(self):
        assert transform(math.log(2), ScoreFamilyParams(SU, 0.0, 1.0)) == pytest.approx(0.75, abs=1e-15)

    def test_gh_formula(self):
        z, g, h = 1.3, 0.4, 0.7
        expected = (math.exp(g * z) - 1) / g * math.exp(h * z * z / 2)
        assert transform(z, ScoreFamilyParams(GH, g, h)) == pytest.approx(expected, rel=1e-14)

    def test_sas_formula(self):
        z, e, d = -0.8, 0.6, 0.45
        assert transform(z, ScoreFamilyParams(SAS, e, d)) == pytest.approx(math.sinh((math.asinh(z) + e) / d), rel=1e-14)

    @pytest.mark.parametrize("params", [
        ScoreFamilyParams(SU, 0.5, 0.3), ScoreFamilyParams(GH, -0.6, 1.2), ScoreFamilyParams(SAS, -1.0, 0.7),
    ])
    def test_strictly_increasing(self, params):
        z = np.linspace(-4, 4, 4001)
        assert np.all(np.diff(transform(z, params)) > 0)

    def test_continuity_at_g_zero(self):
        # the exp(h z^2/2) factor scales any difference, so compare relative to |Y|
        z = np.linspace(-5, 5, 201)
        for h in (0.0, 0.3, 1.0, 2.0):
            a = transform(z, ScoreFamilyParams(GH, 1e-8, h))
            b = transform(z, ScoreFamilyParams(GH, 0.0, h))
            assert np.all(np.abs(a - b) < 1e-6 * np.maximum(1.0, np.abs(b)))
        a = transform(z, ScoreFamilyParams(GH, 1e-8, 0.0))
        assert np.max(np.abs(a - z)) < 1e-6

    def test_overflow_carries_params(self):
        params = ScoreFamilyParams(SU, 0.0, 1e-3)
        with pytest.raises(ScoreRangeError) as info:
            transform(5.0, params)
        assert info.value.params == params
        with pytest.raises(ScoreRangeError):
            transform(np.array([0.0, 3.0]), ScoreFamilyParams(GH, 0.0, 200.0))
        with pytest.raises(ScoreRangeError):
            transform(3.0, ScoreFamilyParams(GH, 400.0, 0.0))

    def test_huge_but_finite(self):
        y = transform(1.5, ScoreFamilyParams(GH, 0.0, 600.0))
        assert 1e290 < y < 1e300


class TestQuantileScores:
    def test_su_published_values(self):
        q = quantile_scores(4, ScoreFamilyParams(SU, -0.025, 0.395)).q
        np.testing.assert_allclose(q, [-3.88, -0.61, 0.76, 4.42], atol=0.01)

    def test_gh_published_values(self):
        q = quantile_scores(4, ScoreFamilyParams(GH, 0.116, 1.85)).q
        np.testing.assert_allclose(q, [-1.55, -0.26, 0.27, 1.70], atol=0.01)

    def test_gh_reduces_to_normal(self):
        oracle = [bisect_quantile(u) for u in (0.2, 0.4, 0.6, 0.8)]
        np.testing.assert_allclose(oracle, [-0.8416, -0.2533, 0.2533, 0.8416], atol=5e-5)
        q = quantile_scores(4, ScoreFamilyParams(GH, 0.0, 0.0)).q
        np.testing.assert_allclose(q, oracle, atol=1e-12)

    @pytest.mark.parametrize("K", range(2, 11))
    def test_reductions(self, K):
        normal = np.array([norm_quantile(u) for u in grid_levels(K)])
        for params in (ScoreFamilyParams(GH, 0, 0), ScoreFamilyParams(SAS, 0, 1)):
            np.testing.assert_allclose(quantile_scores(K, params).q, normal, atol=1e-12, rtol=0)

    @pytest.mark.parametrize("kind", list(FamilyKind))
    def test_monotone_random_draws(self, kind):
        rng = np.random.default_rng(hash(kind.value) % 2**32)
        for _ in range(10_000):
            params = ScoreFamilyParams(kind, rng.uniform(-3, 3), rng.uniform(0.05, 5))
            K = int(rng.integers(2, 11))
            q = quantile_scores(K, params).q
            assert np.all(np.diff(q) > 0) and np.all(np.isfinite(q))

    @pytest.mark.parametrize("kind", list(FamilyKind))
    @pytest.mark.parametrize("K", [2, 3, 4, 7, 10])
    def test_symmetric_when_p1_zero(self, kind, K):
        for p2 in (0.05, 0.4, 1.0, 2.5, 5.0):
            q = quantile_scores(K, ScoreFamilyParams(kind, 0.0, p2)).q
            assert np.max(np.abs(q + q[::-1])) <= 1e-10 * max(1.0, np.max(np.abs(q)))

    def test_sas_tailweight(self):
        for K in (3, 5, 9):
            normal = abs(norm_quantile(K / (K + 1)))
            assert abs(quantile_scores(K, ScoreFamilyParams(SAS, 0, 1.6)).q[-1]) < normal
            assert abs(quantile_scores(K, ScoreFamilyParams(SAS, 0, 0.6)).q[-1]) > normal

    def test_overflow_propagates(self):
        with pytest.raises(ScoreRangeError):
            quantile_scores(8, ScoreFamilyParams(SU, 0.0, 1e-3))


class TestRescale:
    def test_anchor_su(self):
        grid = quantile_scores(4, ScoreFamilyParams(SU, -0.025, 0.395))
        np.testing.assert_allclose(rescale_scores(grid, "anchor_first_two"), [1, 2, 2.42, 3.54], atol=0.02)

    def test_anchor_gh(self):
        grid = quantile_scores(4, ScoreFamilyParams(GH, 0.116, 1.85))
        np.testing.assert_allclose(rescale_scores(grid, "anchor"), [1, 2, 2.42, 3.54], atol=0.02)

    def test_none_is_identity(self):
        grid = quantile_scores(5, ScoreFamilyParams(SAS, 0.3, 0.8))
        np.testing.assert_array_equal(rescale_scores(grid, "none"), grid.q)

    def test_times_k_plus_one(self):
        grid = quantile_scores(5, ScoreFamilyParams(GH, 0.0, 0.0))
        np.testing.assert_allclose(rescale_scores(grid, "times_K_plus_1"), 6 * grid.q)

    def test_degenerate_spacing(self):
        grid = ScoreGrid(3, grid_levels(3), np.array([0.0, 1e-13, 1.0]))
        with pytest.raises(ValueError):
            rescale_scores(grid, "anchor_first_two")

    def test_unknown_mode(self):
        grid = quantile_scores(3, ScoreFamilyParams(GH, 0.0, 0.0))
        with pytest.raises(ValueError):
            rescale_scores(grid, "log")
