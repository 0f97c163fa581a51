import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ordscore.datasets import ESOPH_POLY_TERMS, esoph_score_terms
from ordscore.families import FamilyKind, ScoreFamilyParams, quantile_scores
from ordscore.glm import fit, objective
from ordscore.modelframe import (
    BinomialResponse, FactorColumn, ModelFrame, NumericColumn, PolyTerm, ScoreTerm, SpecError,
)
from ordscore.scorefit import (
    OptimizationError, OptimizerConfig, free_from_params, nelder_mead, optimize_scores, params_from_free,
    with_free_scores,
)


class TestNelderMead:
    def test_quadratic(self):
        res = nelder_mead(lambda x: (x[0] - 1) ** 2 + 3 * (x[1] - 2) ** 2, [0.0, 0.0],
                          OptimizerConfig(ftol=1e-14, xtol=1e-9))
        np.testing.assert_allclose(res.x, [1, 2], atol=1e-5)
        assert res.converged

    def test_rosenbrock(self):
        rosen = lambda x: 100 * (x[1] - x[0] ** 2) ** 2 + (1 - x[0]) ** 2
        res = nelder_mead(rosen, [-1.2, 1.0], OptimizerConfig(max_iterations=5000, ftol=1e-14, xtol=1e-10))
        np.testing.assert_allclose(res.x, [1, 1], atol=1e-3)

    def test_constant(self):
        res = nelder_mead(lambda x: 4.0, [0.3, -0.7])
        np.testing.assert_array_equal(res.x, [0.3, -0.7])
        assert res.fun == 4.0

    def test_one_dimension(self):
        res = nelder_mead(lambda x: abs(x[0] - 3.3), [0.0], OptimizerConfig(ftol=1e-12, xtol=1e-10))
        assert res.x[0] == pytest.approx(3.3, abs=1e-8)

    def test_infeasible_region(self):
        f = lambda x: math.inf if x[0] < 0 else (x[0] - 0.5) ** 2 + x[1] ** 2
        res = nelder_mead(f, [2.0, 1.0], OptimizerConfig(ftol=1e-14, xtol=1e-9))
        np.testing.assert_allclose(res.x, [0.5, 0], atol=1e-5)

    def test_nan_is_infeasible(self):
        res = nelder_mead(lambda x: math.nan if x[0] > 1 else (x[0] - 1) ** 2, [0.0])
        assert math.isfinite(res.fun)

    def test_budget(self):
        rosen = lambda x: 100 * (x[1] - x[0] ** 2) ** 2 + (1 - x[0]) ** 2
        res = nelder_mead(rosen, [-1.2, 1.0], OptimizerConfig(max_iterations=10))
        assert res.nit == 10 and not res.converged

    @settings(max_examples=40)
    @given(st.floats(-5, 5), st.floats(-5, 5), st.floats(0.1, 10))
    def test_trace_monotone(self, a, b, c):
        res = nelder_mead(lambda x: c * (x[0] - a) ** 2 + (x[1] - b) ** 4 + x[0] * x[1] / 10, [0.0, 0.0])
        assert all(t1 <= t0 for t0, t1 in zip(res.trace, res.trace[1:]))
        assert res.fun <= min(res.trace, default=res.fun)

    @pytest.mark.parametrize("kw", [dict(max_iterations=0), dict(ftol=0), dict(initial_step=-1), dict(restarts=-1)])
    def test_bad_config(self, kw):
        with pytest.raises(ValueError):
            OptimizerConfig(**kw)


@pytest.mark.parametrize("params", [
    ScoreFamilyParams(FamilyKind.JOHNSON_SU, -0.3, 0.7),
    ScoreFamilyParams(FamilyKind.G_AND_H, 0.2, 1.3),
    ScoreFamilyParams(FamilyKind.SINH_ARCSINH, 0.4, 2.0),
])
def test_parameter_mapping_roundtrip(params):
    back = params_from_free(params.kind, free_from_params(params))
    assert back.p1 == pytest.approx(params.p1) and back.p2 == pytest.approx(params.p2)


class TestEsophSearch:
    def test_objective_equals_fit(self, esoph):
        res = optimize_scores(esoph.with_terms(esoph_score_terms("su")))
        assert abs(res.objective - res.fit.deviance) < 1e-10
        assert abs(objective(res.frame, res.grids) - res.objective) < 1e-10

    @pytest.mark.parametrize("kind", list(FamilyKind))
    def test_bounded_by_full_factor(self, esoph, kind):
        full = fit(esoph).deviance
        res = optimize_scores(esoph.with_terms(esoph_score_terms(kind)))
        assert res.objective >= full - 1e-8
        # one slope instead of three contrasts costs little on these data
        assert res.objective <= full + 0.001

    def test_su_z_statistic(self, esoph):
        res = optimize_scores(esoph.with_terms(esoph_score_terms("su")))
        assert res.fit.row("alcgp.score")["statistic"] == pytest.approx(10.06, abs=0.1)
        assert res.converged

    def test_diamonds_gh_4d(self, diamonds_csv):
        from ordscore.datasets import diamonds_score_terms, prepare_diamonds
        frame = prepare_diamonds(diamonds_csv)
        res = optimize_scores(frame.with_terms(diamonds_score_terms("gh")))
        assert res.fit.residual_sd == pytest.approx(6.90, abs=0.03)
        assert res.fit.df_residual == 532 and set(res.params) == {"clarity", "color"}

    def test_deterministic(self, esoph):
        frame = esoph.with_terms(esoph_score_terms("gh"))
        a = optimize_scores(frame)
        b = optimize_scores(frame)
        assert a.objective == b.objective and a.evaluations == b.evaluations
        np.testing.assert_array_equal(a.grids["alcgp"].q, b.grids["alcgp"].q)

    def test_starts_agree(self, esoph):
        frame = esoph.with_terms(esoph_score_terms("su"))
        starts = [(0, 0), (1, 0.5), (-1, -0.5), (0.5, 1), (-0.5, -1)]
        values = [optimize_scores(frame, start=s).objective for s in starts]
        best = min(values)
        assert sum(v <= best + 1e-3 for v in values) >= 4

    def test_families_agree(self, esoph):
        su = optimize_scores(esoph.with_terms(esoph_score_terms("su")))
        gh = optimize_scores(esoph.with_terms(esoph_score_terms("gh")))
        assert abs(su.objective - gh.objective) < 1e-3
        np.testing.assert_allclose(su.anchored("alcgp"), gh.anchored("alcgp"), atol=0.02)

    def test_free_argument(self, esoph):
        res = optimize_scores(esoph, free=[("alcgp", "sas")])
        assert [t.column for t in res.frame.terms if isinstance(t, ScoreTerm)] == ["alcgp"]
        assert res.fit.p == 5

    def test_fixed_term_kept(self, esoph):
        fixed = ScoreFamilyParams(FamilyKind.JOHNSON_SU, 0.0, 1.0)
        terms = [ScoreTerm("agegp", "su", fixed), PolyTerm("tobgp", (1,)), ScoreTerm("alcgp", "gh")]
        res = optimize_scores(esoph.with_terms(terms))
        assert set(res.params) == {"alcgp"}
        np.testing.assert_array_equal(res.grids["agegp"].q, quantile_scores(6, fixed).q)

    def test_no_free_terms(self, esoph):
        with pytest.raises(SpecError, match="no free"):
            optimize_scores(esoph)

    def test_start_length(self, esoph):
        with pytest.raises(ValueError, match="start needs 2"):
            optimize_scores(esoph.with_terms(esoph_score_terms("su")), start=[0.0])


def binary_factor_frame(K):
    codes = np.tile(np.arange(1, K + 1), 3)
    cols = {"g": FactorColumn("g", [str(k) for k in range(K)], codes),
            "s": NumericColumn("s", (codes * 2) % 7 + 1), "f": NumericColumn("f", np.full(codes.size, 6))}
    return ModelFrame(cols, BinomialResponse("s", "f"), [ScoreTerm("g", "su")])


def test_two_levels_refused():
    with pytest.raises(SpecError, match="not identifiable"):
        optimize_scores(binary_factor_frame(2))


def test_all_invalid(monkeypatch):
    import ordscore.scorefit as sf
    from ordscore.families import ScoreRangeError

    def boom(K, params):
        raise ScoreRangeError(params, 0.0)

    monkeypatch.setattr(sf, "quantile_scores", boom)
    with pytest.raises(OptimizationError):
        optimize_scores(binary_factor_frame(4), cfg=OptimizerConfig(max_iterations=20))


def test_with_free_scores_replaces_poly(esoph):
    frame = with_free_scores(esoph, [("agegp", "gh")])
    kinds = [(type(t).__name__, t.column) for t in frame.terms]
    assert kinds == [("ScoreTerm", "agegp"), ("PolyTerm", "tobgp"), ("PolyTerm", "alcgp")]
