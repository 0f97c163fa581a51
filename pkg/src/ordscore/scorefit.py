"""Fit score-family shape parameters by minimizing the model's residual deviance.

The search runs on unconstrained coordinates: positive deltas on the log
scale and the g-and-h ``h`` as the square of a free value.  Grids that
overflow or make the design rank deficient score +inf.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from . import glm
from .families import FamilyKind, ScoreFamilyParams, ScoreGrid, ScoreRangeError, quantile_scores, rescale_scores
from .modelframe import ModelFrame, ScoreTerm, SpecError
from .special import DomainError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class OptimizerConfig:
    max_iterations: int = 2000
    ftol: float = 1e-8
    xtol: float = 1e-8
    initial_step: float = 0.25
    restarts: int = 3

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if not (self.ftol > 0 and self.xtol > 0 and self.initial_step > 0):
            raise ValueError("tolerances and initial step must be positive")
        if self.restarts < 0:
            raise ValueError("restarts must be nonnegative")


@dataclass(frozen=True)
class NelderMeadResult:
    x: np.ndarray
    fun: float
    nfev: int
    nit: int
    converged: bool
    runs: int
    trace: tuple[float, ...]  # best value after each iteration


def nelder_mead(f: Callable[[np.ndarray], float], x0, cfg: OptimizerConfig = OptimizerConfig()) -> NelderMeadResult:
    """Derivative-free simplex minimization with restarts at the incumbent.

    Reflection, expansion, contraction and shrink coefficients are
    1, 2, 0.5 and 0.5.  A run stops when every vertex is within ``xtol`` of
    the best one and every value within ``ftol`` of the best value.  After a
    converged run the simplex is rebuilt around the incumbent, up to
    ``cfg.restarts`` times, until a restart no longer improves the value
    by more than ``ftol``.  ``f`` may return +inf for infeasible points.
    """
    x0 = np.array(x0, dtype=float).ravel()
    d = x0.size
    if d < 1:
        raise ValueError("need at least one coordinate")
    nfev = 0

    def call(x):
        nonlocal nfev
        nfev += 1
        v = float(f(x))
        return v if not math.isnan(v) else math.inf

    trace: list[float] = []
    nit = 0
    best_x, best_f = x0, call(x0)
    converged = False
    runs = 0
    while True:
        runs += 1
        sim = np.vstack([best_x] + [best_x + cfg.initial_step * e for e in np.eye(d)])
        fs = np.array([best_f] + [call(v) for v in sim[1:]])
        converged = False
        while nit < cfg.max_iterations:
            order = np.argsort(fs, kind="stable")
            sim, fs = sim[order], fs[order]
            if (np.max(np.abs(sim[1:] - sim[0])) <= cfg.xtol
                    and np.max(np.abs(fs[1:] - fs[0])) <= cfg.ftol):
                converged = True
                break
            nit += 1
            centroid = sim[:-1].mean(axis=0)
            xr = centroid + (centroid - sim[-1])
            fr = call(xr)
            if fr < fs[0]:
                xe = centroid + 2.0 * (xr - centroid)
                fe = call(xe)
                if fe < fr:
                    sim[-1], fs[-1] = xe, fe
                else:
                    sim[-1], fs[-1] = xr, fr
            elif fr < fs[-2]:
                sim[-1], fs[-1] = xr, fr
            else:
                if fr < fs[-1]:
                    xc = centroid + 0.5 * (xr - centroid)
                    fc = call(xc)
                    accept = fc <= fr
                else:
                    xc = centroid + 0.5 * (sim[-1] - centroid)
                    fc = call(xc)
                    accept = fc < fs[-1]
                if accept:
                    sim[-1], fs[-1] = xc, fc
                else:
                    for i in range(1, d + 1):
                        sim[i] = sim[0] + 0.5 * (sim[i] - sim[0])
                        fs[i] = call(sim[i])
            trace.append(float(np.min(fs)))
        i = int(np.argmin(fs))
        improved = best_f - fs[i]
        if fs[i] < best_f or runs == 1:
            best_x, best_f = sim[i].copy(), float(fs[i])
        if not converged or runs > cfg.restarts or not improved > cfg.ftol:
            break
    return NelderMeadResult(best_x, best_f, nfev, nit, converged, runs, tuple(trace))


# ---------------------------------------------------------------------------

DEFAULT_START = {
    FamilyKind.JOHNSON_SU: (0.0, 0.0),    # gamma = 0, delta = 1
    FamilyKind.G_AND_H: (0.0, 0.5),       # g = 0, h = 0.25
    FamilyKind.SINH_ARCSINH: (0.0, 0.0),  # epsilon = 0, delta = 1
}


def params_from_free(kind: FamilyKind, theta) -> ScoreFamilyParams:
    a, b = float(theta[0]), float(theta[1])
    if kind is FamilyKind.G_AND_H:
        return ScoreFamilyParams(kind, a, b * b)
    return ScoreFamilyParams(kind, a, math.exp(b))


def free_from_params(params: ScoreFamilyParams) -> tuple[float, float]:
    if params.kind is FamilyKind.G_AND_H:
        return params.p1, math.sqrt(params.p2)
    return params.p1, math.log(params.p2)


class OptimizationError(RuntimeError):
    pass


@dataclass(frozen=True)
class ScoreFitResult:
    params: Mapping[str, ScoreFamilyParams]
    grids: Mapping[str, ScoreGrid]
    fit: glm.FitSummary
    objective: float
    evaluations: int
    iterations: int
    trace_length: int
    converged: bool
    frame: ModelFrame

    def anchored(self, column: str) -> np.ndarray:
        return rescale_scores(self.grids[column], "anchor_first_two")

    def as_dict(self) -> dict:
        return {
            "objective": self.objective,
            "converged": self.converged,
            "evaluations": self.evaluations,
            "iterations": self.iterations,
            "scores": {
                col: {**self.params[col].as_dict(), "u": self.grids[col].u.tolist(),
                      "q": self.grids[col].q.tolist(), "anchored": self.anchored(col).tolist()}
                for col in self.params
            },
            "fit": self.fit.as_dict(),
        }


def with_free_scores(frame: ModelFrame, free: Sequence[tuple[str, "FamilyKind | str"]]) -> ModelFrame:
    """Replace every term on each named factor by one free score term."""
    wanted = {col: FamilyKind.parse(kind) for col, kind in free}
    terms, placed = [], set()
    for t in frame.terms:
        if t.column in wanted:
            if t.column not in placed:
                terms.append(ScoreTerm(t.column, wanted[t.column]))
                placed.add(t.column)
        else:
            terms.append(t)
    for col, kind in wanted.items():
        if col not in placed:
            terms.append(ScoreTerm(col, kind))
    return frame.with_terms(terms)


def optimize_scores(frame: ModelFrame, free: Sequence[tuple[str, "FamilyKind | str"]] | None = None,
                    cfg: OptimizerConfig = OptimizerConfig(), start=None) -> ScoreFitResult:
    """Minimize deviance (or RSS) over the shape parameters of the free score terms.

    ``free`` optionally lists (factor, family) pairs to turn into free score
    terms; otherwise the frame's parameterless score terms are used.
    ``start`` overrides the starting point on the unconstrained scale.
    """
    if free:
        frame = with_free_scores(frame, free)
    terms = frame.free_score_terms
    if not terms:
        raise SpecError("no free score terms to optimize")
    for t in terms:
        K = frame.factor(t.column).K
        if K < 3:
            raise SpecError(
                f"factor {t.column!r} has K={K}; with two levels every score pair is an affine "
                "copy of any other, so the shape parameters are not identifiable")
    fixed = {t.column: quantile_scores(frame.factor(t.column).K, t.params)
             for t in frame.score_terms if not t.free}

    def grids_at(theta) -> dict:
        grids = dict(fixed)
        for i, t in enumerate(terms):
            params = params_from_free(t.family, theta[2 * i:2 * i + 2])
            grids[t.column] = quantile_scores(frame.factor(t.column).K, params)
        return grids

    def objective(theta) -> float:
        try:
            value = glm.objective(frame, grids_at(theta))
        except (ScoreRangeError, DomainError, np.linalg.LinAlgError, FloatingPointError, OverflowError):
            return math.inf
        return value if math.isfinite(value) else math.inf

    if start is None:
        start = np.concatenate([DEFAULT_START[t.family] for t in terms])
    x0 = np.asarray(start, dtype=float)
    if x0.size != 2 * len(terms):
        raise ValueError(f"start needs {2 * len(terms)} values, got {x0.size}")
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        res = nelder_mead(objective, x0, cfg)
    if not math.isfinite(res.fun):
        raise OptimizationError("every evaluated parameter value gave an invalid score grid")
    grids = grids_at(res.x)
    summary = glm.fit(frame, grids)
    params = {t.column: grids[t.column].params for t in terms}
    log.info("score search: %d evaluations, objective %.10g, converged=%s", res.nfev, res.fun, res.converged)
    return ScoreFitResult(params, grids, summary, res.fun, res.nfev, res.nit, len(res.trace),
                          res.converged, frame)
