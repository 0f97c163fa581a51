"""Least squares and grouped-binomial logistic fits with coefficient tables.

Linear algebra goes through a QR factorization of the column-scaled design,
so score columns of very different magnitude (up to ~1e10) stay well
conditioned.  Standard errors for the logistic model use the normal
reference (z statistics); the gaussian model uses Student t with n - p df.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from ._backend import kernels
from .families import ScoreGrid
from .modelframe import DesignMatrix, GaussianResponse, ModelFrame, SpecError, build_design
from .special import norm_quantile, two_sided_normal_p, two_sided_t_p

RANK_TOL = 1e-10
IRLS_TOL = 1e-10
IRLS_MAXIT = 50
SEPARATION_BOUND = 30.0
MU_EPS = float(np.finfo(float).eps)


class RankDeficientError(np.linalg.LinAlgError):
    def __init__(self, column: str):
        self.column = column
        super().__init__(f"design is rank deficient: column {column!r} is aliased")


@dataclass(frozen=True)
class FitSummary:
    names: tuple[str, ...]
    estimates: np.ndarray
    std_errors: np.ndarray
    statistics: np.ndarray
    p_values: np.ndarray
    family: str
    stat_kind: str  # "z" or "t"
    deviance: float  # residual deviance, or RSS for gaussian fits
    df_residual: int
    n: int
    p: int
    residual_sd: float | None = None
    converged: bool = True
    iterations: int = 0
    deviance_trace: tuple[float, ...] = ()
    warnings: tuple[str, ...] = ()
    fitted: np.ndarray | None = field(default=None, repr=False)

    def coef(self, name: str) -> float:
        return float(self.estimates[self.names.index(name)])

    def row(self, name: str) -> dict:
        i = self.names.index(name)
        return {"estimate": float(self.estimates[i]), "std_error": float(self.std_errors[i]),
                "statistic": float(self.statistics[i]), "p_value": float(self.p_values[i])}

    def as_dict(self) -> dict:
        out = {
            "family": self.family,
            "stat_kind": self.stat_kind,
            "coefficients": {name: self.row(name) for name in self.names},
            "deviance": self.deviance,
            "df_residual": self.df_residual,
            "n": self.n,
            "p": self.p,
            "converged": self.converged,
            "iterations": self.iterations,
            "warnings": list(self.warnings),
        }
        if self.residual_sd is not None:
            out["residual_sd"] = self.residual_sd
        return out


class _ScaledQR:
    """QR of a design with unit-norm columns; raises on aliased columns."""

    def __init__(self, X: np.ndarray, names):
        scale = np.sqrt(np.einsum("ij,ij->j", X, X))
        for j, s in enumerate(scale):
            if not s > 0 or not math.isfinite(s):
                raise RankDeficientError(names[j])
        self.scale = scale
        self.Q, self.R = np.linalg.qr(X / scale)
        diag = np.abs(np.diag(self.R))
        for j, d in enumerate(diag):
            if not d > RANK_TOL:
                raise RankDeficientError(names[j])

    def solve(self, y: np.ndarray) -> np.ndarray:
        return np.linalg.solve(self.R, self.Q.T @ y) / self.scale

    def unscaled_cov(self) -> np.ndarray:
        Rinv = np.linalg.inv(self.R)
        return (Rinv @ Rinv.T) / np.outer(self.scale, self.scale)


def _as_design(X, names=None) -> tuple[np.ndarray, tuple[str, ...]]:
    if isinstance(X, DesignMatrix):
        return np.asarray(X.matrix, dtype=float), X.names
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError("design must be two-dimensional")
    if names is None:
        names = tuple(f"x{j}" for j in range(X.shape[1]))
    return X, tuple(names)


def fit_ols(X, y, names=None) -> FitSummary:
    """Ordinary least squares with t statistics on n - p degrees of freedom."""
    X, names = _as_design(X, names)
    y = np.asarray(y, dtype=float)
    n, p = X.shape
    if y.shape != (n,):
        raise ValueError(f"response has shape {y.shape}, design has {n} rows")
    if n <= p:
        raise ValueError(f"need more rows than columns, got n={n}, p={p}")
    qr = _ScaledQR(X, names)
    beta = qr.solve(y)
    fitted = X @ beta
    resid = y - fitted
    rss = float(resid @ resid)
    df = n - p
    s2 = rss / df
    se = np.sqrt(np.diag(qr.unscaled_cov()) * s2)
    with np.errstate(divide="ignore", invalid="ignore"):
        stat = np.where(se > 0, beta / se, np.copysign(np.inf, beta))
    pv = np.array([two_sided_t_p(t, df) if math.isfinite(t) else 0.0 for t in stat])
    return FitSummary(names, beta, se, stat, pv, "gaussian", "t", rss, df, n, p,
                      residual_sd=math.sqrt(s2), fitted=fitted)


def rss_only(X: np.ndarray, y: np.ndarray, names=None) -> float:
    """Residual sum of squares without the inference table."""
    X, names = _as_design(X, names)
    qr = _ScaledQR(X, names)
    resid = y - qr.Q @ (qr.Q.T @ y)
    return float(resid @ resid)


def _expit(eta):
    return 1.0 / (1.0 + np.exp(-eta))


def fit_logistic_grouped(X, successes, failures, names=None) -> FitSummary:
    """Maximum likelihood for grouped binomial counts with the logit link (IRLS).

    Starts from mu = (y + 1/2) / (m + 1).  Stops when the relative change in
    deviance drops below 1e-10 or after 50 iterations; a step that raises the
    deviance is halved until it does not.
    """
    X, names = _as_design(X, names)
    y = np.asarray(successes, dtype=float)
    m = y + np.asarray(failures, dtype=float)
    n, p = X.shape
    if y.shape != (n,) or m.shape != (n,):
        raise ValueError("count vectors must match the design rows")
    if np.any(y < 0) or np.any(m - y < 0):
        raise ValueError("counts must be nonnegative")
    if not np.any(m > 0):
        raise ValueError("no trials: every row has zero successes and failures")

    mu = (y + 0.5) / (m + 1.0)
    eta = np.log(mu / (1.0 - mu))
    dev_old = kernels.binomial_deviance(y, m, mu)
    trace = [dev_old]
    beta_old = None
    converged = False
    it = 0
    for it in range(1, IRLS_MAXIT + 1):
        _, w, z = kernels.binomial_working(eta, y, m)
        sw = np.sqrt(w)
        beta = _ScaledQR(X * sw[:, None], names).solve(z * sw)
        eta = X @ beta
        mu = np.clip(_expit(eta), MU_EPS, 1.0 - MU_EPS)
        dev = kernels.binomial_deviance(y, m, mu)
        if beta_old is not None:
            halvings = 0
            while not dev <= dev_old and halvings < 30:
                beta = 0.5 * (beta + beta_old)
                eta = X @ beta
                mu = np.clip(_expit(eta), MU_EPS, 1.0 - MU_EPS)
                dev = kernels.binomial_deviance(y, m, mu)
                halvings += 1
        trace.append(dev)
        if abs(dev - dev_old) / (abs(dev) + 0.1) < IRLS_TOL:
            converged = True
            break
        dev_old = dev
        beta_old = beta

    _, w, _ = kernels.binomial_working(eta, y, m)
    qr = _ScaledQR(X * np.sqrt(w)[:, None], names)
    se = np.sqrt(np.diag(qr.unscaled_cov()))
    stat = beta / se
    pv = np.array([two_sided_normal_p(v) for v in stat])
    notes = []
    if np.any(np.abs(beta) > SEPARATION_BOUND):
        notes.append("possible separation: some |coefficient| > 30")
    if not converged:
        notes.append(f"IRLS did not converge in {IRLS_MAXIT} iterations")
    return FitSummary(names, beta, se, stat, pv, "binomial", "z", float(dev), int(np.sum(m > 0)) - p,
                      n, p, converged=converged, iterations=it, deviance_trace=tuple(trace),
                      warnings=tuple(notes), fitted=mu)


def fit(frame: ModelFrame, grids: Mapping[str, ScoreGrid] | None = None) -> FitSummary:
    """Build the design for ``frame`` and fit according to its response."""
    design = build_design(frame, grids)
    if frame.family == "binomial":
        s, f = frame.binomial_counts()
        return fit_logistic_grouped(design, s, f)
    return fit_ols(design, frame.response_vector())


def objective(frame: ModelFrame, grids: Mapping[str, ScoreGrid] | None = None) -> float:
    """Residual deviance (binomial) or RSS (gaussian) of the frame's model."""
    design = build_design(frame, grids)
    if frame.family == "binomial":
        s, f = frame.binomial_counts()
        return fit_logistic_grouped(design, s, f).deviance
    return rss_only(design.matrix, frame.response_vector(), design.names)


# ---------------------------------------------------------------------------
# Box-Cox

CHI2_1_95 = norm_quantile(0.975) ** 2


@dataclass(frozen=True)
class BoxCoxProfile:
    lambdas: np.ndarray
    loglik: np.ndarray
    lambda_hat: float
    interval: tuple[float, float]


def boxcox_profile(frame: ModelFrame, lambdas=None, grids=None) -> BoxCoxProfile:
    """Profile log-likelihood of the Box-Cox power for a gaussian response.

    Uses the geometric-mean scaled transform, so the profile is
    ``-(n/2) log(RSS/n)``.  The raw response column is used; any power on
    the response spec is ignored.  The maximizer is refined by a parabola
    through the best grid point and its neighbours; the interval is the
    set where the profile is within chi2_1(0.95)/2 of its maximum.
    """
    if not isinstance(frame.response, GaussianResponse):
        raise SpecError("Box-Cox needs a gaussian response")
    y = np.array(frame.columns[frame.response.column].values, dtype=float)
    if np.any(y <= 0):
        raise SpecError("Box-Cox needs a strictly positive response")
    lambdas = np.linspace(-2.0, 2.0, 401) if lambdas is None else np.asarray(lambdas, dtype=float)
    design = build_design(frame, grids)
    qr = _ScaledQR(design.matrix, design.names)
    n = len(y)
    logy = np.log(y)
    gm = math.exp(float(np.mean(logy)))

    def profile(lam: float) -> float:
        if abs(lam) < 1e-12:
            z = gm * logy
        else:
            z = np.expm1(lam * logy) / (lam * gm ** (lam - 1.0))
        r = z - qr.Q @ (qr.Q.T @ z)
        return -0.5 * n * math.log(float(r @ r) / n)

    ll = np.array([profile(float(lam)) for lam in lambdas])
    i = int(np.argmax(ll))
    lam_hat, best = float(lambdas[i]), float(ll[i])
    if 0 < i < len(lambdas) - 1:
        x0, x1, x2 = lambdas[i - 1:i + 2]
        f0, f1, f2 = ll[i - 1:i + 2]
        denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
        a = (x2 * (f1 - f0) + x1 * (f0 - f2) + x0 * (f2 - f1)) / denom
        b = (x2 * x2 * (f0 - f1) + x1 * x1 * (f2 - f0) + x0 * x0 * (f1 - f2)) / denom
        if a < 0:
            cand = float(-b / (2 * a))
            f_cand = profile(cand)
            if f_cand >= best:
                lam_hat, best = cand, f_cand
    cut = best - 0.5 * CHI2_1_95

    def crossing(outside: float, inside: float) -> float:
        # bisection on the exact profile; the grid alone is too coarse for sharp peaks
        for _ in range(60):
            mid = 0.5 * (outside + inside)
            if profile(mid) >= cut:
                inside = mid
            else:
                outside = mid
        return 0.5 * (outside + inside)

    below = np.nonzero((ll < cut) & (lambdas < lam_hat))[0]
    lower = crossing(float(lambdas[below[-1]]), lam_hat) if below.size else float(lambdas[0])
    below = np.nonzero((ll < cut) & (lambdas > lam_hat))[0]
    upper = crossing(float(lambdas[below[0]]), lam_hat) if below.size else float(lambdas[-1])
    return BoxCoxProfile(np.array(lambdas), ll, lam_hat, (lower, upper))
