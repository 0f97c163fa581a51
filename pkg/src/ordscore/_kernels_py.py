"""Pure-Python kernels.

Same algorithms and constants as ``_kernels.pyx``; used when the compiled
extension is unavailable or ``ORDSCORE_PURE_PYTHON`` is set.  No argument
checking happens here, the public wrappers in :mod:`ordscore.special` and
:mod:`ordscore.families` own that.
"""

from __future__ import annotations

import math

import numpy as np

SQRT2 = math.sqrt(2.0)
SQRT2PI = math.sqrt(2.0 * math.pi)
LOG_MAX = math.log(1e300)
ASINH_MAX = math.asinh(1e300)
G_ZERO = 1e-12
CF_MAXIT = 300
CF_EPS = 1e-15
FPMIN = 1e-300
T_NORMAL_DF = 1e5
MU_EPS = 2.220446049250313e-16

SU, GH, SAS = 0, 1, 2

# Acklam's rational approximation, lower half only
_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00)
P_LOW = 0.02425


def norm_cdf(z: float) -> float:
    return 0.5 * math.erfc(-z / SQRT2)


def _lower_quantile(p: float) -> float:
    # p in (0, 0.5]
    if p < P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        x = ((((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5])
             / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0))
    else:
        q = p - 0.5
        r = q * q
        x = ((((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q
             / (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0))
    # one Halley step on the cdf
    half_x2 = 0.5 * x * x
    if half_x2 < 700.0:
        e = 0.5 * math.erfc(-x / SQRT2) - p
        u = e * SQRT2PI * math.exp(half_x2)
        x = x - u / (1.0 + 0.5 * x * u)
    return x


def norm_quantile(p: float) -> float:
    if p > 0.5:
        return -_lower_quantile(1.0 - p)
    return _lower_quantile(p)


def _betacf(a: float, b: float, x: float) -> float:
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < FPMIN:
        d = FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, CF_MAXIT + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < FPMIN:
            d = FPMIN
        c = 1.0 + aa / c
        if abs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < FPMIN:
            d = FPMIN
        c = 1.0 + aa / c
        if abs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < CF_EPS:
            return h
    return math.nan


def inc_beta_reg(a: float, b: float, x: float) -> float:
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    log_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                 + a * math.log(x) + b * math.log1p(-x))
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def t_cdf(t: float, df: float) -> float:
    if df > T_NORMAL_DF:
        return norm_cdf(t * (1.0 - 0.25 / df) / math.sqrt(1.0 + t * t / (2.0 * df)))
    tail = 0.5 * inc_beta_reg(0.5 * df, 0.5, df / (df + t * t))
    return 1.0 - tail if t > 0 else tail


def transform(z: float, kind: int, p1: float, p2: float) -> float:
    """Family transform of a standard-normal value; +-inf past 1e300 in magnitude."""
    if kind == SU:
        w = (z - p1) / p2
        if abs(w) > ASINH_MAX:
            return math.copysign(math.inf, w)
        return math.sinh(w)
    if kind == GH:
        if z == 0.0:
            return 0.0
        if abs(p1) < G_ZERO:
            base = z
            log_mag = math.log(abs(z))
        else:
            a = p1 * z
            if a > 700.0:
                log_mag = a - math.log(abs(p1))
                base = math.nan
            else:
                base = math.expm1(a) / p1
                log_mag = math.log(abs(base))
        tail = 0.5 * p2 * z * z
        if log_mag + tail > LOG_MAX:
            return math.copysign(math.inf, z)
        if base != base:
            return math.copysign(math.exp(log_mag + tail), z)
        return base * math.exp(tail)
    w = (math.asinh(z) + p1) / p2
    if abs(w) > ASINH_MAX:
        return math.copysign(math.inf, w)
    return math.sinh(w)


def norm_cdf_array(z: np.ndarray) -> np.ndarray:
    return np.array([norm_cdf(v) for v in np.asarray(z, dtype=float).ravel()]).reshape(np.shape(z))


def norm_quantile_array(p: np.ndarray) -> np.ndarray:
    return np.array([norm_quantile(v) for v in np.asarray(p, dtype=float).ravel()]).reshape(np.shape(p))


def transform_array(z: np.ndarray, kind: int, p1: float, p2: float) -> np.ndarray:
    return np.array([transform(v, kind, p1, p2) for v in np.asarray(z, dtype=float).ravel()]).reshape(np.shape(z))


def binomial_working(eta: np.ndarray, y: np.ndarray, m: np.ndarray):
    """Mean, IRLS weights and working response for the logit link."""
    mu = 1.0 / (1.0 + np.exp(-eta))
    mu = np.clip(mu, MU_EPS, 1.0 - MU_EPS)
    w = m * mu * (1.0 - mu)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(w > 0, eta + (y - m * mu) / w, eta)
    return mu, w, z


def binomial_deviance(y: np.ndarray, m: np.ndarray, mu: np.ndarray) -> float:
    f = m - y
    with np.errstate(divide="ignore", invalid="ignore"):
        t1 = np.where(y > 0, y * np.log(y / (m * mu)), 0.0)
        t2 = np.where(f > 0, f * np.log(f / (m * (1.0 - mu))), 0.0)
    return float(2.0 * np.sum(t1 + t2))
