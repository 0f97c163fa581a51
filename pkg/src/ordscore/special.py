"""Scalar special functions: normal cdf/quantile, log-gamma, incomplete beta, Student t.

All functions are pure.  Domain violations raise :class:`DomainError`.
"""

from __future__ import annotations

import math

import numpy as np

from ._backend import kernels


class DomainError(ValueError):
    """Argument outside the mathematical domain of a function."""


def _finite(name: str, x: float) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"{name} must be finite, got {x!r}")
    return x


def norm_cdf(z: float) -> float:
    """Standard normal distribution function."""
    return kernels.norm_cdf(_finite("z", z))


def norm_quantile(p: float) -> float:
    """Standard normal quantile function on the open interval (0, 1).

    Rational starting value refined by one Halley step on :func:`norm_cdf`.
    The upper half is computed as ``-norm_quantile(1 - p)``, so antisymmetry
    is exact whenever ``1 - p`` is.
    """
    p = float(p)
    if not 0.0 < p < 1.0:
        raise DomainError(f"norm_quantile needs 0 < p < 1, got {p!r}")
    return kernels.norm_quantile(p)


def norm_quantile_array(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if not np.all((p > 0.0) & (p < 1.0)):
        raise DomainError("norm_quantile needs every p in (0, 1)")
    return kernels.norm_quantile_array(p)


def log_gamma(x: float) -> float:
    x = _finite("x", x)
    if x <= 0.0:
        raise DomainError(f"log_gamma needs x > 0, got {x!r}")
    return math.lgamma(x)


def inc_beta_reg(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b) by continued fraction."""
    a, b, x = _finite("a", a), _finite("b", b), _finite("x", x)
    if a <= 0.0 or b <= 0.0:
        raise DomainError(f"inc_beta_reg needs a, b > 0, got a={a!r}, b={b!r}")
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"inc_beta_reg needs 0 <= x <= 1, got {x!r}")
    value = kernels.inc_beta_reg(a, b, x)
    if math.isnan(value):
        raise ArithmeticError(f"continued fraction did not converge for a={a}, b={b}, x={x}")
    return value


def t_cdf(t: float, df: float) -> float:
    """Student t distribution function with ``df`` degrees of freedom."""
    t, df = _finite("t", t), float(df)
    if not df > 0.0 or math.isnan(df):
        raise DomainError(f"t_cdf needs df > 0, got {df!r}")
    if math.isinf(df):
        return kernels.norm_cdf(t)
    value = kernels.t_cdf(t, df)
    if math.isnan(value):
        raise ArithmeticError(f"t_cdf failed for t={t}, df={df}")
    return value


def two_sided_normal_p(z: float) -> float:
    return 2.0 * kernels.norm_cdf(-abs(z))


def two_sided_t_p(t: float, df: float) -> float:
    return 2.0 * t_cdf(-abs(t), df)
