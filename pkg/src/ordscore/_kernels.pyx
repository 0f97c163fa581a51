# cython: language_level=3
"""Compiled kernels: scalar special functions, family transforms, logit IRLS pieces.

Mirrors ``_kernels_py`` line for line; the parity tests hold them together.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport (erfc, exp, expm1, log, log1p, lgamma, sqrt, sinh, asinh,
                        fabs, copysign, INFINITY, NAN)

cnp.import_array()

cdef double SQRT2 = sqrt(2.0)
cdef double SQRT2PI = sqrt(2.0 * 3.141592653589793)
cdef double LOG_MAX = log(1e300)
cdef double ASINH_MAX = asinh(1e300)
cdef double G_ZERO = 1e-12
cdef int CF_MAXIT = 300
cdef double CF_EPS = 1e-15
cdef double FPMIN = 1e-300
cdef double T_NORMAL_DF = 1e5
cdef double MU_EPS = 2.220446049250313e-16
cdef double P_LOW = 0.02425

SU, GH, SAS = 0, 1, 2

cdef double[6] _A = [-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                     1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00]
cdef double[5] _B = [-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                     6.680131188771972e+01, -1.328068155288572e+01]
cdef double[6] _C = [-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                     -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00]
cdef double[4] _D = [7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                     3.754408661907416e+00]


cdef inline double c_norm_cdf(double z) nogil:
    return 0.5 * erfc(-z / SQRT2)


cdef double c_lower_quantile(double p) nogil:
    cdef double q, r, x, e, u, half_x2
    if p < P_LOW:
        q = sqrt(-2.0 * log(p))
        x = ((((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5])
             / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0))
    else:
        q = p - 0.5
        r = q * q
        x = ((((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q
             / (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0))
    half_x2 = 0.5 * x * x
    if half_x2 < 700.0:
        e = 0.5 * erfc(-x / SQRT2) - p
        u = e * SQRT2PI * exp(half_x2)
        x = x - u / (1.0 + 0.5 * x * u)
    return x


cdef inline double c_norm_quantile(double p) nogil:
    if p > 0.5:
        return -c_lower_quantile(1.0 - p)
    return c_lower_quantile(p)


cdef double c_betacf(double a, double b, double x) nogil:
    cdef double qab = a + b, qap = a + 1.0, qam = a - 1.0
    cdef double c = 1.0, d, h, aa, delta
    cdef int m, m2
    d = 1.0 - qab * x / qap
    if fabs(d) < FPMIN:
        d = FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, CF_MAXIT + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if fabs(d) < FPMIN:
            d = FPMIN
        c = 1.0 + aa / c
        if fabs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if fabs(d) < FPMIN:
            d = FPMIN
        c = 1.0 + aa / c
        if fabs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if fabs(delta - 1.0) < CF_EPS:
            return h
    return NAN


cdef double c_inc_beta_reg(double a, double b, double x) nogil:
    cdef double front
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    front = exp(lgamma(a + b) - lgamma(a) - lgamma(b) + a * log(x) + b * log1p(-x))
    if x < (a + 1.0) / (a + b + 2.0):
        return front * c_betacf(a, b, x) / a
    return 1.0 - front * c_betacf(b, a, 1.0 - x) / b


cdef double c_t_cdf(double t, double df) nogil:
    cdef double tail
    if df > T_NORMAL_DF:
        return c_norm_cdf(t * (1.0 - 0.25 / df) / sqrt(1.0 + t * t / (2.0 * df)))
    tail = 0.5 * c_inc_beta_reg(0.5 * df, 0.5, df / (df + t * t))
    if t > 0:
        return 1.0 - tail
    return tail


cdef double c_transform(double z, int kind, double p1, double p2) nogil:
    cdef double w, a, base, log_mag, tail
    cdef bint big = False
    if kind == 0:
        w = (z - p1) / p2
        if fabs(w) > ASINH_MAX:
            return copysign(INFINITY, w)
        return sinh(w)
    if kind == 1:
        if z == 0.0:
            return 0.0
        if fabs(p1) < G_ZERO:
            base = z
            log_mag = log(fabs(z))
        else:
            a = p1 * z
            if a > 700.0:
                log_mag = a - log(fabs(p1))
                big = True
            else:
                base = expm1(a) / p1
                log_mag = log(fabs(base))
        tail = 0.5 * p2 * z * z
        if log_mag + tail > LOG_MAX:
            return copysign(INFINITY, z)
        if big:
            return copysign(exp(log_mag + tail), z)
        return base * exp(tail)
    w = (asinh(z) + p1) / p2
    if fabs(w) > ASINH_MAX:
        return copysign(INFINITY, w)
    return sinh(w)


def norm_cdf(double z):
    return c_norm_cdf(z)


def norm_quantile(double p):
    return c_norm_quantile(p)


def inc_beta_reg(double a, double b, double x):
    return c_inc_beta_reg(a, b, x)


def t_cdf(double t, double df):
    return c_t_cdf(t, df)


def transform(double z, int kind, double p1, double p2):
    return c_transform(z, kind, p1, p2)


def norm_cdf_array(z):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] src = np.ascontiguousarray(z, dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty_like(src)
    cdef Py_ssize_t i
    for i in range(src.shape[0]):
        out[i] = c_norm_cdf(src[i])
    return out.reshape(np.shape(z))


def norm_quantile_array(p):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] src = np.ascontiguousarray(p, dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty_like(src)
    cdef Py_ssize_t i
    for i in range(src.shape[0]):
        out[i] = c_norm_quantile(src[i])
    return out.reshape(np.shape(p))


def transform_array(z, int kind, double p1, double p2):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] src = np.ascontiguousarray(z, dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty_like(src)
    cdef Py_ssize_t i
    for i in range(src.shape[0]):
        out[i] = c_transform(src[i], kind, p1, p2)
    return out.reshape(np.shape(z))


def binomial_working(eta, y, m):
    """Mean, IRLS weights and working response for the logit link."""
    cdef double[::1] e = np.ascontiguousarray(eta, dtype=np.float64)
    cdef double[::1] yy = np.ascontiguousarray(y, dtype=np.float64)
    cdef double[::1] mm = np.ascontiguousarray(m, dtype=np.float64)
    cdef Py_ssize_t n = e.shape[0], i
    mu_arr = np.empty(n)
    w_arr = np.empty(n)
    z_arr = np.empty(n)
    cdef double[::1] mu = mu_arr
    cdef double[::1] w = w_arr
    cdef double[::1] z = z_arr
    cdef double v
    for i in range(n):
        v = 1.0 / (1.0 + exp(-e[i]))
        if v < MU_EPS:
            v = MU_EPS
        elif v > 1.0 - MU_EPS:
            v = 1.0 - MU_EPS
        mu[i] = v
        w[i] = mm[i] * v * (1.0 - v)
        if w[i] > 0:
            z[i] = e[i] + (yy[i] - mm[i] * v) / w[i]
        else:
            z[i] = e[i]
    return mu_arr, w_arr, z_arr


def binomial_deviance(y, m, mu):
    cdef double[::1] yy = np.ascontiguousarray(y, dtype=np.float64)
    cdef double[::1] mm = np.ascontiguousarray(m, dtype=np.float64)
    cdef double[::1] mv = np.ascontiguousarray(mu, dtype=np.float64)
    cdef Py_ssize_t i
    cdef double total = 0.0, f
    for i in range(yy.shape[0]):
        f = mm[i] - yy[i]
        if yy[i] > 0:
            total += yy[i] * log(yy[i] / (mm[i] * mv[i]))
        if f > 0:
            total += f * log(f / (mm[i] * (1.0 - mv[i])))
    return 2.0 * total
