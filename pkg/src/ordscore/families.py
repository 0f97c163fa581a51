"""Quantile-transform score families.

A score family maps the equally spaced levels ``u_k = k / (K + 1)`` of an
ordered factor to strictly increasing scores ``q_k = T(Phi^{-1}(u_k))``,
where ``T`` is one of three monotone transformations of a standard normal
variable.  Location and scale are fixed at 0 and 1; the regression intercept
and slope absorb them.

=============  ==========================================  ===========
family         transformation of z                         parameters
=============  ==========================================  ===========
Johnson S_U    sinh((z - gamma) / delta)                   gamma, delta > 0
Tukey g-and-h  (exp(g z) - 1) / g * exp(h z^2 / 2)         g, h >= 0
sinh-arcsinh   sinh((asinh(z) + epsilon) / delta)          epsilon, delta > 0
=============  ==========================================  ===========
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .special import DomainError, norm_quantile_array


class FamilyKind(enum.Enum):
    JOHNSON_SU = "su"
    G_AND_H = "gh"
    SINH_ARCSINH = "sas"

    @classmethod
    def parse(cls, value: "str | FamilyKind") -> "FamilyKind":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "_")
        aliases = {
            "su": cls.JOHNSON_SU, "johnson_su": cls.JOHNSON_SU, "johnsonsu": cls.JOHNSON_SU,
            "gh": cls.G_AND_H, "g_and_h": cls.G_AND_H, "gandh": cls.G_AND_H,
            "sas": cls.SINH_ARCSINH, "sinh_arcsinh": cls.SINH_ARCSINH, "sinharcsinh": cls.SINH_ARCSINH,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown score family {value!r}; use su, gh or sas") from None


_KERNEL_CODE = {FamilyKind.JOHNSON_SU: 0, FamilyKind.G_AND_H: 1, FamilyKind.SINH_ARCSINH: 2}
PARAM_NAMES = {
    FamilyKind.JOHNSON_SU: ("gamma", "delta"),
    FamilyKind.G_AND_H: ("g", "h"),
    FamilyKind.SINH_ARCSINH: ("epsilon", "delta"),
}


class ScoreRangeError(ArithmeticError):
    """A transformed score exceeded 1e300 in magnitude."""

    def __init__(self, params: "ScoreFamilyParams", z: float):
        self.params = params
        self.z = z
        super().__init__(f"score overflow at z={z:.6g} for {params}")


@dataclass(frozen=True)
class ScoreFamilyParams:
    """Shape parameters of one family: (gamma, delta), (g, h) or (epsilon, delta)."""

    kind: FamilyKind
    p1: float
    p2: float

    def __post_init__(self):
        object.__setattr__(self, "kind", FamilyKind.parse(self.kind))
        p1, p2 = float(self.p1), float(self.p2)
        if not (math.isfinite(p1) and math.isfinite(p2)):
            raise DomainError(f"parameters must be finite, got ({p1}, {p2})")
        if self.kind is FamilyKind.G_AND_H:
            if p2 < 0.0:
                raise DomainError(f"g-and-h needs h >= 0, got {p2}")
        elif p2 <= 0.0:
            raise DomainError(f"{self.kind.value} needs delta > 0, got {p2}")
        object.__setattr__(self, "p1", p1)
        object.__setattr__(self, "p2", p2)

    @property
    def symmetric(self) -> bool:
        return self.p1 == 0.0

    def as_dict(self) -> dict:
        n1, n2 = PARAM_NAMES[self.kind]
        return {"family": self.kind.value, n1: self.p1, n2: self.p2}

    def __str__(self) -> str:
        n1, n2 = PARAM_NAMES[self.kind]
        return f"{self.kind.value}({n1}={self.p1:.6g}, {n2}={self.p2:.6g})"


@dataclass(frozen=True)
class ScoreGrid:
    K: int
    u: np.ndarray
    q: np.ndarray
    params: ScoreFamilyParams | None = None

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        q = np.asarray(self.q, dtype=float)
        if u.shape != (self.K,) or q.shape != (self.K,):
            raise ValueError(f"grid arrays must have length K={self.K}")
        if not np.all(np.diff(q) > 0):
            raise ValueError("scores must be strictly increasing")
        u.setflags(write=False)
        q.setflags(write=False)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "q", q)


def grid_levels(K: int) -> np.ndarray:
    """Return (1/(K+1), ..., K/(K+1))."""
    if int(K) != K or K < 2:
        raise DomainError(f"K must be an integer >= 2, got {K!r}")
    K = int(K)
    return np.arange(1, K + 1, dtype=float) / (K + 1)


def transform(z, params: ScoreFamilyParams):
    """Apply the family transformation to standard-normal value(s) ``z``.

    Raises :class:`ScoreRangeError` when a result would exceed 1e300.
    """
    code = _KERNEL_CODE[params.kind]
    if np.ndim(z) == 0:
        y = kernels.transform(float(z), code, params.p1, params.p2)
        if math.isinf(y):
            raise ScoreRangeError(params, float(z))
        return y
    z = np.asarray(z, dtype=float)
    y = kernels.transform_array(z, code, params.p1, params.p2)
    bad = ~np.isfinite(y)
    if bad.any():
        raise ScoreRangeError(params, float(z[bad][0]))
    return y


def quantile_scores(K: int, params: ScoreFamilyParams) -> ScoreGrid:
    """Quantiles of the family at the levels k/(K+1)."""
    u = grid_levels(K)
    q = transform(norm_quantile_array(u), params)
    if not np.all(np.diff(q) > 0):
        # distinct levels can collapse numerically for extreme parameters
        raise ScoreRangeError(params, float("nan"))
    return ScoreGrid(K=len(u), u=u, q=q, params=params)


RESCALE_MODES = ("none", "times_K_plus_1", "anchor_first_two")
_RESCALE_ALIASES = {"scaled": "times_K_plus_1", "anchor": "anchor_first_two"}


def rescale_scores(grid: ScoreGrid, mode: str = "none") -> np.ndarray:
    """Working scores on a readable scale.

    ``none`` returns q, ``times_K_plus_1`` returns (K+1) q, and
    ``anchor_first_two`` maps q affinely so the first two scores become 1 and 2.
    """
    mode = _RESCALE_ALIASES.get(mode, mode)
    q = np.array(grid.q, dtype=float)
    if mode == "none":
        return q
    if mode == "times_K_plus_1":
        return (grid.K + 1) * q
    if mode == "anchor_first_two":
        step = q[1] - q[0]
        if not step > 1e-12:
            raise ValueError(f"first two scores too close to anchor (spacing {step:.3g})")
        return 1.0 + (q - q[0]) / step
    raise ValueError(f"unknown rescale mode {mode!r}; use one of {RESCALE_MODES}")
