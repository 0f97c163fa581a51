"""Orthogonal polynomial contrasts for ordered factors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .special import DomainError


def degree_name(degree: int) -> str:
    return {1: ".L", 2: ".Q", 3: ".C"}.get(degree, f"^{degree}")


@dataclass(frozen=True)
class ContrastMatrix:
    K: int
    columns: np.ndarray
    names: tuple[str, ...]
    degrees: tuple[int, ...]


def poly_contrasts(K: int) -> ContrastMatrix:
    """Orthonormal polynomial coding of K equally spaced levels.

    Column j (1-based) is the degree-j polynomial in the level index,
    orthogonal to the constant and to lower degrees, with unit norm and a
    positive leading coefficient.
    """
    if int(K) != K or K < 2:
        raise DomainError(f"K must be an integer >= 2, got {K!r}")
    K = int(K)
    x = np.arange(1, K + 1, dtype=float) - (K + 1) / 2.0
    vander = np.vander(x, K, increasing=True)
    Q, R = np.linalg.qr(vander)
    Q = Q * np.sign(np.diag(R))
    cols = np.ascontiguousarray(Q[:, 1:])
    cols.setflags(write=False)
    degrees = tuple(range(1, K))
    return ContrastMatrix(K, cols, tuple(degree_name(d) for d in degrees), degrees)


def truncate_contrasts(C: ContrastMatrix, degrees) -> ContrastMatrix:
    """Keep only the requested polynomial degrees, in increasing order."""
    wanted = sorted(set(int(d) for d in degrees))
    if not wanted:
        raise ValueError("at least one degree is required")
    unknown = [d for d in wanted if d not in C.degrees]
    if unknown:
        raise ValueError(f"degrees {unknown} not available for K={C.K} (1..{C.K - 1})")
    pos = [C.degrees.index(d) for d in wanted]
    cols = np.ascontiguousarray(C.columns[:, pos])
    cols.setflags(write=False)
    return ContrastMatrix(C.K, cols, tuple(C.names[i] for i in pos), tuple(wanted))
