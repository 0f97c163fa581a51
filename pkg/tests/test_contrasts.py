import math

import numpy as np
import pytest

from ordscore.contrasts import poly_contrasts, truncate_contrasts
from ordscore.special import DomainError


def gram_schmidt_linear(K):
    x = np.arange(1, K + 1) - (K + 1) / 2
    return x / np.linalg.norm(x)


def test_k4_columns():
    C = poly_contrasts(4)
    np.testing.assert_allclose(C.columns[:, 0], np.array([-3, -1, 1, 3]) / math.sqrt(20), atol=1e-14)
    np.testing.assert_allclose(C.columns[:, 0], [-0.6708, -0.2236, 0.2236, 0.6708], atol=5e-5)
    np.testing.assert_allclose(C.columns[:, 1], np.array([1, -1, -1, 1]) / 2, atol=1e-14)
    np.testing.assert_allclose(C.columns[:, 2], np.array([-1, 3, -3, 1]) / math.sqrt(20), atol=1e-14)


def test_k2():
    C = poly_contrasts(2)
    assert C.columns.shape == (2, 1)
    np.testing.assert_allclose(C.columns[:, 0], [-1 / math.sqrt(2), 1 / math.sqrt(2)], atol=1e-15)
    assert C.names == (".L",)


def test_k6_names():
    C = poly_contrasts(6)
    assert C.columns.shape == (6, 5)
    assert C.names == (".L", ".Q", ".C", "^4", "^5")


@pytest.mark.parametrize("K", range(2, 13))
def test_orthonormal_and_centred(K):
    C = poly_contrasts(K).columns
    np.testing.assert_allclose(C.T @ C, np.eye(K - 1), atol=1e-12)
    assert np.max(np.abs(C.sum(axis=0))) < 1e-12


@pytest.mark.parametrize("K", range(2, 13))
def test_linear_column(K):
    C = poly_contrasts(K).columns
    np.testing.assert_allclose(C[:, 0], gram_schmidt_linear(K), atol=1e-12)
    r = np.corrcoef(C[:, 0], np.arange(1, K + 1))[0, 1]
    assert abs(r - 1) < 1e-12


@pytest.mark.parametrize("K", range(2, 13))
def test_polynomial_degree(K):
    # column j fits exactly with a degree-j polynomial and not with degree j-1
    C = poly_contrasts(K).columns
    x = np.arange(1, K + 1, dtype=float)
    for j in range(1, K):
        V = np.vander(x - x.mean(), j + 1, increasing=True)
        resid = C[:, j - 1] - V @ np.linalg.lstsq(V, C[:, j - 1], rcond=None)[0]
        assert np.max(np.abs(resid)) < 1e-9
        # positive leading coefficient
        assert np.linalg.lstsq(V, C[:, j - 1], rcond=None)[0][-1] > 0


@pytest.mark.parametrize("K", range(2, 13))
def test_spans_indicators(K):
    M = np.column_stack([np.ones(K), poly_contrasts(K).columns])
    assert np.linalg.matrix_rank(M) == K


def test_domain():
    with pytest.raises(DomainError):
        poly_contrasts(1)


class TestTruncate:
    def test_agegp(self):
        C = truncate_contrasts(poly_contrasts(6), {1, 2})
        assert C.names == (".L", ".Q") and C.columns.shape == (6, 2)
        np.testing.assert_array_equal(C.columns, poly_contrasts(6).columns[:, :2])

    def test_cut_linear(self):
        C = truncate_contrasts(poly_contrasts(5), [1])
        assert C.names == (".L",) and C.degrees == (1,)

    def test_all_is_identity(self):
        full = poly_contrasts(7)
        C = truncate_contrasts(full, range(1, 7))
        np.testing.assert_array_equal(C.columns, full.columns)
        assert C.names == full.names

    def test_unknown_degree(self):
        with pytest.raises(ValueError, match="not available"):
            truncate_contrasts(poly_contrasts(4), [4])

    def test_empty(self):
        with pytest.raises(ValueError):
            truncate_contrasts(poly_contrasts(4), [])
