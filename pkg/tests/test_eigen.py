"""Eigensolver checks against a brute-force characteristic polynomial.

The oracle never calls an eigenroutine: Faddeev-LeVerrier gives the
characteristic polynomial coefficients from matrix powers alone, and its
roots are the reference eigenvalues.  Eigenvectors are validated through
the defining identity A v = lambda v rather than by comparison, which
sign and degeneracy would confound.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from radonad.eigen import eigh_symmetric


def char_poly_eigvals(a: np.ndarray) -> np.ndarray:
    """Eigenvalues via Faddeev-LeVerrier + polynomial root finding."""
    n = a.shape[0]
    coeffs = np.zeros(n + 1)
    coeffs[0] = 1.0
    m = np.zeros_like(a)
    for k in range(1, n + 1):
        m = a @ m + coeffs[k - 1] * np.eye(n)
        coeffs[k] = -np.trace(a @ m) / k
    roots = np.roots(coeffs)
    return np.sort(roots.real)


def random_symmetric(rng, n, scale=1.0):
    a = scale * rng.standard_normal((n, n))
    return 0.5 * (a + a.T)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_matches_characteristic_polynomial_roots(n):
    rng = np.random.default_rng(17 + n)
    for _ in range(60):
        a = random_symmetric(rng, n, scale=rng.uniform(0.1, 10.0))
        vals, _ = eigh_symmetric(a)
        expected = char_poly_eigvals(a)
        scale = max(np.abs(expected).max(), 1.0)
        assert np.abs(vals - expected).max() < 1e-9 * scale


def test_identity_and_diagonal():
    vals, vecs = eigh_symmetric(np.eye(3))
    assert np.allclose(vals, 1.0)
    assert np.allclose(vecs @ vecs.T, np.eye(3), atol=1e-12)

    vals, vecs = eigh_symmetric(np.diag([3.0, -1.0, 2.0]))
    assert np.allclose(vals, [-1.0, 2.0, 3.0])
    # columns are eigenvectors for the ascending eigenvalues
    assert np.allclose(np.abs(vecs), np.eye(3)[:, [1, 2, 0]], atol=1e-12)


def test_one_by_one():
    vals, vecs = eigh_symmetric(np.array([[7.5]]))
    assert vals.shape == (1,) and vecs.shape == (1, 1)
    assert vals[0] == 7.5 and abs(vecs[0, 0]) == 1.0


def test_eigenpair_identity_larger():
    rng = np.random.default_rng(5)
    for n in (10, 40, 120):
        a = random_symmetric(rng, n)
        vals, vecs = eigh_symmetric(a)
        assert np.all(np.diff(vals) >= 0)
        resid = np.abs(a @ vecs - vecs * vals).max()
        assert resid < 1e-10 * max(np.abs(vals).max(), 1.0)
        assert np.abs(vecs.T @ vecs - np.eye(n)).max() < 1e-10


def test_clustered_eigenvalues():
    rng = np.random.default_rng(11)
    q, _ = np.linalg.qr(rng.standard_normal((6, 6)))
    target = np.array([1.0, 1.0, 1.0, 2.0, 2.0, 5.0])
    a = (q * target) @ q.T
    a = 0.5 * (a + a.T)
    vals, vecs = eigh_symmetric(a)
    assert np.allclose(np.sort(vals), target, atol=1e-9)
    assert np.abs(a @ vecs - vecs * vals).max() < 1e-9


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        eigh_symmetric(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        eigh_symmetric(np.array([[np.nan, 0.0], [0.0, 1.0]]))


@settings(max_examples=40, deadline=None)
@given(
    n=st.integers(min_value=1, max_value=8),
    seed=st.integers(min_value=0, max_value=2**31 - 1),
)
def test_reconstruction_property(n, seed):
    rng = np.random.default_rng(seed)
    a = random_symmetric(rng, n)
    vals, vecs = eigh_symmetric(a)
    rebuilt = (vecs * vals) @ vecs.T
    assert np.abs(rebuilt - a).max() < 1e-9 * max(np.abs(a).max(), 1.0)
