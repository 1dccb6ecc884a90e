"""Symmetric eigendecomposition kept in-repo.

The whitening transform and the ridge solve both reduce to a dense symmetric
eigenproblem.  Solving it here (Householder tridiagonalization followed by
implicit-shift QL, both classical algorithms) keeps the numerical core of the
library auditable and lets the test suite validate it against brute-force
characteristic-polynomial oracles instead of trusting an opaque LAPACK call.
"""

from __future__ import annotations

import math

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if len(args) == 1 and callable(args[0]):
            return args[0]
        return wrap


_EPS = float(np.finfo(np.float64).eps)
_MAX_QL_SWEEPS = 64


@njit(cache=True)
def _tridiagonalize(z, d, e):
    # Householder reduction of a symmetric matrix to tridiagonal form with
    # accumulation of the orthogonal transform (tred2).  Reads the full
    # matrix, which the caller has symmetrized.  On exit z holds Q with
    # A = Q T Q^T, d the diagonal of T and e its subdiagonal (e[0] unused).
    n = z.shape[0]
    for i in range(n - 1, 0, -1):
        l = i - 1
        h = 0.0
        if l > 0:
            scale = 0.0
            for k in range(l + 1):
                scale += abs(z[i, k])
            if scale == 0.0:
                e[i] = z[i, l]
            else:
                for k in range(l + 1):
                    z[i, k] /= scale
                    h += z[i, k] * z[i, k]
                f = z[i, l]
                g = -math.sqrt(h) if f >= 0.0 else math.sqrt(h)
                e[i] = scale * g
                h -= f * g
                z[i, l] = f - g
                f = 0.0
                for j in range(l + 1):
                    z[j, i] = z[i, j] / h
                    g = 0.0
                    for k in range(j + 1):
                        g += z[j, k] * z[i, k]
                    for k in range(j + 1, l + 1):
                        g += z[k, j] * z[i, k]
                    e[j] = g / h
                    f += e[j] * z[i, j]
                hh = f / (h + h)
                for j in range(l + 1):
                    f = z[i, j]
                    g = e[j] - hh * f
                    e[j] = g
                    for k in range(j + 1):
                        z[j, k] -= f * e[k] + g * z[i, k]
        else:
            e[i] = z[i, l]
        d[i] = h
    d[0] = 0.0
    e[0] = 0.0
    for i in range(n):
        l = i
        if d[i] != 0.0:
            for j in range(l):
                g = 0.0
                for k in range(l):
                    g += z[i, k] * z[k, j]
                for k in range(l):
                    z[k, j] -= g * z[k, i]
        d[i] = z[i, i]
        z[i, i] = 1.0
        for j in range(l):
            z[j, i] = 0.0
            z[i, j] = 0.0


@njit(cache=True)
def _ql_implicit(d, e, v):
    # Implicit-shift QL on a tridiagonal matrix (tqli).  v accumulates the
    # rotations row-wise: on entry v = I, on exit row j of v is the
    # eigenvector of T belonging to d[j].  Returns 0 on convergence.
    n = d.shape[0]
    if n == 1:
        return 0
    for i in range(1, n):
        e[i - 1] = e[i]
    e[n - 1] = 0.0
    for l in range(n):
        sweeps = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= _EPS * dd:
                    break
                m += 1
            if m == l:
                break
            sweeps += 1
            if sweeps > _MAX_QL_SWEEPS:
                return 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            denom = g + (r if g >= 0.0 else -r)
            g = d[m] - d[l] + e[l] / denom
            s = 1.0
            c = 1.0
            p = 0.0
            underflow = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                for k in range(n):
                    f2 = v[i + 1, k]
                    v[i + 1, k] = s * v[i, k] + c * f2
                    v[i, k] = c * v[i, k] - s * f2
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return 0


def eigh_symmetric(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and eigenvectors of a real symmetric matrix.

    Parameters
    ----------
    a : ndarray of shape (n, n)
        Symmetric matrix.  Only the lower triangle is read; the strict upper
        triangle is ignored.

    Returns
    -------
    eigenvalues : ndarray of shape (n,)
        In ascending order.
    eigenvectors : ndarray of shape (n, n)
        Orthonormal, one eigenvector per column, aligned with the
        eigenvalue order.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix contains non-finite entries")
    n = a.shape[0]
    if n == 1:
        return a[:1, 0].copy(), np.ones((1, 1))
    lower = np.tril(a)
    work = lower + np.tril(a, -1).T
    d = np.empty(n)
    e = np.empty(n)
    _tridiagonalize(work, d, e)
    v = np.eye(n)
    if _ql_implicit(d, e, v):
        raise np.linalg.LinAlgError("QL iteration failed to converge")
    vectors = work @ v.T
    order = np.argsort(d, kind="stable")
    return d[order], np.ascontiguousarray(vectors[:, order])
