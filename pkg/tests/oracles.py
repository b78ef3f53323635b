"""Independent reference implementations used to cross-check library results.

Everything here is deliberately written with a different algorithm (or at
least a different code path) from the module under test: index loops instead
of BLAS, quadrature instead of closed forms, random-search maximization
instead of power iteration.
"""

import math

import numpy as np
from scipy.integrate import quad


def gram_bruteforce(values: np.ndarray) -> np.ndarray:
    d = values.shape[0]
    out = np.zeros((d, d))
    for k in range(d):
        for l in range(d):
            acc = 0.0
            for i in range(d):
                for j in range(d):
                    acc += values[i, j, k] * values[i, j, l]
            out[k, l] = acc
    return out


def svd2x2_max(mat: np.ndarray) -> float:
    """Largest singular value of a 2x2 matrix in closed form."""
    a, b = mat[0]
    c, d = mat[1]
    frob_sq = a * a + b * b + c * c + d * d
    det = a * d - b * c
    inner = max(frob_sq * frob_sq - 4.0 * det * det, 0.0)
    return math.sqrt(0.5 * (frob_sq + math.sqrt(inner)))


def norm123_bruteforce(values: np.ndarray, seed: int = 0, n_search: int = 4000,
                       n_polish: int = 12, sweeps: int = 400, tol: float = 1e-13) -> float:
    """Maximize the trilinear form by sphere search plus alternating ascent."""
    d = values.shape[0]
    rng = np.random.default_rng(seed)
    y = rng.standard_normal((n_search, d))
    y /= np.linalg.norm(y, axis=1, keepdims=True)
    z = rng.standard_normal((n_search, d))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    scores = np.linalg.norm(np.einsum("ijk,nj,nk->ni", values, y, z), axis=1)
    best = 0.0
    for idx in np.argsort(scores)[-n_polish:]:
        yy, zz = y[idx], z[idx]
        prev = -np.inf
        for _ in range(sweeps):
            tx = np.einsum("ijk,j,k->i", values, yy, zz)
            nx = np.linalg.norm(tx)
            if nx == 0.0:
                break
            xx = tx / nx
            ty = np.einsum("ijk,i,k->j", values, xx, zz)
            ny = np.linalg.norm(ty)
            if ny == 0.0:
                break
            yy = ty / ny
            tz = np.einsum("ijk,i,j->k", values, xx, yy)
            obj = np.linalg.norm(tz)
            if obj == 0.0:
                break
            zz = tz / obj
            if abs(obj - prev) <= tol * max(1.0, obj):
                break
            prev = obj
        if prev > best:
            best = prev
    return best


def norm12_3_variational(values: np.ndarray, seed: int = 0, restarts: int = 8,
                         sweeps: int = 2000, tol: float = 1e-14) -> float:
    """Maximize sum A_ijk X_ij y_k over unit-Frobenius X and unit y by alternation."""
    d = values.shape[0]
    rng = np.random.default_rng(seed)
    best = 0.0
    for _ in range(restarts):
        y = rng.standard_normal(d)
        y /= np.linalg.norm(y)
        prev = -np.inf
        for _ in range(sweeps):
            X = np.einsum("ijk,k->ij", values, y)
            nx = np.linalg.norm(X)
            if nx == 0.0:
                break
            X /= nx
            ty = np.einsum("ijk,ij->k", values, X)
            obj = np.linalg.norm(ty)
            if obj == 0.0:
                break
            y = ty / obj
            if abs(obj - prev) <= tol * max(1.0, obj):
                break
            prev = obj
        best = max(best, prev if prev > 0.0 else 0.0)
    return best


def quad_noise_cov(gamma: float, h: float) -> np.ndarray:
    """Adaptive-quadrature covariance of the three stochastic integrals."""
    def ee(t):
        return math.exp(-gamma * t)

    def ff(t):
        return (1.0 - math.exp(-gamma * t)) / gamma

    opts = dict(epsabs=1e-14, epsrel=1e-13, limit=200)
    out = np.empty((3, 3))
    out[0, 0] = quad(lambda s: ee(h - s) ** 2, 0.0, h, **opts)[0]
    out[1, 1] = quad(lambda s: ff(h - s) ** 2, 0.0, h, **opts)[0]
    out[2, 2] = quad(lambda s: ff(h / 2 - s) ** 2, 0.0, h / 2, **opts)[0]
    out[0, 1] = out[1, 0] = quad(lambda s: ee(h - s) * ff(h - s), 0.0, h, **opts)[0]
    out[0, 2] = out[2, 0] = quad(lambda s: ee(h - s) * ff(h / 2 - s), 0.0, h / 2, **opts)[0]
    out[1, 2] = out[2, 1] = quad(lambda s: ff(h - s) * ff(h / 2 - s), 0.0, h / 2, **opts)[0]
    return out


def cov_entry_se(cov: np.ndarray, n: int) -> np.ndarray:
    """Standard errors of Gaussian sample-covariance entries."""
    diag = np.diag(cov)
    return np.sqrt((np.outer(diag, diag) + cov**2) / n)


def finite_diff_grad(fn, x: np.ndarray, step: float = 1e-6) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    for i in range(x.size):
        up = x.copy()
        up[i] += step
        down = x.copy()
        down[i] -= step
        out[i] = (fn(up) - fn(down)) / (2.0 * step)
    return out


def max_abs_on_grid(fn, lo: float, hi: float, n: int = 200001) -> float:
    """Dense-grid maximization of |fn| with a parabolic refinement pass."""
    grid = np.linspace(lo, hi, n)
    vals = np.abs(fn(grid))
    k = int(np.argmax(vals))
    window = np.linspace(grid[max(k - 1, 0)], grid[min(k + 1, n - 1)], 20001)
    return float(np.max(np.abs(fn(window))))


class CountingModel:
    """Wraps a potential model and counts derivative evaluations."""

    def __init__(self, inner):
        self.inner = inner
        self.grad_calls = 0

    def __getattr__(self, name):
        return getattr(self.inner, name)

    def grad(self, x):
        self.grad_calls += 1
        return self.inner.grad(x)
