"""Weighted state norms and Wasserstein-2 distances.

The phase-space weight is the 2x2 block matrix P = [[1, 1], [1, 2]] acting
as P (x) I_d on stacked (v, x) vectors. Gaussian-to-Gaussian distances use
the closed Bures form; empirical distances are reported only where they are
exact (sorted 1-D samples) or certified upper bounds (pathwise couplings).
"""

from __future__ import annotations

import math

import numpy as np

from .errors import NumericalError

P_HAT = np.array([[1.0, 1.0], [1.0, 2.0]])

# sqrt(4 / (3 - sqrt 5)): converts plain L2 bounds into P-norm bounds.
K0_FACTOR = math.sqrt(4.0 / (3.0 - math.sqrt(5.0)))


def p_norm_sq(v, x):
    """||v||^2 + 2 <v, x> + 2 ||x||^2, batched over leading axes."""
    v = np.asarray(v, dtype=float)
    x = np.asarray(x, dtype=float)
    if v.shape != x.shape:
        raise ValueError("v and x must share a shape")
    return (
        np.einsum("...i,...i->...", v, v)
        + 2.0 * np.einsum("...i,...i->...", v, x)
        + 2.0 * np.einsum("...i,...i->...", x, x)
    )


def norm_equivalence_constants() -> tuple[float, float]:
    """(lower, upper) with lower ||(v,x)|| <= ||(v,x)||_P <= upper ||(v,x)||.

    These are the square roots of the extreme eigenvalues (3 -+ sqrt 5)/2 of
    the weight matrix; ``K0_FACTOR`` carries the related constant
    sqrt(4 / (3 - sqrt 5)).
    """
    root5 = math.sqrt(5.0)
    return math.sqrt((3.0 - root5) / 2.0), math.sqrt((3.0 + root5) / 2.0)


def p_matrix(d: int) -> np.ndarray:
    """The full 2d x 2d weight acting on stacked (v, x) vectors."""
    return np.kron(P_HAT, np.eye(d))


def _sym_sqrt(mat: np.ndarray, clip: float = -1e-12) -> np.ndarray:
    mat = 0.5 * (mat + mat.T)
    eigvals, eigvecs = np.linalg.eigh(mat)
    scale = max(1.0, float(np.abs(eigvals).max(initial=0.0)))
    if eigvals[0] < clip * scale:
        raise NumericalError(
            f"matrix is indefinite (min eigenvalue {eigvals[0]:.3e})",
            diagnostic={"eigvals": eigvals},
        )
    return (eigvecs * np.sqrt(np.clip(eigvals, 0.0, None))) @ eigvecs.T


def w2_gaussian(mean1, cov1, mean2, cov2) -> float:
    """Bures/Wasserstein-2 distance between two Gaussians."""
    mean1 = np.asarray(mean1, dtype=float).ravel()
    mean2 = np.asarray(mean2, dtype=float).ravel()
    cov1 = np.atleast_2d(np.asarray(cov1, dtype=float))
    cov2 = np.atleast_2d(np.asarray(cov2, dtype=float))
    if mean1.shape != mean2.shape or cov1.shape != cov2.shape:
        raise ValueError("mismatched Gaussian dimensions")
    root2 = _sym_sqrt(cov2)
    cross = _sym_sqrt(root2 @ cov1 @ root2)
    dist_sq = float(np.sum((mean1 - mean2) ** 2) + np.trace(cov1) + np.trace(cov2) - 2.0 * np.trace(cross))
    return math.sqrt(max(dist_sq, 0.0))


def w2_gaussian_weighted(mean1, cov1, mean2, cov2, weight) -> float:
    """Wasserstein-2 with cost ||.||_weight^2: transform by weight^(1/2) and reuse Bures."""
    root = _sym_sqrt(np.asarray(weight, dtype=float))
    return w2_gaussian(
        root @ np.asarray(mean1, dtype=float).ravel(),
        root @ np.asarray(cov1, dtype=float) @ root,
        root @ np.asarray(mean2, dtype=float).ravel(),
        root @ np.asarray(cov2, dtype=float) @ root,
    )


def w2_empirical_1d(samples_a, samples_b) -> float:
    """Exact empirical W2 on the line: RMS difference of sorted samples."""
    a = np.sort(np.asarray(samples_a, dtype=float).ravel())
    b = np.sort(np.asarray(samples_b, dtype=float).ravel())
    if a.size == 0:
        raise ValueError("empty sample set")
    if a.size != b.size:
        raise ValueError("sample counts must match")
    return float(np.sqrt(np.mean((a - b) ** 2)))


def coupling_distance(
    v_a: np.ndarray, x_a: np.ndarray, v_b: np.ndarray, x_b: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Per-step root-mean-square P-distance over replicas, with standard errors.

    Inputs are synchronized trajectories shaped (n_steps+1, R, d). Any
    coupling upper-bounds the Wasserstein distance between the marginals;
    standard errors are NaN when fewer than two replicas are given.
    """
    arrays = [np.asarray(a, dtype=float) for a in (v_a, x_a, v_b, x_b)]
    if len({a.shape for a in arrays}) != 1 or arrays[0].ndim != 3:
        raise ValueError("expected four (n_steps+1, R, d) arrays of equal shape")
    v_a, x_a, v_b, x_b = arrays
    sq = p_norm_sq(v_a - v_b, x_a - x_b)  # (n_steps+1, R)
    n_rep = sq.shape[1]
    mean_sq = sq.mean(axis=1)
    dist = np.sqrt(mean_sq)
    if n_rep < 2:
        return dist, np.full_like(dist, np.nan)
    se_sq = sq.std(axis=1, ddof=1) / math.sqrt(n_rep)
    se = np.divide(se_sq, 2.0 * dist, out=np.zeros_like(dist), where=dist > 0.0)
    return dist, se
