"""Fourth-moment Gaussian functionals contracted against order-3 tensors.

Central object: g(p) = sum_k (sum_ij A_ijk p_i p_j)^2 for a standard Gaussian
p. Its mean has an exact combinatorial form and is dominated by
3 d ||A||_{12,3}^2; the module also carries the exact fourth moment of the
norm of a scaled Gaussian vector and the weaker d-scaling bound it invalidates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .tensor3 import Tensor3, norm_12_3

_CHUNK = 1 << 16


@dataclass(frozen=True)
class ChaosResult:
    """Exact mean, Monte-Carlo estimate, and the 3d-norm bound for E g(p)."""

    exact_mean: float
    mc_mean: float
    mc_std_error: float
    bound: float


def chaos_mean_exact(tensor: Tensor3) -> float:
    """E g(p) via the pairing formula: sum over (iik)(jjk), squares, and swaps."""
    vals = tensor.values
    diag_k = np.einsum("iik->k", vals)
    t_pairs = float(diag_k @ diag_k)
    t_square = float(np.einsum("ijk,ijk->", vals, vals))
    t_swap = float(np.einsum("ijk,jik->", vals, vals))
    return t_pairs + t_square + t_swap


def _chunk_seeds(seed: int, n_samples: int):
    for idx, start in enumerate(range(0, n_samples, _CHUNK)):
        yield idx, min(_CHUNK, n_samples - start)


def chaos_mean_mc(tensor: Tensor3, n_samples: int, seed: int) -> tuple[float, float]:
    """Unbiased sample mean of g(p) and its standard error.

    Samples are drawn in fixed-size chunks with per-chunk substreams derived
    from (seed, chunk index), so the result is reproducible and independent
    of how chunks are scheduled across workers.
    """
    if n_samples < 2:
        raise ValueError("n_samples must be >= 2")
    total = 0.0
    total_sq = 0.0
    for idx, count in _chunk_seeds(seed, n_samples):
        rng = np.random.default_rng(np.random.SeedSequence((seed, idx)))
        z = rng.standard_normal((count, tensor.dim))
        g = _kernels.chaos_g(tensor.values, z)
        total += float(g.sum())
        total_sq += float(g @ g)
    mean = total / n_samples
    var = max(total_sq - n_samples * mean * mean, 0.0) / (n_samples - 1)
    return mean, math.sqrt(var / n_samples)


def chaos_bound(tensor: Tensor3) -> float:
    """3 d ||A||_{12,3}^2, an upper bound on E g(p)."""
    nrm = norm_12_3(tensor)
    return 3.0 * tensor.dim * nrm * nrm


def chaos_report(tensor: Tensor3, n_samples: int, seed: int) -> ChaosResult:
    mc_mean, mc_se = chaos_mean_mc(tensor, n_samples, seed)
    return ChaosResult(
        exact_mean=chaos_mean_exact(tensor),
        mc_mean=mc_mean,
        mc_std_error=mc_se,
        bound=chaos_bound(tensor),
    )


def v4_moment(c: float, d: int) -> float:
    """Exact E ||v||^4 for v ~ N(0, c I_d): c^2 (d^2 + 2d)."""
    if c <= 0.0:
        raise ValueError("c must be positive")
    if d < 1:
        raise ValueError("d must be >= 1")
    return c * c * (d * d + 2.0 * d)


def v4_moment_mc(c: float, d: int, n_samples: int, seed: int) -> tuple[float, float]:
    """Monte-Carlo estimate of E ||v||^4 for v ~ N(0, c I_d), with standard error."""
    if n_samples < 2:
        raise ValueError("n_samples must be >= 2")
    if c <= 0.0 or d < 1:
        raise ValueError("need c > 0 and d >= 1")
    total = 0.0
    total_sq = 0.0
    for idx, count in _chunk_seeds(seed, n_samples):
        rng = np.random.default_rng(np.random.SeedSequence((seed, idx)))
        z = rng.standard_normal((count, d))
        q = c * np.einsum("ni,ni->n", z, z)
        q *= q
        total += float(q.sum())
        total_sq += float(q @ q)
    mean = total / n_samples
    var = max(total_sq - n_samples * mean * mean, 0.0) / (n_samples - 1)
    return mean, math.sqrt(var / n_samples)


def erroneous_bound(L1: float, c: float, d: int) -> float:
    """The broken d-scaling bound 3 L1^2 c^2 d.

    Kept deliberately: for v ~ N(0, c I_d) the true fourth moment
    c^2 (d^2 + 2d) exceeds 3 c^2 d once d >= 2, so a chain of estimates
    routed through this expression cannot hold under the plain
    Hessian-Lipschitz constant alone. See ``hessian_term_bound`` for the
    repaired version using the flattening-norm constant.
    """
    if L1 < 0.0:
        raise ValueError("L1 must be nonnegative")
    if c <= 0.0 or d < 1:
        raise ValueError("need c > 0 and d >= 1")
    return 3.0 * L1 * L1 * c * c * d


def hessian_term_bound(L1s: float, c: float, d: int) -> float:
    """3 (L1s)^2 c^2 d: bound on E ||H'(x)[v, v]||^2 for v ~ N(0, c I_d)."""
    if L1s < 0.0:
        raise ValueError("L1s must be nonnegative")
    if c <= 0.0 or d < 1:
        raise ValueError("need c > 0 and d >= 1")
    return 3.0 * L1s * L1s * c * c * d
