"""Dense order-3 tensors and the two tensor norms used for Hessian-derivative bounds.

``norm_12_3`` is the flattening norm: the supremum of the full contraction
against a unit-Frobenius matrix in modes (1,2) and a unit vector in mode 3.
It equals the largest singular value of the ``(d^2, d)`` unfolding and is
computed exactly. The injective norm (unit vectors in all three modes) has
no tractable exact algorithm, so ``norm_123_bounds`` reports a certified
interval instead of a point value.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError

NORM_METHODS = ("exact", "power-iteration", "brute-force", "relation-bound")

_EIGH_MAX_DIM = 512
_POWER_TOL = 1e-12
_POWER_MAX_ITER = 10_000
_BOUND_SLACK = 1e-12


@dataclass(frozen=True)
class Tensor3:
    """Dense cubic tensor, entries indexed (i, j, k), stored row-major (i slowest)."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(np.asarray(self.values, dtype=float))
        if arr.ndim != 3 or arr.shape[0] != arr.shape[1] or arr.shape[1] != arr.shape[2]:
            raise ValueError(f"expected a cubic (d, d, d) array, got shape {arr.shape}")
        if arr.shape[0] < 1:
            raise ValueError("tensor dimension must be >= 1")
        if not np.all(np.isfinite(arr)):
            raise ValueError("tensor entries must be finite")
        object.__setattr__(self, "values", arr)

    @property
    def dim(self) -> int:
        return self.values.shape[0]

    @classmethod
    def from_flat(cls, dim: int, flat) -> "Tensor3":
        flat = np.asarray(flat, dtype=float).ravel()
        if flat.size != dim**3:
            raise ValueError(f"need {dim**3} entries for dim {dim}, got {flat.size}")
        return cls(flat.reshape(dim, dim, dim))

    @classmethod
    def zeros(cls, dim: int) -> "Tensor3":
        return cls(np.zeros((dim, dim, dim)))

    @classmethod
    def diagonal(cls, entries) -> "Tensor3":
        entries = np.asarray(entries, dtype=float).ravel()
        d = entries.size
        vals = np.zeros((d, d, d))
        idx = np.arange(d)
        vals[idx, idx, idx] = entries
        return cls(vals)

    @classmethod
    def rank_one(cls, u, v, w) -> "Tensor3":
        u, v, w = (np.asarray(a, dtype=float).ravel() for a in (u, v, w))
        if not (u.size == v.size == w.size):
            raise ValueError("rank-one factors must share a dimension")
        return cls(np.einsum("i,j,k->ijk", u, v, w))


@dataclass(frozen=True)
class NormEstimate:
    """Certified interval for a tensor norm: lower <= true value <= upper."""

    lower: float
    upper: float
    method: str

    def __post_init__(self):
        if self.method not in NORM_METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if not (0.0 <= self.lower <= self.upper + _BOUND_SLACK):
            raise ValueError(f"invalid bounds ({self.lower}, {self.upper})")


# ---------------------------------------------------------------------------
# file format: first line d, then d^3 whitespace-separated reals, row-major


def load_tensor(path) -> Tensor3:
    with open(path) as fh:
        tokens = fh.read().split()
    if not tokens:
        raise ValueError(f"{path}: empty tensor file")
    try:
        dim = int(tokens[0])
    except ValueError as exc:
        raise ValueError(f"{path}: first token must be the dimension") from exc
    body = tokens[1:]
    if len(body) != dim**3:
        raise ValueError(f"{path}: expected {dim**3} entries for dim {dim}, got {len(body)}")
    return Tensor3.from_flat(dim, np.array([float(t) for t in body]))


def save_tensor(tensor: Tensor3, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"{tensor.dim}\n")
        flat = tensor.values.ravel()
        for start in range(0, flat.size, tensor.dim):
            fh.write(" ".join(repr(float(x)) for x in flat[start : start + tensor.dim]) + "\n")


# ---------------------------------------------------------------------------
# norms


def gram_matrix(tensor: Tensor3) -> np.ndarray:
    """Sum over mode-1 slices of slice^T slice; symmetric PSD d x d."""
    d = tensor.dim
    unfold = tensor.values.reshape(d * d, d)
    gram = unfold.T @ unfold
    return 0.5 * (gram + gram.T)


def _largest_eigenvalue(sym: np.ndarray) -> float:
    d = sym.shape[0]
    if d <= _EIGH_MAX_DIM:
        try:
            eigvals = np.linalg.eigvalsh(sym)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"eigendecomposition failed: {exc}") from exc
        return float(eigvals[-1])
    # Large case: power iteration on the Gram matrix.
    vec = np.full(d, 1.0 / np.sqrt(d))
    lam = 0.0
    for _ in range(_POWER_MAX_ITER):
        nxt = sym @ vec
        nrm = np.linalg.norm(nxt)
        if nrm == 0.0:
            return 0.0
        nxt /= nrm
        lam_next = float(nxt @ (sym @ nxt))
        if abs(lam_next - lam) <= _POWER_TOL * max(1.0, abs(lam_next)):
            return lam_next
        lam, vec = lam_next, nxt
    residual = float(np.linalg.norm(sym @ vec - lam * vec))
    raise NumericalError(
        f"power iteration did not converge (residual {residual:.3e})",
        diagnostic={"residual": residual},
    )


def norm_12_3(tensor: Tensor3) -> float:
    """Exact {1,2}{3} norm: sqrt of the top eigenvalue of the Gram matrix."""
    lam = _largest_eigenvalue(gram_matrix(tensor))
    return float(np.sqrt(max(lam, 0.0)))


def slice_spectral_norms(tensor: Tensor3) -> np.ndarray:
    """Spectral norm of each mode-1 slice; the max lower-bounds the injective norm."""
    svals = np.linalg.svd(tensor.values, compute_uv=False)
    return svals[:, 0].copy()


def _pairing_norms(tensor: Tensor3) -> tuple[float, float, float]:
    """The three {pair}{single} flattening norms, single mode 3, 2, 1."""
    vals = tensor.values
    return (
        norm_12_3(tensor),
        norm_12_3(Tensor3(np.ascontiguousarray(vals.transpose(0, 2, 1)))),
        norm_12_3(Tensor3(np.ascontiguousarray(vals.transpose(1, 2, 0)))),
    )


def _power_restart(values: np.ndarray, rng: np.random.Generator, sweeps: int, tol: float):
    """One alternating rank-1 ascent; returns the reached objective or None."""
    d = values.shape[0]
    vecs = []
    for _ in range(3):
        vec = rng.standard_normal(d)
        nrm = np.linalg.norm(vec)
        if nrm == 0.0:
            return None
        vecs.append(vec / nrm)
    x, y, z = vecs
    prev = -np.inf
    for _ in range(sweeps):
        cx = np.einsum("ijk,j,k->i", values, y, z)
        nx = np.linalg.norm(cx)
        if nx == 0.0:
            return 0.0 if prev in (-np.inf, 0.0) else None
        x = cx / nx
        cy = np.einsum("ijk,i,k->j", values, x, z)
        ny = np.linalg.norm(cy)
        if ny == 0.0:
            return None
        y = cy / ny
        cz = np.einsum("ijk,i,j->k", values, x, y)
        obj = np.linalg.norm(cz)
        if obj == 0.0:
            return 0.0
        z = cz / obj
        if abs(obj - prev) <= tol * max(1.0, obj):
            return float(obj)
        prev = obj
    return None  # non-convergent restart: discarded


def norm_123_bounds(
    tensor: Tensor3,
    seed: int = 0,
    restarts: int = 20,
    sweeps: int = 200,
    tol: float = 1e-10,
) -> NormEstimate:
    """Certified bounds on the injective {1}{2}{3} norm.

    Lower bound: best objective over ``restarts`` alternating rank-1 power
    iterations with seeds derived from ``seed``. Upper bound: minimum of the
    three exact {pair}{single} flattening norms, each of which dominates the
    injective norm. Restarts that fail to converge in ``sweeps`` sweeps are
    discarded.
    """
    upper = min(_pairing_norms(tensor))
    lower = 0.0
    for k in range(restarts):
        rng = np.random.default_rng(np.random.SeedSequence((seed, k)))
        obj = _power_restart(tensor.values, rng, sweeps, tol)
        if obj is not None and obj > lower:
            lower = obj
    lower = min(lower, upper)  # guard fp overshoot of the certified upper bound
    return NormEstimate(lower=lower, upper=upper, method="power-iteration")
