"""Target potentials: strongly convex negative log-densities with derivatives and constants.

Every model exposes value/grad/hessian_vec (batched over leading axes), the
convexity window (m, L), and the third-derivative norms L1 (injective) and
L1s (flattening). ``l1s_conservative`` marks constants that are declared
bounds rather than suprema attained by the model family.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .tensor3 import Tensor3

HESSIAN_TENSOR_MAX_DIM = 64

_LOG2 = math.log(2.0)


class PotentialModel:
    """Interface for target potentials; concrete classes fill in the behaviors.

    ``third_bilinear`` is None when the third derivative has no analytic
    form; ``hessian_tensor`` then falls back to central differences.
    """

    kind = "generic"
    dim: int
    m: float
    L: float
    L1: float
    L1s: float
    l1s_conservative = False

    third_bilinear = None

    def value(self, x):
        raise NotImplementedError

    def grad(self, x):
        raise NotImplementedError

    def hessian_vec(self, x, w):
        raise NotImplementedError


# ---------------------------------------------------------------------------
# quadratic (Gaussian) targets


@dataclass(frozen=True)
class QuadraticSpec:
    """Hessian spectrum plus an optional fixed rotation (None means identity)."""

    eigenvalues: np.ndarray
    rotation: np.ndarray | None = None

    def __post_init__(self):
        eig = np.asarray(self.eigenvalues, dtype=float).ravel()
        if eig.size < 1 or not np.all(np.isfinite(eig)):
            raise ValueError("eigenvalues must be a nonempty finite vector")
        if np.any(eig <= 0.0):
            raise ValueError("eigenvalues must be positive")
        object.__setattr__(self, "eigenvalues", eig)
        if self.rotation is not None:
            rot = np.asarray(self.rotation, dtype=float)
            if rot.shape != (eig.size, eig.size):
                raise ValueError("rotation shape must match the spectrum")
            if not np.allclose(rot @ rot.T, np.eye(eig.size), atol=1e-10):
                raise ValueError("rotation must be orthogonal")
            object.__setattr__(self, "rotation", rot)

    @property
    def dim(self) -> int:
        return self.eigenvalues.size

    def hessian(self) -> np.ndarray:
        if self.rotation is None:
            return np.diag(self.eigenvalues)
        return self.rotation @ np.diag(self.eigenvalues) @ self.rotation.T


class GaussianPotential(PotentialModel):
    """f(x) = x^T H x / 2 with H from a QuadraticSpec; H' vanishes."""

    kind = "gaussian"

    def __init__(self, spec: QuadraticSpec):
        self.spec = spec
        self.dim = spec.dim
        self._hess = None if spec.rotation is None else spec.hessian()
        self.m = float(spec.eigenvalues.min())
        self.L = float(spec.eigenvalues.max())
        self.L1 = 0.0
        self.L1s = 0.0

    def value(self, x):
        x = np.asarray(x, dtype=float)
        if self._hess is None:
            return 0.5 * np.einsum("...i,i,...i->...", x, self.spec.eigenvalues, x)
        return 0.5 * np.einsum("...i,...i->...", x, x @ self._hess)

    def grad(self, x):
        x = np.asarray(x, dtype=float)
        if self._hess is None:
            return self.spec.eigenvalues * x
        return x @ self._hess

    def hessian_vec(self, x, w):
        w = np.asarray(w, dtype=float)
        if self._hess is None:
            return self.spec.eigenvalues * w
        return w @ self._hess

    def third_bilinear(self, x, w1, w2):
        shape = np.broadcast_shapes(np.shape(x), np.shape(w1), np.shape(w2))
        return np.zeros(shape)


def make_gaussian(spec: QuadraticSpec) -> GaussianPotential:
    return GaussianPotential(spec)


# ---------------------------------------------------------------------------
# product targets, per-coordinate phi(t) = t^2/2 + a log cosh(b t)


def _log_cosh(t):
    at = np.abs(t)
    return at + np.log1p(np.exp(-2.0 * at)) - _LOG2


def _sech2(t):
    e = np.exp(-2.0 * np.abs(t))
    sech = 2.0 * np.sqrt(e) / (1.0 + e)
    return sech * sech


class ProductPotential(PotentialModel):
    """Separable target with identical per-coordinate wells.

    phi''(t) = 1 + a b^2 sech^2(b t), so m = 1 and L = 1 + a b^2.
    phi'''(t) = -2 a b^3 sech^2(b t) tanh(b t) peaks at 4 a b^3 / (3 sqrt 3);
    the third-derivative tensor is diagonal, so L1 = L1s = that peak.
    """

    kind = "product"

    def __init__(self, a: float, b: float, d: int):
        if a < 0.0:
            raise ValueError("a must be nonnegative")
        if b <= 0.0:
            raise ValueError("b must be positive")
        if d < 1:
            raise ValueError("d must be >= 1")
        self.a = float(a)
        self.b = float(b)
        self.dim = int(d)
        self.m = 1.0
        self.L = 1.0 + self.a * self.b * self.b
        peak = 4.0 * self.a * self.b**3 / (3.0 * math.sqrt(3.0))
        self.L1 = peak
        self.L1s = peak

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return np.sum(0.5 * x * x + self.a * _log_cosh(self.b * x), axis=-1)

    def grad(self, x):
        x = np.asarray(x, dtype=float)
        return x + self.a * self.b * np.tanh(self.b * x)

    def hessian_vec(self, x, w):
        x = np.asarray(x, dtype=float)
        return (1.0 + self.a * self.b**2 * _sech2(self.b * x)) * w

    def third_bilinear(self, x, w1, w2):
        x = np.asarray(x, dtype=float)
        bt = self.b * x
        third = -2.0 * self.a * self.b**3 * _sech2(bt) * np.tanh(bt)
        return third * np.asarray(w1) * np.asarray(w2)


def make_product(phi_id: str, a: float, b: float, d: int) -> ProductPotential:
    if phi_id != "quadratic_logcosh":
        raise ValueError(f"unknown per-coordinate potential {phi_id!r}")
    return ProductPotential(a, b, d)


# ---------------------------------------------------------------------------
# ridge logistic regression


@dataclass(frozen=True)
class RegressionData:
    """Design rows, +/-1 labels, and a positive ridge strength."""

    features: np.ndarray
    labels: np.ndarray
    ridge: float

    def __post_init__(self):
        feats = np.atleast_2d(np.asarray(self.features, dtype=float))
        labels = np.asarray(self.labels, dtype=float).ravel()
        if feats.shape[1] < 1:
            raise ValueError("need at least one feature column")
        if feats.shape[0] != labels.size:
            raise ValueError("feature rows and labels disagree")
        if not np.all(np.isfinite(feats)) or not np.all(np.isfinite(labels)):
            raise ValueError("data must be finite")
        if labels.size and not np.all(np.isin(labels, (-1.0, 1.0))):
            raise ValueError("labels must be +/-1")
        if self.ridge <= 0.0:
            raise ValueError("ridge must be positive")
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]


class LogisticPotential(PotentialModel):
    """Negative log-posterior of binary logistic regression with a ridge prior.

    The loss curvature is at most 1/4 per datum and its third derivative at
    most 1/(6 sqrt 3); constants aggregate these per-datum bounds, so L1s is
    a declared (conservative) bound, not a supremum of the model family.
    """

    kind = "logistic"

    def __init__(self, data: RegressionData):
        self.data = data
        self.dim = data.dim
        self.m = data.ridge
        feats = data.features
        gram = feats.T @ feats
        top = float(np.linalg.eigvalsh(gram)[-1]) if data.n_rows else 0.0
        self.L = data.ridge + 0.25 * top
        if data.n_rows:
            max_row = float(np.max(np.linalg.norm(feats, axis=1)))
            self.L1s = max_row * top / (6.0 * math.sqrt(3.0))
            self.l1s_conservative = True
        else:
            self.L1s = 0.0
            self.l1s_conservative = False
        self.L1 = self.L1s

    def _margins(self, x):
        # s_i = y_i a_i . x, batched over leading axes of x
        return np.asarray(x, dtype=float) @ self.data.features.T * self.data.labels

    def value(self, x):
        x = np.asarray(x, dtype=float)
        ridge = 0.5 * self.data.ridge * np.einsum("...i,...i->...", x, x)
        if not self.data.n_rows:
            return ridge
        return np.sum(np.logaddexp(0.0, -self._margins(x)), axis=-1) + ridge

    def grad(self, x):
        x = np.asarray(x, dtype=float)
        out = self.data.ridge * x
        if self.data.n_rows:
            out = out + ((expit(self._margins(x)) - 1.0) * self.data.labels) @ self.data.features
        return out

    def hessian_vec(self, x, w):
        w = np.asarray(w, dtype=float)
        out = self.data.ridge * w
        if self.data.n_rows:
            sig = expit(self._margins(x))
            t = w @ self.data.features.T
            out = out + (sig * (1.0 - sig) * t) @ self.data.features
        return out

    def third_bilinear(self, x, w1, w2):
        if not self.data.n_rows:
            shape = np.broadcast_shapes(np.shape(x), np.shape(w1), np.shape(w2))
            return np.zeros(shape)
        sig = expit(self._margins(x))
        third = sig * (1.0 - sig) * (1.0 - 2.0 * sig) * self.data.labels
        t1 = np.asarray(w1, dtype=float) @ self.data.features.T
        t2 = np.asarray(w2, dtype=float) @ self.data.features.T
        return (third * t1 * t2) @ self.data.features


def make_logistic(data: RegressionData) -> LogisticPotential:
    return LogisticPotential(data)


def load_regression_csv(path, ridge: float, delimiter: str = ",") -> RegressionData:
    """Read ``label, x1..xd`` rows; {0,1} labels map to {-1,+1}.

    Malformed rows abort with their line number.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty CSV") from None
        header = [col.strip() for col in header]
        if not header or header[0].lower() != "label":
            raise ValueError(f"{path}: first column must be 'label'")
        width = len(header)
        if width < 2:
            raise ValueError(f"{path}: no feature columns")
        rows = []
        labels = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != width:
                raise ValueError(f"{path}: line {lineno}: expected {width} columns, got {len(row)}")
            try:
                raw = [float(cell) for cell in row]
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: non-numeric value") from None
            label = raw[0]
            if label == 0.0:
                label = -1.0
            if label not in (-1.0, 1.0):
                raise ValueError(f"{path}: line {lineno}: label must be in {{0,1}} or {{-1,+1}}")
            labels.append(label)
            rows.append(raw[1:])
    feats = np.array(rows, dtype=float) if rows else np.zeros((0, width - 1))
    return RegressionData(features=feats, labels=np.array(labels), ridge=ridge)


# ---------------------------------------------------------------------------
# dense third-derivative materialization


def _hessian_matrix(model: PotentialModel, x: np.ndarray) -> np.ndarray:
    return model.hessian_vec(x, np.eye(x.size))


def hessian_tensor(model: PotentialModel, x) -> Tensor3:
    """Materialize the third-derivative tensor at x, symmetric in modes 1, 2.

    Uses the analytic bilinear form when available, else central differences
    of the Hessian action with step eps^(1/3) (1 + ||x||).
    """
    x = np.asarray(x, dtype=float).ravel()
    d = x.size
    if d != model.dim:
        raise ValueError("point dimension does not match the model")
    if d > HESSIAN_TENSOR_MAX_DIM:
        raise ValueError(f"dense materialization capped at d <= {HESSIAN_TENSOR_MAX_DIM}")
    vals = np.empty((d, d, d))
    eye = np.eye(d)
    if model.third_bilinear is not None:
        for i in range(d):
            vals[i] = model.third_bilinear(x, eye[i], eye)
    else:
        step = (np.finfo(float).eps) ** (1.0 / 3.0) * (1.0 + float(np.linalg.norm(x)))
        for i in range(d):
            up = _hessian_matrix(model, x + step * eye[i])
            down = _hessian_matrix(model, x - step * eye[i])
            vals[i] = (up - down) / (2.0 * step)
    vals = 0.5 * (vals + vals.transpose(1, 0, 2))
    return Tensor3(vals)
