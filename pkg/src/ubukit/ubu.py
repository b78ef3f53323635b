"""UBU splitting integrator for the kinetic Langevin SDE.

Dynamics: dv = -gamma v dt - c grad f(x) dt + sqrt(2 gamma c) dW, dx = v dt,
with stationary density proportional to exp(-f(x) - ||v||^2 / (2c)).

One step interleaves exact Ornstein-Uhlenbeck half-flows with a single
gradient kick evaluated at the half-step position. The three Gaussian
stochastic integrals entering a step are drawn jointly from their exact 3x3
covariance (``noise_cov``); ``refine_noise`` assembles a coarse triple from
two half-step triples so that references on refined grids share the same
underlying Brownian path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import NumericalError
from .metrics import p_norm_sq
from .models import GaussianPotential, PotentialModel, ProductPotential, QuadraticSpec

_PSD_CLIP = -1e-13


@dataclass(frozen=True)
class UBUParams:
    """Friction gamma, force scale c, and step size h."""

    gamma: float
    c: float
    h: float

    def __post_init__(self):
        for name in ("gamma", "c", "h"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val > 0.0):
                raise ValueError(f"{name} must be positive and finite")

    @staticmethod
    def for_model(model: PotentialModel, h: float, cbar: float = 1.0, gamma: float = 2.0) -> "UBUParams":
        """Scale the force by cbar / (L + m), the centered admissible choice."""
        return UBUParams(gamma=gamma, c=cbar / (model.L + model.m), h=h)

    def half(self) -> "UBUParams":
        return UBUParams(self.gamma, self.c, self.h / 2.0)


@dataclass(frozen=True)
class ChainState:
    """One Markov-chain iterate (position, velocity)."""

    x: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float).ravel()
        v = np.asarray(self.v, dtype=float).ravel()
        if x.shape != v.shape:
            raise ValueError("x and v must share a dimension")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(v))):
            raise ValueError("state entries must be finite")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "v", v)

    @property
    def dim(self) -> int:
        return self.x.size


@dataclass(frozen=True)
class NoiseTriple:
    """The three per-coordinate stochastic integrals of one step.

    xi1 weights the velocity update, xi2 the position update, xi3 the
    half-step position entering the gradient kick. ``cov`` is the 3x3
    covariance they were drawn from.
    """

    xi1: np.ndarray
    xi2: np.ndarray
    xi3: np.ndarray
    cov: np.ndarray

    @property
    def dim(self) -> int:
        return np.asarray(self.xi1).shape[-1]


def ef_coeffs(gamma: float, t: float) -> tuple[float, float]:
    """E(t) = exp(-gamma t) and F(t) = (1 - exp(-gamma t)) / gamma.

    F uses expm1, which stays accurate down to gamma*t -> 0 where the
    explicit difference would cancel.
    """
    if gamma <= 0.0:
        raise ValueError("gamma must be positive")
    if t < 0.0:
        raise ValueError("t must be nonnegative")
    return math.exp(-gamma * t), -math.expm1(-gamma * t) / gamma


def noise_cov(gamma: float, h: float) -> np.ndarray:
    """Exact covariance of (xi1, xi2, xi3), closed forms from the Ito isometry."""
    if gamma <= 0.0 or h <= 0.0:
        raise ValueError("gamma and h must be positive")
    g = gamma
    e1 = -math.expm1(-g * h)        # 1 - exp(-gamma h)
    e2 = -math.expm1(-2.0 * g * h)  # 1 - exp(-2 gamma h)
    eh = -math.expm1(-g * h / 2.0)  # 1 - exp(-gamma h/2)
    mh = math.exp(-g * h / 2.0)
    v11 = e2 / (2.0 * g)
    v22 = (h - 2.0 * e1 / g + e2 / (2.0 * g)) / (g * g)
    v33 = (h / 2.0 - 2.0 * eh / g + e1 / (2.0 * g)) / (g * g)
    c12 = (e1 / g - e2 / (2.0 * g)) / g
    c13 = mh * (eh / g - e1 / (2.0 * g)) / g
    c23 = (h / 2.0 - e1 / g + mh * e1 / (2.0 * g)) / (g * g)
    cov = np.array([[v11, c12, c13], [c12, v22, c23], [c13, c23, v33]])
    eigvals = np.linalg.eigvalsh(cov)
    if eigvals[0] < _PSD_CLIP:
        raise NumericalError(
            f"noise covariance indefinite (min eigenvalue {eigvals[0]:.3e})",
            diagnostic={"cov": cov, "eigvals": eigvals},
        )
    return cov


def noise_chol(gamma: float, h: float) -> np.ndarray:
    """Lower-triangular factor of ``noise_cov``; eigenvalue-clipped if needed."""
    cov = noise_cov(gamma, h)
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        eigvals, eigvecs = np.linalg.eigh(cov)
        return eigvecs * np.sqrt(np.clip(eigvals, 0.0, None))


def sample_noise(rng: np.random.Generator, params: UBUParams, d: int) -> NoiseTriple:
    """Draw d independent triples through the Cholesky factor of the covariance."""
    cov = noise_cov(params.gamma, params.h)
    chol = noise_chol(params.gamma, params.h)
    z = rng.standard_normal((d, 3)) @ chol.T
    return NoiseTriple(xi1=z[:, 0].copy(), xi2=z[:, 1].copy(), xi3=z[:, 2].copy(), cov=cov)


def zero_noise(params: UBUParams, d: int) -> NoiseTriple:
    cov = noise_cov(params.gamma, params.h)
    zeros = np.zeros(d)
    return NoiseTriple(xi1=zeros, xi2=zeros.copy(), xi3=zeros.copy(), cov=cov)


def ubu_step(state: ChainState, model: PotentialModel, params: UBUParams, noise: NoiseTriple) -> ChainState:
    """One integrator step; exactly one gradient evaluation."""
    if state.dim != model.dim:
        raise ValueError("state dimension does not match the model")
    eh, fh = ef_coeffs(params.gamma, params.h)
    eh2, fh2 = ef_coeffs(params.gamma, params.h / 2.0)
    s = math.sqrt(2.0 * params.gamma * params.c)
    y = state.x + fh2 * state.v + s * noise.xi3
    grad = model.grad(y)
    if not np.all(np.isfinite(grad)):
        raise NumericalError(
            "non-finite gradient during step",
            diagnostic={"x": state.x, "v": state.v, "y": y},
        )
    kick = params.h * params.c * grad
    v_next = eh * state.v - eh2 * kick + s * noise.xi1
    x_next = state.x + fh * state.v - fh2 * kick + s * noise.xi2
    return ChainState(x=x_next, v=v_next)


# ---------------------------------------------------------------------------
# noise refinement: half-step triples -> full-step triple on the same path


def fold_noise(noise: np.ndarray, gamma: float, h_fine: float) -> np.ndarray:
    """Merge consecutive step pairs of an integral array (n, ..., 3) -> (n/2, ..., 3).

    ``h_fine`` is the step the inputs were drawn for; outputs correspond to
    step 2 h_fine on the same Brownian path.
    """
    if noise.shape[0] % 2:
        raise ValueError("need an even number of fine steps")
    e, f = ef_coeffs(gamma, h_fine)
    first = noise[0::2]
    second = noise[1::2]
    out = np.empty_like(first)
    out[..., 0] = e * first[..., 0] + second[..., 0]
    out[..., 1] = first[..., 1] + f * first[..., 0] + second[..., 1]
    out[..., 2] = first[..., 1]
    return out


def refine_noise(fine_a: NoiseTriple, fine_b: NoiseTriple, params: UBUParams) -> NoiseTriple:
    """Assemble the step-h triple from two step-h/2 triples on adjacent intervals."""
    half_cov = noise_cov(params.gamma, params.h / 2.0)
    for name, triple in (("fine_a", fine_a), ("fine_b", fine_b)):
        if not np.allclose(triple.cov, half_cov, rtol=1e-9, atol=1e-12):
            raise ValueError(f"{name} was not drawn for sub-step h/2")
    e, f = ef_coeffs(params.gamma, params.h / 2.0)
    return NoiseTriple(
        xi1=e * fine_a.xi1 + fine_b.xi1,
        xi2=fine_a.xi2 + f * fine_a.xi1 + fine_b.xi2,
        xi3=fine_a.xi2.copy(),
        cov=noise_cov(params.gamma, params.h),
    )


# ---------------------------------------------------------------------------
# trajectories and synchronous coupling


@dataclass(frozen=True)
class CoupledRun:
    """Trajectories of two synchronously coupled chains plus their weighted distances."""

    x_a: np.ndarray
    v_a: np.ndarray
    x_b: np.ndarray
    v_b: np.ndarray
    p_dist: np.ndarray

    @property
    def n_steps(self) -> int:
        return self.x_a.shape[0] - 1


def run_trajectory(
    state: ChainState, model: PotentialModel, params: UBUParams, n_steps: int, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """Advance one chain; returns (x, v) arrays of shape (n_steps+1, d)."""
    rng = np.random.default_rng(np.random.SeedSequence((seed,)))
    xs = np.empty((n_steps + 1, state.dim))
    vs = np.empty((n_steps + 1, state.dim))
    xs[0], vs[0] = state.x, state.v
    cur = state
    for n in range(n_steps):
        cur = ubu_step(cur, model, params, sample_noise(rng, params, state.dim))
        xs[n + 1], vs[n + 1] = cur.x, cur.v
    return xs, vs


def run_coupled(
    state_a: ChainState,
    state_b: ChainState,
    model: PotentialModel,
    params: UBUParams,
    n_steps: int,
    seed: int,
) -> CoupledRun:
    """Advance two chains under identical noise realizations, recording P-distances."""
    if state_a.dim != state_b.dim:
        raise ValueError("coupled chains must share a dimension")
    rng = np.random.default_rng(np.random.SeedSequence((seed,)))
    d = state_a.dim
    shape = (n_steps + 1, d)
    out = CoupledRun(
        x_a=np.empty(shape), v_a=np.empty(shape),
        x_b=np.empty(shape), v_b=np.empty(shape),
        p_dist=np.empty(n_steps + 1),
    )
    cur_a, cur_b = state_a, state_b
    out.x_a[0], out.v_a[0] = cur_a.x, cur_a.v
    out.x_b[0], out.v_b[0] = cur_b.x, cur_b.v
    out.p_dist[0] = math.sqrt(p_norm_sq(cur_a.v - cur_b.v, cur_a.x - cur_b.x))
    for n in range(n_steps):
        noise = sample_noise(rng, params, d)
        cur_a = ubu_step(cur_a, model, params, noise)
        cur_b = ubu_step(cur_b, model, params, noise)
        out.x_a[n + 1], out.v_a[n + 1] = cur_a.x, cur_a.v
        out.x_b[n + 1], out.v_b[n + 1] = cur_b.x, cur_b.v
        out.p_dist[n + 1] = math.sqrt(p_norm_sq(cur_a.v - cur_b.v, cur_a.x - cur_b.x))
    return out


# ---------------------------------------------------------------------------
# exact transition kernel for quadratic targets


@dataclass(frozen=True)
class GaussianPropagator:
    """Exact affine Gaussian transition map over time t for a quadratic target.

    Everything is stored per Hessian eigenmode in the (v, x) plane:
    ``mean_maps[k]`` is the 2x2 matrix exp(M_k t) with
    M_k = [[-gamma, -c lam_k], [1, 0]], and ``covs[k]`` the accumulated
    transition covariance Sigma_inf - Phi Sigma_inf Phi^T.
    """

    spec: QuadraticSpec
    params: UBUParams
    t: float
    mean_maps: np.ndarray
    covs: np.ndarray

    def stationary_cov_modes(self) -> np.ndarray:
        """Per-mode stationary covariance diag(c, 1/lam) in the (v, x) plane."""
        lam = self.spec.eigenvalues
        out = np.zeros((lam.size, 2, 2))
        out[:, 0, 0] = self.params.c
        out[:, 1, 1] = 1.0 / lam
        return out

    def _to_modes(self, state: ChainState) -> tuple[np.ndarray, np.ndarray]:
        if self.spec.rotation is None:
            return state.v.copy(), state.x.copy()
        return state.v @ self.spec.rotation, state.x @ self.spec.rotation

    def _from_modes(self, v: np.ndarray, x: np.ndarray) -> ChainState:
        if self.spec.rotation is None:
            return ChainState(x=x, v=v)
        return ChainState(x=x @ self.spec.rotation.T, v=v @ self.spec.rotation.T)

    def mean_map(self, state: ChainState) -> ChainState:
        v, x = self._to_modes(state)
        v_out = self.mean_maps[:, 0, 0] * v + self.mean_maps[:, 0, 1] * x
        x_out = self.mean_maps[:, 1, 0] * v + self.mean_maps[:, 1, 1] * x
        return self._from_modes(v_out, x_out)

    def sample_transition(self, state: ChainState, rng: np.random.Generator) -> ChainState:
        mean = self.mean_map(state)
        v, x = self._to_modes(mean)
        l11, l21, l22 = _psd_chol_2x2(self.covs)
        z = rng.standard_normal((self.spec.dim, 2))
        v_out = v + l11 * z[:, 0]
        x_out = x + l21 * z[:, 0] + l22 * z[:, 1]
        return self._from_modes(v_out, x_out)


def _psd_chol_2x2(covs: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Clipped Cholesky entries of a stack of 2x2 PSD matrices."""
    p = np.clip(covs[:, 0, 0], 0.0, None)
    r = np.clip(covs[:, 1, 1], 0.0, None)
    l11 = np.sqrt(p)
    l21 = np.divide(covs[:, 1, 0], l11, out=np.zeros_like(l11), where=l11 > 0.0)
    l22 = np.sqrt(np.clip(r - l21 * l21, 0.0, None))
    return l11, l21, l22


def exact_gaussian_propagator(spec: QuadraticSpec, params: UBUParams, t: float) -> GaussianPropagator:
    if t < 0.0:
        raise ValueError("t must be nonnegative")
    lam = spec.eigenvalues
    d = lam.size
    mean_maps = np.empty((d, 2, 2))
    covs = np.empty((d, 2, 2))
    for k in range(d):
        drift = np.array([[-params.gamma, -params.c * lam[k]], [1.0, 0.0]])
        phi = expm(drift * t)
        stat = np.diag([params.c, 1.0 / lam[k]])
        cov = stat - phi @ stat @ phi.T
        mean_maps[k] = phi
        covs[k] = 0.5 * (cov + cov.T)
    return GaussianPropagator(spec=spec, params=params, t=t, mean_maps=mean_maps, covs=covs)


# ---------------------------------------------------------------------------
# exact stationary sampling


def _sample_logcosh_marginal(a: float, b: float, rng: np.random.Generator, count: int) -> np.ndarray:
    """Rejection sampling from exp(-t^2/2 - a log cosh(bt)) with normal proposals.

    The acceptance factor cosh(bt)^-a is at most 1, so standard-normal
    proposals dominate the target exactly.
    """
    out = np.empty(count)
    filled = 0
    while filled < count:
        block = max(count - filled, 1024)
        t = rng.standard_normal(block)
        logu = np.log(rng.random(block))
        at = np.abs(b * t)
        log_cosh = at + np.log1p(np.exp(-2.0 * at)) - math.log(2.0)
        keep = t[logu <= -a * log_cosh]
        take = min(keep.size, count - filled)
        out[filled : filled + take] = keep[:take]
        filled += take
    return out


def stationary_sample(
    model: PotentialModel, params: UBUParams, rng: np.random.Generator, size: int = 1
) -> tuple[np.ndarray, np.ndarray]:
    """Exact draws (x, v) of shape (size, d) from the invariant law.

    Velocities are N(0, c I) for every target; positions follow exp(-f(x)),
    available exactly for Gaussian and product targets.
    """
    d = model.dim
    v = math.sqrt(params.c) * rng.standard_normal((size, d))
    if isinstance(model, GaussianPotential):
        z = rng.standard_normal((size, d))
        x = z / np.sqrt(model.spec.eigenvalues)
        if model.spec.rotation is not None:
            x = x @ model.spec.rotation.T
        return x, v
    if isinstance(model, ProductPotential):
        flat = _sample_logcosh_marginal(model.a, model.b, rng, size * d)
        return flat.reshape(size, d), v
    raise NotImplementedError(f"no exact stationary sampler for kind {model.kind!r}")
