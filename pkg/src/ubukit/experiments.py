"""Verification campaigns: order scans, contraction, bias scaling, bound comparison.

Every campaign is a pure function of (model, parameters, seed) returning an
``ExperimentResult`` whose records serialize to one CSV row each. Replicas
and grid cells draw substreams derived from the master seed, so reruns are
bit-identical (wall-clock aside) regardless of worker scheduling.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from ._backend import backend_name
from . import _kernels
from .bounds import BoundConstants, check_regime, local_error_budget, local_error_constants, wasserstein_bound
from .metrics import p_norm_sq
from .models import GaussianPotential, PotentialModel, ProductPotential, make_product
from .ubu import UBUParams, ef_coeffs, fold_noise, noise_chol, stationary_sample

CSV_COLUMNS = [
    "kind",
    "statistic",
    "model",
    "d",
    "gamma",
    "cbar",
    "c",
    "h",
    "n",
    "n_replicas",
    "value",
    "std_error",
    "theory",
    "seed",
    "wall_clock_s",
]


@dataclass(frozen=True)
class ResultRecord:
    kind: str
    statistic: str
    model: str
    d: int
    gamma: float
    cbar: float
    c: float
    h: float | None
    n: int | None
    n_replicas: int
    value: float
    std_error: float | None
    theory: float | None
    seed: int
    wall_clock_s: float

    def as_row(self) -> list[str]:
        row = []
        for col in CSV_COLUMNS:
            val = getattr(self, col)
            if val is None:
                row.append("")
            elif isinstance(val, float):
                row.append(repr(float(val)))
            else:
                row.append(str(val))
        return row


@dataclass
class ExperimentResult:
    kind: str
    seed: int
    config: dict
    records: list[ResultRecord] = field(default_factory=list)
    summary: dict = field(default_factory=dict)


def model_label(model: PotentialModel) -> str:
    if isinstance(model, GaussianPotential):
        eig = ",".join(f"{v:g}" for v in model.spec.eigenvalues)
        rot = "" if model.spec.rotation is None else ";rotated"
        return f"gaussian:{eig}{rot}"
    if isinstance(model, ProductPotential):
        return f"product:a={model.a:g},b={model.b:g},d={model.dim}"
    return f"{model.kind}:d={model.dim}"


# ---------------------------------------------------------------------------
# slope fitting


def _linear_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float, float]:
    """OLS fit y = slope x + intercept; returns (slope, intercept, stderr, r2)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = x.size
    xm, ym = x.mean(), y.mean()
    sxx = float(np.sum((x - xm) ** 2))
    if sxx <= 0.0:
        raise ValueError("degenerate x values")
    slope = float(np.sum((x - xm) * (y - ym)) / sxx)
    intercept = float(ym - slope * xm)
    resid = y - slope * x - intercept
    ss_res = float(resid @ resid)
    ss_tot = float(np.sum((y - ym) ** 2))
    stderr = math.sqrt(ss_res / (n - 2) / sxx) if n > 2 else 0.0
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0.0 else 1.0
    return slope, intercept, stderr, r2


def fit_loglog_slope(xs, ys) -> tuple[float, float, float]:
    """Least squares on (log x, log y): (slope, intercept, slope stderr)."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.size != ys.size or xs.size < 3:
        raise ValueError("need at least 3 paired points")
    if np.any(xs <= 0.0) or np.any(ys <= 0.0):
        raise ValueError("coordinates must be positive")
    slope, intercept, stderr, _ = _linear_fit(np.log(xs), np.log(ys))
    return slope, intercept, stderr


# ---------------------------------------------------------------------------
# batched stepping engine


class _Engine:
    """Vectorized stepping over (R, d) state arrays, dispatching hot kernels."""

    def __init__(self, model: PotentialModel, params: UBUParams):
        self.model = model
        self.params = params
        self.eh, self.fh = ef_coeffs(params.gamma, params.h)
        self.eh2, self.fh2 = ef_coeffs(params.gamma, params.h / 2.0)
        self.s = math.sqrt(2.0 * params.gamma * params.c)
        if isinstance(model, GaussianPotential) and model.spec.rotation is None:
            self.mode = "diag"
            self.lam = np.ascontiguousarray(model.spec.eigenvalues)
        elif isinstance(model, ProductPotential):
            self.mode = "product"
        else:
            self.mode = "generic"

    def run(self, x: np.ndarray, v: np.ndarray, noise: np.ndarray) -> None:
        """Advance states in place through noise of shape (nsteps, R, d, 3)."""
        p = self.params
        if self.mode == "diag":
            _kernels.steps_diag(x, v, noise, self.lam, p.h, p.c, self.eh, self.eh2, self.fh, self.fh2, self.s)
        elif self.mode == "product":
            _kernels.steps_product(
                x, v, noise, self.model.a, self.model.b, p.h, p.c, self.eh, self.eh2, self.fh, self.fh2, self.s
            )
        else:
            hc1 = p.h * self.eh2 * p.c
            hc2 = p.h * self.fh2 * p.c
            for t in range(noise.shape[0]):
                n = noise[t]
                y = x + self.fh2 * v + self.s * n[..., 2]
                g = self.model.grad(y)
                x += self.fh * v - hc2 * g + self.s * n[..., 1]
                v *= self.eh
                v += self.s * n[..., 0] - hc1 * g


def _draw_noise(rng: np.random.Generator, chol: np.ndarray, nsteps: int, n_rep: int, d: int) -> np.ndarray:
    return rng.standard_normal((nsteps, n_rep, d, 3)) @ chol.T


def _rng(*path: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(tuple(path)))


def _thread_count() -> int:
    raw = os.environ.get("UBU_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _map_cells(fn, cells):
    workers = _thread_count()
    if workers <= 1 or len(cells) <= 1:
        return [fn(cell) for cell in cells]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, cells))


# ---------------------------------------------------------------------------
# strong / local order scans


def _validate_dyadic(h_grid, t_end: float) -> list[float]:
    hs = sorted(set(float(h) for h in h_grid))
    if len(hs) < 4:
        raise ValueError("need at least 4 grid points for a slope")
    if hs[0] <= 0.0:
        raise ValueError("step sizes must be positive")
    h_min = hs[0]
    for h in hs:
        ratio = h / h_min
        if abs(ratio - round(ratio)) > 1e-9 or round(ratio) & (round(ratio) - 1):
            raise ValueError("h grid must be a dyadic ladder")
        steps = t_end / h
        if abs(steps - round(steps)) > 1e-9:
            raise ValueError(f"t_end must be an integer multiple of every h (h = {h})")
    return hs


def strong_order_scan(
    model: PotentialModel,
    *,
    gamma: float = 2.0,
    cbar: float = 1.0,
    h_grid=(2.0**-3, 2.0**-4, 2.0**-5, 2.0**-6, 2.0**-7),
    t_end: float = 1.0,
    n_replicas: int = 64,
    ref_refine: int = 5,
    seed: int = 0,
) -> ExperimentResult:
    """Global endpoint error against a self-refined fine reference on a dyadic h ladder.

    The reference chain runs at h_min / 2**ref_refine; every coarser level
    reuses the same Brownian path through noise folding, so measured errors
    are pure discretization error.
    """
    t0 = time.perf_counter()
    hs = _validate_dyadic(h_grid, t_end)
    c = cbar / (model.L + model.m)
    d = model.dim
    h_ref = hs[0] / 2.0**ref_refine
    n_ref = round(t_end / h_ref)
    params_ref = UBUParams(gamma=gamma, c=c, h=h_ref)

    noise = _draw_noise(_rng(seed, 0), noise_chol(gamma, h_ref), n_ref, n_replicas, d)
    x0, v0 = stationary_sample(model, params_ref, _rng(seed, 1), n_replicas)

    x_ref, v_ref = x0.copy(), v0.copy()
    _Engine(model, params_ref).run(x_ref, v_ref, noise)

    label = model_label(model)
    config = {
        "model": label, "gamma": gamma, "cbar": cbar, "h_grid": hs, "t_end": t_end,
        "n_replicas": n_replicas, "ref_refine": ref_refine, "backend": backend_name(),
    }
    result = ExperimentResult(kind="order", seed=seed, config=config)

    cur_noise, cur_h = noise, h_ref
    errors = []
    for h in hs:
        while cur_h < h * (1.0 - 1e-12):
            cur_noise = fold_noise(cur_noise, gamma, cur_h)
            cur_h *= 2.0
        x, v = x0.copy(), v0.copy()
        _Engine(model, UBUParams(gamma=gamma, c=c, h=h)).run(x, v, cur_noise)
        sq = p_norm_sq(v - v_ref, x - x_ref)
        err = math.sqrt(float(sq.mean()))
        se_sq = float(sq.std(ddof=1)) / math.sqrt(n_replicas)
        se = se_sq / (2.0 * err) if err > 0.0 else 0.0
        errors.append(err)
        result.records.append(ResultRecord(
            kind="order", statistic="endpoint_error", model=label, d=d, gamma=gamma,
            cbar=cbar, c=c, h=h, n=round(t_end / h), n_replicas=n_replicas,
            value=err, std_error=se, theory=None, seed=seed,
            wall_clock_s=time.perf_counter() - t0,
        ))

    slope, intercept, stderr = fit_loglog_slope(hs, errors)
    result.records.append(ResultRecord(
        kind="order", statistic="strong_order_slope", model=label, d=d, gamma=gamma,
        cbar=cbar, c=c, h=None, n=None, n_replicas=n_replicas,
        value=slope, std_error=stderr, theory=2.0, seed=seed,
        wall_clock_s=time.perf_counter() - t0,
    ))
    result.summary = {
        "slope": slope, "slope_stderr": stderr, "intercept": intercept,
        "errors": errors, "h_grid": hs,
    }
    return result


def local_order_scan(
    model: PotentialModel,
    *,
    gamma: float = 2.0,
    cbar: float = 1.0,
    h_grid=(2.0**-3, 2.0**-4, 2.0**-5, 2.0**-6, 2.0**-7),
    n_replicas: int = 64,
    seed: int = 0,
) -> ExperimentResult:
    """One-step error from stationarity against two refined half-steps.

    When the regime allows it (gamma = 2, h <= 2), each grid point also
    carries the per-step budget C1 h^(5/2) + C2 h^3 as its theory value.
    """
    t0 = time.perf_counter()
    hs = sorted(set(float(h) for h in h_grid))
    if len(hs) < 4:
        raise ValueError("need at least 4 grid points for a slope")
    if hs[0] <= 0.0:
        raise ValueError("step sizes must be positive")
    c = cbar / (model.L + model.m)
    d = model.dim
    label = model_label(model)
    config = {
        "model": label, "gamma": gamma, "cbar": cbar, "h_grid": hs,
        "n_replicas": n_replicas, "backend": backend_name(),
    }
    result = ExperimentResult(kind="local-order", seed=seed, config=config)

    budget_ok = True
    errors = []
    for idx, h in enumerate(hs):
        params = UBUParams(gamma=gamma, c=c, h=h)
        params_half = params.half()
        x0, v0 = stationary_sample(model, params, _rng(seed, 10, idx), n_replicas)
        fine = _draw_noise(_rng(seed, 11, idx), noise_chol(gamma, h / 2.0), 2, n_replicas, d)
        coarse = fold_noise(fine, gamma, h / 2.0)
        xf, vf = x0.copy(), v0.copy()
        _Engine(model, params_half).run(xf, vf, fine)
        xc, vc = x0.copy(), v0.copy()
        _Engine(model, params).run(xc, vc, coarse)
        sq = p_norm_sq(vc - vf, xc - xf)
        err = math.sqrt(float(sq.mean()))
        se_sq = float(sq.std(ddof=1)) / math.sqrt(n_replicas)
        se = se_sq / (2.0 * err) if err > 0.0 else 0.0
        theory = None
        if gamma == 2.0 and h <= 2.0:
            c0, c1, c2 = local_error_constants(c, model.L, model.L1s, d)
            alpha, beta = local_error_budget(h, BoundConstants(C0=c0, C1=c1, C2=c2, r=1.0, h=h))
            theory = alpha + beta
            budget_ok = budget_ok and err <= theory
        errors.append(err)
        result.records.append(ResultRecord(
            kind="local-order", statistic="one_step_error", model=label, d=d, gamma=gamma,
            cbar=cbar, c=c, h=h, n=1, n_replicas=n_replicas,
            value=err, std_error=se, theory=theory, seed=seed,
            wall_clock_s=time.perf_counter() - t0,
        ))

    slope, intercept, stderr = fit_loglog_slope(hs, errors)
    result.records.append(ResultRecord(
        kind="local-order", statistic="local_order_slope", model=label, d=d, gamma=gamma,
        cbar=cbar, c=c, h=None, n=None, n_replicas=n_replicas,
        value=slope, std_error=stderr, theory=2.5, seed=seed,
        wall_clock_s=time.perf_counter() - t0,
    ))
    result.summary = {
        "slope": slope, "slope_stderr": stderr, "intercept": intercept,
        "errors": errors, "h_grid": hs, "budget_ok": budget_ok,
    }
    return result


# ---------------------------------------------------------------------------
# contraction


def contraction_run(
    model: PotentialModel,
    *,
    gamma: float = 2.0,
    cbar: float = 1.0,
    h: float = 0.1,
    n_steps: int = 300,
    n_replicas: int = 64,
    offset_scale: float = 1.0,
    seed: int = 0,
) -> ExperimentResult:
    """Synchronous coupling from two initial laws; per-step distance ratios.

    Chains share every noise triple, so squared-P-distance ratios estimate
    the one-step contraction factor. Ratios >= 1 are reported (summary flag
    ``divergent``), never asserted.
    """
    t0 = time.perf_counter()
    c = cbar / (model.L + model.m)
    d = model.dim
    params = UBUParams(gamma=gamma, c=c, h=h)
    chol = noise_chol(gamma, h)
    rng_init = _rng(seed, 20)
    x_b, v_b = stationary_sample(model, params, rng_init, n_replicas)
    x_a = x_b + offset_scale * rng_init.standard_normal((n_replicas, d))
    v_a = v_b + offset_scale * rng_init.standard_normal((n_replicas, d))

    rng_noise = _rng(seed, 21)
    eng = _Engine(model, params)
    sq = np.empty((n_steps + 1, n_replicas))
    sq[0] = p_norm_sq(v_a - v_b, x_a - x_b)
    block = 64
    step = 0
    while step < n_steps:
        nb = min(block, n_steps - step)
        noise = _draw_noise(rng_noise, chol, nb, n_replicas, d)
        for j in range(nb):
            blk = noise[j : j + 1]
            eng.run(x_a, v_a, blk)
            eng.run(x_b, v_b, blk)
            sq[step + 1 + j] = p_norm_sq(v_a - v_b, x_a - x_b)
        step += nb

    label = model_label(model)
    config = {
        "model": label, "gamma": gamma, "cbar": cbar, "h": h, "n_steps": n_steps,
        "n_replicas": n_replicas, "offset_scale": offset_scale, "backend": backend_name(),
    }
    result = ExperimentResult(kind="contract", seed=seed, config=config)

    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(sq[:-1] > 0.0, sq[1:] / sq[:-1], np.nan)
    finite = ratios[np.isfinite(ratios)]
    rho_max = float(finite.max()) if finite.size else float("nan")
    rms = np.sqrt(sq.mean(axis=1))
    se_sq = sq.std(axis=1, ddof=1) / math.sqrt(n_replicas) if n_replicas > 1 else np.zeros(n_steps + 1)
    for n in range(n_steps + 1):
        se = se_sq[n] / (2.0 * rms[n]) if rms[n] > 0.0 else 0.0
        result.records.append(ResultRecord(
            kind="contract", statistic="pnorm_distance", model=label, d=d, gamma=gamma,
            cbar=cbar, c=c, h=h, n=n, n_replicas=n_replicas,
            value=float(rms[n]), std_error=float(se), theory=None, seed=seed,
            wall_clock_s=time.perf_counter() - t0,
        ))

    summary: dict = {"rho_max": rho_max, "divergent": bool(rho_max >= 1.0) if math.isfinite(rho_max) else False}
    if np.all(rms > 0.0):
        slope, _, stderr, r2 = _linear_fit(np.arange(n_steps + 1, dtype=float), np.log(rms))
        summary.update(rate_fit=-slope, rate_fit_stderr=stderr, log_r2=r2)
        result.records.append(ResultRecord(
            kind="contract", statistic="rate_fit", model=label, d=d, gamma=gamma,
            cbar=cbar, c=c, h=h, n=None, n_replicas=n_replicas,
            value=-slope, std_error=stderr, theory=None, seed=seed,
            wall_clock_s=time.perf_counter() - t0,
        ))
    else:
        summary.update(rate_fit=float("nan"), rate_fit_stderr=float("nan"), log_r2=float("nan"),
                       note="distance zero")
    if math.isfinite(rho_max) and rho_max < 1.0:
        summary["r_hat"] = (1.0 - math.sqrt(rho_max)) / h
    else:
        summary["r_hat"] = float("nan")
    result.summary = summary
    return result


# ---------------------------------------------------------------------------
# coupled bias cells (shared by bias scans and bound comparison)


def _plan_rate(model: PotentialModel, c: float) -> float:
    """Crude contraction-rate guess used only to size burn-in windows."""
    inner = 1.0 - c * model.m
    if inner <= 0.0:
        return 1.0
    return max(1.0 - math.sqrt(inner), 1e-3)


def burn_in_steps(r_plan: float, h: float) -> int:
    return int(max(1000, math.ceil(10.0 / (r_plan * h))))


def _coupled_bias_cell(
    model: PotentialModel,
    *,
    gamma: float,
    c: float,
    h: float,
    ratio: int,
    n_coarse: int,
    n_replicas: int,
    seed_path: tuple,
    offset_x: np.ndarray | None = None,
) -> np.ndarray:
    """Squared P-distances (n_coarse+1, R) between a coarse chain and its
    fine-step reference driven by the same Brownian path.

    Both chains start from one exact stationary draw; ``offset_x`` shifts the
    coarse chain's positions (optimal coupling of a mean-shifted start).
    """
    if ratio < 2 or ratio & (ratio - 1):
        raise ValueError("ratio must be a power of two >= 2")
    d = model.dim
    h_fine = h / ratio
    params_c = UBUParams(gamma=gamma, c=c, h=h)
    params_f = UBUParams(gamma=gamma, c=c, h=h_fine)
    chol_f = noise_chol(gamma, h_fine)
    levels = int(round(math.log2(ratio)))

    x0, v0 = stationary_sample(model, params_c, _rng(*seed_path, 0), n_replicas)
    x_ref, v_ref = x0.copy(), v0.copy()
    x_ch, v_ch = x0.copy(), v0.copy()
    if offset_x is not None:
        x_ch += np.asarray(offset_x, dtype=float)

    eng_c = _Engine(model, params_c)
    eng_f = _Engine(model, params_f)
    rng_noise = _rng(*seed_path, 1)

    sq = np.empty((n_coarse + 1, n_replicas))
    sq[0] = p_norm_sq(v_ch - v_ref, x_ch - x_ref)
    block = max(1, int(4_000_000 // max(1, ratio * n_replicas * d * 3)))
    step = 0
    while step < n_coarse:
        nb = min(block, n_coarse - step)
        fine = _draw_noise(rng_noise, chol_f, nb * ratio, n_replicas, d)
        coarse = fine
        h_cur = h_fine
        for _ in range(levels):
            coarse = fold_noise(coarse, gamma, h_cur)
            h_cur *= 2.0
        for j in range(nb):
            eng_f.run(x_ref, v_ref, fine[j * ratio : (j + 1) * ratio])
            eng_c.run(x_ch, v_ch, coarse[j : j + 1])
            sq[step + 1 + j] = p_norm_sq(v_ch - v_ref, x_ch - x_ref)
        step += nb
    return sq


def _plateau_stats(sq: np.ndarray, window: int) -> tuple[float, float, bool]:
    """Distance and standard error over the tail window, plus a plateau check.

    Plateau rule: the two successive half-window means must agree within
    three standard errors of their paired per-replica difference.
    """
    tail = sq[-window:]
    per_rep = tail.mean(axis=0)
    n_rep = per_rep.size
    mean_sq = float(per_rep.mean())
    dist = math.sqrt(mean_sq)
    se_sq = float(per_rep.std(ddof=1)) / math.sqrt(n_rep) if n_rep > 1 else 0.0
    se = se_sq / (2.0 * dist) if dist > 0.0 else 0.0
    half = window // 2
    diff = sq[-half:].mean(axis=0) - sq[-window : -window + half].mean(axis=0)
    se_diff = float(diff.std(ddof=1)) / math.sqrt(n_rep) if n_rep > 1 else 0.0
    plateau_ok = abs(float(diff.mean())) <= max(3.0 * se_diff, 1e-14)
    return dist, se, plateau_ok


def bias_scan_h(
    model: PotentialModel,
    *,
    gamma: float = 2.0,
    cbar: float = 1.0,
    h_grid=(2.0**-2, 2.0**-3, 2.0**-4, 2.0**-5),
    ratio: int = 16,
    n_replicas: int = 128,
    window: int = 256,
    r_plan: float | None = None,
    seed: int = 0,
) -> ExperimentResult:
    """Plateau coupling distance to the stationary reference across an h ladder."""
    t0 = time.perf_counter()
    hs = sorted(set(float(h) for h in h_grid))
    if hs[0] <= 0.0:
        raise ValueError("step sizes must be positive")
    c = cbar / (model.L + model.m)
    rp = r_plan if r_plan is not None else _plan_rate(model, c)
    label = model_label(model)
    config = {
        "model": label, "gamma": gamma, "cbar": cbar, "h_grid": hs, "ratio": ratio,
        "n_replicas": n_replicas, "window": window, "r_plan": rp, "backend": backend_name(),
    }
    result = ExperimentResult(kind="bias", seed=seed, config=config)

    def cell(args):
        idx, h = args
        burn = burn_in_steps(rp, h)
        sq = _coupled_bias_cell(
            model, gamma=gamma, c=c, h=h, ratio=ratio, n_coarse=burn + window,
            n_replicas=n_replicas, seed_path=(seed, 101, idx),
        )
        return _plateau_stats(sq, window)

    stats = _map_cells(cell, list(enumerate(hs)))
    values = []
    all_plateau = True
    for h, (dist, se, plateau_ok) in zip(hs, stats):
        values.append(dist)
        all_plateau = all_plateau and plateau_ok
        result.records.append(ResultRecord(
            kind="bias", statistic="plateau_distance", model=label, d=model.dim, gamma=gamma,
            cbar=cbar, c=c, h=h, n=window, n_replicas=n_replicas,
            value=dist, std_error=se, theory=None, seed=seed,
            wall_clock_s=time.perf_counter() - t0,
        ))
    summary: dict = {"h_grid": hs, "values": values, "plateau_ok": all_plateau}
    if len(hs) >= 4:
        slope, intercept, stderr = fit_loglog_slope(hs, values)
        summary.update(slope=slope, slope_stderr=stderr, intercept=intercept)
        result.records.append(ResultRecord(
            kind="bias", statistic="slope_vs_h", model=label, d=model.dim, gamma=gamma,
            cbar=cbar, c=c, h=None, n=None, n_replicas=n_replicas,
            value=slope, std_error=stderr, theory=2.0, seed=seed,
            wall_clock_s=time.perf_counter() - t0,
        ))
    if not all_plateau:
        summary["note"] = "plateau not reached in at least one cell"
    result.summary = summary
    return result


def bias_scan_d(
    *,
    a: float = 1.0,
    b: float = 1.0,
    d_grid=(2, 4, 8, 16, 32, 64),
    gamma: float = 2.0,
    cbar: float = 1.0,
    h: float = 0.25,
    ratio: int = 16,
    n_replicas: int = 128,
    window: int = 256,
    r_plan: float | None = None,
    seed: int = 0,
) -> ExperimentResult:
    """Plateau coupling distance across dimension for the product target.

    Per-coordinate constants are d-independent, so the dimension factor of
    the asymptotic bias is isolated; the expected log-log slope is 1/2.
    """
    t0 = time.perf_counter()
    ds = sorted(set(int(d) for d in d_grid))
    if ds[0] < 1:
        raise ValueError("dimensions must be >= 1")
    probe = make_product("quadratic_logcosh", a, b, ds[0])
    c = cbar / (probe.L + probe.m)
    rp = r_plan if r_plan is not None else _plan_rate(probe, c)
    burn = burn_in_steps(rp, h)
    config = {
        "a": a, "b": b, "d_grid": ds, "gamma": gamma, "cbar": cbar, "h": h,
        "ratio": ratio, "n_replicas": n_replicas, "window": window, "r_plan": rp,
        "backend": backend_name(),
    }
    result = ExperimentResult(kind="dims", seed=seed, config=config)

    def cell(args):
        idx, d = args
        model = make_product("quadratic_logcosh", a, b, d)
        sq = _coupled_bias_cell(
            model, gamma=gamma, c=c, h=h, ratio=ratio, n_coarse=burn + window,
            n_replicas=n_replicas, seed_path=(seed, 101, idx),
        )
        return model, _plateau_stats(sq, window)

    stats = _map_cells(cell, list(enumerate(ds)))
    values = []
    all_plateau = True
    for d, (model, (dist, se, plateau_ok)) in zip(ds, stats):
        values.append(dist)
        all_plateau = all_plateau and plateau_ok
        result.records.append(ResultRecord(
            kind="dims", statistic="plateau_distance", model=model_label(model), d=d,
            gamma=gamma, cbar=cbar, c=c, h=h, n=window, n_replicas=n_replicas,
            value=dist, std_error=se, theory=None, seed=seed,
            wall_clock_s=time.perf_counter() - t0,
        ))
    summary: dict = {"d_grid": ds, "values": values, "plateau_ok": all_plateau}
    if len(ds) >= 4:
        slope, intercept, stderr = fit_loglog_slope(ds, values)
        summary.update(slope=slope, slope_stderr=stderr, intercept=intercept)
        result.records.append(ResultRecord(
            kind="dims", statistic="slope_vs_d", model=f"product:a={a:g},b={b:g}", d=ds[-1],
            gamma=gamma, cbar=cbar, c=c, h=h, n=None, n_replicas=n_replicas,
            value=slope, std_error=stderr, theory=0.5, seed=seed,
            wall_clock_s=time.perf_counter() - t0,
        ))
    if not all_plateau:
        summary["note"] = "plateau not reached in at least one cell"
    result.summary = summary
    return result


# ---------------------------------------------------------------------------
# theory-vs-empirics bound comparison


def _default_schedule(n_max: int, dense: int = 10, count: int = 30) -> list[int]:
    sched = set(range(min(dense, n_max) + 1))
    if n_max > dense:
        for k in np.geomspace(dense + 1, n_max, count):
            sched.add(int(round(k)))
    sched.add(n_max)
    return sorted(sched)


def bound_compare(
    model: PotentialModel,
    *,
    gamma: float = 2.0,
    cbar: float = 1.0,
    h: float = 0.1,
    ratio: int = 16,
    n_replicas: int = 256,
    w0: float = 1.0,
    r: float | None = None,
    n_max: int | None = None,
    schedule=None,
    seed: int = 0,
) -> ExperimentResult:
    """Measured coupling distance to stationarity vs the theoretical envelope.

    The chain starts from the stationary law shifted in position so the
    initial Wasserstein distance is exactly ``w0``; the reference chain is
    the fine-step flow from the unshifted draw (the optimal coupling of the
    two initial laws). If ``r`` is omitted it is estimated from a
    synchronous-coupling contraction run.
    """
    t0 = time.perf_counter()
    check_regime(gamma, h)
    c = cbar / (model.L + model.m)
    d = model.dim
    if r is None:
        probe = contraction_run(
            model, gamma=gamma, cbar=cbar, h=h, n_steps=300, n_replicas=64, seed=seed + 7_000_001,
        )
        r = probe.summary["r_hat"]
        if not (math.isfinite(r) and r > 0.0):
            raise ValueError("empirical contraction estimate failed; supply r explicitly")
    c0, c1, c2 = local_error_constants(c, model.L, model.L1s, d)
    consts = BoundConstants(C0=c0, C1=c1, C2=c2, r=r, h=h, conservative_flag=model.l1s_conservative)
    if n_max is None:
        n_max = int(math.ceil(14.0 / (r * h)))
    sched = sorted(set(schedule)) if schedule is not None else _default_schedule(n_max)
    if sched[0] < 0 or sched[-1] > n_max:
        raise ValueError("schedule entries must lie in [0, n_max]")

    offset = None
    if w0 > 0.0:
        offset = np.full(d, w0 / math.sqrt(2.0 * d))
    sq = _coupled_bias_cell(
        model, gamma=gamma, c=c, h=h, ratio=ratio, n_coarse=n_max,
        n_replicas=n_replicas, seed_path=(seed, 101, 0), offset_x=offset,
    )

    label = model_label(model)
    config = {
        "model": label, "gamma": gamma, "cbar": cbar, "h": h, "ratio": ratio,
        "n_replicas": n_replicas, "w0": w0, "r": r, "n_max": n_max, "backend": backend_name(),
    }
    result = ExperimentResult(kind="bound", seed=seed, config=config)

    dominated = True
    min_margin = math.inf
    tightness = 0.0
    for n in sched:
        row = sq[n]
        mean_sq = float(row.mean())
        dist = math.sqrt(mean_sq)
        se_sq = float(row.std(ddof=1)) / math.sqrt(n_replicas) if n_replicas > 1 else 0.0
        se = se_sq / (2.0 * dist) if dist > 0.0 else 0.0
        theory = wasserstein_bound(n, h, w0, consts)
        dominated = dominated and (dist <= theory + 3.0 * se)
        min_margin = min(min_margin, theory - dist)
        if theory > 0.0:
            tightness = max(tightness, dist / theory)
        result.records.append(ResultRecord(
            kind="bound", statistic="coupling_distance", model=label, d=d, gamma=gamma,
            cbar=cbar, c=c, h=h, n=n, n_replicas=n_replicas,
            value=dist, std_error=se, theory=theory, seed=seed,
            wall_clock_s=time.perf_counter() - t0,
        ))
    result.summary = {
        "r_used": r, "w0": w0, "dominated": dominated,
        "min_margin": min_margin, "max_tightness": tightness,
        "constants": {"C0": c0, "C1": c1, "C2": c2},
    }
    return result


# ---------------------------------------------------------------------------
# persistence


def config_hash(config: dict) -> str:
    canon = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canon.encode()).hexdigest()[:12]


def write_csv(records: list[ResultRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for rec in records:
            writer.writerow(rec.as_row())


def write_result(result: ExperimentResult, out_dir, stem: str | None = None) -> tuple[str, str]:
    """Persist records as CSV plus a JSON manifest echoing config and seed."""
    os.makedirs(out_dir, exist_ok=True)
    stem = stem or result.kind
    csv_path = os.path.join(out_dir, f"{stem}.csv")
    manifest_path = os.path.join(out_dir, f"{stem}.json")
    write_csv(result.records, csv_path)
    manifest = {
        "kind": result.kind,
        "seed": result.seed,
        "config": result.config,
        "config_hash": config_hash(result.config),
        "csv": os.path.basename(csv_path),
        "columns": CSV_COLUMNS,
        "summary": _jsonable(result.summary),
        "package_version": __version__,
    }
    with open(manifest_path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return csv_path, manifest_path


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj
