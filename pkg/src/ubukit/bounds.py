"""Non-asymptotic Wasserstein bound constants and evaluators for the UBU chain.

``local_error_constants`` produces the local-error constants (C0, C1, C2) for
the gamma = 2, h <= 2 regime at order p = 2; C1 and C2 scale exactly as
sqrt(d). ``wasserstein_bound`` combines them with a contraction rate r into
the transient-plus-bias envelope, and ``steps_to_eps`` inverts that envelope
into a step-size / step-count budget.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .errors import NumericalError

_SQRT5 = math.sqrt(5.0)
_SQRT3 = math.sqrt(3.0)

K0 = math.sqrt(4.0 / (3.0 - _SQRT5))
K1 = _SQRT3 / 12.0
K2 = math.sqrt((3.0 + _SQRT5) / 2.0) / 24.0

GAMMA_REGIME = 2.0
H_REGIME_MAX = 2.0


@dataclass(frozen=True)
class BoundConstants:
    """Inputs to the bound evaluator; p = 2 for the UBU integrator."""

    C0: float
    C1: float
    C2: float
    r: float
    h: float
    p: float = 2.0
    conservative_flag: bool = False

    def __post_init__(self):
        for name in ("C0", "C1", "C2"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be nonnegative")
        if self.r <= 0.0:
            raise ValueError("r must be positive")
        if self.h <= 0.0:
            raise ValueError("h must be positive")


def check_regime(gamma: float, h: float) -> None:
    """The printed constants assume gamma = 2 and h <= 2; reject anything else."""
    if gamma != GAMMA_REGIME:
        raise ValueError(f"constants are stated for gamma = {GAMMA_REGIME}, got {gamma}")
    if not (0.0 < h <= H_REGIME_MAX):
        raise ValueError(f"constants are stated for 0 < h <= {H_REGIME_MAX}, got {h}")


def local_error_constants(c: float, L: float, L1s: float, d: int) -> tuple[float, float, float]:
    """Local-error constants (C0, C1, C2) for scale c, smoothness L, flattening-norm L1s."""
    if c <= 0.0 or L <= 0.0:
        raise ValueError("c and L must be positive")
    if L1s < 0.0:
        raise ValueError("L1s must be nonnegative")
    if d < 1:
        raise ValueError("d must be >= 1")
    root_d = math.sqrt(d)
    c0 = K0 * (3.0 + 2.0 * c * L)
    c1 = K1 * c**1.5 * L * root_d
    c2 = (
        K2
        * (
            (1.0 + 4.0 * _SQRT3) * c * c * L**1.5
            + (3.0 + math.sqrt(42.0) / 2.0) * c**1.5 * L
            + 6.0 * c * math.sqrt(L)
            + _SQRT3 * c * c * L1s
        )
        * root_d
    )
    return c0, c1, c2


def r_h(r: float, C0: float, h: float) -> float:
    """Effective contraction rate (1 - sqrt((1-rh)^2 + C0 h^2)) / h; tends to r as h -> 0."""
    if h <= 0.0:
        raise ValueError("h must be positive")
    if r <= 0.0 or r * h >= 1.0:
        raise ValueError("need 0 < r h < 1")
    if C0 < 0.0:
        raise ValueError("C0 must be nonnegative")
    inner = (1.0 - r * h) ** 2 + C0 * h * h
    if inner >= 1.0:
        raise NumericalError(
            f"step too large for a contraction-dominated bound (h = {h}, r = {r}, C0 = {C0})",
            diagnostic={"inner": inner},
        )
    return (1.0 - math.sqrt(inner)) / h


def bias_term(consts: BoundConstants) -> float:
    """The n -> infinity residual (sqrt(2) C1 / sqrt(R_h) + C2 / R_h) h^p."""
    rate = r_h(consts.r, consts.C0, consts.h)
    return (math.sqrt(2.0) * consts.C1 / math.sqrt(rate) + consts.C2 / rate) * consts.h**consts.p


def wasserstein_bound(n: int, h: float, W0: float, consts: BoundConstants) -> float:
    """Distance-to-target envelope after n steps from initial distance W0."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if W0 < 0.0:
        raise ValueError("W0 must be nonnegative")
    if h != consts.h:
        raise ValueError("h must match the constants it was built with")
    rate = r_h(consts.r, consts.C0, consts.h)
    return (1.0 - h * rate) ** n * W0 + bias_term(consts)


def local_error_budget(h: float, consts: BoundConstants) -> tuple[float, float]:
    """(C1 h^(p+1/2), C2 h^(p+1)): the per-step error budget split."""
    if h <= 0.0:
        raise ValueError("h must be positive")
    return consts.C1 * h ** (consts.p + 0.5), consts.C2 * h ** (consts.p + 1.0)


def steps_to_eps(
    eps: float,
    d: int,
    c: float,
    L: float,
    L1s: float,
    W0: float,
    r: float,
    h_max: float = H_REGIME_MAX,
) -> tuple[float, int]:
    """Largest step with bias <= eps/2 and the matching transient step count.

    Returns (h_star, n_star). In the bias-dominated regime h_star scales as
    sqrt(eps) d^(-1/4), so n_star scales as d^(1/4) / sqrt(eps) up to the
    logarithmic factor from W0.
    """
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    if W0 < 0.0:
        raise ValueError("W0 must be nonnegative")
    c0, c1, c2 = local_error_constants(c, L, L1s, d)

    def bias_at(h: float) -> float:
        return bias_term(BoundConstants(C0=c0, C1=c1, C2=c2, r=r, h=h))

    h_cap = min(h_max, 0.999 * 2.0 * r / (r * r + c0))
    if bias_at(h_cap) <= eps / 2.0:
        h_star = h_cap
    else:
        lo, hi = 0.0, h_cap
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mid <= 0.0:
                break
            if bias_at(mid) <= eps / 2.0:
                lo = mid
            else:
                hi = mid
        h_star = lo
    if h_star < 1e-12:
        raise NumericalError(f"eps = {eps} is infeasible: required step underflows")
    rate = r_h(r, c0, h_star)
    if W0 <= eps / 2.0:
        return h_star, 0
    decay = 1.0 - h_star * rate
    n_star = int(math.ceil(math.log(eps / (2.0 * W0)) / math.log(decay)))
    return h_star, max(n_star, 0)


def bound_report(
    *,
    n: int,
    h: float,
    W0: float,
    c: float,
    L: float,
    L1s: float,
    d: int,
    r: float,
    conservative_flag: bool = False,
) -> dict:
    """JSON-ready record of one bound evaluation with all inputs echoed."""
    c0, c1, c2 = local_error_constants(c, L, L1s, d)
    consts = BoundConstants(C0=c0, C1=c1, C2=c2, r=r, h=h, conservative_flag=conservative_flag)
    rate = r_h(r, c0, h)
    return {
        "inputs": {"n": n, "h": h, "W0": W0, "c": c, "L": L, "L1s": L1s, "d": d, "r": r},
        "constants": {"K0": K0, "K1": K1, "K2": K2, "C0": c0, "C1": c1, "C2": c2, "p": consts.p},
        "conservative_L1s": conservative_flag,
        "R_h": rate,
        "bias_term": bias_term(consts),
        "bound": wasserstein_bound(n, h, W0, consts),
    }


def dump_bound_report(report: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
