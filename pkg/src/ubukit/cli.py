"""Command-line frontend: one subcommand per experiment plus report utilities.

Configs are flat ``key = value`` text files; flags override file values.
Every run persists a JSON manifest (and CSV where applicable) sufficient to
reproduce it. Exit codes: 0 success, 1 validation error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .bounds import bound_report, dump_bound_report, steps_to_eps
from .errors import NumericalError
from .experiments import (
    CSV_COLUMNS,
    bias_scan_d,
    bias_scan_h,
    bound_compare,
    config_hash,
    contraction_run,
    local_order_scan,
    strong_order_scan,
    write_result,
)
from .gaussian_chaos import chaos_report
from .metrics import p_norm_sq
from .models import QuadraticSpec, load_regression_csv, make_gaussian, make_logistic, make_product
from .tensor3 import Tensor3, load_tensor, norm_12_3, norm_123_bounds, slice_spectral_norms
from .ubu import ChainState, UBUParams, run_trajectory, stationary_sample

_CSV_DOC = "CSV columns: " + ", ".join(CSV_COLUMNS)


class _UsageError(Exception):
    def __init__(self, message, parser):
        super().__init__(message)
        self.parser = parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message, self)


class _Validation(Exception):
    def __init__(self, problems):
        super().__init__("; ".join(problems))
        self.problems = problems


# ---------------------------------------------------------------------------
# config files and value parsing


def _read_config(path) -> dict[str, str]:
    out: dict[str, str] = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise _Validation([f"{path}: line {lineno}: expected 'key = value'"])
            key, _, value = stripped.partition("=")
            out[key.strip().replace("-", "_")] = value.strip()
    return out


def _floats(text: str) -> list[float]:
    return [float(tok) for tok in str(text).replace(";", ",").split(",") if tok.strip()]


def _ints(text: str) -> list[int]:
    return [int(tok) for tok in str(text).replace(";", ",").split(",") if tok.strip()]


def parse_model(spec: str):
    """Model selectors: gaussian:l1,l2,... | product:a=A,b=B,d=D | logistic:PATH[,lam=L][,delim=C]."""
    kind, _, rest = str(spec).partition(":")
    kind = kind.strip().lower()
    if kind == "gaussian":
        eig = _floats(rest)
        if not eig:
            raise _Validation([f"model {spec!r}: no eigenvalues"])
        return make_gaussian(QuadraticSpec(eigenvalues=np.array(eig)))
    if kind == "product":
        kv = _keyvals(rest, spec)
        try:
            return make_product("quadratic_logcosh", float(kv["a"]), float(kv["b"]), int(kv["d"]))
        except KeyError as exc:
            raise _Validation([f"model {spec!r}: missing {exc.args[0]}"]) from None
    if kind == "logistic":
        parts = [p for p in rest.split(",") if p.strip()]
        if not parts:
            raise _Validation([f"model {spec!r}: missing CSV path"])
        path = parts[0]
        kv = _keyvals(",".join(parts[1:]), spec) if len(parts) > 1 else {}
        lam = float(kv.get("lam", 1.0))
        delim = kv.get("delim", ",")
        return make_logistic(load_regression_csv(path, ridge=lam, delimiter=delim))
    raise _Validation([f"unknown model kind {kind!r} (want gaussian/product/logistic)"])


def _keyvals(text: str, context: str) -> dict[str, str]:
    out = {}
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        if "=" not in tok:
            raise _Validation([f"model {context!r}: bad token {tok!r}"])
        key, _, value = tok.partition("=")
        out[key.strip()] = value.strip()
    return out


def parse_tensor(spec: str, seed: int = 0) -> Tensor3:
    """Tensor selectors: diag:a1,a2,... | random:d=D[,seed=S] | file:PATH | PATH."""
    kind, _, rest = str(spec).partition(":")
    kind_l = kind.strip().lower()
    if kind_l == "diag":
        return Tensor3.diagonal(_floats(rest))
    if kind_l == "random":
        kv = _keyvals(rest, spec)
        if "d" not in kv:
            raise _Validation([f"tensor {spec!r}: missing d"])
        rng = np.random.default_rng(int(kv.get("seed", seed)))
        d = int(kv["d"])
        return Tensor3(rng.standard_normal((d, d, d)))
    if kind_l == "file":
        return load_tensor(rest)
    return load_tensor(spec)


# ---------------------------------------------------------------------------
# field tables: name -> (coerce, default or None=required, help)

_COMMON = {
    "seed": (int, -1, "master seed; omitted/-1 generates one and prints it"),
    "out": (str, "runs", "output directory"),
}

_FIELDS: dict[str, dict] = {
    "norms": {
        "tensor": (str, None, "tensor spec: diag:..., random:d=D,seed=S, file:PATH"),
        "restarts": (int, 20, "power-iteration restarts"),
        "sweeps": (int, 200, "alternation sweeps per restart"),
    },
    "chaos": {
        "tensor": (str, None, "tensor spec"),
        "n_samples": (int, 1_000_000, "Monte-Carlo sample count"),
    },
    "step": {
        "model": (str, "gaussian:1,4", "model spec"),
        "h": (float, 0.1, "step size"),
        "gamma": (float, 2.0, "friction"),
        "cbar": (float, 1.0, "force scale numerator: c = cbar/(L+m)"),
        "n_steps": (int, 100, "number of steps"),
        "init": (str, "stationary", "initial state: stationary | zero"),
    },
    "order": {
        "model": (str, "gaussian:1,2,3,4", "model spec"),
        "gamma": (float, 2.0, "friction"),
        "cbar": (float, 1.0, "force scale numerator"),
        "h_grid": (str, "0.125,0.0625,0.03125,0.015625,0.0078125", "dyadic h ladder"),
        "t_end": (float, 1.0, "integration horizon"),
        "replicas": (int, 64, "replica count"),
        "ref_refine": (int, 5, "extra halvings for the reference step"),
    },
    "local-order": {
        "model": (str, "gaussian:1,2,3,4", "model spec"),
        "gamma": (float, 2.0, "friction"),
        "cbar": (float, 1.0, "force scale numerator"),
        "h_grid": (str, "0.125,0.0625,0.03125,0.015625,0.0078125", "h ladder"),
        "replicas": (int, 64, "replica count"),
    },
    "contract": {
        "model": (str, "gaussian:1,2", "model spec"),
        "gamma": (float, 2.0, "friction"),
        "cbar": (float, 1.0, "force scale numerator"),
        "h": (float, 0.1, "step size"),
        "n_steps": (int, 300, "coupled steps"),
        "replicas": (int, 64, "replica count"),
        "offset_scale": (float, 1.0, "initial-offset scale"),
    },
    "bias": {
        "model": (str, "product:a=1,b=1,d=8", "model spec"),
        "gamma": (float, 2.0, "friction"),
        "cbar": (float, 1.0, "force scale numerator"),
        "h_grid": (str, "0.25,0.125,0.0625,0.03125", "h ladder"),
        "ratio": (int, 16, "fine-step refinement ratio (power of 2)"),
        "replicas": (int, 128, "replica count"),
        "window": (int, 256, "plateau window (coarse steps)"),
    },
    "dims": {
        "a": (float, 1.0, "per-coordinate log-cosh weight"),
        "b": (float, 1.0, "per-coordinate log-cosh frequency"),
        "d_grid": (str, "2,4,8,16,32,64", "dimension grid"),
        "gamma": (float, 2.0, "friction"),
        "cbar": (float, 1.0, "force scale numerator"),
        "h": (float, 0.25, "step size"),
        "ratio": (int, 16, "fine-step refinement ratio"),
        "replicas": (int, 128, "replica count"),
        "window": (int, 256, "plateau window"),
    },
    "bound": {
        "model": (str, "", "model spec (optional; else give --c/--L/--L1s)"),
        "gamma": (float, 2.0, "friction (constants need gamma = 2)"),
        "cbar": (float, 1.0, "force scale numerator (with --model)"),
        "c": (float, math.nan, "force scale (without --model)"),
        "L": (float, math.nan, "smoothness constant"),
        "L1s": (float, math.nan, "flattening-norm third-derivative constant"),
        "d": (int, 0, "dimension (without --model)"),
        "r": (float, math.nan, "contraction rate (omit with --empirical to estimate)"),
        "h": (float, None, "step size"),
        "n": (int, 0, "step count for the envelope"),
        "w0": (float, 1.0, "initial Wasserstein distance"),
        "empirical": (bool, False, "also run the coupled chain and compare"),
        "ratio": (int, 16, "refinement ratio (with --empirical)"),
        "replicas": (int, 256, "replica count (with --empirical)"),
    },
    "steps-to-eps": {
        "eps": (float, None, "target Wasserstein accuracy"),
        "model": (str, "", "model spec (optional; else give --c/--L/--L1s)"),
        "cbar": (float, 1.0, "force scale numerator (with --model)"),
        "c": (float, math.nan, "force scale (without --model)"),
        "L": (float, math.nan, "smoothness constant"),
        "L1s": (float, math.nan, "flattening constant"),
        "d": (int, 0, "dimension"),
        "d_grid": (str, "", "optional dimension sweep, e.g. 16,32,64"),
        "w0": (float, None, "initial Wasserstein distance"),
        "r": (float, None, "contraction rate"),
        "h_max": (float, 2.0, "step-size cap"),
    },
}

_HELP = {
    "norms": "tensor norms: exact flattening norm plus certified injective-norm bounds",
    "chaos": "Gaussian chaos mean: exact formula, Monte-Carlo check, 3d-norm bound",
    "step": "run one chain and persist per-step summary statistics",
    "order": "strong-order scan: endpoint error vs a self-refined reference",
    "local-order": "one-step error scan with the per-step budget check",
    "contract": "synchronous-coupling contraction measurement",
    "bias": "plateau bias vs step size (coupled stationary reference)",
    "dims": "plateau bias vs dimension for the product target",
    "bound": "evaluate the distance-to-target envelope (optionally vs empirics)",
    "steps-to-eps": "invert the envelope into a (step size, step count) budget",
}


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="ubukit",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="Env: UBU_THREADS caps worker count; UBU_NUMBA=0 forces the numpy kernels.",
    )
    parser.add_argument("--version", action="version", version=f"ubukit {__version__}")
    subs = parser.add_subparsers(dest="command", metavar="COMMAND")
    for name, fields in _FIELDS.items():
        sub = subs.add_parser(
            name,
            help=_HELP[name],
            description=_HELP[name],
            epilog=_CSV_DOC,
            formatter_class=argparse.RawDescriptionHelpFormatter,
        )
        sub.add_argument("--config", help="flat key = value config file; flags override")
        for field, (_, default, help_text) in {**fields, **_COMMON}.items():
            flag = "--" + field.replace("_", "-")
            if field == "empirical":
                sub.add_argument(flag, action="store_true", default=None, help=help_text)
            else:
                suffix = "" if default in (None, "") else f" [default: {default}]"
                sub.add_argument(flag, type=str, default=None, help=help_text + suffix)
    return parser


def _resolve(command: str, args: argparse.Namespace) -> dict:
    """defaults < config file < flags; returns typed values or raises _Validation."""
    fields = {**_FIELDS[command], **_COMMON}
    raw: dict[str, str] = {}
    if args.config:
        if not os.path.exists(args.config):
            raise _Validation([f"config file not found: {args.config}"])
        file_vals = _read_config(args.config)
        unknown = sorted(set(file_vals) - set(fields))
        if unknown:
            raise _Validation([f"unknown config key: {key}" for key in unknown])
        raw.update(file_vals)
    for field in fields:
        flag_val = getattr(args, field, None)
        if flag_val is not None:
            raw[field] = flag_val

    problems = []
    out = {}
    for field, (coerce, default, _) in fields.items():
        if field in raw:
            try:
                val = raw[field]
                if coerce is bool:
                    out[field] = val if isinstance(val, bool) else str(val).lower() in ("1", "true", "yes", "on")
                else:
                    out[field] = coerce(val)
            except (TypeError, ValueError):
                problems.append(f"bad value for {field}: {raw[field]!r}")
        elif default is None:
            problems.append(f"missing required field: {field}")
        else:
            out[field] = default
    if problems:
        raise _Validation(problems)
    return out


def _ensure_seed(cfg: dict) -> int:
    seed = cfg.get("seed", -1)
    if seed is None or seed < 0:
        seed = int.from_bytes(os.urandom(4), "big")
        print(f"generated seed: {seed}")
    cfg["seed"] = int(seed)
    return cfg["seed"]


def _write_manifest(out_dir: str, stem: str, payload: dict) -> str:
    os.makedirs(out_dir, exist_ok=True)
    payload = dict(payload)
    payload.setdefault("package_version", __version__)
    payload["config_hash"] = config_hash(payload.get("config", {}))
    path = os.path.join(out_dir, f"{stem}.json")
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")
    return path


# ---------------------------------------------------------------------------
# subcommand bodies


def _cmd_norms(cfg: dict) -> int:
    tensor = parse_tensor(cfg["tensor"], seed=cfg["seed"])
    est = norm_123_bounds(tensor, seed=cfg["seed"], restarts=cfg["restarts"], sweeps=cfg["sweeps"])
    flat = norm_12_3(tensor)
    slices = slice_spectral_norms(tensor)
    results = {
        "norm_12_3": flat,
        "norm_123_lower": est.lower,
        "norm_123_upper": est.upper,
        "method": est.method,
        "max_slice_norm": float(slices.max()),
        "dim": tensor.dim,
    }
    path = _write_manifest(cfg["out"], "norms", {"kind": "norms", "seed": cfg["seed"], "config": cfg, "results": results})
    print(
        f"norms: |A|_12,3 = {flat:.9g}; injective in [{est.lower:.9g}, {est.upper:.9g}]"
        f" ({est.method}); manifest: {path}"
    )
    return 0


def _cmd_chaos(cfg: dict) -> int:
    tensor = parse_tensor(cfg["tensor"], seed=cfg["seed"])
    rep = chaos_report(tensor, n_samples=cfg["n_samples"], seed=cfg["seed"])
    results = {
        "exact_mean": rep.exact_mean,
        "mc_mean": rep.mc_mean,
        "mc_std_error": rep.mc_std_error,
        "bound": rep.bound,
    }
    path = _write_manifest(cfg["out"], "chaos", {"kind": "chaos", "seed": cfg["seed"], "config": cfg, "results": results})
    print(
        f"chaos: exact = {rep.exact_mean:.9g}; mc = {rep.mc_mean:.9g} +/- {rep.mc_std_error:.3g};"
        f" bound = {rep.bound:.9g}; manifest: {path}"
    )
    return 0


def _cmd_step(cfg: dict) -> int:
    model = parse_model(cfg["model"])
    params = UBUParams.for_model(model, h=cfg["h"], cbar=cfg["cbar"], gamma=cfg["gamma"])
    rng = np.random.default_rng(np.random.SeedSequence((cfg["seed"], 0)))
    if cfg["init"] == "stationary":
        x0, v0 = stationary_sample(model, params, rng, 1)
        state = ChainState(x=x0[0], v=v0[0])
    elif cfg["init"] == "zero":
        state = ChainState(x=np.zeros(model.dim), v=np.zeros(model.dim))
    else:
        raise _Validation([f"init must be stationary or zero, got {cfg['init']!r}"])
    xs, vs = run_trajectory(state, model, params, cfg["n_steps"], seed=cfg["seed"])
    os.makedirs(cfg["out"], exist_ok=True)
    csv_path = os.path.join(cfg["out"], "step.csv")
    with open(csv_path, "w") as fh:
        fh.write("step,x_norm,v_norm,potential,p_norm_sq\n")
        for n in range(xs.shape[0]):
            fh.write(
                f"{n},{float(np.linalg.norm(xs[n]))!r},{float(np.linalg.norm(vs[n]))!r},"
                f"{float(model.value(xs[n]))!r},{float(p_norm_sq(vs[n], xs[n]))!r}\n"
            )
    _write_manifest(cfg["out"], "step", {"kind": "step", "seed": cfg["seed"], "config": cfg, "csv": "step.csv"})
    print(
        f"step: {cfg['n_steps']} steps, final |x| = {np.linalg.norm(xs[-1]):.6g},"
        f" |v| = {np.linalg.norm(vs[-1]):.6g}; csv: {csv_path}"
    )
    return 0


def _summarize(result, csv_path: str, stat: str, theory=None) -> str:
    slope = result.summary.get("slope")
    stderr = result.summary.get("slope_stderr")
    extra = f" (theory {theory})" if theory is not None else ""
    return f"{result.kind}: {stat} = {slope:.4f} +/- {stderr:.4f}{extra}; csv: {csv_path}"


def _cmd_order(cfg: dict) -> int:
    model = parse_model(cfg["model"])
    result = strong_order_scan(
        model, gamma=cfg["gamma"], cbar=cfg["cbar"], h_grid=_floats(cfg["h_grid"]),
        t_end=cfg["t_end"], n_replicas=cfg["replicas"], ref_refine=cfg["ref_refine"], seed=cfg["seed"],
    )
    csv_path, _ = write_result(result, cfg["out"])
    print(_summarize(result, csv_path, "strong-order slope", theory=2.0))
    return 0


def _cmd_local_order(cfg: dict) -> int:
    model = parse_model(cfg["model"])
    result = local_order_scan(
        model, gamma=cfg["gamma"], cbar=cfg["cbar"], h_grid=_floats(cfg["h_grid"]),
        n_replicas=cfg["replicas"], seed=cfg["seed"],
    )
    csv_path, _ = write_result(result, cfg["out"], stem="local-order")
    budget = "ok" if result.summary.get("budget_ok") else "exceeded"
    print(_summarize(result, csv_path, "local-order slope", theory=2.5) + f"; budget {budget}")
    return 0


def _cmd_contract(cfg: dict) -> int:
    model = parse_model(cfg["model"])
    result = contraction_run(
        model, gamma=cfg["gamma"], cbar=cfg["cbar"], h=cfg["h"], n_steps=cfg["n_steps"],
        n_replicas=cfg["replicas"], offset_scale=cfg["offset_scale"], seed=cfg["seed"],
    )
    csv_path, _ = write_result(result, cfg["out"])
    s = result.summary
    print(
        f"contract: rho_max = {s['rho_max']:.6f}, rate = {s['rate_fit']:.5f} +/- {s['rate_fit_stderr']:.5f},"
        f" R^2 = {s['log_r2']:.4f}, r_hat = {s['r_hat']:.5f}; csv: {csv_path}"
    )
    return 0


def _cmd_bias(cfg: dict) -> int:
    model = parse_model(cfg["model"])
    result = bias_scan_h(
        model, gamma=cfg["gamma"], cbar=cfg["cbar"], h_grid=_floats(cfg["h_grid"]),
        ratio=cfg["ratio"], n_replicas=cfg["replicas"], window=cfg["window"], seed=cfg["seed"],
    )
    csv_path, _ = write_result(result, cfg["out"])
    print(_summarize(result, csv_path, "bias slope vs h", theory=2.0))
    return 0


def _cmd_dims(cfg: dict) -> int:
    result = bias_scan_d(
        a=cfg["a"], b=cfg["b"], d_grid=_ints(cfg["d_grid"]), gamma=cfg["gamma"], cbar=cfg["cbar"],
        h=cfg["h"], ratio=cfg["ratio"], n_replicas=cfg["replicas"], window=cfg["window"], seed=cfg["seed"],
    )
    csv_path, _ = write_result(result, cfg["out"])
    print(_summarize(result, csv_path, "bias slope vs d", theory=0.5))
    return 0


def _model_consts(cfg: dict) -> tuple[float, float, float, int, bool]:
    """(c, L, L1s, d, conservative) from --model or raw constants."""
    if cfg.get("model"):
        model = parse_model(cfg["model"])
        c = cfg["cbar"] / (model.L + model.m)
        return c, model.L, model.L1s, model.dim, model.l1s_conservative
    problems = []
    for key in ("c", "L", "L1s"):
        if math.isnan(cfg[key]):
            problems.append(f"missing required field: {key} (or give --model)")
    if cfg["d"] < 1:
        problems.append("missing required field: d (or give --model)")
    if problems:
        raise _Validation(problems)
    return cfg["c"], cfg["L"], cfg["L1s"], cfg["d"], False


def _cmd_bound(cfg: dict) -> int:
    c, L, L1s, d, conservative = _model_consts(cfg)
    if cfg["empirical"]:
        if not cfg.get("model"):
            raise _Validation(["--empirical needs --model"])
        model = parse_model(cfg["model"])
        r = None if math.isnan(cfg["r"]) else cfg["r"]
        result = bound_compare(
            model, gamma=cfg["gamma"], cbar=cfg["cbar"], h=cfg["h"], ratio=cfg["ratio"],
            n_replicas=cfg["replicas"], w0=cfg["w0"], r=r, seed=cfg["seed"],
        )
        csv_path, _ = write_result(result, cfg["out"])
        s = result.summary
        print(
            f"bound: dominated = {s['dominated']}, max empirical/bound = {s['max_tightness']:.4f},"
            f" r = {s['r_used']:.5f}; csv: {csv_path}"
        )
        return 0
    if math.isnan(cfg["r"]):
        raise _Validation(["missing required field: r"])
    report = bound_report(
        n=cfg["n"], h=cfg["h"], W0=cfg["w0"], c=c, L=L, L1s=L1s, d=d, r=cfg["r"],
        conservative_flag=conservative,
    )
    os.makedirs(cfg["out"], exist_ok=True)
    report_path = os.path.join(cfg["out"], "bound-report.json")
    dump_bound_report(report, report_path)
    _write_manifest(cfg["out"], "bound-manifest", {"kind": "bound", "seed": cfg["seed"], "config": cfg})
    print(
        f"bound: value = {report['bound']:.9g} (bias term {report['bias_term']:.9g},"
        f" R_h = {report['R_h']:.6g}); report: {report_path}"
    )
    return 0


def _cmd_steps_to_eps(cfg: dict) -> int:
    c, L, L1s, d, _ = _model_consts(cfg)
    d_grid = _ints(cfg["d_grid"]) if cfg["d_grid"] else [d]
    rows = []
    for dim in d_grid:
        h_star, n_star = steps_to_eps(cfg["eps"], dim, c, L, L1s, cfg["w0"], cfg["r"], h_max=cfg["h_max"])
        rows.append((dim, h_star, n_star))
    os.makedirs(cfg["out"], exist_ok=True)
    csv_path = os.path.join(cfg["out"], "steps-to-eps.csv")
    with open(csv_path, "w") as fh:
        fh.write("d,h_star,n_star\n")
        for dim, h_star, n_star in rows:
            fh.write(f"{dim},{h_star!r},{n_star}\n")
    _write_manifest(cfg["out"], "steps-to-eps", {"kind": "steps-to-eps", "seed": cfg["seed"], "config": cfg, "csv": "steps-to-eps.csv"})
    dim, h_star, n_star = rows[-1]
    print(f"steps-to-eps: d = {dim}: h* = {h_star:.6g}, n* = {n_star}; csv: {csv_path}")
    return 0


_DISPATCH = {
    "norms": _cmd_norms,
    "chaos": _cmd_chaos,
    "step": _cmd_step,
    "order": _cmd_order,
    "local-order": _cmd_local_order,
    "contract": _cmd_contract,
    "bias": _cmd_bias,
    "dims": _cmd_dims,
    "bound": _cmd_bound,
    "steps-to-eps": _cmd_steps_to_eps,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        exc.parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if not getattr(args, "command", None):
        parser.print_help(sys.stderr)
        return 1
    try:
        cfg = _resolve(args.command, args)
        _ensure_seed(cfg)
        return _DISPATCH[args.command](cfg)
    except _Validation as exc:
        for problem in exc.problems:
            print(f"error: {problem}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        if exc.diagnostic is not None:
            print(f"diagnostic: {exc.diagnostic}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
