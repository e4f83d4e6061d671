"""Command-line front end.

Exit codes: 0 success, 2 validation, 3 I/O, 4 insufficient simulation data.
Errors are reported on stderr as a JSON object with ``error`` and ``message``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from pathlib import Path
from typing import Any, Dict, Optional

from . import ar, iid, many, sim, sweep
from .errors import ConfigError, ForkRateError, InsufficientPoints
from .params import (
    ArParams,
    IidParams,
    ManyParams,
    Mode,
    params_from_dict,
    params_to_dict,
)

SCHEMA_VERSION = 1
SCHEMES = {"iid": IidParams, "ar": ArParams, "many": ManyParams}
# CLI flag -> record field, per scheme
FIELD = {
    "iid": {"lambda": "lambda", "mu": "mu"},
    "ar": {"lambda": "lambda_t", "mu": "mu_t", "xi": "xi", "sigma": "sigma_t"},
    "many": {"lambda": "lambda_bar", "mu": "mu_bar", "n_sources": "n_sources"},
}

SIM_HEADER = ["omega", "p_hat", "ci_half_width", "n_paths", "horizon", "seed"]
COMPARE_HEADER = ["omega", "p_theory", "p_hat", "ci_half_width", "flag"]
COMPARE_TRAILER = ["slope_empirical", "rate_theory", "rel_err", "flag"]
SIM_KEYS = {"scheme", "params", "horizon", "n_paths", "seed", "omega_grid", "source_xi"}
RATE_KEYS = {"scheme", "mode", "params", "q", "b", "u", "k", "h"}


def fmt(x: Any) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, str)):
        return str(x)
    if isinstance(x, int):
        return str(x)
    return format(float(x), ".9g")


def write_csv(stream, rows) -> None:
    w = csv.writer(stream, lineterminator="\n")
    for row in rows:
        w.writerow([fmt(v) for v in row])


def dump_json(obj: Dict[str, Any]) -> str:
    return json.dumps({"schema_version": SCHEMA_VERSION, **obj}, indent=2, sort_keys=False) + "\n"


def load_json(path: str) -> Dict[str, Any]:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top-level JSON value must be an object")
    return data


def _reject_unknown(data: Dict[str, Any], allowed: set, where: str) -> None:
    extra = sorted(set(data) - allowed)
    if extra:
        raise ConfigError(f"unknown keys in {where}: {extra}")


def emit(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


# --- parameter resolution -------------------------------------------------

def _build_params(scheme: str, base: Dict[str, Any], args: argparse.Namespace, gap_key: str):
    """Merge config-file params with flags (flags win); ``--k``/``--h`` set mu."""
    fields = dict(base)
    flag_map = FIELD[scheme]
    for flag in ("lambda", "mu", "xi", "sigma", "k", "h"):
        if getattr(args, flag, None) is None:
            continue
        if flag in flag_map:
            fields[flag_map[flag]] = getattr(args, flag)
        elif flag != gap_key:
            raise ConfigError(f"--{flag} does not apply to the {scheme} scheme")
    gap = getattr(args, gap_key, None)
    if gap is None:
        gap = base.pop("__gap__", None)
        fields.pop("__gap__", None)
    if gap is not None:
        lam_key, mu_key = flag_map["lambda"], flag_map["mu"]
        if lam_key not in fields:
            raise ConfigError(f"--{gap_key} needs a value for lambda")
        if getattr(args, "mu", None) is not None:
            raise ConfigError(f"give either --mu or --{gap_key}, not both")
        fields[mu_key] = fields[lam_key] + gap
    return params_from_dict(SCHEMES[scheme], fields)


# --- rate -----------------------------------------------------------------

def cmd_rate(args: argparse.Namespace) -> int:
    cfg = load_json(args.config) if args.config else {}
    _reject_unknown(cfg, RATE_KEYS, "rate config")
    scheme = args.scheme or cfg.get("scheme")
    if scheme not in SCHEMES:
        raise ConfigError(f"scheme must be one of {sorted(SCHEMES)}")
    mode = Mode(args.mode or cfg.get("mode", Mode.EXACT.value))
    threshold_name = sweep.THRESHOLD[scheme]
    gap_name = sweep.GAP[scheme]
    for other in {"q", "b", "u"} - {threshold_name}:
        if getattr(args, other) is not None or other in cfg:
            raise ConfigError(f"scheme {scheme!r} takes --{threshold_name}, not --{other}")
    base = dict(cfg.get("params", {}))
    if gap_name in cfg:
        base["__gap__"] = cfg[gap_name]
    params = _build_params(scheme, base, args, gap_name)
    a = getattr(args, threshold_name)
    if a is None:
        a = cfg.get(threshold_name)
    if a is None:
        raise ConfigError(f"missing --{threshold_name}")

    if scheme == "iid":
        result = iid.rate_iid(a, params)
    elif scheme == "ar":
        result = ar.rate_ar(a, params, mode)
    else:
        result = many.rate_many(a, params, mode)

    if args.format == "csv":
        buf = io.StringIO()
        write_csv(buf, [["scheme", threshold_name, "value", "t_star", "y_star", "mode"],
                        [scheme, a, result.value, result.t_star, result.y_star, result.mode.value]])
        emit(buf.getvalue(), None)
    else:
        emit(dump_json({"scheme": scheme, threshold_name: a, "params": params_to_dict(params),
                        **result.as_dict()}), None)
    if not result.interior:
        print("warning: minimum over t sits at the edge of the search range", file=sys.stderr)
    return 0


# --- design ---------------------------------------------------------------

def cmd_design(args: argparse.Namespace) -> int:
    if args.quantity == "omega":
        if args.mu is None:
            raise ConfigError("design omega needs --mu")
        value = iid.effective_omega(args.delta, IidParams(args.__dict__["lambda"], args.mu))
    else:
        if args.omega is None:
            raise ConfigError("design mu needs --omega")
        value = iid.effective_mu(args.delta, args.__dict__["lambda"], args.omega)
    if args.format == "csv":
        buf = io.StringIO()
        write_csv(buf, [["quantity", "delta", "value"], [args.quantity, args.delta, value]])
        emit(buf.getvalue(), None)
    else:
        emit(dump_json({"quantity": args.quantity, "delta": args.delta, "value": value}), None)
    return 0


# --- simulate / compare ---------------------------------------------------

def load_sim_config(data: Dict[str, Any], extra_keys: set = frozenset()) -> sim.SimConfig:
    _reject_unknown(data, SIM_KEYS | set(extra_keys), "simulation config")
    scheme = data.get("scheme")
    if scheme not in SCHEMES:
        raise ConfigError(f"scheme must be one of {sorted(SCHEMES)}")
    if not isinstance(data.get("params"), dict):
        raise ConfigError("simulation config needs a 'params' object")
    if not isinstance(data.get("omega_grid"), list) or not data["omega_grid"]:
        raise ConfigError("simulation config needs a non-empty 'omega_grid' list")
    if any(isinstance(w, bool) or not isinstance(w, (int, float)) for w in data["omega_grid"]):
        raise ConfigError("omega_grid entries must be numbers")
    params = params_from_dict(SCHEMES[scheme], data["params"])
    cfg = sim.SimConfig(
        scheme=scheme,
        params=params,
        horizon=data.get("horizon", 2000),
        n_paths=data.get("n_paths", 10_000),
        seed=data.get("seed", 0),
        omega_grid=tuple(data["omega_grid"]),
        source_xi=float(data.get("source_xi", 0.0)),
    )
    return sim.validate_config(cfg)


def _run_sim(cfg: sim.SimConfig, threads: Optional[int]):
    start = time.perf_counter()
    samples = sim.simulate_paths(cfg, threads=threads)
    wall = time.perf_counter() - start
    print(
        f"n_paths={cfg.n_paths} horizon={cfg.horizon} seed={cfg.seed} wall_time={wall:.2f}s",
        file=sys.stderr,
    )
    return samples


def cmd_simulate(args: argparse.Namespace) -> int:
    cfg = load_sim_config(load_json(args.config))
    samples = _run_sim(cfg, args.threads)
    table = sim.tail_table(samples, cfg)
    if args.format == "json":
        text = dump_json({
            "scheme": cfg.scheme,
            "params": params_to_dict(cfg.params),
            "n_paths": cfg.n_paths,
            "horizon": cfg.horizon,
            "seed": cfg.seed,
            "summary": sim.samples_summary(samples),
            "tail": [
                {"omega": e.omega, "p_hat": e.p_hat, "ci_half_width": e.ci_half_width,
                 "n_paths": e.n_paths, "horizon": e.horizon, "seed": cfg.seed}
                for e in table
            ],
        })
    else:
        buf = io.StringIO()
        write_csv(buf, [SIM_HEADER] + [
            [e.omega, e.p_hat, e.ci_half_width, e.n_paths, e.horizon, cfg.seed] for e in table
        ])
        text = buf.getvalue()
    emit(text, args.out)
    return 0


def theoretical_decay_rate(cfg: sim.SimConfig, mode: Mode = Mode.EXACT) -> float:
    """Decay rate of ``P(Q > omega)`` per unit ``omega`` predicted by the rate function.

    The rate functions are linear in their threshold, so ``I(a)/a`` for any
    feasible ``a`` gives the per-unit rate.
    """
    p = cfg.params
    if isinstance(p, IidParams):
        return iid.rate_iid(1.0, p).value
    if isinstance(p, ArParams):
        a = 0.5 * p.lambda_t
        return ar.rate_ar(a, p, mode).value / a
    a = 0.5 * p.lambda_bar
    return many.rate_many(a, p, mode).value / a


def cmd_compare(args: argparse.Namespace) -> int:
    data = load_json(args.config)
    rel_tol = data.get("rel_tol", 0.15) if args.rel_tol is None else args.rel_tol
    mode = Mode(args.mode or data.get("mode", Mode.EXACT.value))
    cfg = load_sim_config(data, extra_keys={"rel_tol", "mode"})
    if not rel_tol > 0:
        raise ConfigError(f"rel_tol must be > 0, got {rel_tol}")
    if cfg.source_xi != 0.0:
        print("warning: theory assumes independent increments (source_xi = 0)", file=sys.stderr)
    samples = _run_sim(cfg, args.threads)
    table = sim.tail_table(samples, cfg)
    fit = sim.fit_decay_rate(table)
    rate = theoretical_decay_rate(cfg, mode)
    rel_err = abs(fit.slope - rate) / rate
    verdict = "OK" if rel_err <= rel_tol else "MISMATCH"
    rows = [
        (e.omega, math.exp(-rate * e.omega), e.p_hat, e.ci_half_width,
         "used" if e.p_hat > 0 else "excluded")
        for e in table
    ]
    if args.format == "json":
        text = dump_json({
            "scheme": cfg.scheme,
            "params": params_to_dict(cfg.params),
            "rows": [dict(zip(COMPARE_HEADER, r)) for r in rows],
            "slope_empirical": fit.slope,
            "rate_theory": rate,
            "rel_err": rel_err,
            "r_squared": fit.r_squared,
            "rel_tol": rel_tol,
            "flag": verdict,
        })
    else:
        buf = io.StringIO()
        write_csv(buf, [COMPARE_HEADER, *rows, COMPARE_TRAILER, [fit.slope, rate, rel_err, verdict]])
        text = buf.getvalue()
    emit(text, args.out)
    return 0


# --- sweep ----------------------------------------------------------------

def _parse_axis(text: str) -> sweep.Axis:
    try:
        name, lo, hi, steps = text.split(":")
        return sweep.Axis(name, float(lo), float(hi), int(steps))
    except ValueError:
        raise ConfigError(f"axis must look like name:min:max:steps, got {text!r}") from None


def _parse_set(text: str):
    try:
        name, value = text.split("=")
        return name, float(value)
    except ValueError:
        raise ConfigError(f"--set expects name=value, got {text!r}") from None


def load_sweep_spec(data: Dict[str, Any]) -> sweep.SweepSpec:
    _reject_unknown(data, {"scheme", "mode", "axes", "fixed", "format"}, "sweep spec")
    axes = []
    for ax in data.get("axes", []):
        if isinstance(ax, sweep.Axis):
            axes.append(ax)
            continue
        if not isinstance(ax, dict):
            raise ConfigError("each axis must be an object")
        _reject_unknown(ax, {"name", "min", "max", "steps"}, "sweep axis")
        try:
            axes.append(sweep.Axis(ax["name"], float(ax["min"]), float(ax["max"]), ax["steps"]))
        except KeyError as exc:
            raise ConfigError(f"sweep axis missing {exc}") from None
    fixed = data.get("fixed", {})
    if not isinstance(fixed, dict) or any(
        isinstance(v, bool) or not isinstance(v, (int, float)) for v in fixed.values()
    ):
        raise ConfigError("'fixed' must map parameter names to numbers")
    return sweep.SweepSpec(
        scheme=data.get("scheme"),
        axes=tuple(axes),
        fixed={k: float(v) for k, v in fixed.items()},
        mode=data.get("mode", Mode.EXACT.value),
    )


def _sweep_csv(spec: sweep.SweepSpec, rows) -> str:
    buf = io.StringIO()
    header = ["scheme", "mode", *(ax.name for ax in spec.axes), "I", "t_star", "y_star"]
    write_csv(buf, [header] + [
        [spec.scheme, spec.effective_mode.value, *r.coords, r.value, r.t_star, r.y_star]
        for r in rows
    ])
    return buf.getvalue()


def _sweep_json_obj(spec: sweep.SweepSpec, rows) -> Dict[str, Any]:
    names = [ax.name for ax in spec.axes]
    return {
        "scheme": spec.scheme,
        "mode": spec.effective_mode.value,
        "label": spec.label,
        "axes": [{"name": ax.name, "min": ax.min, "max": ax.max, "steps": ax.steps} for ax in spec.axes],
        "fixed": spec.fixed,
        "rows": [
            {**dict(zip(names, r.coords)), "I": r.value, "t_star": r.t_star, "y_star": r.y_star}
            for r in rows
        ],
    }


def _run_one(spec: sweep.SweepSpec):
    rows, skipped = sweep.run_sweep(spec)
    if not rows:
        reason = skipped[0][1] if skipped else "empty grid"
        raise ConfigError(f"no feasible grid point ({reason})")
    if skipped:
        print(
            f"warning: {len(skipped)} infeasible grid point(s) skipped, e.g. "
            f"{skipped[0][0]}: {skipped[0][1]}",
            file=sys.stderr,
        )
    return rows


def cmd_sweep(args: argparse.Namespace) -> int:
    if args.preset:
        specs = sweep.PRESETS[args.preset]
        if args.mode:
            specs = [sweep.SweepSpec(s.scheme, s.axes, s.fixed, Mode(args.mode), s.label) for s in specs]
    else:
        data = load_json(args.config) if args.config else {}
        if args.scheme:
            data["scheme"] = args.scheme
        if args.mode:
            data["mode"] = args.mode
        if args.axis:
            data["axes"] = [_parse_axis(a) for a in args.axis]
        if args.set:
            data["fixed"] = {**data.get("fixed", {}), **dict(_parse_set(x) for x in args.set)}
        specs = [load_sweep_spec(data)]
    fmt_ = args.format or "csv"
    results = [(s, _run_one(s)) for s in specs]

    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        stem = args.preset or "sweep"
        for i, (s, rows) in enumerate(results):
            suffix = f"_{s.label}" if len(results) > 1 else ""
            path = out / f"{stem}{suffix}.{fmt_}"
            body = _sweep_csv(s, rows) if fmt_ == "csv" else dump_json(_sweep_json_obj(s, rows))
            path.write_text(body)
        return 0

    if fmt_ == "json":
        if len(results) == 1:
            text = dump_json(_sweep_json_obj(*results[0]))
        else:
            text = dump_json({"preset": args.preset,
                              "panels": [_sweep_json_obj(s, r) for s, r in results]})
    elif len(results) == 1:
        text = _sweep_csv(*results[0])
    else:
        text = "\n".join(f"# panel: {s.label}\n" + _sweep_csv(s, r) for s, r in results)
    emit(text, args.out)
    return 0


# --- entry point ----------------------------------------------------------

def _add_param_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--lambda", type=float, help="arrival mean (lambda, lambda~ or lambda-bar)")
    p.add_argument("--mu", type=float, help="service mean (mu, mu~ or mu-bar)")
    p.add_argument("--xi", type=float, help="AR(1) coefficient (ar scheme)")
    p.add_argument("--sigma", type=float, help="AR(1) standard deviation (ar scheme, simulator only)")
    p.add_argument("--k", type=float, help="mu - lambda (iid/ar)")
    p.add_argument("--h", type=float, help="mu - lambda (many)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="forkrate",
        description="Natural-forking probabilities and large-deviation decay rates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rate", help="rate function I for one parameter set")
    p.add_argument("--scheme", choices=sorted(SCHEMES))
    p.add_argument("--config", help="JSON file; flags override its values")
    _add_param_flags(p)
    p.add_argument("--q", type=float, help="threshold (iid)")
    p.add_argument("--b", type=float, help="threshold (ar)")
    p.add_argument("--u", type=float, help="threshold (many)")
    p.add_argument("--mode", choices=[Mode.EXACT.value, Mode.TAYLOR.value])
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=cmd_rate)

    p = sub.add_parser("design", help="effective resistance degree or transmission rate (iid)")
    p.add_argument("quantity", choices=["omega", "mu"])
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--lambda", type=float, required=True)
    p.add_argument("--mu", type=float)
    p.add_argument("--omega", type=float)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=cmd_design)

    for name, func, help_ in (
        ("simulate", cmd_simulate, "Monte Carlo tail table"),
        ("compare", cmd_compare, "simulated decay slope against the rate function"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("config", help="JSON simulation config")
        p.add_argument("--out", help="output file (default stdout)")
        p.add_argument("--format", choices=["csv", "json"], default="csv")
        p.add_argument("--threads", type=int, help="worker threads (default $FORKRATE_THREADS)")
        if name == "compare":
            p.add_argument("--rel-tol", type=float, help="relative tolerance for the verdict (default 0.15)")
            p.add_argument("--mode", choices=[Mode.EXACT.value, Mode.TAYLOR.value])
        p.set_defaults(func=func)

    p = sub.add_parser("sweep", help="rate function over a parameter grid")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--preset", choices=sorted(sweep.PRESETS))
    src.add_argument("--config", help="JSON sweep spec")
    p.add_argument("--scheme", choices=sorted(SCHEMES))
    p.add_argument("--axis", action="append", help="name:min:max:steps (repeatable, max 2)")
    p.add_argument("--set", action="append", help="fixed parameter name=value (repeatable)")
    p.add_argument("--mode", choices=[Mode.EXACT.value, Mode.TAYLOR.value])
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--out-dir", help="write one file per preset panel into this directory")
    p.set_defaults(func=cmd_sweep)
    return parser


def _error(exc: BaseException, code: str) -> None:
    sys.stderr.write(json.dumps({"schema_version": SCHEMA_VERSION, "error": code,
                                 "message": str(exc)}) + "\n")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InsufficientPoints as exc:
        _error(exc, exc.code)
        return 4
    except ForkRateError as exc:
        _error(exc, exc.code)
        return 2
    except OSError as exc:
        _error(exc, "IOError")
        return 3
    except ValueError as exc:
        # malformed values that never reached a typed check (e.g. an unknown mode)
        _error(exc, "ValueError")
        return 2


if __name__ == "__main__":
    sys.exit(main())
