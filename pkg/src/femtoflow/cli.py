"""Command-line interface: ``femtoflow {solve,sweep,simulate,capacity}``.

Configuration is a JSON object whose keys carry their units. Every section
is optional; missing keys take the default operating point.

Exit status: 0 success, 2 config parse error, 3 validation error,
4 no convergence, 5 I/O error.
"""

import argparse
import csv
import io
import json
import math
import numbers
import sys
from dataclasses import dataclass

import numpy as np
from joblib import Parallel, delayed

from . import mcsim, pipeline, solver
from .domain import RadioParams, SystemParams, validate
from .exceptions import (
    BalanceDivergenceError,
    FemtoflowError,
    NoConvergenceError,
    ValidationError,
)

EXIT_OK, EXIT_CONFIG, EXIT_VALIDATION, EXIT_NO_CONVERGENCE, EXIT_IO = 0, 2, 3, 4, 5
SCHEMA_HEADER = "# femtoflow-schema v1"

# config key -> (field, converter from the stated unit to the stored value)
_SYSTEM_KEYS = {
    "macro_radius_m": ("R_M", float),
    "femto_radius_m": ("R_F", float),
    "n_femtocells": ("N", int),
    "users_per_femtocell": ("M", float),
    "femto_channels": ("N_F", int),
    "open_channels": ("N_F_O", int),
    "macro_channels": ("N_M", int),
    "indoor_fraction": ("q", float),
    "femto_user_call_rate_per_s": ("lambda_F", float),
    "total_call_rate_per_s": ("lambda_T", float),
    "session_mean_s": ("mu", lambda v: 1.0 / v),
    "femto_dwell_mean_s": ("eta_RT_F", lambda v: 1.0 / v),
    "macro_dwell_mean_s": ("eta_RT_M", lambda v: 1.0 / v),
}
_RADIO_KEYS = {
    "shadowing_sigma_db": "sigma_dB",
    "path_loss_exponent": "beta",
    "wall_count": "n_w",
    "min_user_distance_m": "R_p",
    "desired_shadowing_db": "Z_shadowing_dB",
    "tx_power_per_channel_w": "PW_v",
    "circuit_power_w": "PW_c",
    "bandwidth_hz": "B_W",
    "noise_power_w": "n_0",
}
_SOLVER_KEYS = {"tol": float, "max_iter": int, "damping": float}
_MC_KEYS = {
    "capacity_samples": int,
    "replications": int,
    "system_horizon_s": float,
    "chain_events": int,
    "warmup_fraction": float,
    "n_jobs": int,
}
_SWEEP_KEYS = {"axis", "values", "outputs", "mc"}
_TOP_KEYS = {"system", "radio", "solver", "mc", "seed", "sweep"}

_MC_DEFAULTS = dict(
    capacity_samples=20_000,
    replications=20,
    system_horizon_s=100_000.0,
    chain_events=100_000,
    warmup_fraction=0.2,
    n_jobs=1,
)


class ConfigError(Exception):
    """Malformed configuration; the message names the offending key."""


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    values: tuple
    outputs: tuple
    mc: bool = False


@dataclass(frozen=True)
class Config:
    params: SystemParams
    radio: RadioParams
    solver: solver.SolverConfig
    mc: dict
    seed: int
    sweep: SweepSpec = None


def _number(key, value, kind):
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise ConfigError(f"{key}: expected a number, got {value!r}")
    if kind is int:
        if not float(value).is_integer():
            raise ConfigError(f"{key}: expected an integer, got {value!r}")
        return int(value)
    return float(value)


def _section(raw, name, allowed):
    sec = raw.get(name, {})
    if not isinstance(sec, dict):
        raise ConfigError(f"{name}: expected an object")
    for key in sec:
        if key not in allowed:
            raise ConfigError(f"{name}.{key}: unknown key")
    return sec


def parse_config(raw):
    """Turn a decoded JSON object into a :class:`Config` (no invariant checks)."""
    if not isinstance(raw, dict):
        raise ConfigError("top level: expected a JSON object")
    for key in raw:
        if key not in _TOP_KEYS:
            raise ConfigError(f"{key}: unknown key")

    base = SystemParams.baseline()
    changes = {}
    for key, value in _section(raw, "system", _SYSTEM_KEYS).items():
        field, conv = _SYSTEM_KEYS[key]
        kind = int if conv is int else float
        value = _number(f"system.{key}", value, kind)
        if field in ("mu", "eta_RT_F", "eta_RT_M") and value <= 0:
            raise ConfigError(f"system.{key}: must be > 0, got {value!r}")
        changes[field] = conv(value)
    params = base.replace(**changes)

    radio_kw = {
        _RADIO_KEYS[k]: _number(f"radio.{k}", v, float)
        for k, v in _section(raw, "radio", _RADIO_KEYS).items()
    }
    radio = RadioParams(**radio_kw)

    solver_kw = {
        k: _number(f"solver.{k}", v, _SOLVER_KEYS[k])
        for k, v in _section(raw, "solver", _SOLVER_KEYS).items()
    }
    mc = dict(_MC_DEFAULTS)
    mc.update(
        (k, _number(f"mc.{k}", v, _MC_KEYS[k]))
        for k, v in _section(raw, "mc", _MC_KEYS).items()
    )
    seed = raw.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise ConfigError(f"seed: expected an unsigned 64-bit integer, got {seed!r}")

    sweep = None
    if "sweep" in raw:
        sec = _section(raw, "sweep", _SWEEP_KEYS)
        axis = sec.get("axis")
        if axis not in pipeline.AXES:
            raise ConfigError(f"sweep.axis: expected one of {list(pipeline.AXES)}, got {axis!r}")
        values = sec.get("values")
        if not isinstance(values, list):
            raise ConfigError("sweep.values: expected a list")
        values = tuple(_number("sweep.values", v, float) for v in values)
        outputs = sec.get("outputs", list(pipeline.METRICS))
        if not isinstance(outputs, list) or any(o not in pipeline.METRICS for o in outputs):
            raise ConfigError(f"sweep.outputs: expected a subset of {list(pipeline.METRICS)}")
        mc_flag = sec.get("mc", False)
        if not isinstance(mc_flag, bool):
            raise ConfigError("sweep.mc: expected true or false")
        sweep = SweepSpec(axis, values, tuple(o for o in pipeline.METRICS if o in outputs), mc_flag)

    try:
        solver_cfg = solver.SolverConfig(**solver_kw)
    except ValueError as exc:
        raise ValidationError([("solver", str(exc))]) from exc
    return Config(params, radio, solver_cfg, mc, seed, sweep)


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return parse_config(raw)


def _check_mc(mc):
    errors = []
    if mc["replications"] < 1:
        errors.append(("mc.replications", "must be >= 1"))
    if mc["capacity_samples"] < 2:
        errors.append(("mc.capacity_samples", "must be >= 2"))
    if not mc["system_horizon_s"] > 0:
        errors.append(("mc.system_horizon_s", "must be > 0"))
    if mc["chain_events"] < 1:
        errors.append(("mc.chain_events", "must be >= 1"))
    if not 0 <= mc["warmup_fraction"] < 1:
        errors.append(("mc.warmup_fraction", "must lie in [0, 1)"))
    if errors:
        raise ValidationError(errors)


def _json_value(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def _dump_json(obj):
    def clean(o):
        if isinstance(o, dict):
            return {k: clean(v) for k, v in o.items()}
        if isinstance(o, (list, tuple)):
            return [clean(v) for v in o]
        return _json_value(o)

    return json.dumps(clean(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _check_output(row):
    """Schema check: probabilities in [0, 1], powers and capacities nonnegative."""
    for key in ("P_FU_F", "P_MU_F", "P_U_M", "P_closed", "P_open"):
        if key in row and not 0.0 <= row[key] <= 1.0:
            raise ValueError(f"output {key}={row[key]!r} outside [0, 1]")
    for key in ("C_total", "E_PW_FBS", "eta_EE", "bits_per_joule"):
        if key in row and not row[key] >= 0.0:
            raise ValueError(f"output {key}={row[key]!r} is negative")


# ---------------------------------------------------------------- commands


def cmd_solve(cfg):
    params = validate(cfg.params)
    sol = solver.solve(params, cfg.solver)
    b = sol.blocking
    report = {
        "blocking": {"P_FU_F": b.p_fu_f, "P_MU_F": b.p_mu_f, "P_U_M": b.p_u_m},
        "rates": {k: float(v) for k, v in vars(sol.rates).items()},
        "iterations": sol.iterations,
        "residual": sol.residual,
    }
    _check_output(report["blocking"])
    return _dump_json(report)


def _system_config(cfg, seed):
    mc = cfg.mc
    return mcsim.SimConfig(
        horizon=mc["system_horizon_s"], unit="seconds", warmup=mc["warmup_fraction"],
        replications=mc["replications"], seed=seed, n_jobs=mc["n_jobs"],
    )


def _sweep_point(cfg, value):
    params = validate(pipeline.apply_axis(cfg.params, cfg.sweep.axis, value))
    sol, _, row = pipeline.evaluate(
        params, cfg.radio, cfg.solver, cfg.mc["capacity_samples"], cfg.seed
    )
    _check_output(row)
    out = [row[m] for m in cfg.sweep.outputs]
    if cfg.sweep.mc:
        sim = mcsim.simulate_system(params, _system_config(cfg, cfg.seed), sol)
        for est in sim:
            out += [est.point, est.ci_half_width]
    return out


def cmd_sweep(cfg):
    if cfg.sweep is None:
        raise ConfigError("sweep: section required for the sweep command")
    if not cfg.sweep.values:
        raise ValidationError([("sweep.values", "must not be empty")])
    validate(cfg.params, cfg.radio)
    for v in cfg.sweep.values:
        validate(pipeline.apply_axis(cfg.params, cfg.sweep.axis, v), cfg.radio)
    rows = Parallel(n_jobs=cfg.mc["n_jobs"])(
        delayed(_sweep_point)(cfg, v) for v in cfg.sweep.values
    )
    header = [cfg.sweep.axis, *cfg.sweep.outputs]
    if cfg.sweep.mc:
        for m in ("P_FU_F", "P_MU_F", "P_U_M"):
            header += [f"{m}_mc", f"{m}_mc_ci"]
    buf = io.StringIO()
    buf.write(SCHEMA_HEADER + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for v, row in zip(cfg.sweep.values, rows):
        axis_value = int(v) if cfg.sweep.axis in ("N", "N_F_O", "N_F_closed") else v
        writer.writerow([repr(axis_value)] + ["" if x is None else repr(float(x)) for x in row])
    return buf.getvalue()


def _estimate(est):
    return {"point": est.point, "ci_half_width": est.ci_half_width}


def cmd_simulate(cfg):
    params, radio = validate(cfg.params, cfg.radio)
    _check_mc(cfg.mc)
    sol, rep, row = pipeline.evaluate(params, radio, cfg.solver, cfg.mc["capacity_samples"], cfg.seed)
    sys_seed, cap_seed = np.random.SeedSequence(cfg.seed).spawn(2)
    blocking = mcsim.simulate_system(params, _system_config(cfg, sys_seed), sol)
    cap = mcsim.simulate_capacity(
        params, radio, sol,
        mcsim.SimConfig(
            horizon=cfg.mc["chain_events"], unit="events", warmup=cfg.mc["warmup_fraction"],
            replications=cfg.mc["replications"], seed=cap_seed, n_jobs=cfg.mc["n_jobs"],
        ),
    )
    ci_available = cfg.mc["replications"] > 1
    metrics = {}
    pairs = [
        ("P_FU_F", row["P_FU_F"], 0.0, blocking[0]),
        ("P_MU_F", row["P_MU_F"], 0.0, blocking[1]),
        ("P_U_M", row["P_U_M"], 0.0, blocking[2]),
        ("C_total", row["C_total"], 1.96 * rep.capacity.std_error, cap.c_total),
        ("bits_per_joule", row["bits_per_joule"],
         1.96 * rep.capacity.std_error / rep.e_pw_fbs, cap.bits_per_joule),
    ]
    for name, analytic, half, est in pairs:
        metrics[name] = {
            "analytical": analytic,
            "mc": _estimate(est),
            "agree": mcsim.agrees(est, analytic, 0.10, half),
        }
    report = {
        "metrics": metrics,
        "ci_available": ci_available,
        "replications": cfg.mc["replications"],
        "seed": cfg.seed,
        "iterations": sol.iterations,
    }
    return _dump_json(report)


def cmd_capacity(cfg):
    params, radio = validate(cfg.params, cfg.radio)
    _, rep, row = pipeline.evaluate(params, radio, cfg.solver, cfg.mc["capacity_samples"], cfg.seed)
    _check_output(row)
    c = rep.capacity
    return _dump_json({
        "P_closed": rep.p_closed,
        "P_open": rep.p_open,
        "C_closed": c.c_closed,
        "C_open": c.c_open,
        "C_total": c.c_total,
        "C_std_error": c.std_error,
        "samples": c.samples,
        "E_PW_t": rep.e_pw_t,
        "E_PW_FBS": rep.e_pw_fbs,
        "eta_EE": rep.eta_ee,
        "bits_per_joule": rep.bits_per_joule,
        "zero_capacity": rep.zero_capacity,
        "seed": cfg.seed,
    })


COMMANDS = {
    "solve": cmd_solve,
    "sweep": cmd_sweep,
    "simulate": cmd_simulate,
    "capacity": cmd_capacity,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="femtoflow", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, metavar="PATH")
        p.add_argument("--out", metavar="PATH", help="write here instead of stdout")
        p.add_argument("--seed", type=int, help="overrides the config seed")
        p.add_argument("--mc-samples", type=int, help="capacity Monte-Carlo samples")
        p.add_argument("--replications", type=int, help="simulation replications")
    return parser


def _apply_overrides(cfg, args):
    mc = dict(cfg.mc)
    if args.mc_samples is not None:
        mc["capacity_samples"] = args.mc_samples
    if args.replications is not None:
        mc["replications"] = args.replications
    seed = cfg.seed
    if args.seed is not None:
        if not 0 <= args.seed < 2**64:
            raise ConfigError(f"--seed: expected an unsigned 64-bit integer, got {args.seed}")
        seed = args.seed
    return Config(cfg.params, cfg.radio, cfg.solver, mc, seed, cfg.sweep)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = _apply_overrides(load_config(args.config), args)
        _check_mc(cfg.mc)
        text = COMMANDS[args.command](cfg)
        _emit(text, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NoConvergenceError as exc:
        print(f"no convergence: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except BalanceDivergenceError as exc:
        print(f"no convergence: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except (FemtoflowError, ValueError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
