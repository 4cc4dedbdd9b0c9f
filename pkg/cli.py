#!/usr/bin/env python
# cli.py

import argparse
import io
import json
import logging
import math
import os
import sys
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from pydantic import ValidationError

# Add the project root to sys.path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from weakcurrent.config import CONSTANT_KEYS, environment_defaults, read_config_file
from weakcurrent.current_integrator import (
    conductivity,
    minimal_conductivity,
    quasi_ohmic_power_extended,
    regime_label,
    schwinger_asymptotic_rate,
    schwinger_finite_correction,
    schwinger_reference_rate,
    schwinger_region_rate,
    sweep,
)
from weakcurrent.dirac_weakvalue import (
    make_spinor,
    second_order_coefficient,
    selected_weak_velocity,
    selection_angles,
    verify_weak_propagator,
    weak_value_closed_form,
)
from weakcurrent.errors import (
    ConfigError,
    DomainError,
    QuadratureConvergenceError,
    WeakCurrentError,
    error_kind,
)
from weakcurrent.logging_config import setup_logging
from weakcurrent.models import MomentumPoint, QuadratureConfig, RunConfig, SweepRow, UnitSystem, sweep_columns
from weakcurrent.momentum_regions import classify_grid, lattice, region_config, sample_boundaries
from weakcurrent.monitoring import write_metrics
from weakcurrent.transition_kinematics import kinematics, make_transition, transition_action
from weakcurrent.units import (
    ballistic_time_from_length,
    conductance_quantum,
    crossover_time,
    unit_system,
)
from weakcurrent.utils import FLOAT_FORMAT, loglog_slope, make_grid, write_artifact

logger = logging.getLogger("cli")

QUAD_METHODS = {"adaptive": "adaptive-polar", "strip": "cartesian-strip", "mc": "monte-carlo"}

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_CONVERGENCE = 4

# Per-channel quantities scaled by the degeneracy at serialisation
EXTENSIVE_COLUMNS = ("power_O", "sigma_O", "rate_S", "n", "j_quasi", "j_schwinger", "j_total")


class UsageError(Exception):
    """Bad command line."""


class ArgumentParser(argparse.ArgumentParser):
    """argparse that raises instead of printing a multi-line usage block and exiting."""

    def error(self, message):
        raise UsageError(message)


# Configuration


def load_config(path: Optional[str] = None, flags: Optional[Dict[str, Any]] = None) -> RunConfig:
    """
    Merge run settings: built-in/environment defaults, then the config file, then flags.

    Flags set to None are treated as not given.
    """
    merged: Dict[str, Any] = environment_defaults()
    if path:
        merged.update(read_config_file(path))
    for key, value in (flags or {}).items():
        if value is not None:
            merged[key] = value

    quad_name = merged["quad"]
    if quad_name not in QUAD_METHODS:
        raise ConfigError(f"unknown quadrature {quad_name!r}; expected adaptive, strip or mc")
    try:
        quad = QuadratureConfig(
            method=QUAD_METHODS[quad_name],
            rel_tol=float(merged["rel_tol"]),
            max_evals=int(merged["max_evals"]),
            seed=int(merged["seed"]),
            mc_samples=int(merged["mc_samples"]),
            workers=int(merged["workers"]),
        )
        overrides = {key: float(merged[key]) for key in CONSTANT_KEYS if merged.get(key) is not None}
        return RunConfig(
            units_preset=merged["units"],
            constant_overrides=overrides,
            output_format=merged["format"],
            output_path=merged["out"],
            quad=quad,
            degeneracy=int(merged["degeneracy"]),
        )
    except (ValueError, ValidationError) as e:
        raise ConfigError(_one_line(str(e))) from e


def _flags(args: argparse.Namespace) -> Dict[str, Any]:
    names = {
        "units": "units",
        "format": "format",
        "out": "out",
        "quad": "quad",
        "rel_tol": "rel_tol",
        "max_evals": "max_evals",
        "mc_samples": "mc_samples",
        "seed": "seed",
        "workers": "workers",
        "degeneracy": "degeneracy",
    }
    return {key: getattr(args, attr, None) for key, attr in names.items()}


# Serialisation


def _one_line(message: str) -> str:
    return " ".join(part.strip() for part in str(message).splitlines() if part.strip())


def _jsonable(value):
    if isinstance(value, dict):
        return {key: _jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(item) for item in value]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def frame_to_csv(frame: pd.DataFrame) -> str:
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, float_format=FLOAT_FORMAT, na_rep="", lineterminator="\n")
    return buffer.getvalue()


def emit_record(record: Dict[str, Any], run: RunConfig, default: str = "json"):
    if (run.output_format or default) == "json":
        # repr of a float is its shortest bit-exact form
        text = json.dumps(_jsonable(record), indent=2) + "\n"
    else:
        text = frame_to_csv(pd.DataFrame([record]))
    write_artifact(text, run.output_path)


def emit_table(frame: pd.DataFrame, run: RunConfig, default: str = "csv"):
    if (run.output_format or default) == "json":
        text = json.dumps(_jsonable(frame.to_dict(orient="records")), indent=2) + "\n"
    else:
        text = frame_to_csv(frame)
    write_artifact(text, run.output_path)


def sweep_frame(rows: List[SweepRow], degeneracy: int = 1) -> pd.DataFrame:
    """Sweep rows as a table; extensive columns are multiplied by the degeneracy."""
    records = []
    for row in rows:
        record = {"eps": row.epsilon, "t_bal": row.t_bal, "t_c": row.t_c}
        result = row.result
        if result is None:
            record.update({column: math.nan for column in EXTENSIVE_COLUMNS})
            record.update(regime="", model_extension="", combination="")
        else:
            values = {
                "power_O": result.power_O,
                "sigma_O": result.sigma_O,
                "rate_S": result.rate_S,
                "n": result.carrier_density,
                "j_quasi": result.j_quasi,
                "j_schwinger": result.j_schwinger,
                "j_total": result.j_total,
            }
            record.update({key: degeneracy * value for key, value in values.items()})
            record["regime"] = result.regime
            record["model_extension"] = result.model_extension
            record["combination"] = result.combination
        record["degeneracy"] = degeneracy
        record["error"] = row.error or ""
        records.append(record)
    return pd.DataFrame(records, columns=sweep_columns())


# Subcommands


def _ballistic_time(args: argparse.Namespace, units: UnitSystem) -> float:
    if getattr(args, "length", None) is not None:
        return ballistic_time_from_length(args.length, units)
    return args.tbal


def run_weak_value(args: argparse.Namespace, run: RunConfig, units: UnitSystem):
    if args.px is not None and args.py is not None:
        p = MomentumPoint(p_x=args.px, p_y=args.py)
        wv = selected_weak_velocity(p, units)
        theta_pre, theta_post = selection_angles(p)
        record = {"mode": "selection", "p_x": p.p_x, "p_y": p.p_y}
        record.update(theta_pre=theta_pre, theta_post=theta_post, **wv.as_dict())
        record["v_g"] = wv.group_velocity(units)
    elif args.theta_pre is not None and args.theta_post is not None:
        wv = weak_value_closed_form(args.theta_pre, args.theta_post)
        record = {"mode": "angles", "theta_pre": args.theta_pre, "theta_post": args.theta_post}
        record.update(wv.as_dict())
    else:
        raise UsageError("weak-value needs --px and --py, or --theta-pre and --theta-post")
    emit_record(record, run)


def run_transition(args: argparse.Namespace, run: RunConfig, units: UnitSystem):
    spec = make_transition(MomentumPoint(p_x=args.px, p_y=args.py), units, args.eps)
    record = {"p_x": args.px, "p_y": args.py, "eps": args.eps}
    record.update(kinematics(spec).dict())
    record["action"] = transition_action(spec)
    emit_record(record, run)


def run_regions(args: argparse.Namespace, run: RunConfig, units: UnitSystem):
    cfg = region_config(units, args.eps, _ballistic_time(args, units))
    if args.boundaries:
        frame = sample_boundaries(cfg, args.n)
    else:
        p_x, p_y = lattice(cfg, args.grid, args.extent)
        frame = classify_grid(p_x, p_y, cfg)
    emit_table(frame, run)


def run_conductivity(args: argparse.Namespace, run: RunConfig, units: UnitSystem):
    cfg = region_config(units, args.eps, _ballistic_time(args, units))
    sigma = conductivity(cfg, run.quad)
    g = run.degeneracy
    if cfg.ratio <= 1.0:
        closed = minimal_conductivity(units)
    else:
        closed = quasi_ohmic_power_extended(cfg) / cfg.epsilon ** 2
    record = {
        "eps": cfg.epsilon,
        "t_bal": cfg.t_bal,
        "t_c": cfg.t_c,
        "ratio": cfg.ratio,
        "power_O": g * sigma * cfg.epsilon ** 2,
        "sigma": g * sigma,
        "sigma_closed_form": g * closed,
        "sigma_per_quantum": sigma / conductance_quantum(units),
        "model_extension": cfg.ratio > 1.0,
        "method": run.quad.method,
        "degeneracy": g,
    }
    emit_record(record, run)


def run_schwinger_rate(args: argparse.Namespace, run: RunConfig, units: UnitSystem):
    cfg = region_config(units, args.eps, _ballistic_time(args, units))
    rate = schwinger_region_rate(cfg, run.quad)
    reference = schwinger_reference_rate(args.mass, cfg.epsilon, units)
    g = run.degeneracy
    record = {
        "eps": cfg.epsilon,
        "t_bal": cfg.t_bal,
        "t_c": cfg.t_c,
        "ratio": cfg.ratio,
        "rate_S": g * rate,
        "rate_asymptotic": g * schwinger_asymptotic_rate(cfg.epsilon, units),
        "leading_correction": schwinger_finite_correction(cfg.ratio),
        "mass": args.mass,
        "reference_rate": g * reference,
        "ratio_to_reference": rate / reference if reference > 0 else None,
        "n": g * rate * cfg.t_bal,
        "method": run.quad.method,
        "degeneracy": g,
    }
    emit_record(record, run)


def run_sweep(args: argparse.Namespace, run: RunConfig, units: UnitSystem):
    try:
        eps_grid = make_grid(args.eps_min, args.eps_max, args.eps_steps, args.log)
        tbal_grid = make_grid(args.tbal_min, args.tbal_max, args.tbal_steps, args.log)
    except ValueError as e:
        raise DomainError(str(e)) from e
    rows = sweep(eps_grid, tbal_grid, units, run.quad)
    failed = sum(1 for row in rows if row.error)
    if failed:
        logger.warning("%d of %d sweep cells failed", failed, len(rows))
    emit_table(sweep_frame(rows, run.degeneracy), run)


def run_verify_propagator(args: argparse.Namespace, run: RunConfig, units: UnitSystem):
    p = MomentumPoint(p_x=args.px, p_y=args.py)
    if args.theta_pre is None or args.theta_post is None:
        theta_pre, theta_post = selection_angles(p)
    else:
        theta_pre, theta_post = args.theta_pre, args.theta_post
    energy = p.energy(units)
    if energy == 0.0:
        raise DomainError("the Dirac point has no evolution time scale")
    if args.points < 2:
        raise UsageError("--points must be at least 2")

    times = np.geomspace(args.t_lo, args.t_hi, args.points) * units.hbar / energy
    rows = verify_weak_propagator(p, theta_pre, theta_post, times, units)
    coefficient = second_order_coefficient(
        p, make_spinor(theta_pre, -1), make_spinor(theta_post, +1), units
    )
    exact = abs(coefficient) <= 1e-12 * (energy / units.hbar) ** 2
    slope = None
    if not exact:
        try:
            slope = loglog_slope([t for t, _ in rows], [err for _, err in rows])
        except ValueError:
            logger.warning("Remainder vanishes at some sampled time; no slope fitted")

    frame = pd.DataFrame(rows, columns=["t", "error"])
    if (run.output_format or "json") == "json":
        record = {
            "p_x": p.p_x,
            "p_y": p.p_y,
            "theta_pre": theta_pre,
            "theta_post": theta_post,
            "second_order_re": coefficient.real,
            "second_order_im": coefficient.imag,
            "factorisation_exact": exact,
            "slope": slope,
            "rows": frame.to_dict(orient="records"),
        }
        emit_record(record, run)
    else:
        emit_table(frame, run)


def run_crossover_time(args: argparse.Namespace, run: RunConfig, units: UnitSystem):
    t_c = crossover_time(units, args.eps)
    record = {"eps": args.eps, "t_c": t_c, "units": units.name}
    t_bal = _ballistic_time(args, units)
    if t_bal is not None:
        if not t_bal > 0:
            raise DomainError(f"t_bal must be > 0, got {t_bal}")
        record.update(t_bal=t_bal, ratio=t_bal / t_c, regime=regime_label(t_bal / t_c))
    emit_record(record, run)


COMMANDS = {
    "weak-value": run_weak_value,
    "transition": run_transition,
    "regions": run_regions,
    "conductivity": run_conductivity,
    "schwinger-rate": run_schwinger_rate,
    "sweep": run_sweep,
    "verify-propagator": run_verify_propagator,
    "crossover-time": run_crossover_time,
}


# Parser


def _common_flags() -> ArgumentParser:
    # SUPPRESS keeps a flag given before the subcommand from being reset by the subparser
    common = ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--units", choices=["natural", "si"], help="Unit preset")
    common.add_argument("--config", help="Flat key=value run configuration file")
    common.add_argument("--format", choices=["csv", "json"], help="Artifact format")
    common.add_argument("--out", help="Artifact path (default: stdout)")
    common.add_argument("--seed", type=int, help="Monte Carlo seed")
    common.add_argument("--rel-tol", dest="rel_tol", type=float, help="Relative quadrature tolerance")
    common.add_argument("--quad", choices=sorted(QUAD_METHODS), help="Integration engine")
    common.add_argument("--max-evals", dest="max_evals", type=int, help="Quadrature evaluation budget")
    common.add_argument("--mc-samples", dest="mc_samples", type=int, help="Monte Carlo sample count")
    common.add_argument("--workers", type=int, help="Worker threads for sweeps and Monte Carlo")
    common.add_argument("--degeneracy", type=int, help="Channel multiplier (4 for graphene)")
    common.add_argument("--metrics-out", dest="metrics_out", help="Write Prometheus metrics here")
    common.add_argument("--log-level", dest="log_level", help="Logging level")
    return common


def _ballistic_flags(parser: argparse.ArgumentParser, required: bool = True):
    group = parser.add_mutually_exclusive_group(required=required)
    group.add_argument("--tbal", type=float, help="Ballistic time")
    group.add_argument("--length", type=float, help="Sample length L, t_bal = L / v_f")


def build_parser() -> ArgumentParser:
    common = _common_flags()
    parser = ArgumentParser(
        description="Weak-value current model of a driven 2+1D Dirac sheet", parents=[common]
    )
    subparsers = parser.add_subparsers(dest="command", help="Command to run")

    weak = subparsers.add_parser("weak-value", parents=[common], help="Weak values of sigma_x,y,z")
    weak.add_argument("--px", type=float)
    weak.add_argument("--py", type=float)
    weak.add_argument("--theta-pre", dest="theta_pre", type=float)
    weak.add_argument("--theta-post", dest="theta_post", type=float)

    transition = subparsers.add_parser("transition", parents=[common], help="Transition kinematics")
    transition.add_argument("--px", type=float, required=True)
    transition.add_argument("--py", type=float, required=True)
    transition.add_argument("--eps", type=float, required=True)

    regions = subparsers.add_parser("regions", parents=[common], help="Classify momenta or sample boundaries")
    regions.add_argument("--eps", type=float, required=True)
    _ballistic_flags(regions)
    regions.add_argument("--grid", type=int, default=11, help="N for an N x N lattice")
    regions.add_argument("--extent", type=float, default=None, help="Lattice half-width")
    regions.add_argument("--boundaries", action="store_true", help="Emit V, B, F boundary samples")
    regions.add_argument("--n", type=int, default=201, help="Points per boundary curve")

    cond = subparsers.add_parser("conductivity", parents=[common], help="Quasi-Ohmic conductivity")
    cond.add_argument("--eps", type=float, required=True)
    _ballistic_flags(cond)

    rate = subparsers.add_parser("schwinger-rate", parents=[common], help="S-region creation rate")
    rate.add_argument("--eps", type=float, required=True)
    _ballistic_flags(rate)
    rate.add_argument("--mass", type=float, default=0.0, help="Mass for the reference rate")

    sweep_parser = subparsers.add_parser("sweep", parents=[common], help="Current over an (eps, t_bal) grid")
    sweep_parser.add_argument("--eps-min", dest="eps_min", type=float, required=True)
    sweep_parser.add_argument("--eps-max", dest="eps_max", type=float, required=True)
    sweep_parser.add_argument("--eps-steps", dest="eps_steps", type=int, required=True)
    sweep_parser.add_argument("--tbal-min", dest="tbal_min", type=float, required=True)
    sweep_parser.add_argument("--tbal-max", dest="tbal_max", type=float, required=True)
    sweep_parser.add_argument("--tbal-steps", dest="tbal_steps", type=int, required=True)
    sweep_parser.add_argument("--log", action="store_true", help="Geometric grids")

    prop = subparsers.add_parser("verify-propagator", parents=[common], help="Weak-value propagator remainder")
    prop.add_argument("--px", type=float, required=True)
    prop.add_argument("--py", type=float, required=True)
    prop.add_argument("--theta-pre", dest="theta_pre", type=float)
    prop.add_argument("--theta-post", dest="theta_post", type=float)
    prop.add_argument("--t-lo", dest="t_lo", type=float, default=1e-4, help="Shortest time in hbar/E")
    prop.add_argument("--t-hi", dest="t_hi", type=float, default=1e-2, help="Longest time in hbar/E")
    prop.add_argument("--points", type=int, default=9)

    cross = subparsers.add_parser("crossover-time", parents=[common], help="Crossover time t_c")
    cross.add_argument("--eps", type=float, required=True)
    _ballistic_flags(cross, required=False)

    return parser


# Entry points


def _fail(kind: str, error: Exception, code: int) -> int:
    sys.stderr.write(f"error:{kind}:{_one_line(str(error))}\n")
    sys.stderr.flush()
    return code


def dispatch(argv: Optional[Sequence[str]] = None) -> int:
    """Run one subcommand; returns the process exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        return _fail("usage", e, EXIT_USAGE)
    except SystemExit as e:
        # --help
        return int(e.code or 0)

    setup_logging(getattr(args, "log_level", None))
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_USAGE

    metrics_out = getattr(args, "metrics_out", None)
    try:
        run = load_config(getattr(args, "config", None), _flags(args))
        units = unit_system(run.units_preset, run.constant_overrides)
        logger.info("Running %s in %s units", args.command, units.name)
        COMMANDS[args.command](args, run, units)
    except UsageError as e:
        return _fail("usage", e, EXIT_USAGE)
    except ConfigError as e:
        return _fail(error_kind(e), e, EXIT_USAGE)
    except DomainError as e:
        return _fail(error_kind(e), e, EXIT_DOMAIN)
    except QuadratureConvergenceError as e:
        logger.error("Best estimate %.17g with error bound %.3g", e.estimate, e.error_bound)
        return _fail(error_kind(e), e, EXIT_CONVERGENCE)
    except WeakCurrentError as e:
        return _fail(error_kind(e), e, EXIT_DOMAIN)
    finally:
        if metrics_out:
            write_metrics(metrics_out)
    return EXIT_OK


def main():
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
