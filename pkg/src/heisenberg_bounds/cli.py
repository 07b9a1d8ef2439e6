"""Command-line entry point: ``heisenberg-bounds {constants,sweep,suite,volume}``.

Settings come from defaults, then an optional flat ``key = value`` config
file (``--config``), then command-line flags.  Exit status: 0 success,
1 a property suite failed, 2 invalid configuration, 3 numerical divergence.
"""

import argparse
import configparser
import json
import math
import sys
from pathlib import Path

from .constants import ConstantRequest, sharp_constant
from .errors import AccuracyError, DivergenceError, DomainError, InvalidArgumentError
from .experiments import (
    SUITES, ExperimentConfig, default_out_dir, emit_report, report_metadata,
    run_property_suite, run_ratio_sweep, suite_report_json, volume_mc,
)
from .group import HeisenbergSpace, ball_volume_quadrature, unit_ball_volume

EXIT_OK, EXIT_SUITE, EXIT_CONFIG, EXIT_DIVERGENCE = 0, 1, 2, 3


def _floats(text):
    return tuple(float(v) for v in str(text).replace(",", " ").split())


def _names(text):
    return tuple(v for v in str(text).replace(",", " ").split())


# option name -> (ExperimentConfig field, parser)
OPTIONS = {
    "n": ("n", int),
    "p": ("p", float),
    "pbar-in": ("p_bar_in", float),
    "pbar-out": ("p_bar_out", float),
    "operator": ("operator", str),
    "m": ("m", int),
    "p-list": ("p_list", _floats),
    "eps-grid": ("eps_grid", _floats),
    "side": ("side", str),
    "seed": ("seed", int),
    "samples": ("samples", int),
    "tol": ("tol", float),
    "jobs": ("jobs", int),
    "suite": ("suites", _names),
    "inject-omega-fault": ("omega_fault", float),
}


class ConfigError(Exception):
    pass


def read_config_file(path):
    """Flat ``key = value`` file; '#' comments; keys as the long option names."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        text = Path(path).read_text()
        parser.read_string("[settings]\n" + text)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    values = {}
    for key, raw in parser["settings"].items():
        key = key.replace("_", "-")
        if key not in OPTIONS:
            raise ConfigError(f"unknown config key {key!r}")
        field, conv = OPTIONS[key]
        try:
            values[field] = conv(raw)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {raw!r}") from exc
    return values


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value file; flags override it")
    common.add_argument("--n", type=int, help="H^n dimension parameter (Q = 2n + 2)")
    common.add_argument("--p", type=float, help="outer radial exponent")
    common.add_argument("--pbar-in", type=float, help="inner angular exponent of the domain")
    common.add_argument("--pbar-out", type=float, help="inner angular exponent of the target")
    common.add_argument("--operator", choices=["hilbert", "hlp", "mlinear"])
    common.add_argument("--m", type=int, help="arity of the m-linear Hilbert operator")
    common.add_argument("--p-list", type=_floats, help="input exponents p_1..p_m")
    common.add_argument("--eps-grid", type=_floats, help="decreasing extremizer epsilons")
    common.add_argument("--side", choices=["inner", "outer"], help="extremizer truncation side")
    common.add_argument("--seed", type=int)
    common.add_argument("--samples", type=int, help="Monte Carlo samples per estimate")
    common.add_argument("--tol", type=float, help="relative quadrature tolerance")
    common.add_argument("--jobs", type=int, help="worker processes for independent runs")
    common.add_argument("--format", choices=["csv", "json"], default=None)
    common.add_argument("--out", help="output file or directory (default: $HEISENBERG_BOUNDS_OUT)")

    parser = argparse.ArgumentParser(
        prog="heisenberg-bounds",
        description="Sharp constants of Hilbert-type operators on the Heisenberg group.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("constants", parents=[common], help="closed form vs quadrature")
    sub.add_parser("sweep", parents=[common], help="extremizer ratio sweep")
    suite = sub.add_parser("suite", parents=[common], help="property suites")
    suite.add_argument("--suite", type=_names, help=f"comma list from {', '.join(SUITES)}")
    suite.add_argument("--inject-omega-fault", type=float,
                       help="perturb omega_Q by this relative amount")
    vol = sub.add_parser("volume", parents=[common], help="unit ball volume three ways")
    vol.add_argument("--volume-samples", type=int, default=1_000_000)
    return parser


def make_config(args):
    values = read_config_file(args.config) if args.config else {}
    for opt, (field, _) in OPTIONS.items():
        v = getattr(args, opt.replace("-", "_"), None)
        if v is not None:
            values[field] = v
    return ExperimentConfig(**values)


def _fmt(x):
    return "nan" if x is None or (isinstance(x, float) and math.isnan(x)) else f"{x:.12g}"


def _write(text, args, default_name):
    if args.out is None:
        target = default_out_dir() / default_name
    else:
        target = Path(args.out)
        if target.is_dir():
            target = target / default_name
    target.parent.mkdir(parents=True, exist_ok=True)
    with open(target, "w", newline="") as fh:
        fh.write(text)
    return target


def cmd_constants(args, cfg):
    rep = sharp_constant(cfg.constant_request())
    print(f"operator      {cfg.operator}" + (f" (m={cfg.m})" if cfg.operator == "mlinear" else ""))
    print(f"closed form   {_fmt(rep.closed_form_value)}")
    print(f"quadrature    {_fmt(rep.quadrature_value)}")
    print(f"relative gap  {_fmt(rep.relative_gap)}")
    if rep.radial_operator_value != rep.closed_form_value:
        print(f"radial ratio  {_fmt(rep.radial_operator_value)}")
    print(f"literature-omega value {_fmt(rep.literature_omega_value)}")
    for note in rep.notes:
        print(f"note: {note}")
    if args.out is not None or args.format == "json":
        doc = {k: (None if isinstance(v, float) and math.isnan(v) else v)
               for k, v in rep.__dict__.items()}
        doc["notes"] = list(rep.notes)
        doc["metadata"] = report_metadata(cfg)
        path = _write(json.dumps(doc, sort_keys=True, indent=2) + "\n", args, "constants.json")
        print(f"wrote {path}")
    return EXIT_OK


def cmd_sweep(args, cfg):
    sweep = run_ratio_sweep(cfg)
    print(f"{'epsilon':>10} {'ratio':>18} {'ratio/constant':>16}")
    for r in sweep.rows:
        tail = "" if r.valid else f"  invalid: {r.message}"
        print(f"{r.epsilon:>10g} {_fmt(r.ratio):>18} {_fmt(r.ratio_over_constant):>16}{tail}")
    print(f"constant {_fmt(sweep.constant)}  extrapolated {_fmt(sweep.extrapolated_limit)}  "
          f"monotone {sweep.monotone_flag}  bounded {sweep.bounded_flag}")
    fmt = args.format or "csv"
    if args.out is not None and not Path(args.out).is_dir() and Path(args.out).suffix:
        path = Path(args.out)
    else:
        base = Path(args.out) if args.out is not None else default_out_dir()
        path = base / f"{sweep.experiment}.{fmt}"
    emit_report([sweep], fmt, path, report_metadata(cfg))
    print(f"wrote {path}")
    if all(not r.valid for r in sweep.rows) and sweep.rows:
        return EXIT_DIVERGENCE
    return EXIT_OK


def cmd_suite(args, cfg):
    report = run_property_suite(cfg)
    for r in report.results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.name} ({r.checks} checks)")
        for msg in r.failures[:10]:
            print(f"    {msg}")
    if args.out is not None:
        path = _write(suite_report_json(report, report_metadata(cfg)), args, "suite.json")
        print(f"wrote {path}")
    return EXIT_OK if report.passed else EXIT_SUITE


def cmd_volume(args, cfg):
    n = int(cfg.n)
    vol = unit_ball_volume(n)
    quad = ball_volume_quadrature(n)
    mc = volume_mc(HeisenbergSpace(n), args.volume_samples, cfg.seed)
    print(f"n = {n}")
    print(f"closed form (Beta)    {vol.lebesgue:.15g}")
    print(f"1-D quadrature        {quad.value:.15g}  rel diff "
          f"{abs(quad.value - vol.lebesgue) / vol.lebesgue:.2e}")
    print(f"Monte Carlo           {mc.value:.6g} +- {mc.error_estimate:.2g}")
    print(f"literature formula    {vol.literature:.15g}  (ratio {vol.ratio:.12g})")
    return EXIT_OK


COMMANDS = {"constants": cmd_constants, "sweep": cmd_sweep, "suite": cmd_suite,
            "volume": cmd_volume}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = make_config(args)
    except (ConfigError, InvalidArgumentError, DomainError, TypeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return COMMANDS[args.command](args, cfg)
    except (InvalidArgumentError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DivergenceError, AccuracyError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
