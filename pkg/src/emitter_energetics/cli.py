"""``emitter-energetics`` command-line front end.

Subcommands::

    theory     energy breakdown and visibility curves on a pulse-area grid
    synth      synthetic detector traces, HOM histograms or visibility sweeps
    analyze    JSON report from measured (or synthetic) CSV files
    reproduce  round trips at the reference parameter sets; exit 1 on any failure

Every subcommand accepts ``--seed``, ``--tolerance``, ``--grid-points``,
``--config`` and ``--out-dir``.  A config file holds ``key = value`` lines
whose keys are the long option names of the chosen subcommand; options given
on the command line win over the file.
"""

from __future__ import annotations

import argparse
import configparser
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import energetics as en
from . import pipelines as pl
from . import synthlab as sl
from . import tables
from .errors import CsvFormatError, EnergeticsError, InvalidArgumentError
from .timegrid import DEFAULT_POINTS

EXIT_OK = 0
EXIT_ACCEPTANCE = 1
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_PARSE = 4

OUT_ENV = "EMITTER_ENERGETICS_OUT"

log = logging.getLogger("emitter_energetics")


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad usage, which matches EXIT_CONFIG;
    # raising lets main() report it the same way as other config errors
    def error(self, message):
        raise ConfigError(f"{self.prog}: {message}")


def _float_list(text):
    items = [s for s in text.replace(",", " ").split() if s]
    try:
        return [float(s) for s in items]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of numbers: {text!r}") from None


def _bool(text):
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("common options")
    g.add_argument("--seed", type=int, default=0, help="base seed for every random stream (default 0)")
    g.add_argument("--tolerance", type=float, default=None,
                   help="absolute tolerance for rows recovered from noisy data")
    g.add_argument("--grid-points", type=int, default=DEFAULT_POINTS,
                   help=f"samples per time axis in quadrature checks (default {DEFAULT_POINTS})")
    g.add_argument("--config", type=Path, default=None, help="key = value file with option defaults")
    g.add_argument("--out-dir", type=Path, default=None,
                   help=f"output directory (default ${OUT_ENV} or the current directory)")
    g.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="emitter-energetics", description="Emission energetics of a driven two-level emitter.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("theory", parents=[common], help="theory curves as CSV")
    p.add_argument("--scenario", choices=en.SCENARIOS, default=en.QUBIT_TO_FIELD)
    p.add_argument("--C", dest="C", type=float, default=1.0, help="number purity")
    p.add_argument("--C-fc", dest="C_fc", type=float, default=1.0,
                   help="number coherence shared with the classical field")
    p.add_argument("--theta-points", type=int, default=1001,
                   help="points on the uniform grid 0..pi (default 1001, spacing pi/1000)")
    p.add_argument("--theta", type=_float_list, default=None,
                   help="explicit comma-separated pulse areas in radians; overrides --theta-points")
    p.add_argument("--photon-energy", type=float, default=1.0,
                   help="scale of the printed energies, e.g. hbar*omega0 in eV; CSV stays in units of hbar*omega0")
    p.set_defaults(handler=cmd_theory)

    p = sub.add_parser("synth", parents=[common], help="synthetic datasets")
    p.add_argument("kind", choices=("trace", "hom", "sweep"))
    t = p.add_argument_group("trace")
    t.add_argument("--v", type=float, default=0.5, help="injected visibility")
    t.add_argument("--rate", type=float, default=pl.TRACE_RATE, help="mean count rate, counts/s")
    t.add_argument("--duration", type=float, default=sl.DEFAULT_DURATION, help="seconds")
    t.add_argument("--bin-width", type=float, default=sl.DEFAULT_BIN_WIDTH, help="seconds")
    t.add_argument("--drift", choices=sl.DRIFT_KINDS, default="composite")
    t.add_argument("--diffusion", type=float, default=sl.DEFAULT_DIFFUSION, help="rad^2/s")
    t.add_argument("--drift-amplitude", type=float, default=math.pi, help="rad")
    t.add_argument("--drift-period", type=float, default=600.0, help="seconds")
    t.add_argument("--no-noise", action="store_true", help="round expected counts instead of sampling")
    h = p.add_argument_group("hom")
    h.add_argument("--M", dest="M", type=float, default=0.926, help="injected overlap")
    h.add_argument("--g2", type=float, default=0.0284)
    h.add_argument("--n-pulses", type=float, default=pl.HOM_PULSES)
    h.add_argument("--rate-per-pulse", type=float, default=pl.HOM_RATE)
    h.add_argument("--side-peak-factor", type=float, default=sl.DEFAULT_SIDE_PEAK_FACTOR)
    h.add_argument("--source", choices=sl.HOM_SOURCES, default="photonic")
    w = p.add_argument_group("sweep")
    w.add_argument("--parameter", type=float, default=0.975, help="injected C (cos2) or C_fc (cos)")
    w.add_argument("--model", choices=sl.FIT_MODELS, default="cos2")
    w.add_argument("--theta-points", type=int, default=pl.SWEEP_POINTS)
    w.add_argument("--sigma", type=float, default=0.01, help="Gaussian noise on each visibility")
    w.add_argument("--from-traces", action="store_true",
                   help="derive each visibility from a simulated detector trace instead")
    p.set_defaults(handler=cmd_synth)

    p = sub.add_parser("analyze", parents=[common], help="JSON report from CSV inputs")
    p.add_argument("--trace", type=Path, help="detector trace CSV")
    p.add_argument("--n-extreme", type=int, default=sl.DEFAULT_N_EXTREME)
    p.add_argument("--at-pi", action="store_true", help="the trace was taken at theta = pi")
    p.add_argument("--hom-par", type=Path, help="co-polarised HOM histogram CSV")
    p.add_argument("--hom-perp", type=Path, help="cross-polarised HOM histogram CSV")
    p.add_argument("--hom-source", choices=sl.HOM_SOURCES, default="photonic")
    p.add_argument("--g2", type=float, default=None, help="measured g2 of the emitted field")
    p.add_argument("--sweep-cos2", type=Path, help="visibility sweep CSV for the C fit")
    p.add_argument("--sweep-cos", type=Path, help="visibility sweep CSV for the C_fc fit")
    p.add_argument("--C", dest="C", type=float, default=None,
                   help="number purity used when no cos2 sweep is given")
    p.add_argument("--report", default="analysis.json", help="report file name inside --out-dir")
    p.set_defaults(handler=cmd_analyze)

    p = sub.add_parser("reproduce", parents=[common], help="reference round trips")
    p.add_argument("--report", default="reproduce.json", help="report file name inside --out-dir")
    p.set_defaults(handler=cmd_reproduce)
    return parser


# -- configuration ----------------------------------------------------------------


def read_config_file(path: Path) -> dict:
    text = Path(path).read_text(encoding="utf-8")
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read_string("[run]\n" + text, source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return dict(cp["run"])


def _option_actions(subparser) -> dict:
    out = {}
    for a in subparser._actions:
        for opt in a.option_strings:
            if opt.startswith("--"):
                out[opt[2:]] = a
                out[opt[2:].replace("-", "_")] = a
    return out


def apply_config(parser, argv) -> argparse.Namespace:
    """Parse ``argv`` with config-file values as defaults."""
    args = parser.parse_args(argv)
    if args.config is None:
        return args
    try:
        values = read_config_file(args.config)
    except OSError as exc:
        raise ConfigError(f"cannot read config {args.config}: {exc.strerror}") from None
    sub = parser._subparsers._group_actions[0].choices[args.command]
    actions = _option_actions(sub)
    defaults = {}
    for key, raw in values.items():
        action = actions.get(key)
        if key == "config" or action is None or not action.option_strings:
            raise ConfigError(f"{args.config}: unknown key {key!r} for '{args.command}'")
        if isinstance(action, argparse._StoreTrueAction):
            defaults[action.dest] = _bool(raw)
        else:
            defaults[action.dest] = _convert(action, raw, key, args.config)
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def _convert(action, raw, key, path):
    conv = action.type or str
    try:
        val = conv(raw)
    except (ValueError, TypeError, argparse.ArgumentTypeError) as exc:
        raise ConfigError(f"{path}: bad value for {key!r}: {exc}") from None
    if action.choices is not None and val not in action.choices:
        raise ConfigError(f"{path}: {key!r} must be one of {sorted(action.choices)}")
    return val


def resolved_config(args) -> dict:
    skip = {"handler", "verbose"}
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in skip:
            continue
        out[k] = str(v) if isinstance(v, Path) else v
    return out


def out_dir(args) -> Path:
    if args.out_dir is not None:
        return Path(args.out_dir)
    env = os.environ.get(OUT_ENV)
    return Path(env) if env else Path(".")


def _check_grid_points(args):
    if args.grid_points < 3:
        raise InvalidArgumentError("--grid-points must be at least 3")
    if args.tolerance is not None and not args.tolerance >= 0:
        raise InvalidArgumentError("--tolerance must be >= 0")


# -- commands -------------------------------------------------------------------------


def cmd_theory(args) -> int:
    if args.theta is not None:
        thetas = np.array(args.theta, dtype=float)
    else:
        if args.theta_points < 0:
            raise InvalidArgumentError("--theta-points must be >= 0")
        thetas = np.linspace(0.0, math.pi, args.theta_points)
    if thetas.size == 0:
        raise InvalidArgumentError("the pulse-area grid is empty")
    if not args.photon_energy > 0:
        raise InvalidArgumentError("--photon-energy must be positive")
    curve = en.theory_curves(thetas, args.C, args.C_fc, args.scenario)
    d = out_dir(args)
    csv_path = tables.write_theory(d / f"theory_{args.scenario}.csv", curve)
    tables.write_json(d / f"theory_{args.scenario}.json",
                      {"command": "theory", "config": resolved_config(args), "files": [csv_path.name]})
    scale = args.photon_energy
    unit = curve.column("unitary")
    total = curve.column("total")
    i_u, i_t = int(np.argmax(unit)), int(np.argmax(total))
    print(f"{args.scenario}: {thetas.size} pulse areas -> {csv_path}")
    print(f"  max unitary     {unit[i_u] * scale:.6g} at theta = {thetas[i_u]:.6g} rad")
    print(f"  max total       {total[i_t] * scale:.6g} at theta = {thetas[i_t]:.6g} rad")
    print(f"  min unitary     {unit.min() * scale:.6g}")
    return EXIT_OK


def cmd_synth(args) -> int:
    d = out_dir(args)
    config = resolved_config(args)
    if args.kind == "trace":
        drift = sl.DriftModel(args.drift, args.diffusion, args.drift_amplitude, args.drift_period, args.seed)
        trace = sl.simulate_trace(args.v, args.rate, drift, args.duration, args.bin_width,
                                  noise=not args.no_noise)
        f1 = tables.write_trace(d / "trace.csv", trace)
        f2 = tables.write_phases(d / "trace_phase.csv", trace.times,
                                 drift.phases(trace.n_bins, trace.bin_width))
        files = [f1.name, f2.name]
        truth = {"v": args.v}
    elif args.kind == "hom":
        s_par, s_perp = pl.trace_seeds(args.seed, 2)
        kw = dict(side_peak_factor=args.side_peak_factor, source=args.source)
        par = sl.simulate_hom_histogram(args.M, args.g2, args.n_pulses, args.rate_per_pulse, True,
                                        seed=s_par, **kw)
        perp = sl.simulate_hom_histogram(args.M, args.g2, args.n_pulses, args.rate_per_pulse, False,
                                         seed=s_perp, **kw)
        files = [tables.write_histogram(d / "hom_par.csv", par).name,
                 tables.write_histogram(d / "hom_perp.csv", perp).name]
        truth = {"M": args.M, "g2": args.g2, "source": args.source}
    else:
        if args.theta_points < 2:
            raise InvalidArgumentError("--theta-points must be >= 2")
        thetas = np.linspace(0.0, math.pi, args.theta_points)
        if args.from_traces:
            _, v, err = pl.sweep_from_traces(args.parameter, args.model, thetas, args.seed,
                                             args.rate, args.duration)
        else:
            if not args.sigma > 0:
                raise InvalidArgumentError("--sigma must be positive")
            v = sl.simulate_sweep(args.parameter, args.model, thetas, args.sigma, args.seed)
            err = np.full(thetas.size, args.sigma)
        files = [tables.write_sweep(d / f"sweep_{args.model}.csv", thetas, v, err).name]
        truth = {"parameter": args.parameter, "model": args.model}
    manifest = d / f"synth_{args.kind}.json"
    tables.write_json(manifest, {"command": "synth", "kind": args.kind, "seed": args.seed,
                                 "truth": truth, "config": config, "files": files})
    print(f"wrote {', '.join(files)} and {manifest.name} to {d}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    if not any((args.trace, args.hom_par, args.hom_perp, args.sweep_cos2, args.sweep_cos)):
        raise InvalidArgumentError("nothing to analyze: give --trace, --hom-par/--hom-perp or a sweep")
    report = {}
    C = args.C
    C_fc = None
    if args.sweep_cos2:
        fit = pl.analyze_sweep(*tables.read_sweep(args.sweep_cos2), "cos2")
        report["fit_C"] = fit.as_dict()
        C = fit.parameter
    if args.sweep_cos:
        fit = pl.analyze_sweep(*tables.read_sweep(args.sweep_cos), "cos")
        report["fit_C_fc"] = fit.as_dict()
        C_fc = fit.parameter
    if args.trace:
        trace = tables.read_trace(args.trace)
        report["trace"] = pl.analyze_trace(trace, args.n_extreme, g2=args.g2, C=C, at_pi=args.at_pi)
    if args.hom_par or args.hom_perp:
        if not (args.hom_par and args.hom_perp):
            raise InvalidArgumentError("HOM analysis needs both --hom-par and --hom-perp")
        if args.g2 is None:
            raise InvalidArgumentError("HOM analysis needs --g2")
        report["hom"] = pl.analyze_hom(tables.read_histogram(args.hom_par),
                                       tables.read_histogram(args.hom_perp), args.g2, args.hom_source)
    if C is not None:
        report["energy"] = pl.energy_report(C, C_fc)
        print(f"energy: qubit->field unitary maximum {0.25 * min(max(C, 0.0), 1.0):.6g} at theta = pi/2")
    path = tables.write_json(out_dir(args) / args.report,
                             {"command": "analyze", "config": resolved_config(args), "report": report})
    for section, body in report.items():
        if isinstance(body, dict):
            shown = {k: v for k, v in body.items() if isinstance(v, float)}
            if shown:
                print(section + ": " + ", ".join(f"{k}={v:.6g}" for k, v in shown.items()))
    print(f"report -> {path}")
    return EXIT_OK


def cmd_reproduce(args) -> int:
    table = pl.reproduce(seed=args.seed, tolerance=args.tolerance, grid_points=args.grid_points)
    print(table.format())
    path = tables.write_json(out_dir(args) / args.report,
                             {"command": "reproduce", "config": resolved_config(args),
                              "rows": table.as_dicts(), "all_pass": table.passed})
    n_fail = sum(not r.passed for r in table.rows)
    print(f"{len(table.rows) - n_fail}/{len(table.rows)} rows pass; report -> {path}")
    return EXIT_OK if table.passed else EXIT_ACCEPTANCE


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = apply_config(parser, argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        _check_grid_points(args)
        return args.handler(args)
    except CsvFormatError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (InvalidArgumentError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except EnergeticsError as exc:
        # degenerate or insufficient input data
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        name = exc.filename or ""
        print(f"I/O error: {name}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    raise SystemExit(main())
