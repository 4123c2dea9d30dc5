"""
Command line entry point.

    taskquant design --strategy di --rate 4 --ptilde 20
    taskquant sweep-ratio --trials 200 --out ratio.csv
    taskquant sweep-rate --trials 50 --seed 7
    taskquant validate
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import design, harness, validate
from .channel import ScenarioConfig, draw_frame, rng_stream
from .errors import ConfigError, Infeasible, ResolutionTooLow, TaskQuantError
from .quantizer import CONVENTIONS, PER_REAL_DIM, resolution_from_budget

EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_NUMERIC = 0, 1, 2, 3


def _load_config(path):
    """Scenario plus optional ``"sweep"`` overrides from a JSON file."""
    if path is None:
        return ScenarioConfig.reference(), {}
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    sweep = raw.pop("sweep", {}) or {}
    scenario = raw.pop("scenario", raw)
    return ScenarioConfig.from_dict(scenario), sweep


def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="scenario/sweep JSON (default: reference-scale scenario)")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--seed", type=int, help="override the scenario master seed")
    common.add_argument("--trials", type=int, help="Monte Carlo trials per point")
    common.add_argument("--saa-samples", type=int, help="signal draws for the DI design")
    common.add_argument("--convention", choices=CONVENTIONS, help="bit-budget convention")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--eta", type=float, help="support multiple (default 2)")

    parser = argparse.ArgumentParser(prog="taskquant", description=__doc__.splitlines()[1])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design", parents=[common], help="emit a combiner design as JSON")
    p.add_argument("--strategy", choices=["dd", "di"], default="di")
    p.add_argument("--rate", type=float, required=True)
    p.add_argument("--ptilde", type=int, required=True)
    p.add_argument("--kd", type=int, default=0, help="number of dither signals")
    p.add_argument("--trial", type=int, default=0, help="signal realization used by --strategy dd")

    for name in ("sweep-ratio", "sweep-rate"):
        p = sub.add_parser(name, parents=[common], help=f"run the {name[6:]} sweep, write CSV")
        p.add_argument("--rates", type=float, nargs="+")
        p.add_argument("--kd", type=int, nargs="+", dest="k_dithers")
        p.add_argument("--strategies", nargs="+")
        p.add_argument("--summary", action="store_true", help="print a dB summary to stderr")
        if name == "sweep-rate":
            p.add_argument("--ratio", type=float, default=1.0)

    sub.add_parser("validate", parents=[common], help="run the built-in oracle checks")
    return parser


def _write(text, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _sweep_spec(args, cfg, sweep, kind):
    base = harness.reference_rate_spec(cfg) if kind == "rate" else harness.reference_ratio_spec(cfg)
    fields = dict(
        strategies=args.strategies or sweep.get("strategies") or base.strategies,
        rates=args.rates or sweep.get("rates") or base.rates,
        k_dithers=args.k_dithers or sweep.get("k_dithers") or base.k_dithers,
        p_tildes=sweep.get("p_tildes"),
        eta=args.eta or sweep.get("eta", 2.0),
        n_trials=args.trials or sweep.get("n_trials", 1000),
        n_saa=args.saa_samples or sweep.get("n_saa", 10_000),
        convention=args.convention or sweep.get("convention", PER_REAL_DIM),
        threads=args.threads,
    )
    try:
        return harness.SweepSpec(cfg, **fields)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _summary(result, stream):
    for row in result.sorted_rows():
        if row.skipped:
            print(f"{row.strategy:>13} R={row.rate} Kd={row.k_dither} P={row.p_tilde}: skipped ({row.skipped_reason})",
                  file=stream)
            continue
        print(f"{row.strategy:>13} R={row.rate} Kd={row.k_dither} P={row.p_tilde}: "
              f"mse={row.mse_empirical:.4e} +- {row.mse_empirical_stderr:.1e} "
              f"({10 * np.log10(row.mse_empirical):.2f} dB)", file=stream)


def _cmd_design(args, cfg, sweep):
    eta = args.eta or sweep.get("eta", 2.0)
    convention = args.convention or sweep.get("convention", PER_REAL_DIM)
    try:
        m_levels = resolution_from_budget(args.rate, cfg.n_rx, cfg.n_snapshots, args.ptilde, convention)
        quant = design.make_quantizer(cfg, m_levels, args.kd, eta, args.ptilde)
    except (Infeasible, ResolutionTooLow) as exc:
        print(f"taskquant: infeasible design point: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    if args.ptilde > cfg.n_rx or args.ptilde < 1:
        print(f"taskquant: --ptilde must be in 1..{cfg.n_rx}", file=sys.stderr)
        return EXIT_INFEASIBLE
    if args.strategy == "dd":
        result = design.design_dd(cfg, draw_frame(cfg, args.trial).theta, quant)
    else:
        n_saa = args.saa_samples or sweep.get("n_saa", 10_000)
        result = design.design_di(cfg, quant, n_saa, rng_stream(cfg.master_seed, "saa"))
    _write(json.dumps(result.to_dict(), indent=2) + "\n", args.out)
    return EXIT_OK


def _cmd_sweep(args, cfg, sweep, kind):
    spec = _sweep_spec(args, cfg, sweep, kind)
    if kind == "rate":
        result = harness.sweep_rate(spec, ratio=args.ratio)
    else:
        result = harness.sweep_ratio(spec)
    _write(result.to_csv(), args.out)
    if args.summary:
        _summary(result, sys.stderr)
    return EXIT_OK


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        cfg, sweep = _load_config(args.config)
        if args.seed is not None:
            cfg = cfg.replace(master_seed=args.seed)
        if args.command == "validate":
            return EXIT_OK if validate.run_all(seed=cfg.master_seed) else EXIT_NUMERIC
        if args.command == "design":
            return _cmd_design(args, cfg, sweep)
        return _cmd_sweep(args, cfg, sweep, "rate" if args.command == "sweep-rate" else "ratio")
    except ConfigError as exc:
        print(f"taskquant: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TaskQuantError as exc:
        print(f"taskquant: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
