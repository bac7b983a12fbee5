"""Command-line entry point: ``robust-ircw <subcommand> [options]``.

Exit codes: 0 success, 1 solver or domain error, 2 configuration error,
3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .exceptions import ConfigError, IrcwError
from .experiments import (
    Scenario,
    format_csv,
    load_scenario,
    plan,
    run_snr_sweep,
    run_tradeoff,
    run_verifications,
    run_width_sweep,
    rows_as_records,
    spectrum_check,
    write_rows,
)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_VERIFY = 3

log = logging.getLogger("robust_ircw")


def _scenario(args) -> Scenario:
    scenario = load_scenario(args.scenario) if args.scenario else Scenario()
    overrides = {}
    if args.wc is not None:
        overrides["w_c"] = args.wc
    if args.budget is not None:
        overrides["budget"] = args.budget
    if overrides:
        try:
            scenario = replace(scenario, **overrides)
        except IrcwError as exc:
            raise ConfigError(str(exc)) from exc
    return scenario


def _write_text(path, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8", newline="\n")


def _write_meta(path, meta: dict) -> None:
    if path is None:
        return
    out = Path(path)
    meta_path = out.with_name(out.name + ".meta.json")
    meta_path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8", newline="\n")


def _base_meta(scenario: Scenario, command: str) -> dict:
    family = None if scenario.uclass is not None else scenario.family.name
    return {
        "command": command,
        "w_c": scenario.w_c,
        "budget": scenario.budget,
        "snr_db": scenario.snr_db,
        "bound_family": family or "explicit",
        "specific_response": "scenario" if scenario.specific_response is not None else "class midpoint",
    }


def cmd_plan(args) -> int:
    scenario = _scenario(args)
    result = plan(scenario)
    records = [
        {
            "subcarrier": m,
            "power": float(p),
            "mu_prime": result.multiplier,
            "mi_lower": result.mi_lower,
            "mi_upper": result.mi_upper,
            "dir_lower": result.dir_lower,
            "dir_upper": result.dir_upper,
        }
        for m, p in enumerate(result.powers)
    ]
    _write_text(args.out, format_csv(records))
    meta = _base_meta(scenario, "plan")
    meta.update(F_r=result.normalizers[0], F_c=result.normalizers[1], kkt_residual=result.kkt_residual)
    _write_meta(args.out, meta)
    return EXIT_OK


def _sweep(args, runner, name: str) -> int:
    scenario = _scenario(args)
    rows = runner(scenario)
    if args.out is None:
        sys.stdout.write(format_csv(rows_as_records(rows)))
    else:
        write_rows(rows, args.out)
    meta = _base_meta(scenario, name)
    if name == "sweep-width":
        meta["specific_response"] = (
            "scenario" if scenario.specific_response is not None else "midpoint of narrowest class"
        )
        meta["normalizers"] = "widest class"
    _write_meta(args.out, meta)
    return EXIT_OK


def cmd_sweep_snr(args) -> int:
    return _sweep(args, run_snr_sweep, "sweep-snr")


def cmd_sweep_width(args) -> int:
    return _sweep(args, run_width_sweep, "sweep-width")


def cmd_tradeoff(args) -> int:
    return _sweep(args, run_tradeoff, "tradeoff")


def cmd_verify_spectrum(args) -> int:
    scenario = _scenario(args)
    records = spectrum_check(scenario, args.trials, args.seed, args.allocation)
    _write_text(args.out, format_csv(records))
    worst_z = max(abs(r["z_score"]) for r in records)
    meta = _base_meta(scenario, "verify-spectrum")
    meta.update(trials=args.trials, seed=args.seed, allocation=args.allocation, max_abs_z=worst_z)
    _write_meta(args.out, meta)
    return EXIT_OK if worst_z <= 4.0 else EXIT_VERIFY


def cmd_verify(args) -> int:
    scenario = _scenario(args)
    report = run_verifications(scenario, seed=args.seed)
    _write_text(args.out, json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
    for name in report.failures:
        log.error("verification failed: %s", name)
    return EXIT_OK if report.passed else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="robust-ircw", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--scenario", type=Path, help="scenario JSON file (default: baseline at 5 dB)")
        p.add_argument("--out", type=Path, help="output file (default: stdout)")
        p.add_argument("--seed", type=int, default=7)
        p.add_argument("--wc", type=float, help="communications weight override")
        p.add_argument("--budget", type=float, help="total power override")
        return p

    common(sub.add_parser("plan", help="robust allocation for one scenario")).set_defaults(func=cmd_plan)
    common(sub.add_parser("sweep-snr", help="DIR/MI versus SNR")).set_defaults(func=cmd_sweep_snr)
    common(sub.add_parser("sweep-width", help="DIR/MI versus uncertainty width")).set_defaults(
        func=cmd_sweep_width
    )
    common(sub.add_parser("tradeoff", help="MI/DIR trade-off over w_c")).set_defaults(func=cmd_tradeoff)
    vs = common(sub.add_parser("verify-spectrum", help="spectral approximation and Monte Carlo check"))
    vs.add_argument("--trials", type=int, default=2000)
    vs.add_argument("--allocation", choices=("uniform", "robust"), default="uniform")
    vs.set_defaults(func=cmd_verify_spectrum)
    common(sub.add_parser("verify", help="run the verification suite")).set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except IrcwError as exc:
        log.error("%s", exc)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
