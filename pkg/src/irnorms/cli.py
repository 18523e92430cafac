"""Command-line interface.

Subcommands::

    norms --data d.csv --m 100 --estimator tc [--seed 0] --out out.csv
    table --config cfg --out out.csv
    sweep --config cfg --out out.csv [--summary mpe.csv]
    mc    --config cfg --out out.csv

Exit code is 0 on success; any failure prints a one-line diagnostic on stderr
and returns 1.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import ESTIMATOR_LS, ESTIMATOR_TC, canonical_estimator, load_config
from .experiments import (
    NORM_NAMES,
    RunResult,
    estimate_from_csv,
    run_monte_carlo,
    run_snr_sweep,
    run_table,
    summary_csv_text,
    write_results_csv,
    write_summary_csv,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="irnorms",
        description="Estimate H1/H2/Hinf system norms from impulse-response coefficients.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_norms = sub.add_parser("norms", help="estimate norms from a logged k,r,v dataset CSV")
    p_norms.add_argument("--data", required=True, help="dataset CSV with header k,r,v")
    p_norms.add_argument("--m", required=True, type=int, help="impulse-response length M")
    p_norms.add_argument("--estimator", required=True, choices=["tc", "ls"])
    p_norms.add_argument("--seed", type=int, default=0, help="recorded in the output rows")
    p_norms.add_argument("--out", required=True, help="result CSV path")

    for name, help_text in [
        ("table", "estimate norms of every configured loop at one SNR"),
        ("sweep", "estimate norms across an SNR grid"),
        ("mc", "paired Monte Carlo comparison of the two estimators"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="flat key = value experiment config")
        p.add_argument("--out", required=True, help="output CSV path")
        if name == "sweep":
            p.add_argument("--summary", help="optional per-norm MPE summary CSV path")
    return parser


def _cmd_norms(args) -> None:
    triple = estimate_from_csv(args.data, args.m, args.estimator)
    label = Path(args.data).stem
    rows = [
        RunResult(
            system=label,
            norm=name,
            snr_db=None,
            run=0,
            real=None,
            estimate=value,
            percent_error=None,
            seed=args.seed,
        )
        for name, value in zip(NORM_NAMES, triple)
    ]
    write_results_csv(rows, args.out)
    for name, value in zip(NORM_NAMES, triple):
        print(f"{name} = {value:.6g}")


def _cmd_table(args) -> None:
    results = run_table(load_config(args.config))
    write_results_csv(results, args.out)
    for x in results:
        print(
            f"system {x.system} {x.norm}: real {x.real:.6g}, "
            f"estimate {x.estimate:.6g}, error {x.percent_error:.4g}%"
        )


def _cmd_sweep(args) -> None:
    config = load_config(args.config)
    outcome = run_snr_sweep(config)
    write_results_csv(outcome.results, args.out)
    rows = [(name, config.estimator, outcome.mpe[name]) for name in NORM_NAMES]
    if args.summary:
        write_summary_csv(rows, args.summary)
    for name, estimator, value in rows:
        print(f"{name} MPE ({estimator}): {value:.4g}%")


def _cmd_mc(args) -> None:
    outcome = run_monte_carlo(load_config(args.config))
    rows = []
    for name in NORM_NAMES:
        for est in (ESTIMATOR_TC, ESTIMATOR_LS):
            rows.append((name, est, outcome.mpe[(name, est)]))
        rows.append((name, "reduction", outcome.reduction_pct[name]))
    write_summary_csv(rows, args.out)
    for name, label, value in rows:
        suffix = "% reduction" if label == "reduction" else "% MPE"
        print(f"{name} {label}: {value:.4g}{suffix}")


_COMMANDS = {
    "norms": _cmd_norms,
    "table": _cmd_table,
    "sweep": _cmd_sweep,
    "mc": _cmd_mc,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        _COMMANDS[args.command](args)
    except Exception as exc:  # one-line diagnostic, nonzero exit
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
