"""Command-line entry point.

Exit codes: 0 success, 2 bad configuration, 3 a checked bound failed,
4 too many numerical failures.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import harness as hx
from .errors import ConfigError, NumericalError
from .newton import polygon
from .poly import DomainError, load
from .roots import ConvergenceError, all_roots, count_real
from .rng import derive_seed, trial_generator

EXIT_OK, EXIT_CONFIG, EXIT_CHECK, EXIT_NUMERIC = 0, 2, 3, 4


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON experiment config")
    common.add_argument("--seed", type=int, help="master seed (u64)")
    common.add_argument("--trials", type=int)
    common.add_argument("--n", type=int, help="polynomial degree")
    common.add_argument("--out", help="directory for output files")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--workers", type=int, default=1)

    p = argparse.ArgumentParser(prog="flipzeros", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("sample", parents=[common], help="draw polynomials from the model")
    for name, text in (("vcount", "Newton-Hadamard polygon"), ("zeros", "all roots and the real count")):
        sp = sub.add_parser(name, parents=[common], help=text)
        sp.add_argument("--poly", help="polynomial file (JSON pairs or 're im' lines)")
    sub.add_parser("theorem1", parents=[common], help="zero counts against V log^3 n")
    sub.add_parser("corollary-v", parents=[common], help="mean vertex count against 2 H_n")
    sub.add_parser("theorem2", parents=[common], help="small arc maxima over all sign flips")
    sub.add_parser("turan-b", parents=[common], help="empirical Turan constant")
    sub.add_parser("certify", parents=[common], help="sweep the analytic certificates")
    vp = sub.add_parser("verify-csv", parents=[common], help="recompute a summary from its CSV")
    vp.add_argument("csv", help="per-trial CSV")
    vp.add_argument("--summary", help="summary JSON (default: <stem>_summary.json)")
    return p


def _config(args) -> hx.ExperimentConfig:
    overrides = {"seed": args.seed, "trials": args.trials, "n": args.n}
    if args.config:
        return hx.ExperimentConfig.load(args.config, **overrides)
    if args.n is None:
        raise ConfigError("give --n or --config")
    return hx.ExperimentConfig.from_mapping({}, **overrides)


def _emit(args, name: str, payload: str) -> None:
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / name).write_text(payload)
    else:
        sys.stdout.write(payload)


def _emit_trials(args, stem: str, reports, summary) -> None:
    if args.format == "csv":
        trials, ext = hx.reports_to_csv(reports), "csv"
    else:
        trials, ext = hx.reports_to_json(reports), "json"
    if args.out:
        _emit(args, f"{stem}.{ext}", trials)
    _emit(args, f"{stem}_summary.json", hx.dumps(summary))


def _polys(args):
    if getattr(args, "poly", None):
        return [(None, None, load(args.poly))]
    cfg = _config(args)
    sampler = cfg.sampler()
    count = args.trials or 1
    return [
        (t, derive_seed(cfg.seed, t), sampler.sample(trial_generator(cfg.seed, t)))
        for t in range(count)
    ]


def cmd_sample(args) -> int:
    rows = [
        {"trial": t, "seed": s, "coeffs": [[c.real, c.imag] for c in P.coeffs.tolist()]}
        for t, s, P in _polys(args)
    ]
    _emit(args, "sample.json", hx.dumps(rows))
    return EXIT_OK


def cmd_vcount(args) -> int:
    rows = []
    for t, s, P in _polys(args):
        poly = polygon(P)
        rows.append({"trial": t, "seed": s, **json.loads(poly.to_json())})
    _emit(args, "vcount.json", hx.dumps(rows))
    return EXIT_OK


def cmd_zeros(args) -> int:
    rows = []
    for t, s, P in _polys(args):
        rs = all_roots(P)
        row = {"trial": t, "seed": s, "roots": json.loads(rs.to_json())}
        if P.is_real:
            row["N_real"] = count_real(P)
        rows.append(row)
    _emit(args, "zeros.json", hx.dumps(rows))
    return EXIT_OK


def cmd_theorem1(args) -> int:
    try:
        reports, summary = hx.run_theorem1(_config(args), workers=args.workers)
    except hx.FailureBudgetExceeded as exc:
        _emit_trials(args, "theorem1", exc.reports, exc.summary)
        raise
    _emit_trials(args, "theorem1", reports, summary)
    return EXIT_OK


def cmd_corollary_v(args) -> int:
    reports, summary = hx.run_corollary_v(_config(args), workers=args.workers)
    _emit_trials(args, "corollary_v", reports, summary)
    if not summary["ok"]:
        print("mean vertex count exceeds the harmonic bound", file=sys.stderr)
        return EXIT_CHECK
    return EXIT_OK


def cmd_theorem2(args) -> int:
    report = hx.run_theorem2(_config(args), workers=args.workers)
    _emit(args, "theorem2.json", hx.dumps(report))
    return EXIT_OK


def cmd_turan_b(args) -> int:
    report = hx.run_turan_b(_config(args))
    _emit(args, "turan_b.json", hx.dumps(report))
    if not all(row["self_check_ok"] for row in report["b_emp_table"]):
        print("a fresh sample beat the reported Turan constant", file=sys.stderr)
        return EXIT_CHECK
    return EXIT_OK


def cmd_certify(args) -> int:
    report = hx.run_certify(_config(args))
    _emit(args, "certify.json", hx.dumps(report))
    if not report["ok"]:
        bad = {
            "sbar": report["sbar"]["failures"],
            "jensen": report["jensen"]["failures"],
            "zero_free": report["zero_free"]["violations"],
        }
        print(json.dumps(bad), file=sys.stderr)
        return EXIT_CHECK
    return EXIT_OK


def cmd_verify_csv(args) -> int:
    path = Path(args.csv)
    summary_path = Path(args.summary) if args.summary else path.with_name(f"{path.stem}_summary.json")
    try:
        text = path.read_text()
        summary = json.loads(summary_path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(str(exc)) from exc
    ok, problems = hx.verify_csv(text, summary)
    for line in problems:
        print(line, file=sys.stderr)
    print("ok" if ok else "mismatch")
    return EXIT_OK if ok else EXIT_CHECK


COMMANDS = {
    "sample": cmd_sample,
    "vcount": cmd_vcount,
    "zeros": cmd_zeros,
    "theorem1": cmd_theorem1,
    "corollary-v": cmd_corollary_v,
    "theorem2": cmd_theorem2,
    "turan-b": cmd_turan_b,
    "certify": cmd_certify,
    "verify-csv": cmd_verify_csv,
}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, DomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AssertionError as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK
    except (NumericalError, ConvergenceError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
