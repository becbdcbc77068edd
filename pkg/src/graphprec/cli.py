"""Command-line front end.

Subcommands::

    graphprec estimate  --data X.csv --structure A.csv --out omega.csv
    graphprec simulate  --n-list 100,300,500 --ratio-list 0.1,0.5,1,5,10 --out table1.csv
    graphprec compare   --n-list 100 --ratio-list 0.1 --reps 100 --out table3.csv
    graphprec normality --n 500 --p 50 --reps 2000 --out z.csv

Exit codes: 0 success, 2 usage/configuration/I-O error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .errors import GraphPrecError, InvalidConfig, SubmatrixNotPD
from .estimator import estimate_precision, sample_covariance
from .io import ParseError, atomic_write_text, format_float, matrix_to_csv, read_matrix_csv, read_structure
from .simulation import StudyConfig, make_ground_truth, normality_study, run_study
from .tiger import TigerConfig, cross_validate

EXIT_USAGE = 2
EXIT_NUMERIC = 3


class UsageError(Exception):
    pass


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _method_list(text: str) -> tuple[str, ...]:
    return tuple(v.strip() for v in text.split(",") if v.strip())


def _sidecar(out: Path, suffix: str) -> Path:
    return out.with_suffix(suffix) if out.suffix != suffix else out.with_name(out.name + suffix)


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--seed", type=int, default=42, help="master random seed (default 42)")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                   help="worker threads for replications")


def _add_study(p: argparse.ArgumentParser, n_default: str, methods_default: str):
    p.add_argument("--n-list", type=_int_list, default=_int_list(n_default))
    p.add_argument("--ratio-list", type=_float_list, default=(0.1, 0.5, 1.0, 5.0, 10.0))
    p.add_argument("--s0", type=int, default=4)
    p.add_argument("--rho", type=float, default=0.6)
    p.add_argument("--reps", type=int, default=300)
    p.add_argument("--methods", type=_method_list, default=_method_list(methods_default))
    p.add_argument("--k-folds", type=int, default=5)
    p.add_argument("--n-lambda", type=int, default=5)
    p.add_argument("--out", type=Path, required=True, help="CSV output; a .txt table is written alongside")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="graphprec", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="estimate a precision matrix from a data CSV")
    est.add_argument("--data", type=Path, required=True, help="n x p CSV, no header")
    est.add_argument("--structure", type=Path, help="adjacency CSV or edge list (method=proposed)")
    est.add_argument("--structure-format", choices=("auto", "dense", "edges"), default="auto")
    est.add_argument("--method", choices=("proposed", "tiger"), default="proposed")
    est.add_argument("--symmetrize", action="store_true")
    est.add_argument("--k-folds", type=int, default=5)
    est.add_argument("--n-lambda", type=int, default=5)
    est.add_argument("--out", type=Path, required=True)
    _add_common(est)

    sim = sub.add_parser("simulate", help="bias study of the proposed estimator")
    _add_study(sim, "100,300,500", "proposed")
    _add_common(sim)

    cmp_ = sub.add_parser("compare", help="paired comparison of proposed and TIGER")
    _add_study(cmp_, "100,200", "proposed,tiger")
    _add_common(cmp_)

    nor = sub.add_parser("normality", help="sampling distribution of the studentized estimate")
    nor.add_argument("--n", type=int, default=500)
    nor.add_argument("--p", type=int, default=50)
    nor.add_argument("--s0", type=int, default=4)
    nor.add_argument("--rho", type=float, default=0.6)
    nor.add_argument("--column", type=int, default=0, help="0-based column index")
    nor.add_argument("--m", type=_float_list, default=None,
                     help="comma-separated weights over the column support (default: diagonal entry)")
    nor.add_argument("--reps", type=int, default=2000)
    nor.add_argument("--level", type=float, default=0.95)
    nor.add_argument("--out", type=Path, required=True, help="z-sample CSV; summary JSON alongside")
    _add_common(nor)
    return parser


def cmd_estimate(args) -> int:
    if args.method == "proposed" and args.structure is None:
        raise UsageError("--structure is required with --method proposed")
    x = read_matrix_csv(args.data)
    n, p = x.shape
    meta: dict = {"method": args.method, "symmetrize": bool(args.symmetrize), "n": n, "p": p}
    if args.method == "proposed":
        g = read_structure(args.structure, p, args.structure_format)
        try:
            est = estimate_precision(sample_covariance(x), g, symmetrize=args.symmetrize)
        except SubmatrixNotPD as exc:
            print(f"error: numerical failure in column {exc.column}: support size "
                  f"{len(g.supports[exc.column])} with n={n} gives a singular submatrix",
                  file=sys.stderr)
            return EXIT_NUMERIC
        omega = est.omega_hat
        meta["per_column_condition"] = list(est.per_column_condition)
        meta["support_sizes"] = [int(len(s)) for s in g.supports]
    else:
        cfg = TigerConfig(n_lambda=args.n_lambda, k_folds=args.k_folds, seed=args.seed)
        fit = cross_validate(x, cfg)
        omega = fit.omega_hat
        if args.symmetrize:
            omega = 0.5 * (omega + omega.T)
        meta["chosen_lambda"] = fit.chosen_lambda
        meta["cv_losses"] = [{"lambda": lam, "loss": loss if np.isfinite(loss) else None}
                             for lam, loss in fit.cv_losses]
        meta["per_column_tau"] = fit.per_column_tau.tolist()
    atomic_write_text(args.out, matrix_to_csv(omega))
    atomic_write_text(_sidecar(args.out, ".json"), json.dumps(meta, indent=2) + "\n")
    return 0


def _study_config(args) -> StudyConfig:
    return StudyConfig(
        n_list=args.n_list, ratio_list=args.ratio_list, s0=args.s0, rho=args.rho,
        replications=args.reps, seed=args.seed, methods=args.methods,
        k_folds=args.k_folds, n_lambda=args.n_lambda, threads=max(1, args.threads),
    )


def _write_study(args, cfg: StudyConfig) -> int:
    result = run_study(cfg)
    table = result.to_table()
    atomic_write_text(args.out, result.to_csv())
    atomic_write_text(_sidecar(args.out, ".txt"), table)
    sys.stdout.write(table)
    return 0


def cmd_simulate(args) -> int:
    return _write_study(args, _study_config(args))


def cmd_compare(args) -> int:
    if set(args.methods) != {"proposed", "tiger"}:
        raise UsageError("compare needs --methods proposed,tiger")
    return _write_study(args, _study_config(args))


def cmd_normality(args) -> int:
    if not 0 < args.level < 1:
        raise UsageError(f"--level must lie in (0, 1), got {args.level}")
    if args.reps < 0:
        raise UsageError("--reps must be >= 0")
    gt = make_ground_truth(args.p, args.s0, args.rho)
    if not 0 <= args.column < args.p:
        raise UsageError(f"--column must lie in [0, {args.p})")
    size = len(gt.structure.supports[args.column])
    if args.m is not None and len(args.m) != size:
        raise UsageError(f"--m must have {size} entries for column {args.column}, got {len(args.m)}")
    res = normality_study(gt, args.n, args.m, args.column, args.reps, args.seed, args.level)
    atomic_write_text(args.out, "".join(format_float(z) + "\n" for z in res.z_samples))
    if args.reps == 0:
        summary = {"replications": 0, "mean": "n/a", "variance": "n/a", "coverage95": "n/a"}
        print("mean=n/a variance=n/a coverage95=n/a")
    else:
        summary = {"replications": args.reps, "mean": res.mean, "variance": res.variance,
                   "coverage95": res.coverage95}
        print(f"mean={res.mean:.3f} variance={res.variance:.3f} coverage95={res.coverage95:.3f}")
    summary["level"] = args.level
    atomic_write_text(_sidecar(args.out, ".json"), json.dumps(summary, indent=2) + "\n")
    return 0


COMMANDS = {
    "estimate": cmd_estimate,
    "simulate": cmd_simulate,
    "compare": cmd_compare,
    "normality": cmd_normality,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, InvalidConfig, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GraphPrecError as exc:
        if isinstance(exc, (ValueError, IndexError)) and not isinstance(exc, SubmatrixNotPD):
            # shape/index problems in user input
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
