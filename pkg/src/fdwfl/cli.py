"""Command line interface: ``python -m fdwfl <command> ...``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import bench
from .frfeval import estimate_noisy, evaluate_joint
from .io import (
    load_io_data,
    read_spectrum_csv,
    read_trajectory_csv,
    save_io_data,
    to_jsonable,
)
from .spectra import DEFAULT_TOL_REL, check_pe, phasor_spectrum, stack_spectra
from .wfl import membership_steady, membership_transient


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from exc


def _dump(obj) -> None:
    json.dump(to_jsonable(obj), sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


def _config(args, **defaults) -> bench.ExperimentConfig:
    cfg = bench.ExperimentConfig.from_json(args.config) if args.config else bench.ExperimentConfig(**defaults)
    overrides = {name: getattr(args, name) for name in ("M", "periods", "snr", "n_sweep", "L0")
                 if getattr(args, name, None) is not None}
    if getattr(args, "model", None):
        overrides["model_path"] = args.model
    return replace(cfg, seed=args.seed, **overrides)


def cmd_simulate(args) -> int:
    cfg = _config(args)
    record = bench.run_experiment(cfg)
    out = Path(args.out)
    save_io_data(out, record.data)
    with open(out / "meta.json", "w") as fh:
        json.dump(to_jsonable({"config": cfg, "x0": record.x0, "dx": record.dx}), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return 0


def cmd_pe_check(args) -> int:
    spectra = [read_spectrum_csv(p) for p in args.spectrum]
    if args.with_phasor:
        spectra.append(phasor_spectrum(spectra[0].grid))
    _dump(check_pe(stack_spectra(*spectra), args.order, args.tol_rel))
    return 0


def cmd_membership(args) -> int:
    data = load_io_data(args.data)
    traj = read_trajectory_csv(args.trajectory)
    solve = membership_steady if args.steady else membership_transient
    _dump(solve(data, traj, tol_abs=args.tol_abs, n_x=args.n_x))
    return 0


def cmd_evaluate(args) -> int:
    data = load_io_data(args.data)
    uz = np.array(args.uz, dtype=complex)
    if args.noisy:
        res = estimate_noisy(data, args.z, uz, args.order, L0=args.L0)
    else:
        if args.L0 is None:
            raise SystemExit("evaluate: --L0 is required without --noisy")
        res = evaluate_joint(data, args.z, uz, args.L0, n_x=args.order)
    _dump(res)
    return 0


def cmd_case_study(args) -> int:
    if args.noisy:
        cfg = _config(args, periods=100, snr=20.0)
        report = bench.run_noisy_case_study(cfg, out_dir=args.out)
    else:
        cfg = _config(args)
        report = bench.run_noisefree_case_study(args.out, cfg)
    _dump(report.summary())
    if not report.passed:
        print(f"case study failed: bound {report.bound:.4g} exceeded, worst at omega={report.worst_omega:.6f}",
              file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fdwfl", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def experiment_options(p):
        p.add_argument("--config", help="experiment config JSON")
        p.add_argument("--model", help="model JSON with fields A, B, C, D (default: benchmark)")
        p.add_argument("--seed", type=int, required=True)
        p.add_argument("--M", type=int)
        p.add_argument("--periods", type=int)
        p.add_argument("--snr", type=float)

    p = sub.add_parser("simulate", help="run a multisine experiment and write its spectra")
    experiment_options(p)
    p.add_argument("--out", required=True, help="output directory (U.csv, Y.csv, X.csv, meta.json)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("pe-check", help="persistence-of-excitation test")
    p.add_argument("--spectrum", action="append", required=True,
                   help="spectrum CSV; repeat to stack channels")
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--with-phasor", action="store_true", help="append the phasor channel exp(j omega)")
    p.add_argument("--tol-rel", type=float, default=DEFAULT_TOL_REL)
    p.set_defaults(func=cmd_pe_check)

    p = sub.add_parser("membership", help="test whether a trajectory belongs to the data's system")
    p.add_argument("--data", required=True, help="directory with U.csv, Y.csv")
    p.add_argument("--trajectory", required=True, help="CSV with u_* and y_* columns")
    p.add_argument("--steady", action="store_true", help="assume steady-state data")
    p.add_argument("--tol-abs", type=float)
    p.add_argument("--n-x", type=int, help="state dimension, for the excitation check only")
    p.set_defaults(func=cmd_membership)

    p = sub.add_parser("evaluate", help="evaluate H(z) Uz and T(z) from data")
    p.add_argument("--data", required=True)
    p.add_argument("--z", type=_complex, required=True)
    p.add_argument("--uz", type=_complex, nargs="+", required=True)
    p.add_argument("--L0", type=int)
    p.add_argument("--order", type=int, help="model order (required with --noisy)")
    p.add_argument("--noisy", action="store_true", help="use the truncated-SVD estimator")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("case-study", help="reproduce the benchmark case study")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--noise-free", action="store_true")
    mode.add_argument("--noisy", action="store_true")
    experiment_options(p)
    p.add_argument("--n-sweep", type=int)
    p.add_argument("--L0", type=int)
    p.add_argument("--out", help="directory for errors.csv, spectra/ and report.json")
    p.set_defaults(func=cmd_case_study)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "evaluate" and args.noisy and args.order is None:
        raise SystemExit("evaluate: --order is required with --noisy")
    return args.func(args)
