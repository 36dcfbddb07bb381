#!/usr/bin/env python3
"""
Branched rough path toolkit: command-line runner.

Usage:
    python main.py hopf-table --max-degree 3 --labels 1
    python main.py verify --suite hopf
    python main.py lift --driver polynomial --coefficients "[[0,1],[0,0,0.5]]" --degree 3 --out x
    python main.py solve-rde --brp x.json --field field.json --eta 1.0 --out y.csv

Tables go to stdout (or --out, with a <out>.json sidecar echoing the run
configuration); log lines go to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
import pandas as pd

import config
from brp import (
    check_multiplicativity, correct_almost, correction_report, extend, lift_smooth, load_brp, save_brp,
)
from bseries import local_order_study
from controlled import VectorfieldFamily, check_remainders, solve_rde
from drivers.provider import get_provider
from errors import ConvergenceError, ResourceLimitError
from hopf.bounds import neoclassical_sweep, sweep_summary
from hopf.coproduct import coproduct_table
from increments.grid import Grid
from increments.increment import Increment2
from increments.sewing import sew
from metrics.report import log, print_metrics, set_log_file
from verify.suites import SUITES, run_suite


# --------------------------------------------------------------------------- #
#  Helpers
# --------------------------------------------------------------------------- #

def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _ints(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def _config_echo(args: argparse.Namespace) -> dict:
    return {k: (str(v) if isinstance(v, Path) else v) for k, v in vars(args).items() if k != "func"}


def _tolerances() -> dict:
    return {
        "fixed_point_tol": config.FIXED_POINT_TOL,
        "identity_tol": config.IDENTITY_TOL,
        "multiplicativity_tol": config.MULTIPLICATIVITY_TOL,
        "sewing_tol": config.SEWING_TOL,
        "quadrature_rule": config.QUADRATURE_RULE,
    }


def _emit(df: pd.DataFrame, args: argparse.Namespace, extra: dict | None = None) -> None:
    """CSV to --out (plus JSON sidecar) or to stdout."""
    sidecar = {
        "schema_version": config.SCHEMA_VERSION,
        "subcommand": args.command,
        "config": _config_echo(args),
        "tolerances": _tolerances(),
        **(extra or {}),
    }
    if args.out is None:
        sys.stdout.write(df.to_csv(index=False))
        log(f"config: {json.dumps(sidecar['config'])}")
        return
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(out, index=False)
    with open(out.with_suffix(".json"), "w") as f:
        json.dump(sidecar, f, indent=2, default=str)
    log(f"Wrote {len(df)} rows to {out}")


def _load_field(path: str, max_order: int) -> VectorfieldFamily:
    with open(path) as f:
        doc = json.load(f)
    if "variables" not in doc or "fields" not in doc:
        raise ValueError(f"{path} needs 'variables' and 'fields' entries")
    return VectorfieldFamily.from_expressions(doc["variables"], doc["fields"], max_order=max_order)


def _provider(args: argparse.Namespace):
    if args.driver == "polynomial":
        return get_provider("polynomial", coefficients=json.loads(args.coefficients))
    if args.driver == "csv":
        return get_provider("csv", path=args.csv)
    return get_provider(args.driver, alphabet_size=args.labels)


# --------------------------------------------------------------------------- #
#  Subcommands
# --------------------------------------------------------------------------- #

def cmd_hopf_table(args: argparse.Namespace) -> int:
    _emit(coproduct_table(args.max_degree, args.labels), args)
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    report = run_suite(args.suite, max_degree=args.max_degree)
    print(json.dumps(report.to_json(), indent=2, default=str))
    return 0 if not report.errors else 1


def cmd_lift(args: argparse.Namespace) -> int:
    provider = _provider(args)
    grid = None if args.driver == "csv" else Grid.uniform(args.horizon, args.intervals)
    X = lift_smooth(provider.get_driver(grid, args.rule), args.degree, args.gamma)
    X.metadata["config"] = _config_echo(args)
    header = save_brp(X, args.out)
    print(json.dumps({"schema_version": config.SCHEMA_VERSION, "header": str(header),
                      "trees": len(X.trees()), "level": X.level}))
    return 0


def cmd_extend(args: argparse.Namespace) -> int:
    X = extend(load_brp(args.brp), args.target)
    X.metadata["config"] = _config_echo(args)
    header = save_brp(X, args.out)
    print(json.dumps({"schema_version": config.SCHEMA_VERSION, "header": str(header), "level": X.level}))
    return 0


def cmd_correct(args: argparse.Namespace) -> int:
    Xt = load_brp(args.brp)
    X = correct_almost(Xt, precheck=not args.no_precheck)
    X.metadata["config"] = _config_echo(args)
    header = save_brp(X, args.out)
    table = correction_report(Xt, X)
    print(json.dumps({
        "schema_version": config.SCHEMA_VERSION,
        "header": str(header),
        "max_correction": float(table["max_abs"].max()),
        "multiplicativity_defect": check_multiplicativity(X)["max_defect"],
    }))
    return 0


def cmd_sew(args: argparse.Namespace) -> int:
    header_path = Path(args.input)
    with open(header_path) as f:
        header = json.load(f)
    grid = Grid(header["times"])
    mu = args.mu if args.mu is not None else float(header["mu"])
    data = pd.read_csv(header_path.parent / header.get("data", header_path.with_suffix(".csv").name))
    values = np.zeros((grid.size, grid.size))
    values[data["i"].to_numpy(), data["j"].to_numpy()] = data["value"].to_numpy()
    split = sew(Increment2(grid, values), mu)

    i, j = np.tril_indices(grid.size, -1)
    df = pd.DataFrame({
        "i": i,
        "j": j,
        "g": values[i, j],
        "path_increment": split.path_increment.values[i, j, 0],
        "lambda": split.lambda_part.values[i, j, 0],
    })
    _emit(df, args, {"mu": mu, "times": grid.times.tolist()})
    return 0


def cmd_solve_rde(args: argparse.Namespace) -> int:
    X = load_brp(args.brp)
    f = _load_field(args.field, max(4, X.n))
    y = solve_rde(f, X, _floats(args.eta), T=args.T, tol=args.tol)
    checks = check_remainders(y)
    defects = {k: checks[k] for k in ("control", "control2", "lemma", "scale")}
    _emit(y.to_frame(), args, {
        "defects": defects,
        "windows": y.info["windows"].to_dict("records"),
        "gamma": X.gamma,
        "intervals": X.grid.intervals,
    })
    print_metrics(defects, title="REMAINDER DEFECTS")
    return 0


def cmd_bseries_compare(args: argparse.Namespace) -> int:
    orders = _ints(args.orders)
    f = _load_field(args.field, max(4, max(orders)))
    provider = _provider(args)
    steps = args.h0 * 2.0 ** -np.arange(args.refinements)
    eta = _floats(args.eta)

    def study(N: int) -> dict:
        return local_order_study(f, provider, eta, N, steps, subintervals=args.subintervals, rule=args.rule)

    with ThreadPoolExecutor(max_workers=args.jobs) as pool:
        results = list(pool.map(study, orders))
    frames = []
    for res in results:
        t = res["table"].copy()
        t.insert(0, "degree", res["degree"])
        frames.append(t)
    fits = {f"order_N{r['degree']}": r["order"] for r in results}
    _emit(pd.concat(frames, ignore_index=True), args, {"fits": fits})
    print_metrics(fits, title="LOCAL ORDER")
    return 0


def cmd_neoclassical_sweep(args: argparse.Namespace) -> int:
    gammas = _floats(args.gammas)
    ratios = _floats(args.ratios)

    with ThreadPoolExecutor(max_workers=args.jobs) as pool:
        frames = list(pool.map(lambda g: neoclassical_sweep([g], args.n_max, ratios), gammas))
    df = pd.concat(frames, ignore_index=True)
    half = max(1, args.n_max // 2)
    summary = sweep_summary(df, [(max(1, half // 2), half), (half, args.n_max)])
    _emit(df, args, {"summary": summary.to_dict("records")})
    return 0


# --------------------------------------------------------------------------- #
#  Parser
# --------------------------------------------------------------------------- #

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="branched", description="Branched rough path toolkit")
    parser.add_argument("--jobs", type=int, default=os.cpu_count() or 1, help="worker threads for sweeps")
    parser.add_argument("--log-file", default=None, help="copy log lines to this file ('none' disables)")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_out(p: argparse.ArgumentParser, required: bool = False) -> argparse.ArgumentParser:
        p.add_argument("--out", required=required, default=None)
        return p

    def with_driver(p: argparse.ArgumentParser) -> None:
        p.add_argument("--driver", choices=["identity", "polynomial", "csv"], default="identity")
        p.add_argument("--coefficients", default="[[0, 1]]", help="JSON list of polynomial coefficients per label")
        p.add_argument("--csv", default=None, help="driver samples for --driver csv")
        p.add_argument("--labels", type=int, default=config.DEFAULT_ALPHABET_SIZE)
        p.add_argument("--rule", choices=["simpson", "trapezoid"], default=config.QUADRATURE_RULE)

    p = with_out(sub.add_parser("hopf-table", help="forests with their coproducts"))
    p.add_argument("--max-degree", type=int, default=3)
    p.add_argument("--labels", type=int, default=config.DEFAULT_ALPHABET_SIZE)
    p.set_defaults(func=cmd_hopf_table)

    p = sub.add_parser("verify", help="run invariant suites")
    p.add_argument("--suite", choices=list(SUITES) + ["all"], default="all")
    p.add_argument("--max-degree", type=int, default=6)
    p.set_defaults(func=cmd_verify)

    p = with_out(sub.add_parser("lift", help="lift a smooth driver"), required=True)
    with_driver(p)
    p.add_argument("--degree", type=int, default=3)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--intervals", type=int, default=config.DEFAULT_GRID_SIZE)
    p.add_argument("--horizon", type=float, default=config.DEFAULT_HORIZON)
    p.set_defaults(func=cmd_lift)

    p = with_out(sub.add_parser("extend", help="extend a stored rough path"), required=True)
    p.add_argument("--brp", required=True)
    p.add_argument("--target", type=int, required=True)
    p.set_defaults(func=cmd_extend)

    p = with_out(sub.add_parser("correct", help="correct an almost rough path"), required=True)
    p.add_argument("--brp", required=True)
    p.add_argument("--no-precheck", action="store_true")
    p.set_defaults(func=cmd_correct)

    p = with_out(sub.add_parser("sew", help="sew a stored 2-increment"))
    p.add_argument("--input", required=True, help="JSON header with times, mu and the data CSV")
    p.add_argument("--mu", type=float, default=None)
    p.set_defaults(func=cmd_sew)

    p = with_out(sub.add_parser("solve-rde", help="solve a rough differential equation"))
    p.add_argument("--brp", required=True)
    p.add_argument("--field", required=True)
    p.add_argument("--eta", required=True, help="comma-separated initial value")
    p.add_argument("--T", type=float, default=None)
    p.add_argument("--tol", type=float, default=config.FIXED_POINT_TOL)
    p.set_defaults(func=cmd_solve_rde)

    p = with_out(sub.add_parser("bseries-compare", help="local order of truncated series steps"))
    with_driver(p)
    p.add_argument("--field", required=True)
    p.add_argument("--eta", required=True)
    p.add_argument("--orders", default="1,2,3")
    p.add_argument("--refinements", type=int, default=6)
    p.add_argument("--h0", type=float, default=0.1)
    p.add_argument("--subintervals", type=int, default=32)
    p.set_defaults(func=cmd_bseries_compare)

    p = with_out(sub.add_parser("neoclassical-sweep", help="fractional binomial ratios"))
    p.add_argument("--gammas", default="0.3,0.5,0.7")
    p.add_argument("--ratios", default="0.25,0.5,1,2,4")
    p.add_argument("--n-max", type=int, default=200)
    p.set_defaults(func=cmd_neoclassical_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.jobs < 1:
        parser.error(f"--jobs must be >= 1, got {args.jobs}")
    if args.log_file is not None:
        set_log_file(None if args.log_file == "none" else args.log_file)

    try:
        return args.func(args)
    except (ValueError, ResourceLimitError, ConvergenceError) as exc:
        print(json.dumps({
            "schema_version": config.SCHEMA_VERSION,
            "error": type(exc).__name__,
            "message": str(exc),
            "subcommand": args.command,
        }))
        return 1


if __name__ == "__main__":
    sys.exit(main())
