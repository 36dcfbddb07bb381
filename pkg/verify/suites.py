"""
Invariant suites for the toolkit.

Every check appends to the report's errors (a broken identity) or warnings
(a measured quantity drifting from its expected value). Run them through
``main.py verify --suite <name>``; the exit code is 1 when any error was
recorded.
"""

from __future__ import annotations

import inspect
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

import numpy as np
import pandas as pd
from scipy.integrate import solve_ivp

import config
from brp import (
    check_multiplicativity, correct_almost, extend, ito_level2, lift_smooth, shuffle_defect,
)
from bseries import coefficient_defects, local_order_study, series_terms
from controlled import VectorfieldFamily, check_remainders, solve_rde
from drivers.provider import get_provider
from forest.enumeration import enumerate_forests, enumerate_trees, weighted_tree_sum
from forest.series import ForestSeries
from forest.trees import Forest, Tree, tree_factorial
from hopf.bounds import neoclassical_sweep, sweep_summary, tree_binomial_check
from hopf.coproduct import (
    coassociativity_defect, coproduct, coproduct_by_cuts, counit_left, counit_right,
    reduced_coproduct, reduced_coproduct_recursive,
)
from increments.grid import Grid
from increments.increment import Increment2, coboundary2
from increments.norms import holder_norm2, holder_norm3
from increments.sewing import sew, sew_refinement
from metrics.report import estimate_order, log

SUITES = ("hopf", "increments", "brp", "controlled", "bseries", "neoclassical")


@dataclass
class SuiteReport:
    errors: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    metrics: dict = field(default_factory=dict)

    def section(self, title: str) -> None:
        print(f"\n  --- {title} ---", file=sys.stderr)

    def record(self, name: str, value) -> None:
        self.metrics[name] = value
        print(f"  {name:.<40s} {value}", file=sys.stderr)

    def print_summary(self) -> None:
        out = sys.stderr
        print(f"\n{'=' * 60}", file=out)
        if self.errors:
            print(f"  ERRORS ({len(self.errors)}):", file=out)
            for e in self.errors:
                print(f"    [!] {e}", file=out)
        if self.warnings:
            print(f"  WARNINGS ({len(self.warnings)}):", file=out)
            for w in self.warnings:
                print(f"    [~] {w}", file=out)
        if not self.errors and not self.warnings:
            print("  ALL CHECKS PASSED", file=out)
        print(f"{'=' * 60}\n", file=out)

    def to_json(self) -> dict:
        return {
            "schema_version": config.SCHEMA_VERSION,
            "ok": not self.errors,
            "errors": self.errors,
            "warnings": self.warnings,
            "metrics": self.metrics,
        }


def _relative(a: np.ndarray, b: np.ndarray) -> float:
    scale = float(np.max(np.abs(b)))
    return float(np.max(np.abs(a - b))) / scale if scale > 0 else float(np.max(np.abs(a)))


# --------------------------------------------------------------------------- #
#  hopf
# --------------------------------------------------------------------------- #

def check_hopf(report: SuiteReport, max_degree: int = 6, seed: int = 0) -> None:
    report.section("Hopf algebra")
    pool = enumerate_forests(max_degree, 1) + enumerate_forests(min(4, max_degree), 2)
    broken = 0
    for f in pool:
        delta = coproduct(f)
        if counit_left(delta) != ForestSeries.basis(f) or counit_right(delta) != ForestSeries.basis(f):
            report.errors.append(f"counit fails on {f}")
            broken += 1
        if any(l.degree + r.degree != f.degree for l, r, _ in delta.items()):
            report.errors.append(f"Delta({f}) is not graded")
            broken += 1
        if coassociativity_defect(f) or coassociativity_defect(f, reduced=True):
            report.errors.append(f"coassociativity fails on {f}")
            broken += 1
        if len(f) > 1:
            rest = Forest(f.trees[1:])
            if delta != coproduct(f.trees[0]) * coproduct(rest):
                report.errors.append(f"Delta is not multiplicative on {f}")
                broken += 1
    for t in enumerate_trees(max_degree, 1) + enumerate_trees(min(4, max_degree), 2):
        if coproduct_by_cuts(t) != coproduct(t):
            report.errors.append(f"cut enumeration and recursion disagree on {t}")
            broken += 1
        if reduced_coproduct_recursive(t) != reduced_coproduct(t):
            report.errors.append(f"reduced coproduct forms disagree on {t}")
            broken += 1
    report.record("forests checked", len(pool))
    report.record("broken identities", broken)

    rng = np.random.default_rng(seed)
    pairs = [(Fraction(int(p), int(q)), Fraction(int(r), int(s)))
             for p, q, r, s in rng.integers(1, 20, size=(20, 4))]
    failures = [str(t) for t in enumerate_trees(max_degree + 1, 1)
                if not all(tree_binomial_check(t, a, b) for a, b in pairs)]
    if failures:
        report.errors.append(f"tree binomial fails on {failures[:3]}")
    report.record("tree binomial trees", len(enumerate_trees(max_degree + 1, 1)))

    sums = {m: weighted_tree_sum(m) for m in range(1, max_degree + 1)}
    wrong = [m for m, v in sums.items() if v != Fraction(1, m)]
    if wrong:
        report.errors.append(f"sum of 1/(sigma tau!) over degree m differs from 1/m for m={wrong}")


# --------------------------------------------------------------------------- #
#  increments
# --------------------------------------------------------------------------- #

def _germ_corpus(grid: Grid) -> list[tuple[str, Increment2, float]]:
    """(name, germ g, mu) with delta g of order mu > 1."""
    t = grid.times
    out = []
    for k, (p, q) in enumerate([(1, 1), (2, 1), (1, 2), (3, 1), (2, 2)]):
        fs, xs = t ** p, np.sin((k + 1) * t) + t ** q
        out.append((f"poly{p}-sin{q}", Increment2(grid, fs[None, :, None] * (xs[:, None] - xs[None, :])[:, :, None]), 2.0))
    for k, c in enumerate([0.5, 1.0, 2.0, -1.0, 3.0]):
        fs = np.exp(c * t)
        xs = np.cos(t) + c * t
        out.append((f"exp{c:g}", Increment2(grid, fs[None, :, None] * (xs[:, None] - xs[None, :])[:, :, None]), 2.0))
    return out


def check_increments(report: SuiteReport, intervals: int = 64) -> None:
    report.section("Increments and sewing")
    grid = Grid.uniform(1.0, intervals)
    worst_identity, worst_ratio = 0.0, 0.0
    for name, g, mu in _germ_corpus(grid):
        split = sew(g, mu, check=False)
        defect = (coboundary2(split.lambda_part) - coboundary2(g)).max_abs()
        worst_identity = max(worst_identity, defect)
        if defect > config.SEWING_TOL * max(1.0, g.max_abs()):
            report.errors.append(f"delta(Lambda delta g) != delta g for {name}: {defect:.3g}")
        h_norm = holder_norm3(coboundary2(g), mu).norm
        if h_norm > 0:
            ratio = holder_norm2(split.lambda_part, mu).norm / h_norm * (2.0 ** mu - 2.0)
            worst_ratio = max(worst_ratio, ratio)
            if ratio > 1 + config.LAMBDA_SLACK:
                report.warnings.append(f"Lambda bound exceeded by {100 * (ratio - 1):.1f}% for {name}")
    report.record("sewing identity defect", worst_identity)
    report.record("Lambda bound ratio", worst_ratio)

    def germ(gr: Grid) -> Increment2:
        s = gr.times
        return Increment2(gr, (s[None, :] * (s[:, None] - s[None, :]))[:, :, None])

    table = sew_refinement(germ, Grid.uniform(1.0, 8), 2.0, levels=4)
    rates = table["rate"].dropna()
    bad = rates[(rates / table["expected_rate"].iloc[0] - 1).abs() > 0.15]
    if len(bad):
        report.errors.append(f"refinement decay rates {bad.round(3).tolist()} off 2^-(mu-1)")
    report.record("refinement rate", float(rates.iloc[-1]))


# --------------------------------------------------------------------------- #
#  brp
# --------------------------------------------------------------------------- #

def check_brp(report: SuiteReport, intervals: int = 256, degree: int = 4) -> None:
    report.section("Branched rough paths")
    grid = Grid.uniform(1.0, intervals)

    X = lift_smooth(get_provider("identity").get_driver(grid), degree)
    worst = 0.0
    for t in X.trees():
        exact = Increment2.from_function(grid, lambda a, b, t=t: (a - b) ** t.degree / tree_factorial(t))
        worst = max(worst, _relative(X[t].values, exact.values))
    report.record("identity lift error", worst)
    if worst > config.IDENTITY_TOL:
        report.errors.append(f"identity lift deviates from (t-s)^|tau|/tau! by {worst:.3g}")

    Y = lift_smooth(get_provider("polynomial", coefficients=[[0, 1], [0, 0, 0.5]]).get_driver(grid), degree)
    mult = check_multiplicativity(Y)["max_defect"]
    report.record("multiplicativity defect", mult)
    if mult > config.MULTIPLICATIVITY_TOL:
        report.errors.append(f"lift multiplicativity defect {mult:.3g}")

    base = get_provider("identity").get_driver(Grid.uniform(1.0, 64))
    c = 0.3
    Xi = ito_level2(base, c)
    leaf, stick = Forest((Tree(0), Tree(0))), Tree(0, (Tree(0),))
    drift = Increment2.from_function(Xi.grid, lambda a, b: -2 * c * (a - b))
    ito_err = (Xi[leaf] - Xi[stick] * 2.0 - drift).max_abs()
    m0 = check_multiplicativity(ito_level2(base, 0.0))["max_defect"]
    m1 = check_multiplicativity(Xi)["max_defect"]
    report.record("Ito shuffle drift error", ito_err)
    if ito_err > 1e-10:
        report.errors.append(f"Ito level-2 shuffle drift off by {ito_err:.3g}")
    if abs(m1 - m0) > 1e-12:
        report.errors.append(f"Ito correction changed the multiplicativity defect by {abs(m1 - m0):.3g}")
    geo = float(shuffle_defect(lift_smooth(base, 2))["max_defect"].max())
    if geo > 1e-10:
        report.warnings.append(f"smooth lift shuffle defect {geo:.3g}")

    check_extension(report)
    check_correction(report)


def check_extension(report: SuiteReport, intervals: int = 512, target: int = 4) -> None:
    driver = get_provider("polynomial", coefficients=[[0, 1], [0, 0, 0.5]]).get_driver(Grid.uniform(1.0, intervals))
    direct = lift_smooth(driver, target, gamma=0.45)
    ext = extend(direct.truncate(2), target)
    worst = max(_relative(ext[t].values, direct[t].values) for t in direct.trees())
    report.record("extension vs quadrature", worst)
    if worst > 1e-4:
        report.errors.append(f"extension deviates from direct quadrature by {worst:.3g}")
    broken = [r["tree"] for r in ext.metadata["bound_propagation"] if not r["within"]]
    report.record("trees above the propagated bound", len(broken))
    if broken:
        report.errors.append(f"extended trees exceed the propagated bound: {broken}")


def perturbed_lift(intervals: int = 64, gamma: float = 0.45, size: float = 0.05):
    """Clean lift and a copy with perturbations vanishing on adjacent grid pairs."""
    grid = Grid.uniform(1.0, intervals)
    driver = get_provider("polynomial", coefficients=[[0, 1], [0, 0, 0.5]]).get_driver(grid)
    clean = lift_smooth(driver, 2, gamma)
    h = float(grid.steps[0])
    bump = Increment2.from_function(grid, lambda t, s: size * (t - s) * (t - s - h))
    updates = {t: clean[t] + bump * (t.label + 1) for t in clean.trees()}
    return clean, clean.replace(updates, construction="perturbed")


def check_correction(report: SuiteReport) -> None:
    clean, noisy = perturbed_lift()
    fixed = correct_almost(noisy)
    worst = max(_relative(fixed[t].values, clean[t].values) for t in clean.trees())
    mult = check_multiplicativity(fixed)["max_defect"]
    report.record("correction vs clean lift", worst)
    report.record("corrected multiplicativity", mult)
    if worst > 1e-4:
        report.errors.append(f"corrected path deviates from the clean lift by {worst:.3g}")
    if mult > 1e-8:
        report.errors.append(f"corrected path multiplicativity defect {mult:.3g}")


# --------------------------------------------------------------------------- #
#  controlled
# --------------------------------------------------------------------------- #

def check_controlled(report: SuiteReport, intervals: int = 1024) -> None:
    report.section("Controlled paths and RDEs")
    grid = Grid.uniform(1.0, intervals)
    X = lift_smooth(get_provider("identity").get_driver(grid), 3, gamma=1 / 3)
    f = VectorfieldFamily.from_expressions(["y0"], [["y0"]])
    y = solve_rde(f, X, [1.0])
    err = float(np.max(np.abs(y.base[:, 0] - np.exp(grid.times))))
    report.record("exponential RDE error", err)
    if err > 1e-6:
        report.errors.append(f"solve_rde misses e^t by {err:.3g}")
    checks = check_remainders(y)
    report.record("remainder ledger defect", max(checks["control"], checks["control2"]))
    lemma = checks["lemma"] / max(1.0, checks["scale"])
    if lemma > 1e-10:
        report.errors.append(f"remainder identity defect {lemma:.3g}")
    ratio = float(y.info["windows"]["max_ratio"].max())
    report.record("max Picard ratio", ratio)
    if ratio >= 1:
        report.warnings.append(f"Picard differences grew (ratio {ratio:.3g})")

    study = two_driver_study()
    fit = estimate_order(study["step"], study["error"])
    report.record("two-driver RDE observed order", fit["order"])
    if not fit["order"] >= 1:
        report.errors.append(f"two-driver RDE converges with order {fit['order']:.3g} under refinement")


def two_driver_study(intervals: tuple[int, ...] = (32, 64, 128, 256)) -> pd.DataFrame:
    """
    dy = y dx^0 - y/2 dx^1 driven by x = (t, t^2/2); the exact end value is
    exp(3/4). One row per grid: intervals, step, error at t = 1.
    """
    driver = get_provider("polynomial", coefficients=[[0, 1], [0, 0, 0.5]])
    f = VectorfieldFamily.from_expressions(["y0"], [["y0"], ["-y0/2"]])
    rows = []
    for M in intervals:
        X = lift_smooth(driver.get_driver(Grid.uniform(1.0, M)), 3, gamma=1 / 3)
        y = solve_rde(f, X, [1.0])
        rows.append({"intervals": M, "step": 1.0 / M, "error": abs(float(y.base[-1, 0]) - np.exp(0.75))})
    return pd.DataFrame(rows)


# --------------------------------------------------------------------------- #
#  bseries
# --------------------------------------------------------------------------- #

def check_bseries(report: SuiteReport, max_degree: int = 6) -> None:
    report.section("B-series")
    linear = VectorfieldFamily.from_expressions(["y0"], [["y0"]], max_order=max_degree)
    terms = series_terms(linear, [1], 1, max_degree, exact=True)
    wrong = [m for m, v in enumerate(terms, start=1) if v[0] != Fraction(1, factorial(m))]
    if wrong:
        report.errors.append(f"psi-weighted collapse differs from 1/m! at degrees {wrong}")

    f = VectorfieldFamily.from_expressions(["y0"], [["y0"], ["1 + y0**2/4"]])
    provider = get_provider("polynomial", coefficients=[[0, 1], [0, 0, 0.5]])
    for N in (1, 2, 3):
        study = local_order_study(f, provider, [0.5], N)
        report.record(f"local order N={N}", round(study["order"], 3))
        if abs(study["order"] - (N + 1)) > 0.3:
            report.errors.append(f"local order for N={N} is {study['order']:.3f}, expected {N + 1}")

    grid = Grid.uniform(1.0, 256)
    X = lift_smooth(provider.get_driver(grid), 3, gamma=1 / 3)
    ref = _classical_solution(f, provider, [0.5], grid)
    table = coefficient_defects(f, X, ref, lags=[4, 8, 16, 32, 64])
    by_degree = table.groupby("degree")["measured_order"].min()
    report.record("defect orders by degree", by_degree.round(2).to_dict())
    if not by_degree.is_monotonic_decreasing:
        report.errors.append(f"coefficient defect orders not decreasing in |tau|: {by_degree.to_dict()}")
    low = table[table["measured_order"] < 0.8 * table["bound"]]
    if len(low):
        report.errors.append(f"defect order below 0.8 x bound for {low['tree'].tolist()}")


def _classical_solution(f: VectorfieldFamily, provider, eta, grid: Grid) -> np.ndarray:
    def rhs(t, y):
        v = provider.velocity(t)
        return sum(f.value(a, y) * v[a] for a in range(f.alphabet_size))

    sol = solve_ivp(rhs, (grid.times[0], grid.times[-1]), np.asarray(eta, dtype=float),
                    method="DOP853", t_eval=grid.times, rtol=1e-13, atol=1e-15)
    return sol.y.T


# --------------------------------------------------------------------------- #
#  neo-classical
# --------------------------------------------------------------------------- #

def check_neoclassical(report: SuiteReport, n_max: int = 200) -> None:
    report.section("Neo-classical inequality")
    ratios = [0.25, 0.5, 1.0, 2.0, 4.0]
    exact = neoclassical_sweep([1.0], 50, ratios)
    dev = float((exact["ratio"] - 1.0).abs().max())
    report.record("gamma = 1 deviation", dev)
    if dev > 1e-9:
        report.errors.append(f"neo-classical ratio at gamma=1 deviates from 1 by {dev:.3g}")

    df = neoclassical_sweep([0.3, 0.5, 0.7], n_max, ratios)
    summary = sweep_summary(df, [(50, 100), (100, n_max)])
    for _, row in summary.iterrows():
        g = row["gamma"]
        if not np.isfinite(row["sup_ratio"]):
            report.errors.append(f"neo-classical ratio is not finite for gamma={g}")
        growth = row[f"sup_normalized_100_{n_max}"] / row["sup_normalized_50_100"]
        report.record(f"normalized growth gamma={g}", round(float(growth), 4))
        if growth > 1.05:
            report.errors.append(f"normalized neo-classical ratio grows by {growth:.3f} for gamma={g}")


def run_suite(name: str, **kwargs) -> SuiteReport:
    """Run one suite (or "all") and return its report."""
    checks = {
        "hopf": check_hopf,
        "increments": check_increments,
        "brp": check_brp,
        "controlled": check_controlled,
        "bseries": check_bseries,
        "neoclassical": check_neoclassical,
    }
    if name != "all" and name not in checks:
        raise ValueError(f"Unknown suite '{name}'. Available: {list(checks) + ['all']}")
    report = SuiteReport()
    print("=" * 60, file=sys.stderr)
    print(f"  VERIFY: {name}", file=sys.stderr)
    print("=" * 60, file=sys.stderr)
    for key in (checks if name == "all" else [name]):
        fn = checks[key]
        params = inspect.signature(fn).parameters
        accepted = {k: v for k, v in kwargs.items() if k in params}
        fn(report, **accepted)
    report.print_summary()
    log(f"verify {name}: {len(report.errors)} errors, {len(report.warnings)} warnings")
    return report
