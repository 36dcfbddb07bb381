"""
Checks on a branched rough path: tree multiplicativity, the Hölder budget,
the distance between two paths and the shuffle (geometricity) defect.
"""

from __future__ import annotations

import numpy as np
import pandas as pd
from scipy.optimize import brentq

from forest.trees import Forest, Tree, as_forest
from hopf.bounds import q_gamma
from hopf.coproduct import reduced_coproduct
from hopf.words import chen_tree, geometric_reduce_forest
from increments.increment import Increment2, coboundary2
from increments.norms import holder_norm2

from .path import BranchedRoughPath


def check_multiplicativity(X: BranchedRoughPath, trees: list[Tree] | None = None) -> dict:
    """
    max over grid triples of |delta X^tau - X^{Delta' tau}|, per tree.

    Returns {"max_defect": float, "table": DataFrame(tree, degree, max_defect, scale)}
    where scale is max |X^tau|, for relative readings.
    """
    rows = []
    for tau in (trees if trees is not None else X.trees()):
        defect = coboundary2(X[tau]) - X.tensor_value(reduced_coproduct(tau))
        rows.append({
            "tree": str(tau),
            "degree": tau.degree,
            "max_defect": defect.max_abs(),
            "scale": X[tau].max_abs(),
        })
    table = pd.DataFrame(rows, columns=["tree", "degree", "max_defect", "scale"])
    worst = float(table["max_defect"].max()) if len(table) else 0.0
    return {"max_defect": worst, "table": table}


def _check_compatible(X: BranchedRoughPath, Y: BranchedRoughPath) -> None:
    if X.grid != Y.grid:
        raise ValueError("Rough paths live on different grids")
    if X.gamma != Y.gamma:
        raise ValueError(f"Rough paths have different gamma: {X.gamma} vs {Y.gamma}")
    if X.alphabet_size != Y.alphabet_size:
        raise ValueError(f"Alphabet sizes differ: {X.alphabet_size} vs {Y.alphabet_size}")


def distance(X: BranchedRoughPath, Y: BranchedRoughPath) -> float:
    """sum over forests of degree <= n of ||X^f - Y^f||_{gamma |f|}."""
    _check_compatible(X, Y)
    n = X.n
    if min(X.level, Y.level) < n:
        raise ValueError(f"distance needs both paths up to degree {n}, got {X.level} and {Y.level}")
    total = 0.0
    for f in X.forests(n):
        total += holder_norm2(X[f] - Y[f], X.gamma * f.degree).norm
    return total


def _budget_rows(X: BranchedRoughPath) -> list[dict]:
    rows = []
    for f in X.forests():
        rows.append({
            "forest": str(f),
            "degree": f.degree,
            "norm": holder_norm2(X[f], X.gamma * f.degree).norm,
            "q_gamma": q_gamma(f, X.gamma),
        })
    return rows


def check_holder_budget(
    X: BranchedRoughPath, A: float, B: float, rtol: float = 1e-9,
) -> tuple[bool, pd.DataFrame]:
    """
    ||X^f||_{gamma |f|} <= B A^|f| q_gamma(f) for every forest up to X.level.

    Returns (ok, table); the table lists every forest with its norm, bound and
    a violation flag.
    """
    if not 0 <= B <= 1:
        raise ValueError(f"B must lie in [0, 1], got {B}")
    if A < 0:
        raise ValueError(f"A must be >= 0, got {A}")
    table = pd.DataFrame(_budget_rows(X), columns=["forest", "degree", "norm", "q_gamma"])
    table["bound"] = B * A ** table["degree"] * table["q_gamma"]
    table["violated"] = table["norm"] > table["bound"] * (1 + rtol)
    return not bool(table["violated"].any()), table


def search_budget_constant(X: BranchedRoughPath, B: float = 1.0, xtol: float = 1e-10) -> float:
    """Smallest A for which the Hölder budget holds with the given B (bisection)."""
    if not 0 < B <= 1:
        raise ValueError(f"B must lie in (0, 1] for the search, got {B}")
    rows = [r for r in _budget_rows(X) if r["norm"] > 0]
    if not rows:
        return 0.0
    logs = np.array([np.log(r["norm"]) - np.log(B) - np.log(r["q_gamma"]) for r in rows])
    degs = np.array([r["degree"] for r in rows], dtype=float)

    def excess(A: float) -> float:
        return float(np.max(logs - degs * np.log(A)))

    lo, hi = 1e-12, 1.0
    while excess(hi) > 0:
        hi *= 2.0
        if hi > 1e12:
            return float("inf")
    if excess(lo) <= 0:
        return lo
    return float(brentq(excess, lo, hi, xtol=xtol))


def word_expansion(X: BranchedRoughPath, f: Tree | Forest) -> Increment2:
    """sum over words w of coeff(w) X^{chen(w)}; equals X^f when X is geometric."""
    forest = as_forest(f)
    if forest.degree > X.level:
        raise ValueError(f"{forest} needs trees of degree {forest.degree}, path stops at {X.level}")
    out = Increment2.zeros(X.grid)
    for w, c in geometric_reduce_forest(forest).items():
        out = out + c * X[chen_tree(w)]
    return out


def shuffle_defect(X: BranchedRoughPath, forests: list[Forest] | None = None) -> pd.DataFrame:
    """Per forest, max |X^f - word_expansion(X, f)|; zero for geometric paths."""
    rows = []
    for f in (forests if forests is not None else X.forests()):
        f = as_forest(f)
        diff = X[f] - word_expansion(X, f)
        rows.append({"forest": str(f), "degree": f.degree, "max_defect": diff.max_abs()})
    return pd.DataFrame(rows, columns=["forest", "degree", "max_defect"])
