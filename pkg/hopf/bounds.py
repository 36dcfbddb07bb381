"""
Scalar functionals on trees used for bounds: the tree binomial identity,
the weight q_gamma, and the fractional (neo-classical) binomial ratios.

Exact identities run in Fractions; q_gamma and the neo-classical ratios are
floats, evaluated in log space where the terms overflow.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import lgamma, log, exp

import numpy as np
import pandas as pd
from scipy.special import logsumexp

from forest.trees import Forest, Tree, as_forest, forest_factorial, tree_factorial

from .coproduct import coproduct, coproduct_by_cuts, reduced_coproduct

MAX_NEOCLASSICAL_N = 10_000


def _check_gamma(gamma: float) -> None:
    if not 0 < gamma <= 1:
        raise ValueError(f"gamma must lie in (0, 1], got {gamma}")


# --------------------------------------------------------------------------- #
#  Tree binomial
# --------------------------------------------------------------------------- #

def tree_binomial_terms(t: Tree, a: Fraction, b: Fraction) -> Fraction:
    """Sum over Delta(t) of t!/(L! R!) a^|L| b^|R| in exact arithmetic."""
    a, b = Fraction(a), Fraction(b)
    tf = tree_factorial(t)
    total = Fraction(0)
    for left, right, c in coproduct(t).items():
        weight = Fraction(tf, forest_factorial(left) * forest_factorial(right))
        total += c * weight * a ** left.degree * b ** right.degree
    return total


def tree_binomial_check(t: Tree, a: Fraction, b: Fraction) -> bool:
    a, b = Fraction(a), Fraction(b)
    if a < 0 or b < 0:
        raise ValueError(f"tree binomial is stated for a, b >= 0, got {a}, {b}")
    return tree_binomial_terms(t, a, b) == (a + b) ** t.degree


# --------------------------------------------------------------------------- #
#  q_gamma
# --------------------------------------------------------------------------- #

@lru_cache(maxsize=None)
def _q_tree(t: Tree, gamma: float) -> float:
    if t.degree * gamma <= 1:
        return 1.0
    s = 0.0
    for left, right, c in reduced_coproduct(t).items():
        s += c * _q_forest(left, gamma) * _q_forest(right, gamma)
    return s / (2.0 ** (gamma * t.degree) - 2.0)


def _q_forest(f: Forest, gamma: float) -> float:
    out = 1.0
    for t in f.trees:
        out *= _q_tree(t, gamma)
    return out


def q_gamma(x: Tree | Forest, gamma: float) -> float:
    """Weight q_gamma; 1 on trees with gamma*|t| <= 1, multiplicative on forests."""
    _check_gamma(gamma)
    return _q_forest(as_forest(x), float(gamma))


def q_gamma_full(t: Tree, gamma: float) -> float:
    """
    q_gamma from the full-coproduct form q = 2^(-gamma|t|) sum q(L) q(R),
    with the coproduct taken from cut enumeration and the two primitive terms
    moved to the left-hand side.
    """
    _check_gamma(gamma)
    if t.degree * gamma <= 1:
        return 1.0
    s = 0.0
    for left, right, c in coproduct_by_cuts(t).items():
        if left.is_unit() or right.is_unit():
            continue
        s += c * _q_forest(left, gamma) * _q_forest(right, gamma)
    scale = 2.0 ** (-gamma * t.degree)
    return scale * s / (1.0 - 2.0 * scale)


def conjecture_ratio(t: Tree, gamma: float) -> float:
    """q_gamma(t) * (t!)^gamma, reported for inspection only."""
    return q_gamma(t, gamma) * float(tree_factorial(t)) ** gamma


# --------------------------------------------------------------------------- #
#  Neo-classical ratios
# --------------------------------------------------------------------------- #

def neoclassical_ratio(n: int, gamma: float, a: float, b: float) -> float:
    """
    sum_k a^(gk) b^(g(n-k)) / (k! (n-k)!)^g  divided by  (a+b)^(gn) / (n!)^g.
    """
    _check_gamma(gamma)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if n > MAX_NEOCLASSICAL_N:
        raise ValueError(f"n = {n} exceeds the overflow guard {MAX_NEOCLASSICAL_N}")
    if a <= 0 or b <= 0:
        raise ValueError(f"a and b must be positive, got {a}, {b}")

    k = np.arange(n + 1)
    lg = np.array([lgamma(i + 1) for i in range(n + 1)])
    terms = gamma * (k * log(a) + (n - k) * log(b) - lg - lg[::-1])
    rhs = gamma * (n * log(a + b) - lg[n])
    return float(exp(logsumexp(terms) - rhs))


def neoclassical_tree_ratio(t: Tree, gamma: float, a: float, b: float) -> float:
    """Tree-indexed analogue summed over Delta(t); equals 1 at gamma = 1."""
    _check_gamma(gamma)
    if a <= 0 or b <= 0:
        raise ValueError(f"a and b must be positive, got {a}, {b}")
    logs = []
    weights = []
    for left, right, c in coproduct(t).items():
        logs.append(
            gamma * (left.degree * log(a) + right.degree * log(b)
                     - log(forest_factorial(left)) - log(forest_factorial(right)))
        )
        weights.append(c)
    rhs = gamma * (t.degree * log(a + b) - log(tree_factorial(t)))
    return float(exp(logsumexp(logs, b=weights) - rhs))


def neoclassical_sweep(
    gamma_grid: list[float],
    n_max: int,
    ratio_grid: list[float],
    n_min: int = 1,
) -> pd.DataFrame:
    """
    Evaluate the ratio on gamma x n x (a/b) with b = 1.

    The ``normalized`` column divides by n^((1-gamma)/2), the growth rate of
    the ratio at a = b.
    """
    rows = []
    for gamma in gamma_grid:
        for r in ratio_grid:
            for n in range(n_min, n_max + 1):
                value = neoclassical_ratio(n, gamma, r, 1.0)
                rows.append({
                    "gamma": gamma,
                    "a_over_b": r,
                    "n": n,
                    "ratio": value,
                    "normalized": value * n ** (-(1.0 - gamma) / 2.0),
                })
    return pd.DataFrame(rows)


def sweep_summary(df: pd.DataFrame, windows: list[tuple[int, int]]) -> pd.DataFrame:
    """Per gamma, the sup of ratio and normalized ratio over each n window."""
    rows = []
    for gamma, g in df.groupby("gamma"):
        row = {"gamma": gamma, "sup_ratio": g["ratio"].max()}
        for lo, hi in windows:
            w = g[(g["n"] >= lo) & (g["n"] <= hi)]
            row[f"sup_ratio_{lo}_{hi}"] = w["ratio"].max()
            row[f"sup_normalized_{lo}_{hi}"] = w["normalized"].max()
        rows.append(row)
    return pd.DataFrame(rows)
