"""
Correction of an almost branched rough path.

Given X~ whose defects R^tau = delta X~^tau - X~^{Delta' tau} are small 3-increments
of order (n+1)gamma > 1, build X = X~ + Q degree by degree with

    delta Q^tau = X^{Delta' tau} - X~^{Delta' tau} - R^tau,

the right-hand side only involving trees of lower degree, already corrected.
On degree one this is Q = -Lambda R.
"""

from __future__ import annotations

import pandas as pd

from errors import HypothesisError
from forest.enumeration import trees_of_degree
from hopf.coproduct import reduced_coproduct
from increments.increment import coboundary2
from increments.norms import holder_norm2, holder_precheck
from increments.sewing import sew_closed
from metrics.report import log

from .path import BranchedRoughPath


def defects(Xt: BranchedRoughPath, tau):
    return coboundary2(Xt[tau]) - Xt.tensor_value(reduced_coproduct(tau))


def correct_almost(Xt: BranchedRoughPath, precheck: bool = True) -> BranchedRoughPath:
    mu = (Xt.n + 1) * Xt.gamma
    if mu <= 1:
        raise HypothesisError(f"correction needs (n+1)*gamma > 1, got {mu}")

    X = Xt.truncate(0)
    for m in range(1, Xt.level + 1):
        updates = {}
        for tau in trees_of_degree(m, Xt.alphabet_size):
            R = defects(Xt, tau)
            if precheck:
                fit = holder_precheck(R, mu)
                if not fit["ok"]:
                    raise HypothesisError(
                        f"defect of {tau} decays with order {fit['order']:.3g}, correction needs {mu:g}"
                    )
            if m == 1:
                rhs = -R
            else:
                split = reduced_coproduct(tau)
                rhs = X.tensor_value(split) - Xt.tensor_value(split) - R
            updates[tau] = Xt[tau] + sew_closed(rhs)
        X = X.replace(updates)
    log(f"Corrected almost rough path up to degree {Xt.level}")
    return BranchedRoughPath(Xt.grid, Xt.gamma, Xt.alphabet_size, dict(X.tree_values), Xt.level,
                             {**Xt.metadata, "construction": "correct_almost"})


def correction_report(Xt: BranchedRoughPath, X: BranchedRoughPath) -> pd.DataFrame:
    """Per tree, ||X^tau - X~^tau|| at exponent (n+1)gamma."""
    mu = (Xt.n + 1) * Xt.gamma
    rows = []
    for tau in Xt.trees():
        diff = X[tau] - Xt[tau]
        rows.append({
            "tree": str(tau),
            "degree": tau.degree,
            "mu": mu,
            "correction_norm": holder_norm2(diff, mu).norm,
            "max_abs": diff.max_abs(),
        })
    return pd.DataFrame(rows)
