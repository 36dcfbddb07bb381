"""Extension of a branched rough path beyond its truncation order."""

from __future__ import annotations

import config
from errors import HypothesisError
from forest.enumeration import trees_of_degree
from forest.trees import Tree
from hopf.bounds import q_gamma
from hopf.coproduct import reduced_coproduct
from increments.norms import holder_norm2
from increments.sewing import sew_closed
from metrics.report import log

from .path import BranchedRoughPath


def propagation_constant(X: BranchedRoughPath) -> float:
    """
    Smallest A with ||X^tau||_{gamma|tau|} <= q_gamma(tau) A^|tau| on every stored tree.
    """
    best = 0.0
    for t in X.trees():
        norm = holder_norm2(X[t], X.gamma * t.degree).norm
        best = max(best, (norm / q_gamma(t, X.gamma)) ** (1.0 / t.degree))
    return best


def _bound_row(t: Tree, value, gamma: float, A: float) -> dict:
    q = q_gamma(t, gamma)
    measured = holder_norm2(value, gamma * t.degree).norm
    propagated = q * A ** t.degree
    return {
        "tree": str(t),
        "degree": t.degree,
        "q_gamma": q,
        "propagated": propagated,
        "measured": measured,
        "within": bool(measured <= propagated * (1.0 + 1e-9) + config.HOLDER_NOISE_FLOOR),
    }


def extend(X: BranchedRoughPath, target: int) -> BranchedRoughPath:
    """
    Add every tree of degree level+1 .. target as X^tau = Lambda[X^{Delta' tau}].

    The right-hand side only involves trees of lower degree and is closed by
    coassociativity of Delta', so the sewing map applies once
    gamma * (level + 1) > 1.

    metadata["bound_propagation"] lists, per new tree, the measured Hölder
    norm next to q_gamma(tau) A^|tau|, A being propagation_constant of the
    input.
    """
    if X.gamma * (X.level + 1) <= 1:
        raise HypothesisError(
            f"extension needs gamma*(n+1) > 1, got gamma={X.gamma}, n={X.level}"
        )
    if target < X.level:
        raise ValueError(f"target {target} is below the stored level {X.level}")

    A = propagation_constant(X)
    rows = []
    out = X
    for m in range(X.level + 1, target + 1):
        updates = {
            tau: sew_closed(out.tensor_value(reduced_coproduct(tau)))
            for tau in trees_of_degree(m, X.alphabet_size)
        }
        rows += [_bound_row(tau, v, X.gamma, A) for tau, v in updates.items()]
        out = out.replace(updates, construction="extend", extended_from=X.level)

    broken = [r["tree"] for r in rows if not r["within"]]
    if broken:
        log(f"Warning: extended trees {', '.join(broken)} exceed the propagated bound (A = {A:.4g})")
    out.metadata["propagation_constant"] = A
    out.metadata["bound_propagation"] = rows
    return out
