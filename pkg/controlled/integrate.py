"""
Rough integral of a controlled path against one component of a branched
rough path.

    delta z = X^{•a} y + sum_tau X^{[tau]a} y^tau + z_flat

The germ on the right is sewn on the grid; its coefficients follow the
grafting law z^{•a} = y, z^{[tau]a} = y^tau and zero elsewhere, and the
remainders are assembled from those of y:

    z#            = z_flat + sum_{|tau| = n-1} X^{[tau]a} y^tau
    z^{[tau]a,#}  = y^{tau,#} + sum_{|sigma| = n-1} c'(sigma, tau, rho) X^rho y^sigma

with the empty forest standing for y itself (y^{empty,#} = y#).
"""

from __future__ import annotations

import numpy as np

from brp.path import BranchedRoughPath
from forest.trees import UNIT, Forest, graft
from hopf.coproduct import reduced_coproduct
from increments.increment import Increment2, exterior_product
from increments.sewing import reconstruct_path, sew

from .path import ControlledPath


def _check(X: BranchedRoughPath, a: int, y: ControlledPath) -> None:
    if y.X is not X and (y.X.grid != X.grid or y.X.gamma != X.gamma):
        raise ValueError("the controlled path refers to a different rough path or grid")
    if not 0 <= a < X.alphabet_size:
        raise ValueError(f"label {a} outside 0..{X.alphabet_size - 1}")
    if X.level < y.n:
        raise ValueError(f"rough integration needs X up to degree {y.n}, got {X.level}")


def integration_germ(X: BranchedRoughPath, a: int, y: ControlledPath) -> Increment2:
    g = exterior_product(X[graft(UNIT, a)], y.base)
    for tau, v in y.coeffs.items():
        if v.any():
            g = g + exterior_product(X[graft(tau, a)], v)
    return g


def rough_integrate(X: BranchedRoughPath, a: int, y: ControlledPath) -> ControlledPath:
    """z_t = int_0^t y dX^a as a controlled path with z_0 = 0."""
    _check(X, a, y)
    n = y.n
    g = integration_germ(X, a, y)
    split = sew(g, (n + 1) * y.kappa, check=False)
    z_base = reconstruct_path(g)
    z_flat = -split.lambda_part

    # y^tau indexed with the empty forest for y itself
    terms = {UNIT: y.base, **y.coeffs}
    rems = {UNIT: y.remainder, **y.coeff_remainders}

    coeffs: dict[Forest, np.ndarray] = {}
    z_sharp = z_flat
    for tau, v in terms.items():
        if tau.degree == n - 1:
            if v.any():
                z_sharp = z_sharp + exterior_product(X[graft(tau, a)], v)
        else:
            coeffs[Forest((graft(tau, a),))] = v

    # tau with |tau| <= n-2 pick up the top-degree terms of y's own relations
    lifted = {tau: rems[tau] for tau in terms if tau.degree <= n - 2}
    for sigma, v in y.coeffs.items():
        if sigma.degree != n - 1 or not v.any():
            continue
        # c'(sigma, empty, rho) = [rho = sigma]
        if UNIT in lifted:
            lifted[UNIT] = lifted[UNIT] + exterior_product(X[sigma], v)
        for left, right, c in reduced_coproduct(sigma).items():
            if left in lifted:
                lifted[left] = lifted[left] + c * exterior_product(X[right], v)

    coeff_remainders = {Forest((graft(tau, a),)): r for tau, r in lifted.items()}
    return ControlledPath(X, y.kappa, z_base, coeffs, z_sharp, coeff_remainders)
