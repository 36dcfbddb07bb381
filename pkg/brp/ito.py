"""
A deterministic non-geometric lift.

Adding c(t-s) to every X^{[•a]a} keeps delta X^tau = X^{Delta' tau} (the
added term is additive, so its coboundary vanishes) but breaks the shuffle
identity X^{•a•a} = 2 X^{[•a]a} by exactly 2c(t-s), the way an Itô
correction does.
"""

from __future__ import annotations

from drivers.provider import SmoothDriver
from forest.trees import Tree
from increments.increment import Increment2

from .lift import lift_smooth
from .path import BranchedRoughPath


def ito_level2(x: SmoothDriver, c: float, gamma: float = 0.5) -> BranchedRoughPath:
    if gamma > 0.5:
        raise ValueError(f"a level-2 non-geometric path is declared with gamma <= 1/2, got {gamma}")
    X = lift_smooth(x, 2, gamma)
    drift = Increment2.from_function(x.grid, lambda t, s: c * (t - s))
    updates = {}
    for a in range(x.alphabet_size):
        tau = Tree(a, (Tree(a),))
        updates[tau] = X[tau] + drift
    return X.replace(updates, construction="ito_level2", ito_c=c)
