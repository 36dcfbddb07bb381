"""
Iterated integrals of a smooth driver indexed by trees.

    X^{•a}_{ts} = x^a_t - x^a_s
    X^{[t1...tk]a}_{ts} = int_s^t X^{t1}_{us} ... X^{tk}_{us} dx^a_u

For each base point s the inner integrand is known on grid points u >= s and
the outer integral is a cumulative quadrature in u. All trees of one degree are
integrated together, one call per base point.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import cumulative_simpson, cumulative_trapezoid

import config
from drivers.provider import SmoothDriver
from errors import ResourceLimitError
from forest.enumeration import trees_of_degree, count_forests
from forest.trees import Tree
from increments.increment import Increment2, coboundary1

from .path import BranchedRoughPath


def _cumulative(y: np.ndarray, x: np.ndarray, rule: str) -> np.ndarray:
    if rule == "simpson" and y.shape[0] >= 3:
        return cumulative_simpson(y, x=x, axis=0, initial=0)
    return cumulative_trapezoid(y, x=x, axis=0, initial=0)


def _child_product(tree: Tree, values: dict[Tree, np.ndarray], n: int) -> np.ndarray:
    out = np.ones((n, n))
    for c in tree.children:
        out = out * values[c]
    return out


def lift_smooth(x: SmoothDriver, N: int, gamma: float = 1.0) -> BranchedRoughPath:
    """Branched rough path of all trees up to degree N over the driver's labels."""
    if N < 1:
        raise ValueError(f"lift degree must be >= 1, got {N}")
    d = x.alphabet_size
    grid = x.grid
    n = grid.size
    n_trees = count_forests(N - 1, d, include_empty=True) * d  # trees of degree <= N
    cells = n_trees * n * n
    if cells > config.MAX_LIFT_CELLS:
        raise ResourceLimitError(
            f"lift of {n_trees} trees on {n} points needs {cells} cells, cap {config.MAX_LIFT_CELLS}"
        )

    times = grid.times
    dx = x.derivatives
    values: dict[Tree, np.ndarray] = {}
    for a in range(d):
        values[Tree(a)] = coboundary1(x.paths[:, a], grid).scalar()

    for m in range(2, N + 1):
        level = trees_of_degree(m, d)
        # integrand[u, s, tree] = prod X^{child}_{us} * dx^a/du (u)
        integrand = np.stack(
            [_child_product(t, values, n) * dx[:, t.label][:, None] for t in level],
            axis=2,
        )
        out = np.zeros((n, n, len(level)))
        for j in range(n - 1):
            out[j:, j, :] = _cumulative(integrand[j:, j, :], times[j:], x.rule)
        for idx, t in enumerate(level):
            values[t] = out[:, :, idx]

    tree_values = {t: Increment2(grid, v) for t, v in values.items()}
    return BranchedRoughPath(
        grid, gamma, d, tree_values, N,
        metadata={"construction": "lift_smooth", "rule": x.rule},
    )
