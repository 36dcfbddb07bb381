"""
Branched rough path over a controlled path.

y takes values in R^{k d} laid out as y[a * k + b]. Every tree is a rough
integral

    Y^{•b}_{ts}         = sum_a int_s^t y^{ab}_u dX^a_u
    Y^{[t1...tj]b}_{ts} = sum_a int_s^t y^{ab}_u Y^{t1}_{us} ... Y^{tj}_{us} dX^a_u

computed for each start point s as the finest Riemann sum of the integration
germ sum_sigma X^{[sigma]a}_{k+1,k} z^sigma_k. The coefficients z^sigma of the
integrand u -> y_u prod Y_{us} follow from the product rule
(pq)^sigma = sum_{sigma1 sigma2 = sigma} p^sigma1 q^sigma2 and from the grafting
law of the rough integral, which gives u -> Y^{[tau]b}_{us} the coefficient
z^sigma on the tree [sigma]a.
"""

from __future__ import annotations

from collections import Counter
from itertools import product

import numpy as np

import config
from brp.path import BranchedRoughPath, truncation_order
from errors import ResourceLimitError
from forest.enumeration import count_forests, trees_of_degree
from forest.trees import UNIT, Forest, Tree, graft
from increments.increment import Increment2
from metrics.report import log

from .path import ControlledPath

# coefficient arrays of a path u -> p_{us}, keyed by X-forest (UNIT = the value)
Coeffs = dict[Forest, np.ndarray]


def _splits(f: Forest) -> list[tuple[Forest, Forest]]:
    """All f = a * b as multisets, empty factors included."""
    counts = Counter(f.trees)
    trees = sorted(counts)
    out = []
    for picks in product(*(range(counts[t] + 1) for t in trees)):
        a = [t for t, k in zip(trees, picks) for _ in range(k)]
        b = [t for t, k in zip(trees, picks) for _ in range(counts[t] - k)]
        out.append((Forest(tuple(a)), Forest(tuple(b))))
    return out


def _times(p: Coeffs, q: Coeffs, index: list[Forest]) -> Coeffs:
    out = {}
    for f in index:
        acc = 0.0
        for left, right in _splits(f):
            if left in p and right in q:
                acc = acc + p[left] * q[right]
        out[f] = acc
    return out


def lift_controlled(y: ControlledPath, k: int | None = None, level: int | None = None) -> BranchedRoughPath:
    """Y over the alphabet {0..k-1}, regularity kappa, trees up to ``level`` (default n)."""
    X = y.X
    d = X.alphabet_size
    if k is None:
        if y.dim % d:
            raise ValueError(f"path of dimension {y.dim} is not a k x {d} matrix")
        k = y.dim // d
    if k * d != y.dim:
        raise ValueError(f"path of dimension {y.dim} cannot hold a {k} x {d} matrix")
    level = truncation_order(y.kappa) if level is None else level
    if level < 1:
        raise ValueError(f"level must be >= 1, got {level}")
    n = y.n
    if X.level < n:
        raise ValueError(f"the lift needs X up to degree {n}, got {X.level}")

    N = X.grid.size
    index = [UNIT] + y.index_set()
    cells = count_forests(level, k) * len(index) * N ** 2
    if cells > config.MAX_LIFT_CELLS:
        raise ResourceLimitError(f"controlled lift needs {cells} cells, cap {config.MAX_LIFT_CELLS}")

    # y^{ab} as a path constant in s
    entries = {
        (a, b): {f: y.coefficient(f)[:, a * k + b][:, None] for f in index}
        for a in range(d) for b in range(k)
    }
    # X^{[sigma]a} on adjacent intervals, aligned with the left end point k
    adjacent = (np.arange(1, N), np.arange(N - 1))
    steps = {(a, f): X[graft(f, a)].scalar()[adjacent][:, None] for a in range(d) for f in index}
    lower = np.tril(np.ones((N - 1, N), dtype=bool))

    values: dict[Tree, Increment2] = {}
    coeffs: dict[Tree, Coeffs] = {}
    for m in range(1, level + 1):
        for t in trees_of_degree(m, k):
            b, children = t.label, t.children
            Y = np.zeros((N, N))
            tree_coeffs: Coeffs = {}
            for a in range(d):
                z = entries[(a, b)]
                for c in children:
                    z = _times(z, coeffs[c], index)
                germ = np.zeros((N - 1, N))
                for f in index:
                    zf = np.broadcast_to(z[f], (N, N))
                    germ = germ + steps[(a, f)] * zf[:-1]
                    if f.degree <= n - 2:
                        tree_coeffs[Forest((graft(f, a),))] = zf
                germ = np.where(lower, germ, 0.0)
                Y[1:] += np.cumsum(germ, axis=0)
            values[t] = Increment2(X.grid, Y)
            if m < level:
                tree_coeffs[UNIT] = values[t].scalar()
                coeffs[t] = tree_coeffs

    log(f"Controlled lift: {len(values)} trees over {k} labels, level {level}")
    return BranchedRoughPath(
        X.grid, y.kappa, k, values, level,
        metadata={"construction": "lift_controlled", "source": X.metadata.get("construction")},
    )
