"""
BranchedRoughPath: scalar 2-increments X^tau for every tree up to a level,
extended to forests by the circle product.
"""

from __future__ import annotations

from math import floor
from types import MappingProxyType

import numpy as np

from forest.enumeration import enumerate_forests, enumerate_trees
from forest.trees import Forest, Tree, as_forest, labels
from hopf.coproduct import TensorSeries
from increments.grid import Grid
from increments.increment import Increment2, Increment3


def truncation_order(gamma: float) -> int:
    """Largest n with n * gamma <= 1."""
    if not 0 < gamma <= 1:
        raise ValueError(f"gamma must lie in (0, 1], got {gamma}")
    return int(floor(1.0 / gamma + 1e-12))


class BranchedRoughPath:

    def __init__(
        self,
        grid: Grid,
        gamma: float,
        alphabet_size: int,
        tree_values: dict[Tree, Increment2],
        level: int | None = None,
        metadata: dict | None = None,
    ) -> None:
        if not 0 < gamma <= 1:
            raise ValueError(f"gamma must lie in (0, 1], got {gamma}")
        if alphabet_size < 1:
            raise ValueError(f"alphabet_size must be >= 1, got {alphabet_size}")
        for t, v in tree_values.items():
            if max(labels(t)) >= alphabet_size:
                raise ValueError(f"{t} uses a label outside the alphabet of size {alphabet_size}")
            if v.grid != grid:
                raise ValueError(f"X^{t} is sampled on a different grid")
            if v.dim != 1:
                raise ValueError(f"X^{t} must be scalar, got dim {v.dim}")
        top = max((t.degree for t in tree_values), default=0)
        self.level = top if level is None else level
        if self.level > top:
            raise ValueError(f"level {self.level} declared but trees stop at degree {top}")
        missing = [t for t in enumerate_trees(self.level, alphabet_size) if t not in tree_values]
        if missing:
            raise ValueError(f"{len(missing)} trees up to degree {self.level} are missing, e.g. {missing[0]}")

        self.grid = grid
        self.gamma = float(gamma)
        self.alphabet_size = alphabet_size
        self.tree_values = MappingProxyType(dict(tree_values))
        self.metadata = dict(metadata or {})
        self._forest_cache: dict[Forest, Increment2] = {}

    @property
    def n(self) -> int:
        return truncation_order(self.gamma)

    def trees(self) -> list[Tree]:
        return sorted(self.tree_values)

    def forests(self, max_degree: int | None = None) -> list[Forest]:
        top = self.level if max_degree is None else max_degree
        if top > self.level:
            raise ValueError(f"forests of degree {top} need trees beyond level {self.level}")
        return enumerate_forests(top, self.alphabet_size)

    def __getitem__(self, x: Tree | Forest) -> Increment2:
        if isinstance(x, Tree):
            try:
                return self.tree_values[x]
            except KeyError:
                raise KeyError(f"X^{x} is not stored (level {self.level})") from None
        f = as_forest(x)
        if f.is_unit():
            return Increment2.unit(self.grid)
        if len(f) == 1:
            return self[f.trees[0]]
        if f not in self._forest_cache:
            out = self[f.trees[0]]
            for t in f.trees[1:]:
                out = out.circle(self[t])
            self._forest_cache[f] = out
        return self._forest_cache[f]

    def tensor_value(self, ts: TensorSeries) -> Increment3:
        """sum c X^L X^R as a 3-increment, (X^L X^R)_{tus} = X^L_{tu} X^R_{us}."""
        terms = [(float(c), self[left].values, self[right].values) for left, right, c in ts.items()]

        def fn(i, k, j):
            shape = np.broadcast_shapes(np.shape(i), np.shape(k), np.shape(j))
            out = np.zeros(shape + (1,))
            for c, a, b in terms:
                out = out + c * a[i, k] * b[k, j]
            return out

        return Increment3(self.grid, 1, fn)

    # ------------------------------------------------------------------ #

    def replace(self, updates: dict[Tree, Increment2], **metadata) -> BranchedRoughPath:
        values = dict(self.tree_values)
        values.update(updates)
        meta = {**self.metadata, **metadata}
        return BranchedRoughPath(self.grid, self.gamma, self.alphabet_size, values, None, meta)

    def truncate(self, level: int) -> BranchedRoughPath:
        if level > self.level:
            raise ValueError(f"cannot truncate level {self.level} to {level}")
        values = {t: v for t, v in self.tree_values.items() if t.degree <= level}
        return BranchedRoughPath(self.grid, self.gamma, self.alphabet_size, values, level, self.metadata)

    def restrict(self, i0: int, i1: int) -> BranchedRoughPath:
        values = {t: v.restrict(i0, i1) for t, v in self.tree_values.items()}
        return BranchedRoughPath(self.grid.restrict(i0, i1), self.gamma, self.alphabet_size,
                                 values, self.level, self.metadata)

    def scaled(self, lam: float) -> BranchedRoughPath:
        """X^tau -> lam^|tau| X^tau, the lift of lam * x."""
        values = {t: v * lam ** t.degree for t, v in self.tree_values.items()}
        return BranchedRoughPath(self.grid, self.gamma, self.alphabet_size, values, self.level, self.metadata)

    def with_gamma(self, gamma: float) -> BranchedRoughPath:
        return BranchedRoughPath(self.grid, gamma, self.alphabet_size, dict(self.tree_values),
                                 self.level, self.metadata)

    def __repr__(self) -> str:
        return (f"BranchedRoughPath(gamma={self.gamma:g}, level={self.level}, "
                f"d={self.alphabet_size}, {self.grid!r})")
