"""
Elementary differentials of a vectorfield family.

    phi(•a)(xi)            = f_a(xi)
    phi([t1 ... tm]a)(xi)  = D^m f_a(xi)[phi(t1)(xi), ..., phi(tm)(xi)]

A table holds the values at one evaluation point (or one batch of points,
e.g. a solution sampled on a grid) and memoizes them per tree. Tables are
not shared between threads; build one per worker.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from controlled.fields import VectorfieldFamily, contract
from forest.trees import Tree


class ElementaryDifferentialTable:

    def __init__(self, field: VectorfieldFamily, xi, exact: bool = False) -> None:
        if field.dim != field.out_dim:
            raise ValueError(f"elementary differentials need f: R^k -> R^k, got R^{field.dim} -> R^{field.out_dim}")
        self.field = field
        self.exact = exact
        if exact:
            self.xi = [Fraction(v) for v in np.atleast_1d(np.asarray(xi, dtype=object))]
            self.batched = False
        else:
            self.xi = np.asarray(xi, dtype=float)
            self.batched = self.xi.ndim == 2
        self._jets: dict[tuple[int, int], np.ndarray] = {}
        self._values: dict[Tree, np.ndarray] = {}

    def _jet(self, a: int, m: int) -> np.ndarray:
        if (a, m) not in self._jets:
            if self.exact:
                self._jets[(a, m)] = self.field.jet_exact(a, m, self.xi)
            else:
                self._jets[(a, m)] = self.field.jet(a, m, self.xi)
        return self._jets[(a, m)]

    def __getitem__(self, t: Tree) -> np.ndarray:
        if t not in self._values:
            vectors = [self[c] for c in t.children]
            self._values[t] = contract(self._jet(t.label, len(vectors)), vectors, self.batched)
        return self._values[t]

    def __len__(self) -> int:
        return len(self._values)


def elementary_differential(f: VectorfieldFamily, t: Tree, xi, exact: bool = False) -> np.ndarray:
    return ElementaryDifferentialTable(f, xi, exact)[t]
