"""
Weakly controlled paths.

y is kappa-weakly controlled by X when

    delta y   = sum_{tau in F^{n-1}} X^tau y^tau + y#                      (order n kappa)
    delta y^t = sum_{sigma, rho} c'(sigma, t, rho) X^rho y^sigma + y^{t,#}  (order (n-|t|) kappa)

where c'(sigma, t, rho) is the coefficient of t ⊗ rho in Delta' sigma and the
forests run over the non-empty forests of degree <= n-1. The remainders are
stored next to the coefficients; check_remainders compares the stored values
with the defining relations.
"""

from __future__ import annotations

import numpy as np
import pandas as pd

from brp.path import BranchedRoughPath, truncation_order
from errors import HypothesisError
from forest.trees import Forest, as_forest
from hopf.coproduct import reduced_coproduct
from increments.increment import Increment2, Increment3, coboundary1, coboundary2, exterior_product
from increments.norms import holder_norm2


def _as_array(p, size: int) -> np.ndarray:
    a = np.asarray(p, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    if a.shape[0] != size:
        raise ValueError(f"path with {a.shape[0]} samples on a grid of {size} points")
    return a


class ControlledPath:

    def __init__(
        self,
        X: BranchedRoughPath,
        kappa: float,
        base,
        coeffs: dict[Forest, np.ndarray],
        remainder: Increment2,
        coeff_remainders: dict[Forest, Increment2],
    ) -> None:
        n = X.n
        if not 0 < kappa <= X.gamma:
            raise ValueError(f"kappa must lie in (0, {X.gamma}], got {kappa}")
        if kappa * (n + 1) <= 1:
            raise HypothesisError(f"kappa*(n+1) must exceed 1, got kappa={kappa}, n={n}")
        if X.level < n - 1:
            raise ValueError(f"controlled paths need X up to degree {n - 1}, got {X.level}")
        size = X.grid.size
        self.X = X
        self.kappa = float(kappa)
        self.base = _as_array(base, size)
        k = self.base.shape[1]

        index = self.index_set()
        allowed = set(index)
        unknown = [f for f in coeffs if as_forest(f) not in allowed]
        if unknown:
            raise ValueError(f"coefficient {unknown[0]} is outside the forests of degree <= {n - 1}")
        self.coeffs = {f: np.zeros((size, k)) for f in index}
        for f, v in coeffs.items():
            arr = _as_array(v, size)
            if arr.shape[1] != k:
                raise ValueError(f"coefficient {f} has dimension {arr.shape[1]}, path has {k}")
            self.coeffs[as_forest(f)] = arr

        self.remainder = remainder
        zero = Increment2.zeros(X.grid, k)
        self.coeff_remainders = {f: coeff_remainders.get(f, zero) for f in index}
        self.info: dict = {}

    # ------------------------------------------------------------------ #
    #  Constructors
    # ------------------------------------------------------------------ #

    @classmethod
    def from_coefficients(
        cls, X: BranchedRoughPath, base, coeffs: dict[Forest, np.ndarray], kappa: float | None = None,
    ) -> ControlledPath:
        """Remainders computed from their defining relations."""
        kappa = X.gamma if kappa is None else kappa
        draft = cls(X, kappa, base, coeffs, Increment2.zeros(X.grid, _as_array(base, X.grid.size).shape[1]), {})
        rem = coboundary1(draft.base, X.grid) - draft.expansion()

        acc = {f: coboundary1(v, X.grid) for f, v in draft.coeffs.items()}
        for sigma, y_sigma in draft.coeffs.items():
            if not y_sigma.any():
                continue
            for left, right, c in reduced_coproduct(sigma).items():
                acc[left] = acc[left] - c * exterior_product(X[right], y_sigma)
        return cls(X, kappa, draft.base, draft.coeffs, rem, acc)

    @classmethod
    def from_bseries(
        cls, X: BranchedRoughPath, base, tree_coeffs: dict, kappa: float | None = None,
    ) -> ControlledPath:
        """
        Controlled path of a series solution: y^tau = phi(tau)(y)/sigma(tau) on
        trees, zero on forests of two or more trees.
        """
        top = X.n - 1
        coeffs = {as_forest(t): v for t, v in tree_coeffs.items() if as_forest(t).degree <= top}
        return cls.from_coefficients(X, base, coeffs, kappa)

    @classmethod
    def constant(cls, X: BranchedRoughPath, value, kappa: float | None = None) -> ControlledPath:
        v = np.atleast_1d(np.asarray(value, dtype=float))
        base = np.broadcast_to(v, (X.grid.size, v.size)).copy()
        kappa = X.gamma if kappa is None else kappa
        zero = Increment2.zeros(X.grid, v.size)
        return cls(X, kappa, base, {}, zero, {})

    # ------------------------------------------------------------------ #

    @property
    def n(self) -> int:
        return truncation_order(self.X.gamma)

    @property
    def dim(self) -> int:
        return self.base.shape[1]

    @property
    def grid(self):
        return self.X.grid

    def index_set(self) -> list[Forest]:
        return self.X.forests(self.X.n - 1) if self.X.n > 1 else []

    def coefficient(self, f) -> np.ndarray:
        f = as_forest(f)
        if f.is_unit():
            return self.base
        return self.coeffs[f]

    def expansion(self) -> Increment2:
        """sum_tau X^tau y^tau, the part of delta y explained by X."""
        out = Increment2.zeros(self.grid, self.dim)
        for f, v in self.coeffs.items():
            if v.any():
                out = out + exterior_product(self.X[f], v)
        return out

    def component(self, idx: int) -> ControlledPath:
        """The scalar path of one coordinate."""
        return ControlledPath(
            self.X, self.kappa, self.base[:, idx],
            {f: v[:, idx] for f, v in self.coeffs.items()},
            self.remainder.component(idx),
            {f: r.component(idx) for f, r in self.coeff_remainders.items()},
        )

    # ------------------------------------------------------------------ #
    #  Linear structure
    # ------------------------------------------------------------------ #

    def _check_same(self, other: ControlledPath) -> None:
        if other.X is not self.X and (other.X.grid != self.X.grid or other.X.gamma != self.X.gamma):
            raise ValueError("Controlled paths refer to different rough paths")
        if other.dim != self.dim:
            raise ValueError(f"Dimension mismatch: {self.dim} vs {other.dim}")

    def _combine(self, other: ControlledPath, sign: float) -> ControlledPath:
        self._check_same(other)
        return ControlledPath(
            self.X, min(self.kappa, other.kappa),
            self.base + sign * other.base,
            {f: v + sign * other.coeffs[f] for f, v in self.coeffs.items()},
            self.remainder + other.remainder * sign,
            {f: r + other.coeff_remainders[f] * sign for f, r in self.coeff_remainders.items()},
        )

    def __add__(self, other: ControlledPath) -> ControlledPath:
        return self._combine(other, 1.0)

    def __sub__(self, other: ControlledPath) -> ControlledPath:
        return self._combine(other, -1.0)

    def __mul__(self, lam: float) -> ControlledPath:
        return ControlledPath(
            self.X, self.kappa, lam * self.base,
            {f: lam * v for f, v in self.coeffs.items()},
            self.remainder * lam,
            {f: r * lam for f, r in self.coeff_remainders.items()},
        )

    __rmul__ = __mul__

    def shifted(self, value) -> ControlledPath:
        """y + const; coefficients and remainders are unchanged."""
        return ControlledPath(self.X, self.kappa, self.base + np.asarray(value, dtype=float),
                              self.coeffs, self.remainder, self.coeff_remainders)

    def to_frame(self) -> pd.DataFrame:
        """Grid table: t, y_i, and one column per non-zero coefficient component."""
        data = {"t": self.grid.times}
        for i in range(self.dim):
            data[f"y{i}"] = self.base[:, i]
        for f, v in self.coeffs.items():
            if v.any():
                for i in range(self.dim):
                    data[f"{f}:{i}"] = v[:, i]
        return pd.DataFrame(data)

    def __repr__(self) -> str:
        return f"ControlledPath(dim={self.dim}, kappa={self.kappa:g}, n={self.n}, {len(self.coeffs)} coefficients)"


# --------------------------------------------------------------------------- #
#  Norm and remainder checks
# --------------------------------------------------------------------------- #

def controlled_norm(y: ControlledPath) -> float:
    """|y_0| + ||y#||_{n kappa} + sum_tau ||y^{tau,#}||_{kappa (n - |tau|)}."""
    n, kappa = y.n, y.kappa
    total = float(np.linalg.norm(y.base[0]))
    total += holder_norm2(y.remainder, n * kappa).norm
    for f, r in y.coeff_remainders.items():
        total += holder_norm2(r, kappa * (n - f.degree)).norm
    return total


def controlled_distance(y: ControlledPath) -> float:
    """controlled_norm plus sum_tau |y^tau_0|, so a constant nonzero coefficient is seen."""
    return controlled_norm(y) + sum(float(np.linalg.norm(v[0])) for v in y.coeffs.values())


def lemma_defect(y: ControlledPath) -> Increment3:
    """delta y# - sum_tau X^tau y^{tau,#}; zero for a multiplicative X."""
    h = coboundary2(y.remainder)
    for f, r in y.coeff_remainders.items():
        h = h - exterior_product(y.X[f], r)
    return h


def check_remainders(y: ControlledPath, include_lemma: bool = True) -> dict:
    """
    Max defects of the stored remainders against the defining relations.

    Returns {"control", "control2", "lemma", "scale", "table"}; the table has
    one row per coefficient forest.
    """
    X = y.X
    control = coboundary1(y.base, y.grid) - y.expansion() - y.remainder

    acc = {f: coboundary1(v, y.grid) - y.coeff_remainders[f] for f, v in y.coeffs.items()}
    for sigma, y_sigma in y.coeffs.items():
        if not y_sigma.any():
            continue
        for left, right, c in reduced_coproduct(sigma).items():
            acc[left] = acc[left] - c * exterior_product(X[right], y_sigma)

    rows = [{"forest": str(f), "degree": f.degree, "max_defect": d.max_abs()} for f, d in acc.items()]
    table = pd.DataFrame(rows, columns=["forest", "degree", "max_defect"])
    out = {
        "control": control.max_abs(),
        "control2": float(table["max_defect"].max()) if len(table) else 0.0,
        "lemma": lemma_defect(y).max_abs() if include_lemma else float("nan"),
        "scale": max(float(np.max(np.abs(y.base))), y.remainder.max_abs()),
        "table": table,
    }
    return out
