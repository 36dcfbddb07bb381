"""
Tree-series solutions of autonomous and driven equations.

Autonomous, one vectorfield, trees without labels:

    y(t) = eta + sum_tau psi(tau)(eta) t^|tau| / (sigma(tau) tau!)

Driven by d paths, labeled trees:

    y_t - y_s = sum_tau phi(tau)(y_s) X^tau_ts / sigma(tau)

When the driver is x^a_t = t for every label, X^tau_ts = (t-s)^|tau| / tau! in
closed form and the driven step can run in exact rational arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import pandas as pd
from scipy.integrate import solve_ivp

import config
from brp.lift import lift_smooth
from brp.path import BranchedRoughPath
from controlled.fields import VectorfieldFamily
from controlled.path import ControlledPath
from drivers.provider import DriverProvider
from forest.enumeration import enumerate_trees, trees_of_degree
from forest.trees import Tree, symmetry_factor, tree_factorial
from hopf.coproduct import reduced_coproduct
from increments.grid import Grid
from increments.increment import coboundary1, exterior_product
from increments.norms import measured_order
from metrics.report import estimate_order, log, order_table

from .elementary import ElementaryDifferentialTable


@dataclass(frozen=True)
class SeriesStepConfig:
    """Truncation degree and arithmetic of one series evaluation."""
    max_degree: int
    exact: bool = False
    radius: float | None = None   # t_*; steps at or beyond it log a warning

    def __post_init__(self) -> None:
        if self.max_degree < 1:
            raise ValueError(f"max_degree must be >= 1, got {self.max_degree}")
        if self.radius is not None and self.radius <= 0:
            raise ValueError(f"radius must be positive, got {self.radius}")

    def check_step(self, h) -> None:
        if self.radius is not None and abs(float(h)) >= self.radius:
            log(f"Warning: step {float(h):.4g} is outside the estimated convergence radius {self.radius:.4g}")


def _point(eta, exact: bool) -> np.ndarray:
    if exact:
        return np.array([Fraction(v) for v in np.atleast_1d(np.asarray(eta, dtype=object))], dtype=object)
    return np.atleast_1d(np.asarray(eta, dtype=float))


def _zero(like: np.ndarray) -> np.ndarray:
    if like.dtype == object:
        return np.array([Fraction(0)] * like.size, dtype=object)
    return np.zeros_like(like)


def series_terms(f: VectorfieldFamily, eta, t, N: int, exact: bool = False) -> list[np.ndarray]:
    """The degree-m parts of the autonomous series, m = 1..N."""
    if f.alphabet_size != 1:
        raise ValueError(f"the autonomous series takes a single vectorfield, got {f.alphabet_size}")
    eta = _point(eta, exact)
    t = Fraction(t) if exact else float(t)
    table = ElementaryDifferentialTable(f, eta, exact)
    terms = []
    for m in range(1, N + 1):
        acc = _zero(eta)
        for tree in trees_of_degree(m, 1):
            weight = t ** m / (symmetry_factor(tree) * tree_factorial(tree))
            acc = acc + table[tree] * weight
        terms.append(acc)
    return terms


def bseries_autonomous(
    f: VectorfieldFamily, eta, t, N: int, exact: bool = False, radius: float | None = None,
) -> np.ndarray:
    cfg = SeriesStepConfig(N, exact, radius)
    cfg.check_step(t)
    eta = _point(eta, exact)
    out = eta.copy()
    for term in series_terms(f, eta, t, cfg.max_degree, cfg.exact):
        out = out + term
    return out


def partial_sums(f: VectorfieldFamily, eta, t: float, N: int) -> pd.DataFrame:
    """Degree-by-degree partial sums with the size of each added term."""
    eta = _point(eta, False)
    rows = [{"degree": 0, "term_norm": float(np.linalg.norm(eta)), **{f"y{i}": v for i, v in enumerate(eta)}}]
    acc = eta.copy()
    for m, term in enumerate(series_terms(f, eta, t, N), start=1):
        acc = acc + term
        rows.append({"degree": m, "term_norm": float(np.linalg.norm(term)),
                     **{f"y{i}": v for i, v in enumerate(acc)}})
    return pd.DataFrame(rows)


def bseries_driven_step(
    f: VectorfieldFamily,
    X: BranchedRoughPath | None,
    y_s,
    t,
    s,
    N: int,
    exact: bool = False,
    radius: float | None = None,
) -> np.ndarray:
    """
    Increment y_t - y_s of the series truncated at degree N.

    X = None stands for the driver x^a_t = t on every label of f.
    """
    cfg = SeriesStepConfig(N, exact, radius)
    d = f.alphabet_size
    if X is None:
        h = Fraction(t) - Fraction(s) if exact else float(t) - float(s)

        def weight(tree: Tree):
            return h ** tree.degree / tree_factorial(tree)
    else:
        if exact:
            raise ValueError("exact arithmetic needs the closed-form identity driver (X=None)")
        if X.alphabet_size != d:
            raise ValueError(f"{d} fields for a rough path over {X.alphabet_size} labels")
        if X.level < N:
            raise ValueError(f"series of degree {N} needs trees up to degree {N}, rough path stops at {X.level}")
        i, j = X.grid.index_of(t), X.grid.index_of(s)
        if i <= j:
            raise ValueError(f"step needs s < t, got s={s}, t={t}")
        h = float(t) - float(s)

        def weight(tree: Tree):
            return float(X[tree].values[i, j, 0])

    cfg.check_step(h)
    y_s = _point(y_s, exact)
    table = ElementaryDifferentialTable(f, y_s, exact)
    out = _zero(y_s)
    for tree in enumerate_trees(N, d):
        out = out + table[tree] * (weight(tree) / symmetry_factor(tree))
    return out


# --------------------------------------------------------------------------- #
#  Coefficient paths of a solution
# --------------------------------------------------------------------------- #

def _samples(y) -> np.ndarray:
    if isinstance(y, ControlledPath):
        return y.base
    a = np.asarray(y, dtype=float)
    return a[:, None] if a.ndim == 1 else a


def coefficient_paths(f: VectorfieldFamily, y, max_degree: int) -> dict[Tree, np.ndarray]:
    """y^tau = phi(tau)(y) / sigma(tau) along the samples of a solution."""
    table = ElementaryDifferentialTable(f, _samples(y))
    return {t: table[t] / symmetry_factor(t) for t in enumerate_trees(max_degree, f.alphabet_size)}


def coefficient_defects(
    f: VectorfieldFamily, X: BranchedRoughPath, y, degree: int | None = None, lags: list[int] | None = None,
) -> pd.DataFrame:
    """
    Measured Hölder order of delta y^tau - sum c'(sigma, tau, rho) X^rho y^sigma
    with sigma over the trees up to ``degree`` (default: the level of X).

    For a smooth driver the defect of tau is O(h^(degree + 1 - |tau|));
    ``bound`` is the rough-path guarantee (n - |tau|) gamma.
    """
    N = X.level if degree is None else degree
    if X.level < N - 1:
        raise ValueError(f"defects up to degree {N} need X up to degree {N - 1}, got {X.level}")
    samples = _samples(y)
    if samples.shape[0] != X.grid.size:
        raise ValueError(f"solution has {samples.shape[0]} samples on a grid of {X.grid.size} points")

    paths = coefficient_paths(f, samples, N)
    D = {t: coboundary1(v, X.grid) for t, v in paths.items()}
    for sigma, y_sigma in paths.items():
        for left, right, c in reduced_coproduct(sigma).items():
            if len(left) == 1:
                tau = left.trees[0]
                D[tau] = D[tau] - c * exterior_product(X[right], y_sigma)

    rows = []
    for tau, defect in D.items():
        fit = measured_order(defect, lags)
        rows.append({
            "tree": str(tau),
            "degree": tau.degree,
            "measured_order": fit["order"],
            "smooth_order": N + 1 - tau.degree,
            "bound": max(0.0, (X.n - tau.degree) * X.gamma),
            "r_squared": fit["r_squared"],
            "max_abs": defect.max_abs(),
        })
    return pd.DataFrame(rows)


# --------------------------------------------------------------------------- #
#  Convergence radius and local order
# --------------------------------------------------------------------------- #

def convergence_radius(A: float, M: float, R: float, d: int) -> float:
    """t_* = R / (2 d A M)."""
    for name, v in (("A", A), ("M", M), ("R", R), ("d", d)):
        if not v > 0:
            raise ValueError(f"{name} must be positive, got {v}")
    return R / (2 * d * A * M)


def local_order_study(
    f: VectorfieldFamily,
    provider: DriverProvider,
    eta,
    N: int,
    steps=None,
    subintervals: int = 32,
    rule: str | None = None,
    rtol: float = 1e-13,
) -> dict:
    """
    One-step errors of the degree-N series on [0, h] against a dense
    classical solve, for each h in ``steps``.

    The rough path of each step is the lift of the driver on ``subintervals``
    sub-steps. Returns {"table": (h, error, order_estimate), "order",
    "r_squared", "degree"}.
    """
    rule = config.QUADRATURE_RULE if rule is None else rule
    steps = 0.1 * 2.0 ** -np.arange(6) if steps is None else np.asarray(steps, dtype=float)
    eta = _point(eta, False)
    d = f.alphabet_size

    def rhs(t, y):
        v = provider.velocity(t)
        return sum(f.value(a, y) * v[a] for a in range(d))

    errors = []
    for h in steps:
        ref = solve_ivp(rhs, (0.0, h), eta, method="DOP853", rtol=rtol, atol=1e-15).y[:, -1]
        grid = Grid.uniform(h, subintervals)
        X = lift_smooth(provider.get_driver(grid, rule), N)
        step = bseries_driven_step(f, X, eta, grid.times[-1], grid.times[0], N)
        errors.append(float(np.linalg.norm(eta + step - ref)))

    fit = estimate_order(steps, errors)
    log(f"Local order study, degree {N}: slope {fit['order']:.3f} over {len(steps)} steps")
    return {"table": order_table(steps, errors), "order": fit["order"], "r_squared": fit["r_squared"], "degree": N}
