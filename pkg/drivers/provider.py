"""
Smooth driving paths and the providers that build them.

To add a new driver source:
  1. Subclass DriverProvider
  2. Implement get_driver()
  3. Register it in get_provider()
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from pathlib import Path

import numpy as np
import pandas as pd

from increments.grid import Grid

RULES = ("simpson", "trapezoid")


class SmoothDriver:
    """d component paths x^a sampled on a grid, plus the quadrature rule to lift them with."""

    def __init__(
        self,
        grid: Grid,
        paths: np.ndarray,
        derivatives: np.ndarray | None = None,
        rule: str = "simpson",
    ) -> None:
        x = np.asarray(paths, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        if x.shape[0] != grid.size:
            raise ValueError(f"Driver has {x.shape[0]} samples, grid has {grid.size} points")
        if rule not in RULES:
            raise ValueError(f"Unknown quadrature rule '{rule}'. Available: {list(RULES)}")
        if derivatives is not None:
            derivatives = np.asarray(derivatives, dtype=float).reshape(x.shape)
        self.grid = grid
        self.paths = x
        self.rule = rule
        self._derivatives = derivatives

    @property
    def alphabet_size(self) -> int:
        return self.paths.shape[1]

    @property
    def derivatives(self) -> np.ndarray:
        """dx^a/dt on the grid; second-order finite differences when not supplied."""
        if self._derivatives is None:
            self._derivatives = np.gradient(self.paths, self.grid.times, axis=0, edge_order=2)
        return self._derivatives

    def scaled(self, lam: float) -> SmoothDriver:
        d = None if self._derivatives is None else lam * self._derivatives
        return SmoothDriver(self.grid, lam * self.paths, d, self.rule)

    def with_rule(self, rule: str) -> SmoothDriver:
        return SmoothDriver(self.grid, self.paths, self._derivatives, rule)

    def to_frame(self) -> pd.DataFrame:
        df = pd.DataFrame(self.paths, columns=[f"x{a}" for a in range(self.alphabet_size)])
        df.insert(0, "t", self.grid.times)
        return df

    def __repr__(self) -> str:
        return f"SmoothDriver(d={self.alphabet_size}, {self.grid!r}, rule={self.rule})"


class DriverProvider(ABC):
    """Abstract interface for building a smooth driver on a grid."""

    @abstractmethod
    def get_driver(self, grid: Grid | None, rule: str = "simpson") -> SmoothDriver:
        ...

    def velocity(self, t: float) -> np.ndarray:
        """dx/dt at an arbitrary time, for reference solvers."""
        raise ValueError(f"{type(self).__name__} has no closed-form velocity")


class IdentityProvider(DriverProvider):
    """x^a_t = t for every label."""

    def __init__(self, alphabet_size: int = 1) -> None:
        self.alphabet_size = alphabet_size

    def get_driver(self, grid: Grid | None, rule: str = "simpson") -> SmoothDriver:
        if grid is None:
            raise ValueError("The identity driver needs a grid")
        x = np.repeat(grid.times[:, None], self.alphabet_size, axis=1)
        return SmoothDriver(grid, x, np.ones_like(x), rule)

    def velocity(self, t: float) -> np.ndarray:
        return np.ones(self.alphabet_size)


class PolynomialProvider(DriverProvider):
    """x^a_t = sum_k c[a][k] t^k with exact derivatives."""

    def __init__(self, coefficients: list[list[float]]) -> None:
        if not coefficients:
            raise ValueError("At least one component polynomial is required")
        self.polys = [np.polynomial.Polynomial(c) for c in coefficients]

    def get_driver(self, grid: Grid | None, rule: str = "simpson") -> SmoothDriver:
        if grid is None:
            raise ValueError("A polynomial driver needs a grid")
        x = np.column_stack([p(grid.times) for p in self.polys])
        dx = np.column_stack([p.deriv()(grid.times) for p in self.polys])
        return SmoothDriver(grid, x, dx, rule)

    def velocity(self, t: float) -> np.ndarray:
        return np.array([p.deriv()(t) for p in self.polys])


class CsvProvider(DriverProvider):
    """Samples from a CSV with a 't' column and one column per label."""

    def __init__(self, path: str | Path) -> None:
        self.path = Path(path)

    def get_driver(self, grid: Grid | None = None, rule: str = "simpson") -> SmoothDriver:
        df = pd.read_csv(self.path)
        if "t" not in df.columns:
            raise ValueError(f"{self.path} has no 't' column")
        file_grid = Grid(df["t"].to_numpy())
        if grid is not None and grid != file_grid:
            raise ValueError(f"{self.path} is sampled on a different grid than requested")
        x = df.drop(columns="t").to_numpy(dtype=float)
        return SmoothDriver(file_grid, x, None, rule)


# --- Factory --------------------------------------------------------------- #

def get_provider(name: str = "identity", **kwargs) -> DriverProvider:
    """Return the provider instance matching *name*."""
    providers = {
        "identity": IdentityProvider,
        "polynomial": PolynomialProvider,
        "csv": CsvProvider,
    }
    if name not in providers:
        raise ValueError(
            f"Unknown provider '{name}'. Available: {list(providers)}"
        )
    return providers[name](**kwargs)
