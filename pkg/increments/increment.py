"""
Grid increments and the coboundary.

A 2-increment stores g_{t_i t_j} densely for i > j in an (n, n, dim) array;
entries with i <= j are kept at zero. A 3-increment is never stored: it is a
rule evaluating h_{t_i t_k t_j} on integer index arrays, and only triples with
i > k > j are meaningful.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .grid import Grid

IndexFn = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]


def _lower_mask(n: int) -> np.ndarray:
    return np.tril(np.ones((n, n), dtype=bool), -1)


def _as_path(path, grid: Grid) -> np.ndarray:
    p = np.asarray(path, dtype=float)
    if p.ndim == 1:
        p = p[:, None]
    if p.ndim != 2 or p.shape[0] != grid.size:
        raise ValueError(f"Path shape {p.shape} does not match a grid of {grid.size} points")
    return p


def _check_dims(a: int, b: int) -> None:
    if a != b and a != 1 and b != 1:
        raise ValueError(f"Dimension mismatch: {a} vs {b}")


class Increment2:
    """g_{ts} on grid pairs, values in R^dim."""

    def __init__(self, grid: Grid, values: np.ndarray) -> None:
        v = np.asarray(values, dtype=float)
        if v.ndim == 2:
            v = v[:, :, None]
        n = grid.size
        if v.shape[:2] != (n, n):
            raise ValueError(f"Values of shape {v.shape} do not match a grid of {n} points")
        self.grid = grid
        self.values = np.where(_lower_mask(n)[:, :, None], v, 0.0)

    @classmethod
    def zeros(cls, grid: Grid, dim: int = 1) -> Increment2:
        return cls(grid, np.zeros((grid.size, grid.size, dim)))

    @classmethod
    def unit(cls, grid: Grid) -> Increment2:
        """The unit e with e_{ts} = 1 (off the diagonal)."""
        return cls(grid, np.ones((grid.size, grid.size, 1)))

    @classmethod
    def from_function(cls, grid: Grid, fn: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> Increment2:
        """Sample fn(t, s) on all pairs; fn receives broadcast (n, n) time arrays."""
        t = grid.times[:, None] * np.ones((1, grid.size))
        s = grid.times[None, :] * np.ones((grid.size, 1))
        return cls(grid, np.asarray(fn(t, s), dtype=float))

    @property
    def dim(self) -> int:
        return self.values.shape[2]

    def scalar(self) -> np.ndarray:
        if self.dim != 1:
            raise ValueError(f"Increment has dim {self.dim}, not scalar")
        return self.values[:, :, 0]

    def component(self, k: int) -> Increment2:
        return Increment2(self.grid, self.values[:, :, k : k + 1])

    def restrict(self, i0: int, i1: int) -> Increment2:
        return Increment2(self.grid.restrict(i0, i1), self.values[i0 : i1 + 1, i0 : i1 + 1])

    def max_abs(self) -> float:
        return float(np.max(np.linalg.norm(self.values, axis=2)))

    def _other(self, other) -> np.ndarray:
        if isinstance(other, Increment2):
            if other.grid != self.grid:
                raise ValueError("Increments live on different grids")
            _check_dims(self.dim, other.dim)
            return other.values
        return np.asarray(other, dtype=float)

    def __add__(self, other) -> Increment2:
        return Increment2(self.grid, self.values + self._other(other))

    def __sub__(self, other) -> Increment2:
        return Increment2(self.grid, self.values - self._other(other))

    def __neg__(self) -> Increment2:
        return Increment2(self.grid, -self.values)

    def __mul__(self, c) -> Increment2:
        if isinstance(c, Increment2):
            raise TypeError("Use circle() or exterior_product() for products of increments")
        return Increment2(self.grid, self.values * np.asarray(c, dtype=float))

    __rmul__ = __mul__

    def circle(self, other: Increment2) -> Increment2:
        """(a ∘ b)_{ts} = a_{ts} b_{ts}."""
        return Increment2(self.grid, self.values * self._other(other))

    def __repr__(self) -> str:
        return f"Increment2({self.grid!r}, dim={self.dim})"


class Increment3:
    """h_{tus} evaluated lazily from grid indices (i, k, j) with i > k > j."""

    def __init__(self, grid: Grid, dim: int, fn: IndexFn) -> None:
        self.grid = grid
        self.dim = dim
        self._fn = fn

    @classmethod
    def zeros(cls, grid: Grid, dim: int = 1) -> Increment3:
        def fn(i, k, j):
            shape = np.broadcast_shapes(np.shape(i), np.shape(k), np.shape(j))
            return np.zeros(shape + (dim,))

        return cls(grid, dim, fn)

    def evaluate(self, i, k, j) -> np.ndarray:
        i, k, j = np.asarray(i), np.asarray(k), np.asarray(j)
        out = np.asarray(self._fn(i, k, j), dtype=float)
        valid = (i > k) & (k > j)
        return np.where(valid[..., None], out, 0.0)

    def slice(self, i: int) -> np.ndarray:
        """Values h_{t_i, t_k, t_j} as an (n, n, dim) array over (k, j)."""
        n = self.grid.size
        return self.evaluate(i, np.arange(n)[:, None], np.arange(n)[None, :])

    def block(self, i: int) -> np.ndarray:
        """Like slice(i) but restricted to k, j < i, shape (i, i, dim)."""
        return self.evaluate(i, np.arange(i)[:, None], np.arange(i)[None, :])

    def adjacent(self) -> np.ndarray:
        """D[k, j] = h_{t_{k+1}, t_k, t_j}, shape (n-1, n, dim)."""
        n = self.grid.size
        k = np.arange(n - 1)[:, None]
        return self.evaluate(k + 1, k, np.arange(n)[None, :])

    def max_abs(self) -> float:
        best = 0.0
        for i in range(2, self.grid.size):
            best = max(best, float(np.max(np.linalg.norm(self.block(i), axis=2))))
        return best

    def _combine(self, other, op) -> Increment3:
        if isinstance(other, Increment3):
            if other.grid != self.grid:
                raise ValueError("Increments live on different grids")
            _check_dims(self.dim, other.dim)
            f, g = self._fn, other._fn
            return Increment3(self.grid, max(self.dim, other.dim), lambda i, k, j: op(f(i, k, j), g(i, k, j)))
        raise TypeError(f"Cannot combine Increment3 with {type(other).__name__}")

    def __add__(self, other: Increment3) -> Increment3:
        return self._combine(other, np.add)

    def __sub__(self, other: Increment3) -> Increment3:
        return self._combine(other, np.subtract)

    def circle(self, other: Increment3) -> Increment3:
        return self._combine(other, np.multiply)

    def __neg__(self) -> Increment3:
        f = self._fn
        return Increment3(self.grid, self.dim, lambda i, k, j: -f(i, k, j))

    def __mul__(self, c) -> Increment3:
        f = self._fn
        c = np.asarray(c, dtype=float)
        return Increment3(self.grid, self.dim, lambda i, k, j: f(i, k, j) * c)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"Increment3({self.grid!r}, dim={self.dim})"


# --------------------------------------------------------------------------- #
#  Coboundary and products
# --------------------------------------------------------------------------- #

def coboundary1(path, grid: Grid) -> Increment2:
    """(delta f)_{ts} = f_t - f_s."""
    p = _as_path(path, grid)
    return Increment2(grid, p[:, None, :] - p[None, :, :])


def coboundary2(g: Increment2) -> Increment3:
    """(delta g)_{tus} = g_{ts} - g_{tu} - g_{us}."""
    v = g.values
    return Increment3(g.grid, g.dim, lambda i, k, j: v[i, j] - v[i, k] - v[k, j])


def exterior_product(g, h):
    """
    Exterior product of increments of orders 1 and 2.

    Increment2 x Increment2 -> Increment3: (gh)_{tus} = g_{tu} h_{us}
    path x Increment2       -> Increment2: (fh)_{ts}  = f_t h_{ts}
    Increment2 x path       -> Increment2: (hf)_{ts}  = h_{ts} f_s
    path x path             -> path, pointwise
    Paths are (n,) or (n, dim) arrays sampled on the grid of the other factor.
    """
    if isinstance(g, Increment2) and isinstance(h, Increment2):
        if g.grid != h.grid:
            raise ValueError("Increments live on different grids")
        _check_dims(g.dim, h.dim)
        a, b = g.values, h.values
        return Increment3(g.grid, max(g.dim, h.dim), lambda i, k, j: a[i, k] * b[k, j])
    if isinstance(h, Increment2):
        f = _as_path(g, h.grid)
        _check_dims(f.shape[1], h.dim)
        return Increment2(h.grid, f[:, None, :] * h.values)
    if isinstance(g, Increment2):
        f = _as_path(h, g.grid)
        _check_dims(f.shape[1], g.dim)
        return Increment2(g.grid, g.values * f[None, :, :])
    a = np.asarray(g, dtype=float)
    b = np.asarray(h, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    if b.ndim == 1:
        b = b[:, None]
    _check_dims(a.shape[1], b.shape[1])
    return a * b


def circle_product(a: Increment2, b: Increment2) -> Increment2:
    return a.circle(b)


def unit(grid: Grid) -> Increment2:
    return Increment2.unit(grid)
