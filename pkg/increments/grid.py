"""Time grids on [0, T]."""

from __future__ import annotations

import numpy as np

import config
from errors import ResourceLimitError


class Grid:
    """Strictly increasing times t_0 < ... < t_M with M >= 2."""

    def __init__(self, times, max_intervals: int | None = None) -> None:
        t = np.array(times, dtype=float)
        if t.ndim != 1 or t.size < 3:
            raise ValueError(f"A grid needs at least 3 points, got shape {t.shape}")
        if not np.all(np.diff(t) > 0):
            raise ValueError("Grid times must be strictly increasing")
        cap = config.MAX_GRID_INTERVALS if max_intervals is None else max_intervals
        if t.size - 1 > cap:
            raise ResourceLimitError(f"Grid with {t.size - 1} intervals exceeds cap {cap}")
        self.times = t
        self.times.setflags(write=False)

    @classmethod
    def uniform(cls, horizon: float = 1.0, intervals: int = 256, start: float = 0.0) -> Grid:
        if horizon <= start:
            raise ValueError(f"horizon must exceed start, got [{start}, {horizon}]")
        return cls(np.linspace(start, horizon, intervals + 1))

    @property
    def size(self) -> int:
        return self.times.size

    @property
    def intervals(self) -> int:
        return self.times.size - 1

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    @property
    def steps(self) -> np.ndarray:
        return np.diff(self.times)

    @property
    def is_uniform(self) -> bool:
        h = self.steps
        return bool(np.allclose(h, h[0], rtol=1e-12, atol=0.0))

    @property
    def is_dyadic(self) -> bool:
        m = self.intervals
        return self.is_uniform and m & (m - 1) == 0

    def separations(self) -> np.ndarray:
        """Matrix of t_i - t_j."""
        return self.times[:, None] - self.times[None, :]

    def refine(self) -> Grid:
        """Insert every midpoint."""
        mids = 0.5 * (self.times[:-1] + self.times[1:])
        t = np.empty(2 * self.size - 1)
        t[0::2] = self.times
        t[1::2] = mids
        return Grid(t)

    def restrict(self, i0: int, i1: int) -> Grid:
        if not 0 <= i0 < i1 < self.size or i1 - i0 < 2:
            raise ValueError(f"Cannot restrict a {self.size}-point grid to [{i0}, {i1}]")
        return Grid(self.times[i0 : i1 + 1])

    def index_of(self, t: float) -> int:
        i = int(np.argmin(np.abs(self.times - t)))
        if not np.isclose(self.times[i], t, rtol=0, atol=1e-12 * max(1.0, abs(t))):
            raise ValueError(f"{t} is not a grid point")
        return i

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Grid) and self.size == other.size and np.array_equal(self.times, other.times)

    def __hash__(self) -> int:
        return hash((self.size, float(self.times[0]), float(self.times[-1])))

    def __repr__(self) -> str:
        return f"Grid(M={self.intervals}, T={self.horizon:g}, uniform={self.is_uniform})"
