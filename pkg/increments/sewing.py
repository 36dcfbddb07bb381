"""
The sewing map on a grid.

g = delta f + Lambda(delta g), where delta f is the limit of Riemann sums of g.
On a grid the limit is the sum over the finest partition, so

    (delta f)_{t_i t_j} = sum_{k=j}^{i-1} g_{t_{k+1} t_k}.

For a closed 3-increment h the same construction gives Lambda h directly:
the unique L with delta L = h whose adjacent values L_{t_{k+1} t_k} are
prescribed (zero for Lambda itself).
"""

from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np
import pandas as pd

from errors import HypothesisError
from metrics.report import log

from .grid import Grid
from .increment import Increment2, Increment3, coboundary1, coboundary2
from .norms import holder_precheck


class SewResult(NamedTuple):
    path_increment: Increment2
    lambda_part: Increment2


def reconstruct_path(g: Increment2) -> np.ndarray:
    """Path f with f_0 = 0 whose increments are the finest Riemann sums of g."""
    n = g.grid.size
    adjacent = g.values[np.arange(1, n), np.arange(n - 1)]
    f = np.zeros((n, g.dim))
    f[1:] = np.cumsum(adjacent, axis=0)
    return f


def sew(g: Increment2, mu: float, check: bool = True) -> SewResult:
    """Split g into delta f + Lambda(delta g)."""
    if mu <= 1:
        raise HypothesisError(f"sewing needs mu > 1, got {mu}")
    if check and g.grid.intervals >= 4:
        fit = holder_precheck(coboundary2(g), mu)
        if not fit["ok"]:
            log(f"Warning: delta g decays with order {fit['order']:.3g}, sewing needs {mu:g}")
    df = coboundary1(reconstruct_path(g), g.grid)
    return SewResult(path_increment=df, lambda_part=g - df)


def sew_closed(h: Increment3, local: np.ndarray | None = None) -> Increment2:
    """
    L with delta L = h and L_{t_{k+1} t_k} = local[k].

    h must be closed (delta h = 0) for the identity to hold on every triple;
    with local = None this is Lambda h.
    """
    n = h.grid.size
    d = h.adjacent()                       # (n-1, n, dim), d[k, j] = h(k+1, k, j)
    acc = np.zeros((n, n, h.dim))
    acc[1:] = np.cumsum(d, axis=0)         # acc[i, j] = sum_{j < k < i} h(k+1, k, j)
    if local is not None:
        loc = np.asarray(local, dtype=float).reshape(n - 1, -1)
        p = np.zeros((n, loc.shape[1]))
        p[1:] = np.cumsum(loc, axis=0)
        acc = acc + (p[:, None, :] - p[None, :, :])
    return Increment2(h.grid, acc)


def sew_refinement(
    germ: Callable[[Grid], Increment2],
    grid: Grid,
    mu: float,
    levels: int = 4,
) -> pd.DataFrame:
    """
    Dyadic refinement study of delta f.

    germ(grid) builds g on a grid; each level halves the step. Differences are
    measured on the pairs of the coarsest grid.
    """
    if mu <= 1:
        raise HypothesisError(f"sewing needs mu > 1, got {mu}")
    rows = []
    previous = None
    g_grid = grid
    for level in range(levels + 1):
        stride = 2 ** level
        df = sew(germ(g_grid), mu, check=False).path_increment
        coarse = df.values[::stride, ::stride]
        diff = np.nan if previous is None else float(np.max(np.abs(coarse - previous)))
        rows.append({"level": level, "intervals": g_grid.intervals, "max_change": diff})
        previous = coarse
        if level < levels:
            g_grid = g_grid.refine()
    out = pd.DataFrame(rows)
    out["rate"] = out["max_change"] / out["max_change"].shift(1)
    out["expected_rate"] = 2.0 ** (-(mu - 1.0))
    return out
