"""
Hölder-type norms of increments, measured over grid points only.

The 3-increment norm is a surrogate: instead of the infimum over all
decompositions h = sum h_i, it takes the best single-term split
|h_{tus}| <= C |u-s|^rho |t-u|^(mu-rho) over rho = j*mu/RHO_SPLITS.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

import config
from metrics.report import estimate_order

from .increment import Increment2, Increment3


@dataclass(frozen=True)
class HolderReport:
    mu: float
    norm: float
    argmax: tuple[int, ...]
    rho: float | None = None

    def __float__(self) -> float:
        return self.norm


def holder_norm2(g: Increment2, mu: float) -> HolderReport:
    """sup over grid pairs of |g_{ts}| / (t-s)^mu."""
    if mu <= 0:
        raise ValueError(f"mu must be positive, got {mu}")
    n = g.grid.size
    sep = g.grid.separations()
    mask = np.tril(np.ones((n, n), dtype=bool), -1)
    mag = np.linalg.norm(g.values, axis=2)
    ratio = np.zeros((n, n))
    ratio[mask] = mag[mask] / sep[mask] ** mu
    idx = np.unravel_index(int(np.argmax(ratio)), ratio.shape)
    return HolderReport(mu=mu, norm=float(ratio[idx]), argmax=(int(idx[0]), int(idx[1])))


def _split_sups(h: Increment3, exps: list[tuple[float, float]]) -> list[tuple[float, tuple[int, int, int]]]:
    t = h.grid.times
    best = [(0.0, (0, 0, 0)) for _ in exps]
    for i in range(2, h.grid.size):
        mag = np.linalg.norm(h.block(i), axis=2)
        if not np.any(mag):
            continue
        u = t[:i, None]
        s = t[None, :i]
        valid = np.tril(np.ones((i, i), dtype=bool), -1)
        left = np.where(valid, u - s, 1.0)
        right = np.where(valid, t[i] - u, 1.0) * np.ones((1, i))
        for e, (a, b) in enumerate(exps):
            ratio = np.where(valid, mag / (left ** a * right ** b), 0.0)
            k = int(np.argmax(ratio))
            val = float(ratio.flat[k])
            if val > best[e][0]:
                kk, jj = np.unravel_index(k, ratio.shape)
                best[e] = (val, (i, int(kk), int(jj)))
    return best


def holder_norm3_split(h: Increment3, gamma: float, rho: float) -> HolderReport:
    """sup |h_{tus}| / (|u-s|^gamma |t-u|^rho)."""
    (val, arg), = _split_sups(h, [(gamma, rho)])
    return HolderReport(mu=gamma + rho, norm=val, argmax=arg, rho=rho)


def holder_norm3(h: Increment3, mu: float, splits: int | None = None) -> HolderReport:
    """Surrogate ||h||_mu: min over rho = j*mu/splits of ||h||_{rho, mu-rho}."""
    if mu <= 1:
        raise ValueError(f"the 3-increment norm is used for mu > 1, got {mu}")
    splits = config.RHO_SPLITS if splits is None else splits
    rhos = [j * mu / splits for j in range(1, splits)]
    sups = _split_sups(h, [(r, mu - r) for r in rhos])
    e = int(np.argmin([v for v, _ in sups]))
    return HolderReport(mu=mu, norm=sups[e][0], argmax=sups[e][1], rho=rhos[e])


def lag_profile(g: Increment2, lags: list[int]) -> np.ndarray:
    """max over i of |g_{t_{i+l}, t_i}| for each lag l."""
    out = []
    for lag in lags:
        if lag < 1 or lag >= g.grid.size:
            raise ValueError(f"lag {lag} outside 1..{g.grid.size - 1}")
        i = np.arange(lag, g.grid.size)
        out.append(float(np.max(np.linalg.norm(g.values[i, i - lag], axis=1))))
    return np.array(out)


def measured_order(g: Increment2, lags: list[int] | None = None) -> dict:
    """
    Hölder order of g read off a log-log fit of the lag profile.

    Assumes a uniform grid; the separation of lag l is l*h.
    """
    if lags is None:
        lags = [2 ** k for k in range(int(np.log2(g.grid.intervals)) - 1)]
    h = float(g.grid.steps[0])
    profile = lag_profile(g, lags)
    fit = estimate_order(np.asarray(lags) * h, profile)
    fit["lags"] = list(lags)
    fit["profile"] = profile.tolist()
    return fit


def lag_profile3(h: Increment3, lags: list[int]) -> np.ndarray:
    """max over t - s = l steps and s < u < t of |h_{tus}|, for each lag l >= 2."""
    n = h.grid.size
    out = []
    for lag in lags:
        if lag < 2 or lag >= n:
            raise ValueError(f"lag {lag} outside 2..{n - 1}")
        j = np.arange(n - lag)[:, None]
        k = j + np.arange(1, lag)[None, :]
        out.append(float(np.max(np.linalg.norm(h.evaluate(j + lag, k, j), axis=-1))))
    return np.array(out)


def measured_order3(h: Increment3, lags: list[int] | None = None) -> dict:
    """Order of h from its lag profile; values below HOLDER_NOISE_FLOOR count as zero."""
    if lags is None:
        lags = [2 ** k for k in range(1, int(np.log2(h.grid.intervals)))]
    step = float(h.grid.steps[0])
    profile = lag_profile3(h, lags)
    kept = np.where(profile > config.HOLDER_NOISE_FLOOR, profile, 0.0)
    fit = estimate_order(np.asarray(lags) * step, kept)
    fit["lags"] = list(lags)
    fit["profile"] = profile.tolist()
    return fit


def holder_precheck(h: Increment3, mu: float, slack: float | None = None) -> dict:
    """
    Does h look like a 3-increment of order mu? Passes when the measured
    order is at least mu - slack. Increments below HOLDER_PRECHECK_FLOOR pass
    unmeasured.
    """
    slack = config.HOLDER_ORDER_SLACK if slack is None else slack
    fit = measured_order3(h)
    order = fit["order"]
    fit["mu"] = mu
    small = max(fit["profile"], default=0.0) <= config.HOLDER_PRECHECK_FLOOR
    fit["ok"] = bool(small or not np.isfinite(order) or order >= mu - slack)
    return fit
