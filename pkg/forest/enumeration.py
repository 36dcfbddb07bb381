"""
Enumeration of canonical trees and forests by degree.

Counts are computed first with the Euler transform (labeled rooted trees
t_n = d * f_{n-1}, forests f = multiset transform of t) so an oversized
request fails before anything is built.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb

import config
from errors import ResourceLimitError

from .trees import Forest, Tree, symmetry_factor, tree_factorial


@lru_cache(maxsize=None)
def _counts(max_degree: int, alphabet_size: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    trees = [0] * (max_degree + 1)
    forests = [1] + [0] * max_degree
    for n in range(1, max_degree + 1):
        trees[n] = alphabet_size * forests[n - 1]
        # multiset transform, recomputed up to n with the new tree count
        f = [1] + [0] * n
        for k in range(1, n + 1):
            if trees[k] == 0:
                continue
            nxt = f[:]
            for m in range(k, n + 1):
                total = 0
                for j in range(1, m // k + 1):
                    # choose j copies (with repetition) among trees[k] shapes
                    total += comb(trees[k] + j - 1, j) * f[m - j * k]
                nxt[m] = f[m] + total
            f = nxt
        forests[n] = f[n]
    return tuple(trees), tuple(forests)


def count_trees(degree: int, alphabet_size: int) -> int:
    return _counts(degree, alphabet_size)[0][degree]


def count_forests(max_degree: int, alphabet_size: int, include_empty: bool = False) -> int:
    _, forests = _counts(max_degree, alphabet_size)
    return sum(forests) - (0 if include_empty else 1)


def _check_cap(max_degree: int, alphabet_size: int, cap: int | None) -> None:
    if max_degree < 0:
        raise ValueError(f"max_degree must be >= 0, got {max_degree}")
    if alphabet_size < 1:
        raise ValueError(f"alphabet_size must be >= 1, got {alphabet_size}")
    cap = config.MAX_FOREST_COUNT if cap is None else cap
    n = count_forests(max_degree, alphabet_size, include_empty=True)
    if n > cap:
        raise ResourceLimitError(
            f"{n} forests up to degree {max_degree} over {alphabet_size} labels exceeds cap {cap}"
        )


@lru_cache(maxsize=None)
def _trees_by_degree(max_degree: int, alphabet_size: int) -> tuple[tuple[Tree, ...], ...]:
    levels: list[tuple[Tree, ...]] = [()]
    pool: list[Tree] = []

    @lru_cache(maxsize=None)
    def forests_of(m: int, start: int) -> tuple[tuple[Tree, ...], ...]:
        # multisets of degree m drawn from pool[start:], non-decreasing index
        if m == 0:
            return ((),)
        out = []
        for idx in range(start, len(pool)):
            t = pool[idx]
            if t.degree > m:
                continue
            for rest in forests_of(m - t.degree, idx):
                out.append((t,) + rest)
        return tuple(out)

    for n in range(1, max_degree + 1):
        forests_of.cache_clear()
        children = forests_of(n - 1, 0)
        level = sorted({Tree(a, ch) for a in range(alphabet_size) for ch in children})
        levels.append(tuple(level))
        pool.extend(level)
    return tuple(levels)


def enumerate_trees(max_degree: int, alphabet_size: int = 1, cap: int | None = None) -> list[Tree]:
    """All canonical trees of degree 1..max_degree, degree-major then canonical."""
    _check_cap(max_degree, alphabet_size, cap)
    levels = _trees_by_degree(max_degree, alphabet_size)
    return [t for level in levels for t in level]


def trees_of_degree(n: int, alphabet_size: int = 1) -> list[Tree]:
    if n < 1:
        return []
    _check_cap(n, alphabet_size, None)
    return list(_trees_by_degree(n, alphabet_size)[n])


def enumerate_forests(
    max_degree: int,
    alphabet_size: int = 1,
    include_empty: bool = False,
    cap: int | None = None,
) -> list[Forest]:
    """All canonical forests of degree <= max_degree, each once, sorted by (degree, key)."""
    _check_cap(max_degree, alphabet_size, cap)
    pool = enumerate_trees(max_degree, alphabet_size, cap)

    out: list[Forest] = []

    def extend(prefix: tuple[Tree, ...], start: int, budget: int) -> None:
        out.append(Forest(prefix))
        for idx in range(start, len(pool)):
            t = pool[idx]
            if t.degree <= budget:
                extend(prefix + (t,), idx, budget - t.degree)

    extend((), 0, max_degree)
    forests = sorted(out)
    if not include_empty:
        forests = forests[1:]
    return forests


def weighted_tree_sum(m: int) -> Fraction:
    """Sum over unlabeled m-vertex trees of 1/(sigma * tree factorial)."""
    return sum(
        (Fraction(1, symmetry_factor(t) * tree_factorial(t)) for t in trees_of_degree(m, 1)),
        Fraction(0),
    )
