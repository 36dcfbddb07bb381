"""
Coproduct on forests of labeled rooted trees.

Convention: trunk first. In every term L ⊗ R the left slot holds the part
still attached to the root (a single tree, or the unit) and the right slot the
forest that was cut away, so that

    delta X^tau_{tus} = sum c * X^L_{tu} X^R_{us}.

Two independent constructions are provided: the recursion
Delta(tau) = 1 ⊗ tau + (B+^a ⊗ id) Delta(B-^a tau) and the enumeration of
admissible cuts. The reduced coproduct drops the two primitive terms.
"""

from __future__ import annotations

import json
from collections import defaultdict
from functools import lru_cache
from itertools import product
from typing import Iterator

import pandas as pd

from forest.enumeration import enumerate_forests
from forest.series import ForestSeries
from forest.trees import (
    UNIT, Forest, Tree, as_forest, forest_factorial, forest_symmetry, forest_to_json, graft,
)

Pair = tuple[Forest, Forest]


class TensorSeries:
    """Integer combination of forest ⊗ forest terms with no stored zeros."""

    def __init__(self, terms: dict[Pair, int] | None = None) -> None:
        self.terms: dict[Pair, int] = {}
        for pair, c in (terms or {}).items():
            self.add(pair[0], pair[1], c)

    def add(self, left: Forest, right: Forest, c: int = 1) -> None:
        key = (left, right)
        v = self.terms.get(key, 0) + c
        if v == 0:
            self.terms.pop(key, None)
        else:
            self.terms[key] = v

    def coefficient(self, left: Tree | Forest, right: Tree | Forest) -> int:
        return self.terms.get((as_forest(left), as_forest(right)), 0)

    def items(self) -> Iterator[tuple[Forest, Forest, int]]:
        for (left, right), c in sorted(self.terms.items()):
            yield left, right, c

    def __add__(self, other: TensorSeries) -> TensorSeries:
        out = TensorSeries(self.terms)
        for (left, right), c in other.terms.items():
            out.add(left, right, c)
        return out

    def __sub__(self, other: TensorSeries) -> TensorSeries:
        return self + other.scale(-1)

    def scale(self, c: int) -> TensorSeries:
        return TensorSeries({k: v * c for k, v in self.terms.items()})

    def __mul__(self, other: TensorSeries) -> TensorSeries:
        out = TensorSeries()
        for (l1, r1), a in self.terms.items():
            for (l2, r2), b in other.terms.items():
                out.add(l1 * l2, r1 * r2, a * b)
        return out

    def __eq__(self, other: object) -> bool:
        return isinstance(other, TensorSeries) and self.terms == other.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def to_json(self) -> list:
        return [[c, forest_to_json(left), forest_to_json(right)] for left, right, c in self.items()]

    def __repr__(self) -> str:
        if not self.terms:
            return "TensorSeries(0)"
        body = " + ".join(f"{c}*({l})⊗({r})" for l, r, c in self.items())
        return f"TensorSeries({body})"


def primitive(f: Forest) -> TensorSeries:
    return TensorSeries({(UNIT, f): 1, (f, UNIT): 1})


# --------------------------------------------------------------------------- #
#  Full coproduct
# --------------------------------------------------------------------------- #

@lru_cache(maxsize=None)
def _tree_coproduct(t: Tree) -> tuple[tuple[Forest, Forest, int], ...]:
    out = TensorSeries({(UNIT, Forest((t,))): 1})
    below = _forest_coproduct(Forest(t.children))
    for left, right, c in below.items():
        out.add(Forest((graft(left, t.label),)), right, c)
    return tuple(out.items())


def _forest_coproduct(f: Forest) -> TensorSeries:
    out = TensorSeries({(UNIT, UNIT): 1})
    for t in f.trees:
        out = out * TensorSeries({(l, r): c for l, r, c in _tree_coproduct(t)})
    return out


def coproduct(x: Tree | Forest) -> TensorSeries:
    """Delta by the grafting recursion, extended multiplicatively to forests."""
    return _forest_coproduct(as_forest(x))


def _flatten(t: Tree) -> tuple[list[int], list[int], list[list[int]]]:
    node_labels: list[int] = []
    parents: list[int] = []
    kids: list[list[int]] = []

    def visit(node: Tree, parent: int) -> int:
        idx = len(node_labels)
        node_labels.append(node.label)
        parents.append(parent)
        kids.append([])
        for c in node.children:
            kids[idx].append(visit(c, idx))
        return idx

    visit(t, -1)
    return node_labels, parents, kids


def coproduct_by_cuts(t: Tree) -> TensorSeries:
    """Delta(t) = 1 ⊗ t + sum over admissible cuts of trunk ⊗ pruned forest."""
    node_labels, parents, kids = _flatten(t)
    n = len(node_labels)

    def ancestors(i: int) -> set[int]:
        out = set()
        while parents[i] >= 0:
            i = parents[i]
            out.add(i)
        return out

    anc = [ancestors(i) for i in range(n)]

    def rebuild(i: int, cut: set[int]) -> Tree:
        return Tree(node_labels[i], tuple(rebuild(k, cut) for k in kids[i] if k not in cut))

    out = TensorSeries({(UNIT, Forest((t,))): 1})
    edges = list(range(1, n))  # edge to the parent of each non-root node
    for mask in product((False, True), repeat=len(edges)):
        cut = {e for e, on in zip(edges, mask) if on}
        # a root-to-leaf path meets at most one cut edge
        if any(anc[i] & cut for i in cut):
            continue
        trunk = Forest((rebuild(0, cut),))
        pruned = Forest(tuple(rebuild(i, cut) for i in cut))
        out.add(trunk, pruned, 1)
    return out


# --------------------------------------------------------------------------- #
#  Reduced coproduct and counting functions
# --------------------------------------------------------------------------- #

@lru_cache(maxsize=None)
def _reduced(f: Forest) -> tuple[tuple[Forest, Forest, int], ...]:
    if len(f) == 1:
        t = f.trees[0]
        out = coproduct(t) - primitive(f)
        return tuple(out.items())

    rho = Forest(f.trees[:1])
    sigma = Forest(f.trees[1:])
    d_rho = TensorSeries({(l, r): c for l, r, c in _reduced(rho)})
    d_sigma = TensorSeries({(l, r): c for l, r, c in _reduced(sigma)})
    out = (
        d_sigma * d_rho
        + primitive(sigma) * d_rho
        + primitive(rho) * d_sigma
        + TensorSeries({(rho, sigma): 1})
        + TensorSeries({(sigma, rho): 1})
    )
    return tuple(out.items())


def reduced_coproduct(x: Tree | Forest) -> TensorSeries:
    """Delta' on trees and, through the product rule, on forests."""
    f = as_forest(x)
    if f.is_unit():
        raise ValueError("Reduced coproduct is not defined on the empty forest")
    return TensorSeries({(l, r): c for l, r, c in _reduced(f)})


def reduced_coproduct_recursive(t: Tree) -> TensorSeries:
    """Delta'(tau) = •_a ⊗ B-^a(tau) + (B+^a ⊗ id) Delta'(B-^a tau)."""
    children = Forest(t.children)
    out = TensorSeries()
    if children.is_unit():
        return out
    out.add(Forest((Tree(t.label),)), children, 1)
    if children.degree > 1:
        for left, right, c in reduced_coproduct(children).items():
            out.add(Forest((graft(left, t.label),)), right, c)
    return out


def count_c_prime(sigma: Tree | Forest, tau: Tree | Forest, rho: Tree | Forest) -> int:
    """Coefficient of tau ⊗ rho in Delta'(sigma)."""
    s = as_forest(sigma)
    if s.is_unit():
        return 0
    return reduced_coproduct(s).coefficient(tau, rho)


def count_c_tilde(k1: Tree | Forest, k2: Tree | Forest, k3: Tree | Forest) -> int:
    if as_forest(k3).is_unit():
        return int(as_forest(k1) == as_forest(k2))
    return count_c_prime(k1, k2, k3)


# --------------------------------------------------------------------------- #
#  Counit and coassociativity
# --------------------------------------------------------------------------- #

def counit_left(ts: TensorSeries) -> ForestSeries:
    """(epsilon ⊗ id) applied to a tensor series."""
    return ForestSeries({r: c for l, r, c in ts.items() if l.is_unit()})


def counit_right(ts: TensorSeries) -> ForestSeries:
    return ForestSeries({l: c for l, r, c in ts.items() if r.is_unit()})


def coassociativity_defect(x: Tree | Forest, reduced: bool = False) -> dict[tuple[Forest, Forest, Forest], int]:
    """Nonzero terms of (D ⊗ id)D - (id ⊗ D)D with D = Delta or Delta'."""
    f = as_forest(x)
    split = reduced_coproduct if reduced else coproduct

    def safe_split(g: Forest) -> TensorSeries:
        if reduced and g.degree <= 1:
            return TensorSeries()
        return split(g)

    outer = safe_split(f)
    acc: dict[tuple[Forest, Forest, Forest], int] = defaultdict(int)
    for left, right, c in outer.items():
        for l1, l2, c2 in safe_split(left).items():
            acc[(l1, l2, right)] += c * c2
        for r1, r2, c2 in safe_split(right).items():
            acc[(left, r1, r2)] -= c * c2
    return {k: v for k, v in acc.items() if v != 0}


# --------------------------------------------------------------------------- #
#  Tables
# --------------------------------------------------------------------------- #

def coproduct_table(max_degree: int, alphabet_size: int = 1) -> pd.DataFrame:
    """One row per non-empty forest: canonical JSON, degree, factorial, symmetry and Delta as JSON."""
    rows = []
    for f in enumerate_forests(max_degree, alphabet_size):
        rows.append({
            "forest": json.dumps(forest_to_json(f), separators=(",", ":")),
            "degree": f.degree,
            "tree_factorial": forest_factorial(f),
            "symmetry": forest_symmetry(f),
            "coproduct": json.dumps(coproduct(f).to_json(), separators=(",", ":")),
        })
    return pd.DataFrame(rows)
