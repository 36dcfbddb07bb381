"""
Labeled rooted trees and forests in canonical form.

A tree is stored with its children sorted by the recursive key
(label, child keys), so equal multisets of children give equal tuples and
trees can be hashed and used as dict keys. Forests are sorted tuples of trees;
the empty forest is the unit.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from math import factorial, prod
from typing import Iterable


@dataclass(frozen=True)
class Tree:
    label: int
    children: tuple[Tree, ...] = field(default=())

    def __post_init__(self) -> None:
        if self.label < 0:
            raise ValueError(f"Labels must be non-negative, got {self.label}")
        ordered = tuple(sorted(self.children, key=lambda t: t.key))
        object.__setattr__(self, "children", ordered)

    @cached_property
    def key(self) -> tuple:
        return (self.label, tuple(c.key for c in self.children))

    @cached_property
    def degree(self) -> int:
        return 1 + sum(c.degree for c in self.children)

    @property
    def sort_key(self) -> tuple:
        return (self.degree, self.key)

    def __lt__(self, other: Tree) -> bool:
        return self.sort_key < other.sort_key

    def __str__(self) -> str:
        if not self.children:
            return f"•{self.label}"
        return "[" + ",".join(str(c) for c in self.children) + f"]{self.label}"

    def __repr__(self) -> str:
        return f"Tree({self})"


@dataclass(frozen=True)
class Forest:
    trees: tuple[Tree, ...] = field(default=())

    def __post_init__(self) -> None:
        object.__setattr__(self, "trees", tuple(sorted(self.trees, key=lambda t: t.key)))

    @classmethod
    def of(cls, *trees: Tree) -> Forest:
        return cls(tuple(trees))

    @cached_property
    def degree(self) -> int:
        return sum(t.degree for t in self.trees)

    @property
    def key(self) -> tuple:
        return tuple(t.key for t in self.trees)

    @property
    def sort_key(self) -> tuple:
        return (self.degree, self.key)

    def is_unit(self) -> bool:
        return not self.trees

    def __len__(self) -> int:
        return len(self.trees)

    def __iter__(self):
        return iter(self.trees)

    def __mul__(self, other: Forest) -> Forest:
        return Forest(self.trees + other.trees)

    def __lt__(self, other: Forest) -> bool:
        return self.sort_key < other.sort_key

    def __str__(self) -> str:
        if not self.trees:
            return "1"
        return " ".join(str(t) for t in self.trees)

    def __repr__(self) -> str:
        return f"Forest({self})"


UNIT = Forest()


def as_forest(x: Tree | Forest) -> Forest:
    return x if isinstance(x, Forest) else Forest((x,))


# --------------------------------------------------------------------------- #
#  Constructors
# --------------------------------------------------------------------------- #

def leaf(a: int = 0) -> Tree:
    return Tree(a)


def graft(children: Forest | Iterable[Tree], a: int) -> Tree:
    """[t1 ... tn]_a; graft of the empty forest is the single vertex •_a."""
    trees = children.trees if isinstance(children, Forest) else tuple(children)
    return Tree(a, trees)


def ungraft(t: Tree, a: int) -> Forest | None:
    """Children forest of t when its root carries label a, None otherwise."""
    if t.label != a:
        return None
    return Forest(t.children)


def canonicalize(t: Tree) -> Tree:
    return Tree(t.label, tuple(canonicalize(c) for c in t.children))


def relabel(t: Tree, mapping: dict[int, int]) -> Tree:
    return Tree(mapping.get(t.label, t.label), tuple(relabel(c, mapping) for c in t.children))


def ladder(n: int, a: int = 0) -> Tree:
    if n < 1:
        raise ValueError(f"Ladder length must be >= 1, got {n}")
    t = Tree(a)
    for _ in range(n - 1):
        t = Tree(a, (t,))
    return t


# --------------------------------------------------------------------------- #
#  Statistics
# --------------------------------------------------------------------------- #

def degree(f: Tree | Forest) -> int:
    return f.degree


def labels(t: Tree) -> set[int]:
    out = {t.label}
    for c in t.children:
        out |= labels(c)
    return out


def tree_factorial(t: Tree) -> int:
    return t.degree * prod(tree_factorial(c) for c in t.children)


def forest_factorial(f: Forest) -> int:
    return prod(tree_factorial(t) for t in f.trees)


def tuple_multiplicity(ts: Iterable[Tree]) -> int:
    """Number of distinct orderings of the tuple: k! / prod n_i!."""
    counts = Counter(ts)
    k = sum(counts.values())
    return factorial(k) // prod(factorial(n) for n in counts.values())


def symmetry_factor(t: Tree) -> int:
    """Label-preserving automorphism count, k!/delta(children) * prod sigma(child)."""
    k = len(t.children)
    if k == 0:
        return 1
    sub = prod(symmetry_factor(c) for c in t.children)
    return factorial(k) // tuple_multiplicity(t.children) * sub


def symmetry_factor_by_multiplicity(t: Tree) -> int:
    """Same quantity via prod n_i! sigma(tau_i)^n_i over distinct children."""
    counts = Counter(t.children)
    return prod(factorial(n) * symmetry_factor_by_multiplicity(c) ** n for c, n in counts.items())


def forest_symmetry(f: Forest) -> int:
    # product convention, no multiset factor
    return prod(symmetry_factor(t) for t in f.trees)


# --------------------------------------------------------------------------- #
#  JSON codec
# --------------------------------------------------------------------------- #

def tree_to_json(t: Tree) -> dict:
    return {"l": t.label, "c": [tree_to_json(c) for c in t.children]}


def tree_from_json(obj: dict) -> Tree:
    try:
        return Tree(int(obj["l"]), tuple(tree_from_json(c) for c in obj.get("c", [])))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"Malformed tree JSON: {obj!r}") from exc


def forest_to_json(f: Forest) -> list:
    return [tree_to_json(t) for t in f.trees]


def forest_from_json(obj: list) -> Forest:
    if not isinstance(obj, list):
        raise ValueError(f"Forest JSON must be an array, got {type(obj).__name__}")
    return Forest(tuple(tree_from_json(o) for o in obj))
