"""
Words over the label alphabet, the shuffle product, Chen (ladder) trees and
the reduction of a tree to a combination of Chen trees valid for geometric
drivers.
"""

from __future__ import annotations

from collections import Counter
from functools import lru_cache

from forest.trees import Forest, Tree, as_forest

Word = tuple[int, ...]


@lru_cache(maxsize=None)
def _shuffle(a: Word, b: Word) -> tuple[Word, ...]:
    if not a:
        return (b,)
    if not b:
        return (a,)
    left = tuple((a[0],) + w for w in _shuffle(a[1:], b))
    right = tuple((b[0],) + w for w in _shuffle(a, b[1:]))
    return left + right


def shuffle(a: Word, b: Word) -> list[Word]:
    """All interleavings of a and b, listed with multiplicity."""
    return list(_shuffle(tuple(a), tuple(b)))


def chen_tree(w: Word) -> Tree:
    """Ladder tree with the first letter at the root."""
    if not w:
        raise ValueError("Chen tree of the empty word is undefined")
    t = Tree(w[-1])
    for a in reversed(w[:-1]):
        t = Tree(a, (t,))
    return t


def is_chen(t: Tree) -> bool:
    while t.children:
        if len(t.children) != 1:
            return False
        t = t.children[0]
    return True


def word_of(t: Tree) -> Word:
    if not is_chen(t):
        raise ValueError(f"{t} is not a ladder tree")
    out = [t.label]
    while t.children:
        t = t.children[0]
        out.append(t.label)
    return tuple(out)


@lru_cache(maxsize=None)
def _reduce(t: Tree) -> tuple[tuple[Word, int], ...]:
    acc: Counter = Counter({(): 1})
    for child in t.children:
        nxt: Counter = Counter()
        for w1, c1 in acc.items():
            for w2, c2 in _reduce(child):
                for w in _shuffle(w1, w2):
                    nxt[w] += c1 * c2
        acc = nxt
    return tuple(sorted(((t.label,) + w, c) for w, c in acc.items()))


def geometric_reduce(t: Tree) -> dict[Word, int]:
    """Expansion of X^t over Chen words, valid when X is geometric."""
    return dict(_reduce(t))


def geometric_reduce_forest(f: Forest) -> dict[Word, int]:
    """X^{t1...tk} as words: the shuffle of the component reductions."""
    acc: Counter = Counter({(): 1})
    for t in as_forest(f):
        nxt: Counter = Counter()
        for w1, c1 in acc.items():
            for w2, c2 in _reduce(t):
                for w in _shuffle(w1, w2):
                    nxt[w] += c1 * c2
        acc = nxt
    return {w: c for w, c in sorted(acc.items()) if c}
