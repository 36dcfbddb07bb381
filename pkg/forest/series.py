"""Finite rational linear combinations of forests."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterator

from .trees import Forest, Tree, as_forest


class ForestSeries:
    """Element of the tree algebra with rational coefficients; zero terms are dropped."""

    def __init__(self, terms: dict[Forest, Fraction | int] | None = None) -> None:
        self.terms: dict[Forest, Fraction] = {}
        for f, c in (terms or {}).items():
            self._add(as_forest(f), Fraction(c))

    @classmethod
    def basis(cls, f: Tree | Forest, coefficient: Fraction | int = 1) -> ForestSeries:
        return cls({as_forest(f): coefficient})

    def _add(self, f: Forest, c: Fraction) -> None:
        v = self.terms.get(f, Fraction(0)) + c
        if v == 0:
            self.terms.pop(f, None)
        else:
            self.terms[f] = v

    def coefficient(self, f: Tree | Forest) -> Fraction:
        return self.terms.get(as_forest(f), Fraction(0))

    def items(self) -> Iterator[tuple[Forest, Fraction]]:
        return iter(sorted(self.terms.items()))

    def __add__(self, other: ForestSeries) -> ForestSeries:
        out = ForestSeries(self.terms)
        for f, c in other.terms.items():
            out._add(f, c)
        return out

    def __sub__(self, other: ForestSeries) -> ForestSeries:
        return self + other.scale(-1)

    def scale(self, c: Fraction | int) -> ForestSeries:
        return ForestSeries({f: v * c for f, v in self.terms.items()})

    def __mul__(self, other: ForestSeries) -> ForestSeries:
        out = ForestSeries()
        for f, a in self.terms.items():
            for g, b in other.terms.items():
                out._add(f * g, a * b)
        return out

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ForestSeries) and self.terms == other.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __repr__(self) -> str:
        if not self.terms:
            return "ForestSeries(0)"
        body = " + ".join(f"{c}*({f})" for f, c in self.items())
        return f"ForestSeries({body})"
