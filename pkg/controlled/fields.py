"""
Families of vectorfields f_a: R^k -> R^k' with derivative jets.

A jet of order m for label a is the tensor of m-th derivatives with the m
derivative axes first and the output axis last:

    jet(a, m, xi)[..., b1, ..., bm, i] = d^m f_a^i / dxi^b1 ... dxi^bm

Batched evaluation takes xi of shape (N, k) and prepends the N axis.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
import sympy

import config
from metrics.report import log

UNBOUNDED_ORDER = 64


def contract(D: np.ndarray, vectors: Sequence[np.ndarray], batched: bool) -> np.ndarray:
    """D[v1, ..., vm]: contract the leading derivative axes with the vectors."""
    out = D
    for v in vectors:
        if batched:
            out = np.einsum("nb...,nb->n...", out, v)
        else:
            out = np.tensordot(v, out, axes=([0], [0]))
    return out


def _compile(arr: sympy.Array, syms: tuple) -> tuple[tuple[int, ...], list[Callable]]:
    entries = np.array(arr.tolist(), dtype=object).ravel()
    fns = [sympy.lambdify(syms, e, "numpy") for e in entries]
    return tuple(arr.shape), fns


def _to_fraction(v) -> Fraction:
    r = sympy.sympify(v)
    if not isinstance(r, sympy.Rational):
        raise ValueError(f"{v} is not rational; exact mode needs rational fields and points")
    return Fraction(int(r.p), int(r.q))


class VectorfieldFamily:
    """
    d vectorfields with derivatives up to ``max_order``.

    Built from sympy expressions (exact derivatives, exact rational mode),
    from matrices (linear fields) or from plain callables with central
    finite differences.
    """

    def __init__(
        self,
        dim: int,
        out_dim: int,
        alphabet_size: int,
        max_order: int,
        jet_fn: Callable[[int, int, np.ndarray], np.ndarray],
        exact_fn: Callable[[int, int, Sequence[Fraction]], np.ndarray] | None = None,
        description: str = "",
    ) -> None:
        self.dim = dim
        self.out_dim = out_dim
        self.alphabet_size = alphabet_size
        self.max_order = max_order
        self._jet_fn = jet_fn
        self._exact_fn = exact_fn
        self.description = description

    # ------------------------------------------------------------------ #
    #  Builders
    # ------------------------------------------------------------------ #

    @classmethod
    def from_expressions(
        cls, variables: Sequence[str], fields: Sequence[Sequence[str]], max_order: int = 4,
    ) -> VectorfieldFamily:
        """One list of component expressions per label, in the given variables."""
        if not fields:
            raise ValueError("At least one field (one per driver label) is required")
        syms = tuple(sympy.symbols(list(variables)))
        out_dim = len(fields[0])
        if any(len(row) != out_dim for row in fields):
            raise ValueError("Every field needs the same number of components")

        exprs = [sympy.Array([sympy.sympify(e, rational=True) for e in row]) for row in fields]
        stray = set().union(*(e.free_symbols for row in exprs for e in row)) - set(syms)
        if stray:
            raise ValueError(f"Unknown symbols {sorted(map(str, stray))}; variables are {list(variables)}")

        jets: list[list[sympy.Array]] = []
        for arr in exprs:
            levels = [arr]
            for _ in range(max_order):
                levels.append(sympy.derive_by_array(levels[-1], syms))
            jets.append(levels)
        compiled = [[_compile(a, syms) for a in levels] for levels in jets]

        def jet_fn(a: int, m: int, xi: np.ndarray) -> np.ndarray:
            shape, fns = compiled[a][m]
            n = xi.shape[0]
            cols = [xi[:, b] for b in range(xi.shape[1])]
            vals = [np.broadcast_to(np.asarray(fn(*cols), dtype=float), (n,)) for fn in fns]
            return np.stack(vals, axis=1).reshape((n,) + shape)

        def exact_fn(a: int, m: int, xi: Sequence[Fraction]) -> np.ndarray:
            subs = {s: sympy.Rational(v.numerator, v.denominator) for s, v in zip(syms, map(Fraction, xi))}
            arr = jets[a][m]
            flat = [_to_fraction(e.subs(subs)) for e in np.array(arr.tolist(), dtype=object).ravel()]
            return np.array(flat, dtype=object).reshape(arr.shape)

        return cls(len(syms), out_dim, len(fields), max_order, jet_fn, exact_fn,
                   description=f"expressions {list(map(list, fields))}")

    @classmethod
    def linear(cls, matrices: Sequence) -> VectorfieldFamily:
        """f_a(xi) = A_a xi; all derivatives beyond the first vanish."""
        mats = [np.asarray(A, dtype=object) for A in matrices]
        if not mats or any(A.ndim != 2 for A in mats):
            raise ValueError("linear fields need a non-empty list of 2-d matrices")
        out_dim, dim = mats[0].shape
        floats = [A.astype(float) for A in mats]

        def jet_fn(a: int, m: int, xi: np.ndarray) -> np.ndarray:
            n = xi.shape[0]
            if m == 0:
                return xi @ floats[a].T
            if m == 1:
                return np.broadcast_to(floats[a].T, (n, dim, out_dim)).copy()
            return np.zeros((n,) + (dim,) * m + (out_dim,))

        def exact_fn(a: int, m: int, xi: Sequence[Fraction]) -> np.ndarray:
            A = np.vectorize(Fraction, otypes=[object])(mats[a])
            if m == 0:
                return A.dot(np.array([Fraction(v) for v in xi], dtype=object))
            if m == 1:
                return A.T.copy()
            return np.full((dim,) * m + (out_dim,), Fraction(0), dtype=object)

        return cls(dim, out_dim, len(mats), UNBOUNDED_ORDER, jet_fn, exact_fn, description="linear")

    @classmethod
    def from_callables(
        cls, funcs: Sequence[Callable[[np.ndarray], np.ndarray]], dim: int, max_order: int = 2,
        step: float | None = None,
    ) -> VectorfieldFamily:
        """
        Fields given as plain functions of a (k,) point; derivatives by nested
        central differences. For exploration only: the derivative noise
        pollutes order measurements.
        """
        h = config.FD_STEP if step is None else step
        log(f"Warning: finite-difference derivatives (step {h:g}) for {len(funcs)} fields")
        sample = np.asarray(funcs[0](np.zeros(dim)), dtype=float)
        out_dim = sample.size

        def point_jet(a: int, m: int, x: np.ndarray) -> np.ndarray:
            if m == 0:
                return np.asarray(funcs[a](x), dtype=float).reshape(out_dim)
            parts = []
            for b in range(dim):
                e = np.zeros(dim)
                e[b] = h
                parts.append((point_jet(a, m - 1, x + e) - point_jet(a, m - 1, x - e)) / (2 * h))
            return np.stack(parts, axis=0)

        def jet_fn(a: int, m: int, xi: np.ndarray) -> np.ndarray:
            return np.stack([point_jet(a, m, x) for x in xi], axis=0)

        return cls(dim, out_dim, len(funcs), max_order, jet_fn, None, description="finite differences")

    # ------------------------------------------------------------------ #
    #  Evaluation
    # ------------------------------------------------------------------ #

    def _check(self, a: int, m: int) -> None:
        if not 0 <= a < self.alphabet_size:
            raise ValueError(f"label {a} outside 0..{self.alphabet_size - 1}")
        if m > self.max_order:
            raise ValueError(f"derivative of order {m} requested, field provides up to {self.max_order}")

    def jet(self, a: int, m: int, xi) -> np.ndarray:
        self._check(a, m)
        x = np.asarray(xi, dtype=float)
        single = x.ndim == 1
        x = np.atleast_2d(x)
        if x.shape[1] != self.dim:
            raise ValueError(f"points of dimension {x.shape[1]}, field expects {self.dim}")
        out = self._jet_fn(a, m, x)
        return out[0] if single else out

    def jet_exact(self, a: int, m: int, xi: Sequence) -> np.ndarray:
        self._check(a, m)
        if self._exact_fn is None:
            raise ValueError(f"exact evaluation is not available for {self.description} fields")
        return self._exact_fn(a, m, [Fraction(v) for v in xi])

    def value(self, a: int, xi) -> np.ndarray:
        return self.jet(a, 0, xi)

    def symmetry_defect(self, xi, order: int = 2) -> float:
        """max |D^m f_a - D^m f_a with the first two derivative axes swapped|."""
        if order < 2:
            return 0.0
        worst = 0.0
        for a in range(self.alphabet_size):
            D = self.jet(a, order, np.atleast_2d(np.asarray(xi, dtype=float)))
            worst = max(worst, float(np.max(np.abs(D - np.swapaxes(D, 1, 2)))))
        return worst

    def __repr__(self) -> str:
        return (f"VectorfieldFamily(d={self.alphabet_size}, R^{self.dim} -> R^{self.out_dim}, "
                f"order<={self.max_order}, {self.description})")
