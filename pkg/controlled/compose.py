"""
Composition of a controlled path with a smooth map.

    z^tau = sum_m 1/m! sum_{tau_1 ... tau_m = tau} D^m phi(y)[y^{tau_1}, ..., y^{tau_m}]

where the inner sum runs over ordered tuples of non-empty forests whose
product is tau, each distinct tuple once.
"""

from __future__ import annotations

from collections import Counter
from functools import lru_cache
from itertools import product
from math import factorial

import numpy as np

from forest.trees import Forest

from .fields import VectorfieldFamily, contract
from .path import ControlledPath


def _sub_forests(f: Forest) -> list[tuple[Forest, Forest]]:
    """All splits f = a * b with a non-empty, distinct as multisets."""
    counts = Counter(f.trees)
    trees = sorted(counts)
    out = []
    for picks in product(*(range(counts[t] + 1) for t in trees)):
        if not any(picks):
            continue
        a = [t for t, k in zip(trees, picks) for _ in range(k)]
        b = [t for t, k in zip(trees, picks) for _ in range(counts[t] - k)]
        out.append((Forest(tuple(a)), Forest(tuple(b))))
    return out


@lru_cache(maxsize=None)
def ordered_factorizations(f: Forest, m: int) -> tuple[tuple[Forest, ...], ...]:
    """Ordered m-tuples of non-empty forests with product f."""
    if m == 1:
        return ((f,),) if not f.is_unit() else ()
    out = []
    for head, rest in _sub_forests(f):
        if rest.is_unit():
            continue
        for tail in ordered_factorizations(rest, m - 1):
            out.append((head,) + tail)
    return tuple(out)


def compose_smooth(phi: VectorfieldFamily, y: ControlledPath, label: int = 0) -> ControlledPath:
    """phi_label(y) as a controlled path; remainders from the defining relations."""
    if phi.dim != y.dim:
        raise ValueError(f"map expects points in R^{phi.dim}, path lives in R^{y.dim}")
    top = y.n - 1
    if top > phi.max_order:
        raise ValueError(f"composition needs derivatives up to order {top}, map provides {phi.max_order}")

    base = phi.jet(label, 0, y.base)
    jets = {m: phi.jet(label, m, y.base) for m in range(1, top + 1)}
    coeffs = {}
    for tau in y.index_set():
        acc = np.zeros((y.grid.size, phi.out_dim))
        for m in range(1, tau.degree + 1):
            for parts in ordered_factorizations(tau, m):
                vectors = [y.coeffs[p] for p in parts]
                if not all(v.any() for v in vectors):
                    continue
                acc = acc + contract(jets[m], vectors, batched=True) / factorial(m)
        coeffs[tau] = acc
    return ControlledPath.from_coefficients(y.X, base, coeffs, y.kappa)
