import json
from fractions import Fraction

import numpy as np
import pytest

from forest import (
    UNIT, Forest, ForestSeries, Tree, enumerate_forests, enumerate_trees, forest_from_json, ladder, leaf,
)
from hopf import (
    TensorSeries, chen_tree, coassociativity_defect, conjecture_ratio, coproduct, coproduct_by_cuts,
    coproduct_table, count_c_prime, count_c_tilde, counit_left, counit_right, geometric_reduce,
    geometric_reduce_forest, is_chen, neoclassical_ratio, neoclassical_sweep, neoclassical_tree_ratio,
    q_gamma, q_gamma_full, reduced_coproduct, reduced_coproduct_recursive, shuffle, sweep_summary,
    tree_binomial_check, tree_binomial_terms, word_of,
)

dot = leaf(0)
stick = Tree(0, (dot,))
cherry = Tree(0, (dot, dot))
tall = ladder(3)


def F(*trees):
    return Forest.of(*trees)


def test_reduced_coproduct_degree_three_table():
    assert not reduced_coproduct(dot)
    assert reduced_coproduct(F(dot, dot)) == TensorSeries({(F(dot), F(dot)): 2})
    assert reduced_coproduct(stick) == TensorSeries({(F(dot), F(dot)): 1})
    assert reduced_coproduct(F(dot, dot, dot)) == TensorSeries({
        (F(dot), F(dot, dot)): 3,
        (F(dot, dot), F(dot)): 3,
    })
    assert reduced_coproduct(F(dot, stick)) == TensorSeries({
        (F(dot), F(dot, dot)): 1,
        (F(dot), F(stick)): 1,
        (F(stick), F(dot)): 1,
        (F(dot, dot), F(dot)): 1,
    })
    assert reduced_coproduct(cherry) == TensorSeries({
        (F(stick), F(dot)): 2,
        (F(dot), F(dot, dot)): 1,
    })
    assert reduced_coproduct(tall) == TensorSeries({
        (F(stick), F(dot)): 1,
        (F(dot), F(stick)): 1,
    })


def test_reduced_coproduct_of_empty_forest_raises():
    with pytest.raises(ValueError):
        reduced_coproduct(UNIT)


def test_counit_and_grading():
    for f in enumerate_forests(5, 1) + enumerate_forests(3, 2):
        delta = coproduct(f)
        assert counit_left(delta) == ForestSeries.basis(f)
        assert counit_right(delta) == ForestSeries.basis(f)
        assert all(l.degree + r.degree == f.degree for l, r, _ in delta.items())


def test_coassociativity():
    for f in enumerate_forests(6, 1) + enumerate_forests(4, 2):
        assert coassociativity_defect(f) == {}
        assert coassociativity_defect(f, reduced=True) == {}


def test_cuts_match_recursion():
    for t in enumerate_trees(6, 1) + enumerate_trees(4, 2):
        assert coproduct_by_cuts(t) == coproduct(t)
        assert reduced_coproduct_recursive(t) == reduced_coproduct(t)


def test_coproduct_is_multiplicative():
    for f in enumerate_forests(5, 1):
        if len(f) > 1:
            assert coproduct(f) == coproduct(f.trees[0]) * coproduct(Forest(f.trees[1:]))


def test_trunk_is_a_single_tree():
    for t in enumerate_trees(5, 2):
        for left, _, _ in reduced_coproduct(t).items():
            assert len(left) == 1
            assert left.trees[0].label == t.label


def test_c_prime_and_c_tilde():
    assert count_c_prime(cherry, stick, dot) == 2
    assert count_c_prime(F(dot, dot, dot), F(dot, dot), dot) == 3
    assert count_c_prime(dot, dot, dot) == 0
    assert count_c_tilde(stick, stick, UNIT) == 1
    assert count_c_tilde(stick, dot, UNIT) == 0
    assert count_c_tilde(stick, dot, dot) == 1


def test_tree_binomial_exact():
    rng = np.random.default_rng(7)
    pairs = [(Fraction(int(p), int(q)), Fraction(int(r), int(s))) for p, q, r, s in rng.integers(1, 15, (20, 4))]
    for t in enumerate_trees(7, 1):
        for a, b in pairs:
            assert tree_binomial_check(t, a, b)
    assert tree_binomial_terms(cherry, 1, 0) == 1
    with pytest.raises(ValueError):
        tree_binomial_check(dot, -1, 1)


def test_q_gamma_forms_agree():
    for gamma in (0.3, 0.45, 0.7):
        for t in enumerate_trees(6, 1):
            assert q_gamma(t, gamma) == pytest.approx(q_gamma_full(t, gamma), rel=1e-12)
    assert q_gamma(stick, 0.5) == 1.0
    assert q_gamma(F(tall, tall), 0.3) == pytest.approx(q_gamma(tall, 0.3) ** 2)
    assert conjecture_ratio(dot, 0.5) == 1.0
    with pytest.raises(ValueError):
        q_gamma(dot, 0.0)


def test_neoclassical_ratio():
    for n in (1, 5, 40):
        for a, b in ((1.0, 1.0), (0.3, 2.0)):
            assert neoclassical_ratio(n, 1.0, a, b) == pytest.approx(1.0, rel=1e-10)
            assert np.isfinite(neoclassical_ratio(n, 0.5, a, b))
    assert neoclassical_tree_ratio(cherry, 1.0, 0.5, 1.5) == pytest.approx(1.0, rel=1e-10)
    with pytest.raises(ValueError):
        neoclassical_ratio(0, 0.5, 1.0, 1.0)
    with pytest.raises(ValueError):
        neoclassical_ratio(3, 0.5, -1.0, 1.0)


def test_neoclassical_normalized_growth_is_bounded():
    df = neoclassical_sweep([0.3, 0.5, 0.7], 200, [0.25, 1.0, 4.0])
    summary = sweep_summary(df, [(50, 100), (100, 200)])
    assert np.isfinite(summary["sup_ratio"]).all()
    growth = summary["sup_normalized_100_200"] / summary["sup_normalized_50_100"]
    assert (growth <= 1.05).all()


def test_shuffle_and_chen_trees():
    assert sorted(shuffle((0,), (1,))) == [(0, 1), (1, 0)]
    assert len(shuffle((0, 1), (2, 3))) == 6
    w = (0, 1, 1)
    t = chen_tree(w)
    assert is_chen(t) and word_of(t) == w and t.label == 0
    assert not is_chen(cherry)
    with pytest.raises(ValueError):
        word_of(cherry)


def test_geometric_reduction():
    assert geometric_reduce(cherry) == {(0, 0, 0): 2}
    assert geometric_reduce(tall) == {(0, 0, 0): 1}
    assert geometric_reduce_forest(F(dot, dot)) == {(0, 0): 2}
    mixed = geometric_reduce_forest(F(leaf(0), leaf(1)))
    assert mixed == {(0, 1): 1, (1, 0): 1}


def test_coproduct_table_degree_three():
    table = coproduct_table(3, 1)
    assert len(table) == 7
    assert table["degree"].tolist() == [1, 2, 2, 3, 3, 3, 3]
    assert list(table.columns) == ["forest", "degree", "tree_factorial", "symmetry", "coproduct"]
    rows = {forest_from_json(json.loads(f)): r for f, r in zip(table["forest"], table.itertuples())}
    assert rows[F(stick)].tree_factorial == 2 and rows[F(cherry)].symmetry == 2
    terms = json.loads(rows[F(stick)].coproduct)
    parsed = TensorSeries({(forest_from_json(l), forest_from_json(r)): c for c, l, r in terms})
    assert parsed == coproduct(stick)
    assert all(len(json.loads(c)) >= 2 for c in table["coproduct"])
