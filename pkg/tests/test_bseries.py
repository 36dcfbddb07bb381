from fractions import Fraction
from math import factorial

import numpy as np
import pytest

from brp import lift_smooth
from bseries import (
    ElementaryDifferentialTable, SeriesStepConfig, bseries_autonomous, bseries_driven_step,
    coefficient_defects, coefficient_paths, convergence_radius, elementary_differential,
    local_order_study, partial_sums, series_terms,
)
from controlled import VectorfieldFamily
from drivers.provider import get_provider
from forest import Tree, ladder, leaf
from increments import Grid

dot = leaf(0)
stick = Tree(0, (dot,))
cherry = Tree(0, (dot, dot))


def fields(*rows):
    return VectorfieldFamily.from_expressions(["y0"], [[r] for r in rows], max_order=6)


def test_elementary_differentials_of_square():
    f = fields("y0**2")
    y = 0.5
    assert elementary_differential(f, dot, [y])[0] == pytest.approx(y ** 2)
    assert elementary_differential(f, stick, [y])[0] == pytest.approx(2 * y ** 3)
    assert elementary_differential(f, cherry, [y])[0] == pytest.approx(2 * y ** 4)
    assert elementary_differential(f, ladder(3), [y])[0] == pytest.approx(4 * y ** 4)
    assert elementary_differential(f, cherry, [Fraction(1, 2)], exact=True)[0] == Fraction(1, 8)


def test_elementary_differentials_with_labels():
    f = fields("y0", "1")
    table = ElementaryDifferentialTable(f, [2.0])
    assert table[Tree(0, (leaf(1),))][0] == 1.0
    assert table[Tree(1, (leaf(0),))][0] == 0.0
    assert len(table) >= 2
    batch = ElementaryDifferentialTable(f, np.array([[1.0], [2.0], [3.0]]))
    assert batch[leaf(0)][:, 0] == pytest.approx([1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        ElementaryDifferentialTable(VectorfieldFamily.from_expressions(["a", "b"], [["a"]]), [1.0, 1.0])


def test_autonomous_zero_field():
    out = bseries_autonomous(fields("0"), [0.3], 0.7, 5)
    assert out == pytest.approx([0.3])


def test_autonomous_linear_field_gives_exponential_terms():
    terms = series_terms(fields("y0"), [1], 1, 6, exact=True)
    assert [t[0] for t in terms] == [Fraction(1, factorial(m)) for m in range(1, 7)]
    total = bseries_autonomous(fields("y0"), [1], 1, 6, exact=True)[0]
    assert total == sum(Fraction(1, factorial(m)) for m in range(7))


def test_autonomous_square_field_gives_geometric_terms():
    # y' = y^2, y(0) = 1 solves to 1/(1-t)
    terms = series_terms(fields("y0**2"), [1], 1, 6, exact=True)
    assert all(t[0] == 1 for t in terms)


def test_driven_collapse_to_autonomous():
    g = "y0**2 + y0/3"
    eta, t, s = Fraction(1, 2), Fraction(3, 10), Fraction(1, 10)
    driven = bseries_driven_step(fields(g, g), None, [eta], t, s, 4, exact=True)
    autonomous = bseries_autonomous(fields(g), [eta], 2 * (t - s), 4, exact=True)
    assert driven[0] == autonomous[0] - eta


def test_degree_one_step_is_euler(poly_lift):
    f = fields("y0", "1")
    times = poly_lift.grid.times
    t, s = times[10], times[2]
    y = 0.8
    step = bseries_driven_step(f, poly_lift, [y], t, s, 1)
    expected = y * (t - s) + (t ** 2 - s ** 2) / 2
    assert step[0] == pytest.approx(expected, rel=1e-12)


def test_driven_step_errors(poly_lift):
    f = fields("y0", "1")
    times = poly_lift.grid.times
    with pytest.raises(ValueError):
        bseries_driven_step(f, poly_lift, [1.0], times[4], times[2], 2, exact=True)
    with pytest.raises(ValueError):
        bseries_driven_step(fields("y0"), poly_lift, [1.0], times[4], times[2], 2)
    with pytest.raises(ValueError):
        bseries_driven_step(f, poly_lift, [1.0], times[4], times[2], 4)
    with pytest.raises(ValueError):
        bseries_driven_step(f, poly_lift, [1.0], times[2], times[4], 2)


@pytest.mark.parametrize("N", [1, 2])
def test_local_order(poly_provider, N):
    f = fields("y0", "1 + y0**2/4")
    study = local_order_study(f, poly_provider, [0.5], N)
    assert study["degree"] == N
    assert abs(study["order"] - (N + 1)) <= 0.3
    assert len(study["table"]) == 6


def test_coefficient_defects_follow_smooth_orders():
    grid = Grid.uniform(1.0, 256)
    X = lift_smooth(get_provider("identity").get_driver(grid), 3, gamma=1 / 3)
    f = fields("y0")
    y = 0.5 * np.exp(grid.times)
    paths = coefficient_paths(f, y, 3)
    assert paths[stick][:, 0] == pytest.approx(y)
    assert not paths[cherry].any()

    table = coefficient_defects(f, X, y, lags=[4, 8, 16, 32, 64])
    assert set(table["tree"]) == {str(t) for t in (dot, stick, cherry, ladder(3))}
    measured = table.dropna(subset=["measured_order"])
    assert len(measured) == 3
    assert (abs(measured["measured_order"] - measured["smooth_order"]) <= 0.3).all()
    assert (measured["measured_order"] >= 0.8 * measured["bound"]).all()
    zero = table[table["tree"] == str(cherry)]
    assert zero["max_abs"].iloc[0] == 0.0


def test_convergence_radius():
    assert convergence_radius(1, 1, 1, 1) == 0.5
    assert convergence_radius(1, 1, 1, 2) == 0.25
    with pytest.raises(ValueError):
        convergence_radius(0, 1, 1, 1)
    with pytest.raises(ValueError):
        convergence_radius(1, 1, -1, 1)


def test_partial_sums_shrink():
    table = partial_sums(fields("y0**2"), [1.0], 0.1, 6)
    assert table["degree"].tolist() == list(range(7))
    norms = table["term_norm"].to_numpy()
    assert np.all(np.diff(norms) < 0)
    assert table["y0"].iloc[-1] == pytest.approx(sum(0.1 ** m for m in range(7)))


def test_step_config(capsys):
    with pytest.raises(ValueError):
        SeriesStepConfig(0)
    with pytest.raises(ValueError):
        SeriesStepConfig(2, radius=0.0)
    bseries_autonomous(fields("y0"), [1.0], 0.1, 2, radius=0.05)
    assert "convergence radius" in capsys.readouterr().err
