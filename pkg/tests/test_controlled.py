from fractions import Fraction

import numpy as np
import pytest

from brp import check_multiplicativity, ito_level2, lift_smooth
from controlled import (
    ControlledPath, VectorfieldFamily, check_remainders, compose_smooth, controlled_distance, controlled_norm,
    integration_germ, lift_controlled, ordered_factorizations, rough_integrate, solve_rde,
)
from drivers.provider import get_provider
from errors import ConvergenceError, HypothesisError
from forest import Forest, Tree, ladder, leaf, tree_factorial
from hopf import count_c_prime
from increments import Grid, Increment2, measured_order
from metrics.report import estimate_order
from verify.suites import two_driver_study

dot0, dot1 = leaf(0), leaf(1)
stick = Tree(0, (dot0,))


def F(*trees):
    return Forest.of(*trees)


def t_path(X):
    """y_t = t = x^0_t, controlled by X^{•0}."""
    ones = np.ones(X.grid.size)
    return ControlledPath.from_coefficients(X, X.grid.times, {F(dot0): ones})


def relative(a, b):
    return float(np.max(np.abs(a - b))) / float(np.max(np.abs(b)))


# --------------------------------------------------------------------------- #
#  Vectorfields
# --------------------------------------------------------------------------- #

def test_expression_jets():
    f = VectorfieldFamily.from_expressions(["y0", "y1"], [["y1", "-y0"]])
    assert f.value(0, [1.0, 2.0]) == pytest.approx([2.0, -1.0])
    D = f.jet(0, 1, [1.0, 2.0])
    assert D[1, 0] == 1.0 and D[0, 1] == -1.0
    assert f.jet(0, 1, np.zeros((5, 2))).shape == (5, 2, 2)
    assert list(f.jet_exact(0, 0, [Fraction(1, 3), 2])) == [2, Fraction(-1, 3)]
    g = VectorfieldFamily.from_expressions(["y0", "y1"], [["y0*y1**2", "y0**3"]])
    assert g.symmetry_defect([0.3, -1.2], order=2) < 1e-12
    assert g.jet(0, 2, [1.0, 2.0])[1, 1, 0] == pytest.approx(2.0)


def test_expression_errors():
    with pytest.raises(ValueError):
        VectorfieldFamily.from_expressions(["y0"], [["z"]])
    with pytest.raises(ValueError):
        VectorfieldFamily.from_expressions(["y0"], [])
    f = VectorfieldFamily.from_expressions(["y0"], [["y0**2"]], max_order=2)
    with pytest.raises(ValueError):
        f.jet(1, 0, [1.0])
    with pytest.raises(ValueError):
        f.jet(0, 3, [1.0])
    with pytest.raises(ValueError):
        f.jet(0, 0, [1.0, 2.0])
    with pytest.raises(ValueError):
        VectorfieldFamily.from_expressions(["y0"], [["sqrt(2)*y0"]]).jet_exact(0, 0, [1])


def test_linear_and_callable_fields():
    A = [[0, 1], [-1, 0]]
    f = VectorfieldFamily.linear([A])
    assert f.value(0, [1.0, 0.0]) == pytest.approx([0.0, -1.0])
    assert np.array_equal(f.jet(0, 1, [3.0, 4.0]), np.array(A, dtype=float).T)
    assert not f.jet(0, 3, [3.0, 4.0]).any()
    assert f.jet_exact(0, 2, [1, 1]).shape == (2, 2, 2)

    g = VectorfieldFamily.from_callables([lambda x: np.array([x[0] ** 2])], dim=1)
    assert g.jet(0, 1, [3.0])[0, 0] == pytest.approx(6.0, abs=1e-6)
    with pytest.raises(ValueError):
        g.jet_exact(0, 0, [1])


# --------------------------------------------------------------------------- #
#  Controlled paths
# --------------------------------------------------------------------------- #

def test_constant_path(poly_lift):
    y = ControlledPath.constant(poly_lift, [1.0, 2.0])
    assert y.base.shape == (65, 2)
    assert y.expansion().max_abs() == 0.0
    assert controlled_norm(y) == pytest.approx(np.sqrt(5.0))
    report = check_remainders(y)
    assert report["control"] == 0.0 and report["control2"] == 0.0


def test_exact_expansion_has_zero_remainders(poly_lift):
    # t^2/2 = X^{•0} t_s + X^{•0•0} / 2 on every pair
    t = poly_lift.grid.times
    coeffs = {F(dot0): t, F(dot0, dot0): np.full(t.size, 0.5)}
    y = ControlledPath.from_coefficients(poly_lift, t ** 2 / 2, coeffs)
    report = check_remainders(y)
    assert y.remainder.max_abs() < 1e-14
    assert y.coeff_remainders[F(dot0)].max_abs() < 1e-14
    assert report["control"] < 1e-14 and report["control2"] < 1e-14
    assert report["lemma"] < 1e-12
    assert len(report["table"]) == len(y.index_set())


def test_linear_structure(poly_lift):
    y = t_path(poly_lift)
    z = (y + y) * 0.5 - y
    assert np.abs(z.base).max() == 0.0
    assert (2.0 * y).coefficient(F(dot0)) == pytest.approx(2.0)
    assert y.component(0).dim == 1
    assert "y0" in y.to_frame().columns


def test_controlled_path_hypotheses(poly_lift, identity_lift):
    with pytest.raises(ValueError):
        ControlledPath.constant(poly_lift, 1.0, kappa=0.5)
    with pytest.raises(HypothesisError):
        ControlledPath.constant(identity_lift, 1.0, kappa=0.4)
    with pytest.raises(ValueError):
        ControlledPath.from_coefficients(poly_lift, poly_lift.grid.times, {F(ladder(3)): 1.0})


def test_from_bseries_keeps_trees_below_n(poly_lift):
    ones = np.ones(poly_lift.grid.size)
    y = ControlledPath.from_bseries(poly_lift, poly_lift.grid.times, {dot0: ones, ladder(3): ones})
    assert np.array_equal(y.coefficient(F(dot0))[:, 0], ones)
    assert F(ladder(3)) not in y.coeffs


# --------------------------------------------------------------------------- #
#  Composition
# --------------------------------------------------------------------------- #

def test_ordered_factorizations():
    assert ordered_factorizations(F(dot0, dot0), 1) == ((F(dot0, dot0),),)
    assert ordered_factorizations(F(dot0, dot0), 2) == ((F(dot0), F(dot0)),)
    assert len(ordered_factorizations(F(dot0, dot1), 2)) == 2
    assert ordered_factorizations(F(dot0), 2) == ()


def test_compose_square(poly_lift):
    phi = VectorfieldFamily.from_expressions(["y0"], [["y0**2"]])
    z = compose_smooth(phi, t_path(poly_lift))
    t = poly_lift.grid.times
    assert z.base[:, 0] == pytest.approx(t ** 2)
    assert z.coefficient(F(dot0))[:, 0] == pytest.approx(2 * t)
    assert z.coefficient(F(dot0, dot0))[:, 0] == pytest.approx(1.0)
    assert not z.coefficient(F(dot1)).any()
    assert check_remainders(z)["control"] < 1e-13
    with pytest.raises(ValueError):
        compose_smooth(VectorfieldFamily.from_expressions(["a", "b"], [["a", "b"]]), t_path(poly_lift))


# --------------------------------------------------------------------------- #
#  Rough integration
# --------------------------------------------------------------------------- #

def test_integrate_constant(identity_lift):
    z = rough_integrate(identity_lift, 0, ControlledPath.constant(identity_lift, 1.0))
    assert z.base[:, 0] == pytest.approx(identity_lift.grid.times, abs=1e-14)


def test_integrate_grafts_coefficients(poly_lift):
    y = t_path(poly_lift)
    t = poly_lift.grid.times
    g = integration_germ(poly_lift, 0, y)
    assert g.dim == 1
    z = rough_integrate(poly_lift, 0, y)
    assert z.base[:, 0] == pytest.approx(t ** 2 / 2, abs=1e-12)
    assert z.coefficient(F(dot0))[:, 0] == pytest.approx(t)
    assert z.coefficient(F(Tree(0, (dot0,))))[:, 0] == pytest.approx(1.0)
    assert check_remainders(z)["control"] < 1e-12

    w = rough_integrate(poly_lift, 1, ControlledPath.constant(poly_lift, 1.0))
    assert w.base[:, 0] == pytest.approx(t ** 2 / 2, abs=1e-12)
    with pytest.raises(ValueError):
        rough_integrate(poly_lift, 2, y)


def test_integral_against_an_ito_path():
    # X^{[•]} carries an extra c(t-s); with y^• = 1 the integral picks up c*t
    driver = get_provider("identity").get_driver(Grid.uniform(1.0, 32))
    smooth = lift_smooth(driver, 2, gamma=0.5)
    ito = ito_level2(driver, 0.3)
    z_smooth = rough_integrate(smooth, 0, t_path(smooth))
    z_ito = rough_integrate(ito, 0, t_path(ito))
    t = smooth.grid.times
    assert z_smooth.base[:, 0] == pytest.approx(t ** 2 / 2, abs=1e-13)
    assert z_ito.base[:, 0] - z_smooth.base[:, 0] == pytest.approx(0.3 * t, abs=1e-13)
    for f in z_smooth.coeffs:
        assert np.array_equal(z_ito.coefficient(f), z_smooth.coefficient(f))


def test_relations_of_an_integral_chain():
    # coefficients met in delta y^• and delta y^{••} for n = 4
    assert count_c_prime(stick, dot0, dot0) == 1
    assert count_c_prime(F(dot0, dot0), dot0, dot0) == 2
    assert count_c_prime(F(dot0, dot0, dot0), F(dot0, dot0), dot0) == 3
    assert count_c_prime(Tree(0, (dot0, dot0)), stick, dot0) == 2

    X = lift_smooth(get_provider("identity").get_driver(Grid.uniform(1.0, 64)), 4, gamma=0.25)
    sine = VectorfieldFamily.from_expressions(["y0"], [["sin(y0)"]], max_order=4)
    y = compose_smooth(sine, t_path(X))
    z = rough_integrate(X, 0, y)
    # grafting: z^{[sigma]} = y^sigma, nothing on forests of two trees
    assert np.array_equal(z.coefficient(F(dot0)), y.base)
    assert np.array_equal(z.coefficient(F(stick)), y.coefficient(F(dot0)))
    assert np.array_equal(z.coefficient(F(Tree(0, (dot0, dot0)))), y.coefficient(F(dot0, dot0)))
    assert not z.coefficient(F(dot0, dot0)).any()
    # y# of sin(t) is a fourth-order Taylor remainder
    assert measured_order(y.remainder)["order"] >= 3.5
    for path in (y, z):
        report = check_remainders(path)
        assert report["control"] < 1e-12
        assert report["control2"] < 1e-10


# --------------------------------------------------------------------------- #
#  RDEs
# --------------------------------------------------------------------------- #

def test_zero_field_keeps_initial_value(identity_lift):
    f = VectorfieldFamily.from_expressions(["y0"], [["0"]])
    y = solve_rde(f, identity_lift, 0.7)
    assert np.all(y.base == 0.7)
    assert len(y.info["windows"]) == 1


def test_linear_rde_matches_exponential():
    grid = Grid.uniform(1.0, 1024)
    X = lift_smooth(get_provider("identity").get_driver(grid), 3, gamma=1 / 3)
    f = VectorfieldFamily.from_expressions(["y0"], [["y0"]])
    y = solve_rde(f, X, 1.0)
    assert np.abs(y.base[:, 0] - np.exp(grid.times)).max() <= 1e-6
    windows = y.info["windows"]
    assert set(windows.columns) >= {"t_start", "t_end", "iterations", "final_difference"}
    assert (windows["final_difference"] < 1e-10).all()


def test_two_driver_rde_converges():
    # dy = y dx^0 - y/2 dx^1 with x = (t, t^2/2) gives y = exp(t - t^2/4)
    study = two_driver_study((32, 64, 128, 256))
    errors = study["error"].to_numpy()
    assert errors[-1] <= 1e-4
    assert (np.diff(errors) < 0).all()
    assert estimate_order(study["step"], errors)["order"] >= 1.0


def test_rde_remainders_come_from_the_integral():
    grid = Grid.uniform(1.0, 64)
    X = lift_smooth(get_provider("identity").get_driver(grid), 3, gamma=1 / 3)
    y = solve_rde(VectorfieldFamily.from_expressions(["y0"], [["y0"]]), X, 1.0)
    assert y.info["chain_difference"] <= 1e-8
    report = check_remainders(y)
    assert report["control"] < 1e-12 and report["control2"] < 1e-10
    # y# of e^t is a third-order Taylor remainder
    assert measured_order(y.remainder)["order"] >= 2.5
    # Picard differences shrink geometrically near the fixed point
    assert (y.info["windows"]["max_ratio"] < 1).all()
    y.base[10:] += 1e-3
    assert check_remainders(y, include_lemma=False)["control"] >= 9e-4


def test_picard_distance_sees_constant_coefficients(poly_lift):
    # integral of 1: z = t, z^• = 1, every remainder vanishes
    z = rough_integrate(poly_lift, 0, ControlledPath.constant(poly_lift, 1.0))
    assert controlled_norm(z) < 1e-12
    assert controlled_distance(z) == pytest.approx(1.0)


def test_rde_end_time_and_errors(poly_lift):
    f = VectorfieldFamily.from_expressions(["y0"], [["y0"], ["0"]])
    y = solve_rde(f, poly_lift, 1.0, T=0.5)
    assert y.grid.size == 33
    with pytest.raises(ValueError):
        solve_rde(f, poly_lift, [1.0, 2.0])
    with pytest.raises(ValueError):
        solve_rde(VectorfieldFamily.from_expressions(["y0"], [["y0"]]), poly_lift, 1.0)
    with pytest.raises(ConvergenceError):
        solve_rde(f, poly_lift, 1.0, max_iter=1)


# --------------------------------------------------------------------------- #
#  Lift of a controlled path
# --------------------------------------------------------------------------- #

def test_lift_of_identity_matrix(poly_lift):
    y = ControlledPath.constant(poly_lift, [1.0, 0.0, 0.0, 1.0])
    Y = lift_controlled(y)
    assert Y.alphabet_size == 2 and Y.level == 3
    assert np.allclose(Y[dot0].values, poly_lift[dot0].values, atol=1e-13)
    assert np.allclose(Y[dot1].values, poly_lift[dot1].values, atol=1e-13)
    assert check_multiplicativity(Y)["max_defect"] <= 1e-10
    assert Y.metadata["construction"] == "lift_controlled"


def test_lift_along_a_linear_driver(poly_lift):
    # w = x^0 = t, so every tree takes its closed form (t-s)^|tau| / tau!; degree-three
    # trees inherit the trapezoid step that ends the Simpson rule in X, O(h^3)
    Y = lift_controlled(ControlledPath.constant(poly_lift, [1.0, 0.0]))
    grid = poly_lift.grid
    for t in Y.trees():
        exact = Increment2.from_function(grid, lambda a, b, t=t: (a - b) ** t.degree / tree_factorial(t))
        assert (Y[t] - exact).max_abs() < (1e-6 if t.degree == 3 else 1e-12)


def test_lift_over_an_ito_path():
    X = ito_level2(get_provider("identity").get_driver(Grid.uniform(1.0, 32)), 0.3)
    Y = lift_controlled(ControlledPath.constant(X, [1.0]))
    assert Y.level == 2
    assert (Y[dot0] - X[dot0]).max_abs() < 1e-12
    # the c(t-s) part of X^{[•]} is carried over, not replaced by (t-s)^2/2
    assert (Y[stick] - X[stick]).max_abs() < 1e-12
    assert check_multiplicativity(Y)["max_defect"] < 1e-12


def test_lift_matches_the_lift_of_the_integral():
    # y = 1 + t along x = t integrates to w = t + t^2/2
    grid = Grid.uniform(1.0, 64)
    X = lift_smooth(get_provider("identity").get_driver(grid), 3, gamma=1 / 3)
    y = ControlledPath.from_coefficients(X, 1 + grid.times, {F(dot0): np.ones(grid.size)})
    Y = lift_controlled(y)
    W = lift_smooth(get_provider("polynomial", coefficients=[[0, 1, 0.5]]).get_driver(grid), 3, gamma=1 / 3)
    assert set(Y.trees()) == set(W.trees())
    for t in Y.trees():
        assert relative(Y[t].values, W[t].values) <= 1e-4


def test_lift_shape_errors(poly_lift):
    y = ControlledPath.constant(poly_lift, [1.0, 0.0, 0.0])
    with pytest.raises(ValueError):
        lift_controlled(y)
    with pytest.raises(ValueError):
        lift_controlled(ControlledPath.constant(poly_lift, [1.0, 0.0]), k=2)
    with pytest.raises(ValueError):
        lift_controlled(ControlledPath.constant(poly_lift, [1.0, 0.0]), level=0)
