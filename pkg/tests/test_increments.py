import numpy as np
import pytest

from errors import HypothesisError, ResourceLimitError
from increments import (
    Grid, Increment2, coboundary1, coboundary2, exterior_product, holder_norm2, holder_norm3,
    holder_norm3_split, holder_precheck, lag_profile, measured_order, measured_order3, reconstruct_path,
    sew, sew_closed, sew_refinement,
)


def germ(grid):
    return Increment2.from_function(grid, lambda t, s: s * (t - s))


def test_grid_construction():
    g = Grid.uniform(1.0, 8)
    assert g.size == 9 and g.intervals == 8
    assert g.is_uniform and g.is_dyadic
    assert g.refine().intervals == 16
    assert g.restrict(2, 6).intervals == 4
    assert g.index_of(0.25) == 2
    with pytest.raises(ValueError):
        g.index_of(0.3)
    with pytest.raises(ValueError):
        g.restrict(3, 4)
    with pytest.raises(ValueError):
        Grid([0.0, 1.0])
    with pytest.raises(ValueError):
        Grid([0.0, 0.5, 0.5, 1.0])
    with pytest.raises(ResourceLimitError):
        Grid(np.linspace(0, 1, 10), max_intervals=5)


def test_coboundary_of_a_coboundary_vanishes(grid64):
    f = np.sin(3 * grid64.times)
    df = coboundary1(f, grid64)
    assert df.values[5, 2, 0] == pytest.approx(f[5] - f[2])
    assert coboundary2(df).max_abs() < 1e-14


def test_exterior_product_values(grid64):
    a = coboundary1(grid64.times, grid64)
    b = coboundary1(grid64.times ** 2, grid64)
    h = exterior_product(a, b)
    t = grid64.times
    assert h.evaluate(10, 4, 1)[0] == pytest.approx((t[10] - t[4]) * (t[4] ** 2 - t[1] ** 2))
    assert h.evaluate(4, 10, 1)[0] == 0.0
    left = exterior_product(t, b)
    assert left.values[7, 3, 0] == pytest.approx(t[7] * (t[7] ** 2 - t[3] ** 2))
    right = exterior_product(b, t)
    assert right.values[7, 3, 0] == pytest.approx((t[7] ** 2 - t[3] ** 2) * t[3])


def test_coboundary_of_a_product_of_increments(grid64):
    # delta(a o b) = a x b + b x a when a and b are closed
    a = coboundary1(grid64.times, grid64)
    b = coboundary1(np.cos(grid64.times), grid64)
    lhs = coboundary2(a.circle(b))
    rhs = exterior_product(a, b) + exterior_product(b, a)
    assert (lhs - rhs).max_abs() < 1e-14


def test_holder_norms(grid64):
    t = grid64.times
    assert holder_norm2(coboundary1(t, grid64), 1.0).norm == pytest.approx(1.0)
    assert holder_norm2(coboundary1(t ** 2, grid64), 1.0).norm == pytest.approx(2.0 - 1.0 / 64)
    h = coboundary2(germ(grid64))
    report = holder_norm3(h, 2.0)
    assert report.norm == pytest.approx(1.0)
    assert report.rho == pytest.approx(1.0)
    with pytest.raises(ValueError):
        holder_norm3(h, 1.0)
    with pytest.raises(ValueError):
        holder_norm2(germ(grid64), 0.0)


def test_lag_profile_and_order(grid64):
    g = Increment2.from_function(grid64, lambda t, s: (t - s) ** 2)
    profile = lag_profile(g, [1, 2, 4])
    assert profile == pytest.approx(np.array([1, 4, 16]) / 64 ** 2)
    fit = measured_order(g)
    assert fit["order"] == pytest.approx(2.0, abs=1e-8)
    assert fit["r_squared"] == pytest.approx(1.0)
    with pytest.raises(ValueError):
        lag_profile(g, [0])


def test_sew_splits_a_germ(grid64):
    g = germ(grid64)
    res = sew(g, 2.0)
    assert coboundary2(res.path_increment).max_abs() < 1e-13
    assert (coboundary2(res.lambda_part) - coboundary2(g)).max_abs() < 1e-13
    # adjacent pairs carry no remainder
    n = grid64.size
    assert np.abs(res.lambda_part.values[np.arange(1, n), np.arange(n - 1)]).max() < 1e-14
    f = reconstruct_path(g)
    t = grid64.times
    assert f[:, 0] == pytest.approx(t ** 2 / 2 - t / 128, abs=1e-14)


def test_lambda_bound_on_germ(grid64):
    res = sew(germ(grid64), 2.0)
    lam = holder_norm2(res.lambda_part, 2.0).norm
    dg = holder_norm3(coboundary2(germ(grid64)), 2.0).norm
    assert lam <= dg / (2 ** 2 - 2) + 1e-12


def test_sew_needs_mu_above_one(grid64):
    with pytest.raises(HypothesisError):
        sew(germ(grid64), 1.0)
    with pytest.raises(HypothesisError):
        sew_refinement(germ, grid64, 0.5)


def test_split_norm_reports_its_exponents(grid64):
    h = coboundary2(germ(grid64))
    report = holder_norm3_split(h, 0.5, 1.5)
    assert report.rho == 1.5 and report.mu == 2.0
    # (u-s)(t-u) / ((u-s)^0.5 (t-u)^1.5) grows as t-u shrinks
    assert report.norm > 1.0
    assert holder_norm3_split(h, 1.0, 1.0).norm == pytest.approx(1.0)


def test_measured_order_of_a_3_increment(grid64):
    h = coboundary2(germ(grid64))
    fit = measured_order3(h)
    assert fit["order"] == pytest.approx(2.0, abs=1e-8)
    assert fit["lags"][0] == 2
    assert holder_precheck(h, 2.0)["ok"]
    assert holder_precheck(h, 1.9, slack=0.0)["ok"]
    assert not holder_precheck(h, 3.0)["ok"]
    # below the floor nothing is measured
    assert holder_precheck(h * 1e-6, 3.0)["ok"]


def test_sew_warns_on_a_rough_germ(grid64, capsys):
    g = Increment2.from_function(grid64, lambda t, s: np.sign(t - s) * np.abs(t - s) ** 0.2)
    sew(g, 3.0)
    assert "decays with order" in capsys.readouterr().err
    sew(germ(grid64), 2.0)
    assert "decays with order" not in capsys.readouterr().err
    sew(g, 3.0, check=False)
    assert "decays with order" not in capsys.readouterr().err


def test_sew_closed_matches_lambda(grid64):
    g = germ(grid64)
    lam = sew_closed(coboundary2(g))
    assert (lam - sew(g, 2.0).lambda_part).max_abs() < 1e-13
    local = np.linspace(0.0, 1.0, grid64.intervals)
    shifted = sew_closed(coboundary2(g), local)
    n = grid64.size
    assert shifted.values[np.arange(1, n), np.arange(n - 1), 0] == pytest.approx(local)
    assert (coboundary2(shifted) - coboundary2(g)).max_abs() < 1e-13


def test_sew_refinement_rate():
    table = sew_refinement(germ, Grid.uniform(1.0, 16), 2.0, levels=3)
    assert len(table) == 4
    rates = table["rate"].dropna()
    assert rates.to_numpy() == pytest.approx(0.5, rel=1e-6)
    assert table["expected_rate"].iloc[0] == 0.5
