import pytest

from brp.lift import lift_smooth
from drivers.provider import get_provider
from increments.grid import Grid
from metrics.report import set_log_file


@pytest.fixture(autouse=True)
def _no_log_file():
    set_log_file(None)
    yield


@pytest.fixture
def grid64():
    return Grid.uniform(1.0, 64)


@pytest.fixture
def poly_provider():
    """x_t = (t, t^2/2)."""
    return get_provider("polynomial", coefficients=[[0, 1], [0, 0, 0.5]])


@pytest.fixture
def identity_lift(grid64):
    return lift_smooth(get_provider("identity").get_driver(grid64), 4)


@pytest.fixture
def poly_lift(grid64, poly_provider):
    return lift_smooth(poly_provider.get_driver(grid64), 3, gamma=1 / 3)
