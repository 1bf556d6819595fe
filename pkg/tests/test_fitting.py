import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from grazing_maps.errors import NonPositiveValues, TooFewPoints
from grazing_maps.fitting import ScalingFit, default_window, fit_power_law

EPS = np.logspace(-8, -4, 9)


@given(st.floats(-2, 2), st.floats(1e-3, 1e3))
def test_exact_power_law_recovered(p, c):
    fit = fit_power_law(EPS, c * EPS**p)
    assert fit.slope == pytest.approx(p, abs=1e-10)
    assert fit.coefficient == pytest.approx(c, rel=1e-8)
    assert fit.max_residual <= 1e-9


def test_constant_column():
    fit = fit_power_law(EPS, np.full(9, 3.7))
    assert abs(fit.slope) <= 1e-10


def test_sign_is_ignored():
    fit = fit_power_law(EPS, -2 * EPS**0.25)
    assert fit.slope == pytest.approx(0.25, abs=1e-12)


def test_default_window_drops_largest():
    assert default_window(EPS) == list(range(8))
    assert default_window(EPS[::-1]) == list(range(1, 9))
    fit = fit_power_law(EPS, EPS)
    assert fit.window == tuple(range(8))


def test_largest_point_excluded_from_fit():
    vals = EPS**0.5
    vals[-1] = 1e6  # outlier at the largest eps
    assert fit_power_law(EPS, vals).slope == pytest.approx(0.5, abs=1e-12)


def test_residual_reported():
    vals = EPS * np.exp([0, 0.1, 0, -0.1, 0, 0.1, 0, -0.1, 0])
    fit = fit_power_law(EPS, vals)
    assert fit.max_residual > 0.05


def test_too_few_points():
    with pytest.raises(TooFewPoints):
        fit_power_law(EPS[:4], EPS[:4])
    with pytest.raises(TooFewPoints):
        fit_power_law(EPS, EPS, window=[0, 1, 2])


def test_zero_values_rejected():
    vals = EPS.copy()
    vals[2] = 0.0
    with pytest.raises(NonPositiveValues):
        fit_power_law(EPS, vals)
    vals[2] = np.nan
    with pytest.raises(NonPositiveValues):
        fit_power_law(EPS, vals)


def test_roundtrip_dict():
    fit = fit_power_law(EPS, 3 * EPS**0.75, "shift")
    assert ScalingFit.from_dict(fit.to_dict()) == fit
    assert "slope 0.750000" in fit.summary()
