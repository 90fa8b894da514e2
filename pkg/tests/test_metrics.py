import math

import numpy as np
import pytest

from superconv.interpolation import equispaced_interior, fill_distance
from superconv.metrics import (
    ErrorRecord,
    RateFitError,
    discrete_lp_error,
    error_norms,
    fit_rate,
    w1_seminorm_error,
)


def records(ns, errs, norm="L2", hs=None):
    hs = hs if hs is not None else [1.0 / (n + 1) for n in ns]
    return [ErrorRecord(int(n), float(h), {norm: float(e)}) for n, h, e in zip(ns, hs, errs)]


def test_lp_identical_is_zero():
    f = np.linspace(0, 1, 11)
    for p in (1, 2, np.inf):
        assert discrete_lp_error(f, f, p, 1 / 11) == 0.0


def test_lp_constant_difference():
    f = np.zeros(37)
    for p in (1, 2, np.inf):
        assert discrete_lp_error(f + 0.3, f, p, 1 / 37) == pytest.approx(0.3)


def test_lp_single_cell():
    assert discrete_lp_error([1, 0, 0, 0], [0, 0, 0, 0], 1, 0.25) == pytest.approx(0.25)


def test_lp_errors():
    with pytest.raises(ValueError):
        discrete_lp_error([1, 2], [1], 2, 0.5)
    with pytest.raises(ValueError):
        discrete_lp_error([1, 2], [1, 2], 3, 0.5)


def test_w1_examples():
    x = np.linspace(0, 1, 101)
    assert w1_seminorm_error(x, x, 0.01) == 0.0
    assert w1_seminorm_error(2 * x, 0 * x, 0.01) == pytest.approx(2.0, abs=0.03)
    x = np.linspace(0, 1, 2048)
    err = w1_seminorm_error(np.sin(2 * np.pi * x), 0 * x, x[1] - x[0])
    assert err == pytest.approx(math.pi * math.sqrt(2), abs=1e-3)
    with pytest.raises(ValueError):
        w1_seminorm_error([1, 2], [0, 0], 0.5)


def test_error_norms_tags():
    f = np.sin(np.linspace(0, 3, 50))
    out = error_norms(f, 0 * f, 1 / 50)
    assert set(out) == {"L1", "L2", "Linf"}
    assert "W1" in error_norms(f, 0 * f, 1 / 50, grid_spacing=1 / 49)


def test_error_record_validation():
    with pytest.raises(ValueError):
        ErrorRecord(4, 0.0, {"L2": 1.0})
    with pytest.raises(ValueError):
        ErrorRecord(4, 0.1, {"L2": -1.0})
    with pytest.raises(ValueError):
        ErrorRecord(4, 0.1, {"L3": 1.0})
    with pytest.raises(ValueError):
        ErrorRecord(4, 0.1, {"Linf": float("nan")})


def test_fit_exact_power_law():
    ns = np.arange(10, 101, 10)
    est = fit_rate(records(ns, ns**-2.0), "L2", 0.0)
    assert est.slope == pytest.approx(2.0, abs=1e-12)
    assert est.r_squared == pytest.approx(1.0)
    assert est.levels_used == 10


def test_fit_scaled_square_root():
    ns = np.arange(10, 101, 10)
    assert fit_rate(records(ns, 3 * ns**-0.5), "L2", 0.0).slope == pytest.approx(0.5, abs=1e-12)


def test_fit_oscillating_power_law():
    ns = np.arange(10, 101)
    errs = ns**-2.0 * (1 + 0.1 * (-1.0) ** ns)
    assert 1.9 <= fit_rate(records(ns, errs), "L2", 0.0).slope <= 2.1


def test_fit_drop_fraction_discards_coarse_levels():
    ns = np.array([2, 4, 8, 16, 32, 64, 128, 256, 512, 1024])
    errs = ns**-1.0
    errs[:2] = 1.0  # pre-asymptotic junk
    est = fit_rate(records(ns, errs), "L2", 0.2)
    assert est.levels_used == 8
    assert est.slope == pytest.approx(1.0, abs=1e-12)


def test_fit_dimension_scales_rate():
    ns = np.array([16, 36, 64, 144, 256])
    est = fit_rate(records(ns, ns**-1.0), "L2", 0.0, dim=2)
    assert est.slope == pytest.approx(2.0)


def test_fit_against_fill_distance():
    ns = np.array([16, 23, 32, 45, 64, 91, 128])
    hs = [fill_distance(equispaced_interior(n), np.linspace(0, 1, 4097)) for n in ns]
    errs = 5 * np.array(hs) ** 4
    assert fit_rate(records(ns, errs, hs=hs), "L2", 0.0, against="h").slope == pytest.approx(4.0, abs=1e-12)


def test_fit_error_floor_excludes_levels():
    ns = np.array([10, 20, 40, 80, 160])
    errs = np.array([1e-1, 2.5e-2, 6.25e-3, 0.0, 1e-20])
    est = fit_rate(records(ns, errs), "L2", 0.0)
    assert est.excluded == 2
    assert est.levels_used == 3
    assert est.slope == pytest.approx(2.0)


def test_fit_needs_two_levels():
    with pytest.raises(RateFitError):
        fit_rate(records([10], [0.1]), "L2", 0.0)
    with pytest.raises(RateFitError):
        fit_rate(records([10, 20, 40], [0.1, 0.0, 0.0]), "L2", 0.0)


def test_fit_bad_arguments():
    recs = records([10, 20, 40], [0.1, 0.05, 0.02])
    with pytest.raises(ValueError):
        fit_rate(recs, "L2", 1.0)
    with pytest.raises(ValueError):
        fit_rate(recs, "L2", 0.0, against="m")
