import numpy as np
import pytest

from superconv.interpolation import native_norm_sq
from superconv.kernels import eval_kernel, kernel_from_id
from superconv.targets import (
    TARGET_IDS,
    bc_residual,
    bc_target,
    expansion_target,
    make_rng,
    make_target,
    power_target,
    random_periodic_target,
)


def test_power_examples():
    assert power_target(1.0, d=2)([[0.3, 0.9]])[0] == pytest.approx(0.3)
    assert power_target(2.0)([0.5])[0] == pytest.approx(0.25)
    assert power_target(2.5)([0.81])[0] == pytest.approx(0.9**5, rel=1e-14)
    with pytest.raises(ValueError):
        power_target(0.0)


def test_power_2d_ignores_second_coordinate():
    f = power_target(1.7, d=2)
    pts = np.array([[0.4, 0.1], [0.4, 0.8]])
    assert f(pts)[0] == f(pts)[1]


def test_bc_values():
    for variant in (1, 2, 3):
        assert bc_target(variant, 3.3)([0.0])[0] == 0.0
    assert bc_target(2, 2.0)([1.0])[0] == pytest.approx(2 / 3)


def test_bc_rejects_rough_alpha():
    with pytest.raises(ValueError):
        bc_target(1, 1.2)
    with pytest.raises(ValueError):
        bc_target(4, 3.0)


def test_bc3_meets_all_boundary_conditions():
    f = bc_target(3, 4.0)
    for which in ("order2", "order3"):
        r0, r1 = bc_residual(f, which)
        assert abs(r0) <= 1e-8 and abs(r1) <= 1e-8


def test_bc1_second_derivative_at_zero():
    r0, _ = bc_residual(bc_target(1, 5.0), "order2")
    assert r0 == pytest.approx(2.0, abs=1e-5)


def test_bc2_meets_only_second_order_conditions():
    f = bc_target(2, 5.0)
    assert max(map(abs, bc_residual(f, "order2"))) <= 1e-5
    assert max(map(abs, bc_residual(f, "order3"))) > 0.1


def test_bc_residual_against_analytic_derivatives():
    # f = x^a + x^2, f''(1) = a(a-1) + 2
    a = 4.5
    _, r1 = bc_residual(bc_target(1, a), "order2")
    assert r1 == pytest.approx(a * (a - 1) + 2, rel=1e-9)
    with pytest.raises(ValueError):
        bc_residual(bc_target(1, a), "order4")


def test_random_periodic_is_even_about_half():
    f = random_periodic_target(1.3, seed=4)
    x = np.linspace(0, 1, 101)
    np.testing.assert_allclose(f(x), f(1 - x), atol=1e-12)


def test_random_periodic_zero_draw_is_constant():
    f = random_periodic_target(0.8, seed=0, terms=10, xi=np.zeros(10))
    np.testing.assert_array_equal(f(np.linspace(0, 1, 5)), np.ones(5))


def test_random_periodic_resummation():
    alpha, seed, terms = 1.3, 11, 1000
    f = random_periodic_target(alpha, seed, terms)
    xi = make_rng(seed).integers(-1, 2, size=terms)
    j = np.arange(1, terms + 1)
    expected = 1 + np.sum(j ** (-alpha) * xi * np.cos(2 * np.pi * j * 0.25))
    assert f([0.25])[0] == pytest.approx(expected, rel=1e-13)
    assert f([0.25])[0] == random_periodic_target(alpha, seed, terms)([0.25])[0]


def test_random_periodic_draw_is_balanced():
    xi = random_periodic_target(1.0, seed=2, terms=30000).data
    counts = np.bincount(xi + 1) / xi.size
    np.testing.assert_allclose(counts, [1 / 3] * 3, atol=0.02)


def test_expansion_single_site():
    k = kernel_from_id("matern-linear")
    f = expansion_target(k, 1, seed=3)
    z = f.data.sites[0]
    f.data.weights[:] = 1.0
    assert f([z])[0] == pytest.approx(eval_kernel(k, z, z))


def test_expansion_deterministic_and_nonnegative_norm():
    k = kernel_from_id("matern-basic")
    a, b = expansion_target(k, 10, 7), expansion_target(k, 10, 7)
    np.testing.assert_array_equal(a.data.sites, b.data.sites)
    np.testing.assert_array_equal(a.data.weights, b.data.weights)
    assert np.all((a.data.sites > 0) & (a.data.sites < 1))
    assert np.all(np.abs(a.data.weights) <= 1)
    assert native_norm_sq(a.data) >= 0
    with pytest.raises(ValueError):
        expansion_target(k, 0, 1)


def test_make_target_identifiers():
    k = kernel_from_id("matern-basic")
    for tid in TARGET_IDS:
        f = make_target(tid, 2.0, kernel=k)
        assert f.kind == tid
        assert np.isfinite(f([0.3])[0])
    with pytest.raises(ValueError):
        make_target("gaussian-bump")
