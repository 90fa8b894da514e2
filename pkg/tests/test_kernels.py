import math

import numpy as np
import pytest

from superconv.kernels import (
    KERNEL_IDS,
    KernelError,
    KernelSpec,
    bernoulli_poly,
    check_spd,
    eval_kernel,
    gram,
    kernel_from_id,
    kernel_matrix,
)


def test_matern_basic_diagonal_is_one():
    assert eval_kernel(kernel_from_id("matern-basic"), 0.3, 0.3) == 1.0


def test_matern_closed_forms():
    r = 0.37
    x, y = 0.1, 0.1 + r
    assert eval_kernel(kernel_from_id("matern-basic"), x, y) == pytest.approx(math.exp(-r), rel=1e-14)
    assert eval_kernel(kernel_from_id("matern-linear"), x, y) == pytest.approx(
        math.exp(-r) * (1 + r), rel=1e-14
    )
    assert eval_kernel(kernel_from_id("matern-quadratic"), x, y) == pytest.approx(
        math.exp(-r) * (3 + 3 * r + r * r), rel=1e-14
    )


def test_matern_2d_uses_euclidean_distance():
    k = kernel_from_id("matern-basic", d=2)
    assert eval_kernel(k, [0.0, 0.0], [0.3, 0.4]) == pytest.approx(math.exp(-0.5))


def test_periodic_bernoulli_r1_at_zero_and_half():
    k = kernel_from_id("periodic-r1")
    assert eval_kernel(k, 0.2, 0.2) == pytest.approx(1 + math.pi**2 / 3, rel=1e-14)
    assert eval_kernel(k, 0.0, 0.5) == pytest.approx(1 - math.pi**2 / 6, rel=1e-14)


def test_periodic_bernoulli_matches_long_series():
    # tail of 2 sum_{j>J} j^-2 is about 2/J
    bern = kernel_from_id("periodic-r1")
    series = KernelSpec("periodic-series", alpha=1.0, terms=1_000_000)
    for x, y in [(0.0, 0.0), (0.0, 0.5), (0.13, 0.71)]:
        assert abs(eval_kernel(bern, x, y) - eval_kernel(series, x, y)) <= 1e-5


def test_periodic_reduces_distance_mod_one():
    k = kernel_from_id("periodic-r2")
    np.testing.assert_allclose(eval_kernel(k, 0.1, 0.9), eval_kernel(k, 0.1, -0.1 + 0.0), rtol=1e-13)
    np.testing.assert_allclose(eval_kernel(k, 0.0, 1.0), eval_kernel(k, 0.0, 0.0), rtol=1e-13)


def test_green_w21_matern_diagonal():
    assert eval_kernel(kernel_from_id("green-w21-matern"), 0.3, 0.3) == 0.5


def test_green_w21_standard_closed_form():
    k = kernel_from_id("green-w21-std")
    expected = math.cosh(0.2) * math.cosh(1 - 0.6) / math.sinh(1.0)
    assert eval_kernel(k, 0.6, 0.2) == pytest.approx(expected, rel=1e-14)


def test_green_w22_requires_construction():
    with pytest.raises(KernelError):
        eval_kernel(KernelSpec("green-w22"), 0.2, 0.3)


def test_bernoulli_constants():
    assert bernoulli_poly(2, 0.0) == pytest.approx(1 / 6)
    assert bernoulli_poly(2, 0.5) == pytest.approx(-1 / 12)
    assert bernoulli_poly(4, 0.0) == pytest.approx(-1 / 30)
    with pytest.raises(ValueError):
        bernoulli_poly(3, 0.1)


def test_gram_examples():
    np.testing.assert_array_equal(gram(kernel_from_id("matern-basic"), [0.5]), [[1.0]])
    np.testing.assert_array_equal(gram(kernel_from_id("wendland-1"), [0.0, 1.0]), np.eye(2))
    e = math.exp(-0.2)
    np.testing.assert_allclose(gram(kernel_from_id("matern-basic"), [0.2, 0.4]), [[1, e], [e, 1]], rtol=1e-14)


def test_gram_is_exactly_symmetric():
    X = np.random.default_rng(3).uniform(size=40)
    for kid in ("matern-quadratic", "periodic-r2", "green-w21-std"):
        G = gram(kernel_from_id(kid), X)
        np.testing.assert_array_equal(G, G.T)


def test_kernel_matrix_rectangular_shape():
    k = kernel_from_id("matern-linear")
    assert kernel_matrix(k, np.linspace(0, 1, 5), np.linspace(0, 1, 3)).shape == (5, 3)


def test_dimension_mismatch_raises():
    with pytest.raises((KernelError, ValueError)):
        eval_kernel(kernel_from_id("matern-basic", d=2), [0.1, 0.2, 0.3], [0.1, 0.2, 0.3])
    with pytest.raises((KernelError, ValueError)):
        kernel_from_id("periodic-r1", d=2)


def test_unknown_kernel_id():
    with pytest.raises(ValueError):
        kernel_from_id("gaussian")


def test_kernel_ids_are_addressable():
    for kid in KERNEL_IDS:
        if kid == "green-w22":
            continue
        spec = kernel_from_id(kid)
        assert eval_kernel(spec, 0.4, 0.4) > 0


def test_check_spd_examples():
    diag = check_spd(np.eye(3))
    assert diag.status == "spd"
    assert diag.smallest_pivot == 1.0
    assert check_spd(np.ones((2, 2))).status == "semidefinite"
    assert check_spd(np.array([[1.0, 2.0], [2.0, 1.0]])).status == "indefinite"
    assert check_spd(np.array([[0.0, 1.0], [1.0, 0.0]])).status == "indefinite"


def test_check_spd_matern_agrees_with_eigenvalues():
    X = np.sort(np.random.default_rng(0).uniform(size=10))
    G = gram(kernel_from_id("matern-basic"), X)
    assert check_spd(G).status == "spd"
    assert np.linalg.eigvalsh(G).min() > 0
