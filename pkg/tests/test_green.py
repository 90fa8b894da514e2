import math

import numpy as np
import pytest

from superconv.green import (
    BVPSpec,
    GreenKernelW22,
    apply_T,
    apply_T_grid,
    build_w22_kernel,
    composite_gauss_legendre,
    fd_weights,
    green_residual,
    neumann_bvp,
    reproducing_check,
    resolve_w21_divisor,
    robin_bvp,
    verify_green,
    w22_bvp,
)
from superconv.kernels import SINH_1, SINH_E, KernelError, KernelSpec, check_spd, gram, kernel_from_id

matern = kernel_from_id("green-w21-matern")
standard = kernel_from_id("green-w21-std")


@pytest.fixture(scope="module")
def w22():
    return build_w22_kernel(128)


def sine(x):
    return np.sin(np.pi * x)


def test_rule_weights_and_nodes():
    rule = composite_gauss_legendre()
    assert abs(rule.weights.sum() - 1.0) <= 1e-12
    assert np.all(np.diff(rule.nodes) > 0)
    assert np.all(rule.weights > 0)
    assert rule.integrate(rule.nodes**5) == pytest.approx(1 / 6, rel=1e-14)


def test_rule_split_adds_edges():
    rule = composite_gauss_legendre(panels=4).split([0.3, 0.3])
    np.testing.assert_allclose(rule.edges, [0, 0.25, 0.3, 0.5, 0.75, 1.0])


def test_apply_T_zero():
    rule = composite_gauss_legendre()
    assert apply_T(matern, np.zeros_like(rule.nodes), rule, 0.4) == 0.0


def test_apply_T_constant_closed_form():
    value = apply_T_grid(matern, np.ones_like, [0.5])[0]
    assert value == pytest.approx(1 - math.exp(-0.5), abs=1e-8)


def test_apply_T_richardson_order():
    # order-2 Gauss rule on panels split at x: error falls by 2^4 per doubling
    x = 0.37
    exact = 1 - 0.5 * (math.exp(-x) + math.exp(-(1 - x)))
    errs = []
    for panels in (8, 16, 32):
        rule = composite_gauss_legendre(panels=panels, order=2)
        errs.append(abs(apply_T_grid(matern, np.ones_like, [x], rule)[0] - exact))
    ratios = [errs[0] / errs[1], errs[1] / errs[2]]
    np.testing.assert_allclose(ratios, 16.0, rtol=0.1)


def test_bvp_condition_count():
    with pytest.raises(ValueError):
        BVPSpec(2, {2: -1.0, 0: 1.0}, ((0, {1: 1.0}),))


def test_fd_weights_second_derivative():
    np.testing.assert_allclose(fd_weights([-1, 0, 1], 2), [1, -2, 1], atol=1e-12)


def test_robin_residual_small():
    res = green_residual(matern, robin_bvp(), sine)
    assert res.interior <= 1e-5
    assert res.boundary <= 1e-4


def test_neumann_constant_is_reproduced():
    u = apply_T_grid(standard, np.ones_like, np.linspace(0, 1, 11))
    np.testing.assert_allclose(u, 1.0, atol=1e-12)
    assert green_residual(standard, neumann_bvp(), np.ones_like).interior <= 1e-8


def test_corrupted_divisor_is_detected():
    bad = KernelSpec("green-w21-std", divisor=SINH_E)
    good = green_residual(standard, neumann_bvp(), np.ones_like).interior
    corrupt = green_residual(bad, neumann_bvp(), np.ones_like).interior
    assert corrupt > 0.1
    assert corrupt / good >= 1e4


def test_divisor_resolution_picks_sinh_one():
    divisor, residuals = resolve_w21_divisor()
    assert divisor == SINH_1
    assert residuals["sinh(e)"] > 0.1


def test_reproducing_w21():
    pairs = np.random.default_rng(0).uniform(size=(10, 2))
    assert reproducing_check(matern, "W21_matern_modified", pairs) <= 1e-6
    assert reproducing_check(standard, "W21_standard", pairs) <= 1e-6
    assert reproducing_check(standard, "W21_matern_modified", pairs) > 1e-2


def test_reproducing_rejects_mismatch(w22):
    with pytest.raises(KernelError):
        reproducing_check(w22, "W21_standard", [(0.2, 0.4)])
    with pytest.raises(ValueError):
        reproducing_check(matern, "H1_weird", [(0.2, 0.4)])


def test_w22_matching_conditions(w22):
    G = w22.w22
    y = 0.41
    C = G.coefficients([y])[0]
    from superconv.green import _basis

    for k in range(3):
        b = _basis(y, k)
        assert abs(b @ C[:4] - b @ C[4:]) <= 1e-8
    b3 = _basis(y, 3)
    assert b3 @ C[4:] - b3 @ C[:4] == pytest.approx(1.0, abs=1e-8)
    for end, block in ((0.0, C[:4]), (1.0, C[4:])):
        assert abs(_basis(end, 2) @ block) <= 1e-8
        assert abs((_basis(end, 3) - _basis(end, 1)) @ block) <= 1e-8


def test_w22_symmetry_and_reproducing(w22):
    assert abs(w22.w22.matrix([0.3], [0.7])[0, 0] - w22.w22.matrix([0.7], [0.3])[0, 0]) <= 1e-7
    pairs = np.random.default_rng(1).uniform(size=(10, 2))
    assert reproducing_check(w22, "W22_standard", pairs) <= 1e-4


def test_w22_residual(w22):
    assert green_residual(w22, w22_bvp(), lambda x: x * (1 - x)).interior <= 1e-4


def test_w22_gram_is_spd(w22):
    X = np.sort(np.random.default_rng(2).uniform(size=15))
    assert check_spd(gram(w22, X)).status == "spd"


def test_w22_resolution_bound():
    with pytest.raises(ValueError):
        GreenKernelW22(resolution=16)


def test_w22_concurrent_lookups(w22):
    from concurrent.futures import ThreadPoolExecutor

    G = GreenKernelW22(64)
    ys = np.random.default_rng(4).uniform(size=(8, 50))
    with ThreadPoolExecutor(4) as pool:
        out = list(pool.map(G.coefficients, ys))
    for y, c in zip(ys, out):
        np.testing.assert_array_equal(c, G.coefficients(y))


def test_verify_green_all_pass():
    checks = verify_green(resolution=128)
    assert len(checks) == 11
    assert all(c.passed for c in checks), [c for c in checks if not c.passed]
