"""Green kernels as integral operators: pick the right normalization,
check the reproducing property and the boundary value problems."""
import numpy as np

from superconv import apply_T, composite_gauss_legendre, kernel_from_id, verify_green
from superconv.green import resolve_w21_divisor

divisor, residuals = resolve_w21_divisor()
print("divisor residuals:", {k: f"{v:.1e}" for k, v in residuals.items()}, "-> using", f"{divisor:.6f}")

rule = composite_gauss_legendre().split([0.3])
k = kernel_from_id("green-w21-matern")
print("T1(0.3) =", apply_T(k, np.ones_like(rule.nodes), rule, 0.3), "vs", 1 - 0.5 * (np.exp(-0.3) + np.exp(-0.7)))

for c in verify_green():
    print(f"{'ok' if c.passed else 'FAIL':4} {c.name:<40} {c.value:.2e} {c.comparison} {c.tolerance:g}")
