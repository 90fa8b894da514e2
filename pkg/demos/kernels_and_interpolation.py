"""Fit a kernel interpolant to x^0.7 and watch the error shrink as nodes are added."""
import numpy as np

from superconv import (
    check_spd,
    equispaced_interior,
    eval_interpolant,
    fill_distance,
    fit_interpolant,
    gram,
    kernel_from_id,
    power_target,
)
from superconv.metrics import error_norms

kernel = kernel_from_id("matern-linear")
f = power_target(0.7)
grid = np.linspace(0, 1, 2049)

print("Gram of 16 interior nodes:", check_spd(gram(kernel, equispaced_interior(16))).status)
print(f"{'n':>5} {'h':>9} {'L2 error':>11} {'Linf error':>11}")
for n in (16, 32, 64, 128, 256):
    X = equispaced_interior(n)
    s = fit_interpolant(kernel, X, f(X))
    err = error_norms(f(grid), eval_interpolant(s, grid), 1 / len(grid))
    print(f"{n:5d} {fill_distance(X, grid):9.2e} {err['L2']:11.3e} {err['Linf']:11.3e}")
