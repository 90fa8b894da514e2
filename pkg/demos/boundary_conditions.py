"""With the W22 Green kernel, rates depend on which boundary conditions the
target satisfies: f1 none, f2 some, f3 all of them."""
from superconv import bc_residual, bc_target
from superconv.experiments import ExperimentConfig, run_boundary_conditions

for variant in (1, 2, 3):
    f = bc_target(variant, 5.0)
    r2 = max(abs(v) for v in bc_residual(f, "order2"))
    r3 = max(abs(v) for v in bc_residual(f, "order3"))
    print(f"f{variant}: |f''| at ends {r2:.1e}, |f''' - f'| at ends {r3:.1e}")

alphas = [1.5, 3.5, 6.0]
result = run_boundary_conditions(ExperimentConfig("boundary-conditions", alphas=alphas, workers=4))
print(f"{'alpha+1/2':>9} {'f1':>7} {'f2':>7} {'f3':>7}   (L2 rates)")
for a in alphas:
    rates = [result.rate(a, "L2", f"bc{v}") for v in (1, 2, 3)]
    print(f"{a + 0.5:9.2f} " + " ".join(f"{r:7.3f}" for r in rates))
