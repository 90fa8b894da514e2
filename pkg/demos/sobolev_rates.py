"""L2 rates for x^alpha follow alpha + 1/2 until the kernel saturates."""
from superconv.experiments import ExperimentConfig, run_sobolev_rates

for kernel, alphas in (("matern-basic", [0.3, 0.7, 1.7]), ("matern-linear", [0.7, 1.5, 2.7])):
    result = run_sobolev_rates(ExperimentConfig("sobolev-rates", kernel=kernel, alphas=alphas))
    print(kernel)
    for a in alphas:
        print(f"  alpha={a:<4} smoothness {a + 0.5:<4} L2 rate {result.rate(a):.3f}")
