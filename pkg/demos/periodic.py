"""Random cosine series interpolated with periodic Bernoulli kernels.

The series with coefficients j^-alpha is in W_2^s only for s < alpha - 1/2,
and the averaged L2 rates sit close to that value until they saturate
near 2r.
"""
from superconv.experiments import ExperimentConfig, run_periodic

for kernel, alphas in (("periodic-r1", [0.8, 1.8, 2.8]), ("periodic-r2", [1.8, 3.8, 5.5])):
    cfg = ExperimentConfig("periodic", kernel=kernel, alphas=alphas, replicates=5, workers=4)
    result = run_periodic(cfg)
    print(kernel)
    for a in alphas:
        print(f"  alpha={a:<4} mean L2 rate {result.mean_rate(a):.3f}")
