"""The piecewise-linear Wendland kernel with boundary nodes never beats rate 2."""
from superconv.experiments import ExperimentConfig, run_saturation

alphas = [0.5, 1.2, 1.9, 2.4, 3.0]
result = run_saturation(ExperimentConfig("saturation", alphas=alphas))
for a in alphas:
    print(f"alpha={a:<4} expected {min(a + 0.5, 2.0):<4} L2 rate {result.rate(a):.3f}")
print("rates above 2.05:", result.config["saturation_exceeded"] or "none")
