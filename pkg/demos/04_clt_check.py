"""
Checking the normal limit by simulation
=======================================

A small CLT campaign for fBm: sample variance of sqrt(n)(H_hat - H) against
Xi, and a Kolmogorov-Smirnov distance to the predicted normal law.
Raise ``R`` and ``n`` for sharper numbers.  alpha_hat reaches its normal
limit slowly: at this n its spread is still well above Sigma.
"""

from stablehurst import ExperimentConfig, run_clt

cfg = ExperimentConfig("FBM", {"H": 0.3}, (2**11,), replications=200, master_seed=3, variance_checks=True)
report = run_clt(cfg)
for key, value in report.clt.items():
    print(f"{key} = {value}")
