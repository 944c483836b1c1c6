"""
Convergence rates on a grid of n
================================

RMSE of H_hat regressed on n in log-log scale.  For Levy motion the slope
should sit near -1/2; for Takenaka's process the theory only gives an upper
bound n^((nu - 1)/2).
"""

from stablehurst import ExperimentConfig, run_rate

for model, params in (("LEVY", {"alpha": 1.5}), ("TAKENAKA", {"nu": 0.5, "alpha": 1.25})):
    cfg = ExperimentConfig(model, params, (128, 256, 512, 1024, 2048), replications=40, master_seed=8)
    rep = run_rate(cfg)
    r = rep.rate
    print(f"{model}: slope {r['slope']:.3f} +- {r['slope_std_error']:.3f}, "
          f"target {r['target_exponent']:.3f}, one-sided bound {r['bound']:.3f}")
    for n in cfg.n_list:
        print(f"   n={n:5d}  rmse_h = {rep.aggregates[n]['rmse_h']:.4f}")
