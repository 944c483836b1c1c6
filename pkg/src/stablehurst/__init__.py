"""Estimation of the self-similarity and stability indices of stable processes.

The estimators use negative-power variations of filtered increments:

>>> from stablehurst import simulate, make_params, estimate_joint, SeedSpec
>>> path = simulate("FBM", make_params("FBM", H=0.7), 2**12, SeedSpec(1))
>>> res = estimate_joint(path)
"""

from .errors import (ConfigurationError, DegenerateInputError, DomainError, NumericError,
                     StableHurstError, ValidationError)
from .rng import SeedSpec, derive_stream, sample_gaussian, sample_standard_sas
from .specfun import (BetaPair, UVPair, h_uv, h_uv_inverse, neg_moment_closed_form, neg_moment_via_cf,
                      phi_uv, psi_uv)
from .processes import (FbmParams, LevyParams, LfsmParams, SamplePath, TakenakaParams, make_params,
                        read_path_csv, simulate, write_path_csv)
from .variations import Filter, increments, make_filter, v_stat, w_stat
from .estimators import EstimationResult, estimate_alpha, estimate_h, estimate_joint
from .asymptotics import (AsymptoticVariance, levy_cov_table, sigma_fbm, sigma_levy, xi_fbm, xi_levy)
from .experiments import ExperimentConfig, RateTarget, run_clt, run_consistency, run_rate

__version__ = "0.1.0"
