"""Point estimators of the Hurst index H and the stability index alpha.

``H_hat = (1/beta) log2(V_{n/2}(beta) / V_n(beta))`` compares the variation
of the path with that of its every-other-point subsample.

``alpha_hat = phi(psi(V_n(beta1), V_n(beta2)))``.  Because psi is invariant
under ``(x, y) -> (l^beta1 x, l^beta2 y)``, feeding V_n or n^(beta H) V_n
gives the same value, so H is never needed.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .errors import DomainError, ValidationError
from .specfun import BetaPair, phi_uv, psi_uv
from .variations import Filter, make_filter, v_stat

__all__ = ["EstimationResult", "estimate_h", "estimate_alpha", "estimate_joint",
           "h_from_variations", "alpha_from_variations",
           "DEFAULT_BETA", "DEFAULT_BETA_PAIR"]

DEFAULT_BETA = -0.25
DEFAULT_BETA_PAIR = BetaPair(-0.4, -0.1)


@dataclass(frozen=True)
class EstimationResult:
    h_hat: float
    alpha_hat: float
    v_n_beta: float
    v_half_beta: float
    v_n_beta1: float
    v_n_beta2: float
    psi_value: float
    degenerate_alpha: bool
    n: int

    def as_dict(self) -> dict:
        return asdict(self)


def _values(path):
    return getattr(path, "values", path)


def h_from_variations(v_half: float, v_full: float, beta: float) -> float:
    """(1/beta) log2(v_half / v_full)."""
    return math.log2(v_half / v_full) / beta


def alpha_from_variations(v1: float, v2: float, bp: BetaPair) -> tuple[float, bool, float]:
    """Return ``(alpha_hat, degenerate, psi_value)`` from V_n(beta1), V_n(beta2)."""
    bp = _beta_pair(bp)
    s = psi_uv(bp.uv, v1, v2)
    return phi_uv(bp.uv, s), s >= 0.0, s


def _beta_pair(bp) -> BetaPair:
    if isinstance(bp, BetaPair):
        return bp
    b1, b2 = bp
    return BetaPair(float(b1), float(b2))


def _check_beta(beta):
    if not -0.5 < beta < 0.0:
        raise DomainError(f"beta must lie in (-1/2, 0), got {beta}")


def _half_path(path, f: Filter):
    values = _values(path)
    n = len(values) - 1
    if n % 2:
        raise ValidationError(f"H estimation needs an even n, got n={n}; drop the last observation first")
    if n < 2 * f.K:
        raise ValidationError(f"H estimation needs n >= 2K = {2 * f.K}, got n={n}")
    return values[::2]


def estimate_h(path, f: Filter = "second_difference", beta: float = DEFAULT_BETA) -> float:
    """Ĥ_n from one observed path (n even, n >= 2K); not clamped to (0, 1)."""
    f = make_filter(f)
    _check_beta(beta)
    half = _half_path(path, f)
    return h_from_variations(v_stat(half, f, beta).value, v_stat(_values(path), f, beta).value, beta)


def estimate_alpha(path, f: Filter = "second_difference", bp=DEFAULT_BETA_PAIR) -> tuple[float, bool]:
    """(alpha_hat, degenerate) where degenerate means psi >= 0 and alpha_hat = 0."""
    f = make_filter(f)
    bp = _beta_pair(bp)
    values = _values(path)
    a, degenerate, _ = alpha_from_variations(v_stat(values, f, bp.beta1).value,
                                             v_stat(values, f, bp.beta2).value, bp)
    return a, degenerate


def estimate_joint(path, f: Filter = "second_difference", beta: float = DEFAULT_BETA,
                   bp=DEFAULT_BETA_PAIR) -> EstimationResult:
    """Both estimators plus the intermediate statistics."""
    f = make_filter(f)
    bp = _beta_pair(bp)
    values = _values(path)
    n = len(values) - 1
    _check_beta(beta)
    half = _half_path(path, f)
    v_n = v_stat(values, f, beta).value
    v_half = v_stat(half, f, beta).value
    v1 = v_stat(values, f, bp.beta1).value
    v2 = v_stat(values, f, bp.beta2).value
    a, degenerate, s = alpha_from_variations(v1, v2, bp)
    return EstimationResult(
        h_hat=h_from_variations(v_half, v_n, beta),
        alpha_hat=a,
        v_n_beta=v_n,
        v_half_beta=v_half,
        v_n_beta1=v1,
        v_n_beta2=v2,
        psi_value=s,
        degenerate_alpha=bool(degenerate),
        n=n,
    )
