"""Gamma-function machinery and the closed-form maps behind the estimators.

Notation: for the alpha estimator one works with ``u = -beta1`` and
``v = -beta2`` where ``-1/2 < beta1 < beta2 < 0``, hence ``0 < v < u < 1/2``.

* ``g_uv(x) = u lnG(1 + v x) - v lnG(1 + u x)`` is strictly decreasing on
  ``(0, inf)`` with ``g_uv(0+) = 0``.
* ``h_uv(x) = g_uv(1/x)`` is strictly increasing, negative, and is the value
  of ``psi_uv`` at the exact negative moments of an SaS law with index ``x``.
* ``phi_uv`` inverts ``h_uv`` on the negative half-line and is 0 elsewhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize, special

from .errors import DomainError, NumericError

__all__ = [
    "BetaPair",
    "UVPair",
    "log_gamma",
    "digamma",
    "c_beta",
    "neg_moment_closed_form",
    "neg_moment_via_cf",
    "neg_moment_gaussian",
    "g_uv",
    "g_uv_prime",
    "h_uv",
    "h_uv_prime",
    "h_uv_inverse",
    "psi_uv",
    "psi_uv_gradient",
    "psi_constant",
    "phi_uv",
]

LN_PI = math.log(math.pi)


@dataclass(frozen=True)
class BetaPair:
    """Exponents ``beta1 < beta2`` in (-1/2, 0) used by the alpha estimator."""

    beta1: float
    beta2: float

    def __post_init__(self):
        if not (-0.5 < self.beta1 < self.beta2 < 0.0):
            raise DomainError(f"need -1/2 < beta1 < beta2 < 0, got ({self.beta1}, {self.beta2})")

    @property
    def uv(self) -> "UVPair":
        return UVPair(-self.beta1, -self.beta2)


@dataclass(frozen=True)
class UVPair:
    """Positive pair ``0 < v < u < 1/2``; ``u = -beta1``, ``v = -beta2``."""

    u: float
    v: float

    def __post_init__(self):
        if not (0.0 < self.v < self.u < 0.5):
            raise DomainError(f"need 0 < v < u < 1/2, got u={self.u}, v={self.v}")


def _as_uv(uv) -> UVPair:
    if isinstance(uv, UVPair):
        return uv
    if isinstance(uv, BetaPair):
        return uv.uv
    u, v = uv
    return UVPair(float(u), float(v))


def log_gamma(x):
    """ln Gamma(x) for x > 0."""
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise DomainError("log_gamma requires x > 0")
    out = special.gammaln(x)
    return float(out) if out.ndim == 0 else out


def digamma(x):
    """Gamma'(x) / Gamma(x) for x > 0."""
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise DomainError("digamma requires x > 0")
    out = special.psi(x)
    return float(out) if out.ndim == 0 else out


def _check_beta(beta, lo=-1.0):
    if not (lo < beta < 0.0):
        raise DomainError(f"beta must lie in ({lo}, 0), got {beta}")


def _check_alpha(alpha):
    if not (0.0 < alpha <= 2.0):
        raise DomainError(f"alpha must lie in (0, 2], got {alpha}")


def c_beta(beta: float) -> float:
    """Constant of the Fourier representation of |x|^beta, beta in (-1, 0)."""
    _check_beta(beta)
    return math.exp((beta + 0.5) * math.log(2.0)
                    + log_gamma((beta + 1.0) / 2.0) - log_gamma(-beta / 2.0))


def neg_moment_closed_form(alpha: float, beta: float) -> float:
    """E|X|^beta for a standard SaS variable X (cf exp(-|t|^alpha))."""
    _check_alpha(alpha)
    _check_beta(beta)
    log_val = (beta * math.log(2.0) + log_gamma((beta + 1.0) / 2.0)
               + log_gamma(1.0 - beta / alpha)
               - 0.5 * LN_PI - log_gamma(1.0 - beta / 2.0))
    return math.exp(log_val)


def neg_moment_via_cf(alpha: float, beta: float) -> float:
    """E|X|^beta from the characteristic-function integral, by quadrature.

    Evaluates ``(2 C_beta / sqrt(2 pi)) int_0^inf exp(-y^alpha) y^(-beta-1) dy``
    after the change of variable ``t = y^alpha``, which leaves
    ``(1/alpha) int_0^inf t^(s-1) exp(-t) dt`` with ``s = -beta/alpha``.  The
    algebraic endpoint singularity on (0, 1) is handled by QUADPACK's
    ``alg`` weight, so no Gamma function enters the integral itself.
    """
    _check_alpha(alpha)
    _check_beta(beta)
    s = -beta / alpha
    head, err_head = integrate.quad(lambda t: math.exp(-t), 0.0, 1.0,
                                    weight="alg", wvar=(s - 1.0, 0.0),
                                    epsabs=0.0, epsrel=1e-13, limit=200)
    tail, err_tail = integrate.quad(lambda t: t ** (s - 1.0) * math.exp(-t), 1.0, np.inf,
                                    epsabs=0.0, epsrel=1e-13, limit=200)
    total = head + tail
    if (err_head + err_tail) > 1e-10 * abs(total):
        raise NumericError(f"quadrature did not converge for alpha={alpha}, beta={beta}")
    return 2.0 * c_beta(beta) / math.sqrt(2.0 * math.pi) * total / alpha


def neg_moment_gaussian(s: float, beta: float) -> float:
    """E|N(0, s^2)|^beta for s > 0, beta in (-1, 0)."""
    if not s > 0:
        raise DomainError(f"s must be positive, got {s}")
    _check_beta(beta)
    return math.exp(beta * math.log(s) + 0.5 * beta * math.log(2.0)
                    + log_gamma((beta + 1.0) / 2.0) - 0.5 * LN_PI)


def _check_positive(x, name="x"):
    if np.any(~(np.asarray(x) > 0)):
        raise DomainError(f"{name} must be positive")


def g_uv(uv, x):
    """u lnG(1 + v x) - v lnG(1 + u x) for x > 0."""
    uv = _as_uv(uv)
    _check_positive(x)
    x = np.asarray(x, dtype=float)
    out = uv.u * special.gammaln(1.0 + uv.v * x) - uv.v * special.gammaln(1.0 + uv.u * x)
    return float(out) if out.ndim == 0 else out


def g_uv_prime(uv, x):
    """Derivative of ``g_uv``: u v (digamma(1 + v x) - digamma(1 + u x))."""
    uv = _as_uv(uv)
    _check_positive(x)
    x = np.asarray(x, dtype=float)
    out = uv.u * uv.v * (special.psi(1.0 + uv.v * x) - special.psi(1.0 + uv.u * x))
    return float(out) if out.ndim == 0 else out


def h_uv(uv, x):
    """g_uv(1/x); negative and strictly increasing on (0, inf)."""
    _check_positive(x)
    return g_uv(uv, 1.0 / np.asarray(x, dtype=float))


def h_uv_prime(uv, x):
    """Derivative of ``h_uv`` by the chain rule, -g'(1/x) / x^2."""
    _check_positive(x)
    x = np.asarray(x, dtype=float)
    out = -g_uv_prime(uv, 1.0 / x) / x**2
    return float(out) if np.ndim(out) == 0 else out


def h_uv_inverse(uv, y: float, max_grow: int = 60) -> float:
    """Solve ``h_uv(x) = y`` for x > 0, given y < 0.

    The bracket starts at [1e-6, 1e6] and is widened geometrically until it
    contains the root; Brent's method then exploits strict monotonicity.
    """
    uv = _as_uv(uv)
    y = float(y)
    if not y < 0:
        raise DomainError(f"h_uv_inverse needs y < 0, got {y}")

    def f(x):
        return h_uv(uv, x) - y

    lo, hi = 1e-6, 1e6
    for _ in range(max_grow):
        if f(lo) <= 0.0:
            break
        lo /= 10.0
    else:
        raise NumericError(f"could not bracket h_uv^-1({y}) from below")
    for _ in range(max_grow):
        if f(hi) >= 0.0:
            break
        hi *= 10.0
    else:
        raise NumericError(f"could not bracket h_uv^-1({y}) from above")
    if f(lo) == 0.0:
        return lo
    x = optimize.brentq(f, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    if abs(f(x)) > 1e-12 * max(1.0, abs(y)):
        raise NumericError(f"h_uv^-1({y}) residual {f(x):.3e} above tolerance")
    return x


def psi_constant(uv) -> float:
    """The additive constant C(u, v) of ``psi_uv``."""
    uv = _as_uv(uv)
    u, v = uv.u, uv.v
    return (0.5 * (u - v) * LN_PI
            + u * log_gamma(1.0 + v / 2.0) + v * log_gamma((1.0 - u) / 2.0)
            - v * log_gamma(1.0 + u / 2.0) - u * log_gamma((1.0 - v) / 2.0))


def psi_uv(uv, x, y):
    """-v ln x + u ln y + C(u, v) for x, y > 0.

    Evaluated at ``(E|D|^beta1, E|D|^beta2)`` for an SaS variable D of any
    scale this equals ``h_uv(alpha)``.
    """
    uv = _as_uv(uv)
    _check_positive(x, "x")
    _check_positive(y, "y")
    out = -uv.v * np.log(x) + uv.u * np.log(y) + psi_constant(uv)
    return float(out) if np.ndim(out) == 0 else out


def psi_uv_gradient(uv, x: float, y: float) -> np.ndarray:
    """Gradient of ``psi_uv`` at (x, y)."""
    uv = _as_uv(uv)
    return np.array([-uv.v / x, uv.u / y])


def phi_uv(uv, x: float) -> float:
    """0 for x >= 0, ``h_uv_inverse(x)`` for x < 0."""
    x = float(x)
    if x >= 0.0:
        return 0.0
    return h_uv_inverse(uv, x)
