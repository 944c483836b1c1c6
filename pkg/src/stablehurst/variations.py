"""Filters, filtered increments and negative-power variations."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DegenerateInputError, DomainError, ValidationError

__all__ = [
    "Filter",
    "VariationStat",
    "make_filter",
    "increments",
    "v_stat",
    "w_stat",
    "abs_power",
    "pairwise_mean",
    "fbm_increment_variance",
    "levy_increment_weights",
    "levy_increment_scale",
]


@dataclass(frozen=True)
class Filter:
    """Coefficients a_0..a_K with sum a_k = 0 and sum k a_k = 0."""

    coeffs: tuple

    def __post_init__(self):
        coeffs = tuple(self.coeffs)
        object.__setattr__(self, "coeffs", coeffs)
        if len(coeffs) < 3:
            raise ValidationError(f"a filter needs K >= 2 (at least 3 coefficients), got {len(coeffs)}")
        exact = [Fraction(c) if isinstance(c, (int, Fraction)) else Fraction(c).limit_denominator(10**12)
                 for c in coeffs]
        s0 = sum(exact)
        s1 = sum(k * c for k, c in enumerate(exact))
        problems = []
        if s0 != 0:
            problems.append(f"sum a_k = {float(s0)!r} != 0")
        if s1 != 0:
            problems.append(f"sum k*a_k = {float(s1)!r} != 0")
        if problems:
            raise ValidationError("invalid filter: " + "; ".join(problems))
        if all(c == 0 for c in exact):
            raise ValidationError("invalid filter: all coefficients are zero")

    @property
    def K(self) -> int:
        return len(self.coeffs) - 1

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.coeffs, dtype=float)


def make_filter(kind="second_difference") -> Filter:
    """Build a filter.

    ``kind`` is ``"second_difference"`` -> (1, -2, 1), ``"daubechies4_like"``
    -> the four-tap Daubechies high-pass filter (two vanishing moments),
    or a sequence of coefficients validated exactly.
    """
    if isinstance(kind, Filter):
        return kind
    if isinstance(kind, str):
        key = kind.lower()
        if key in ("second_difference", "d2"):
            return Filter((1, -2, 1))
        if key in ("third_difference", "d3"):
            return Filter((1, -3, 3, -1))
        if key in ("daubechies4_like", "db4", "daubechies4"):
            s3 = math.sqrt(3.0)
            h = np.array([1 + s3, 3 + s3, 3 - s3, 1 - s3]) / (4 * math.sqrt(2.0))
            g = h[::-1] * np.array([1, -1, 1, -1])
            return _float_filter(g)
        raise ValidationError(f"unknown filter kind {kind!r}")
    return Filter(tuple(kind))


def _float_filter(coeffs) -> Filter:
    # Irrational coefficients: moment conditions hold up to rounding only.
    coeffs = tuple(float(c) for c in coeffs)
    f = object.__new__(Filter)
    object.__setattr__(f, "coeffs", coeffs)
    a = np.asarray(coeffs)
    if abs(a.sum()) > 1e-12 or abs(a @ np.arange(a.size)) > 1e-12:
        raise ValidationError("filter moment conditions violated")
    return f


def increments(path, f: Filter) -> np.ndarray:
    """Filtered increments sum_k a_k X((k + p)/n), p = 0..n-K."""
    values = np.asarray(getattr(path, "values", path), dtype=float)
    f = make_filter(f)
    n = values.size - 1
    if n < f.K:
        raise ValidationError(f"path with n={n} is shorter than the filter order K={f.K}")
    # correlate: out[p] = sum_k a_k values[p + k]
    return np.correlate(values, f.array, mode="valid")


def abs_power(x: np.ndarray, beta: float) -> np.ndarray:
    """|x|^beta as exp(beta ln|x|); zero or underflowing inputs are an error."""
    ax = np.abs(np.asarray(x, dtype=float))
    if np.any(ax == 0.0):
        raise DegenerateInputError(
            f"{int(np.count_nonzero(ax == 0.0))} filtered increment(s) are exactly zero; "
            "|0|^beta is infinite for beta < 0")
    out = np.exp(beta * np.log(ax))
    if not np.all(np.isfinite(out)):
        raise DegenerateInputError("|increment|^beta overflowed (increment too close to zero)")
    return out


def pairwise_mean(x: np.ndarray) -> float:
    """Mean with a fixed pairwise summation tree (order independent of chunking)."""
    x = np.asarray(x, dtype=float)
    n = x.size
    if n == 0:
        raise ValidationError("mean of an empty sequence")
    while x.size > 1:
        if x.size % 2:
            x = np.concatenate([x[:-2], [x[-2] + x[-1]]])
        else:
            x = x[0::2] + x[1::2]
    return float(x[0]) / n


@dataclass(frozen=True)
class VariationStat:
    beta: float
    value: float
    n: int
    count: int


def _check_beta(beta):
    # E|D|^beta is finite for beta > -1; the estimators narrow this to (-1/2, 0).
    if not -1.0 < beta < 0.0:
        raise DomainError(f"beta must lie in (-1, 0), got {beta}")


def v_stat(path, f: Filter, beta: float) -> VariationStat:
    """V_n(beta): the mean of |increment|^beta over p = 0..n-K."""
    _check_beta(beta)
    d = increments(path, f)
    value = pairwise_mean(abs_power(d, beta))
    n = d.size + make_filter(f).K - 1
    return VariationStat(beta, value, n, d.size)


def w_stat(path, f: Filter, beta: float, H: float) -> float:
    """n^(beta H) V_n(beta); needs the true H, so it is a diagnostic only."""
    v = v_stat(path, f, beta)
    return v.n ** (beta * H) * v.value


def fbm_increment_variance(f: Filter, H: float, unit_variance: float = 1.0) -> float:
    """Var of sum_k a_k X(k) for fBm: -(1/2) sum_{p,p'} a_p a_p' |p - p'|^(2H)."""
    a = make_filter(f).array
    k = np.arange(a.size)
    return -0.5 * unit_variance * float(a @ (np.abs(k[:, None] - k[None, :]) ** (2 * H)) @ a)


def levy_increment_weights(f: Filter) -> np.ndarray:
    """b_j = sum_{k > j} a_k: sum_k a_k X(k) = sum_j b_j (X(j+1) - X(j))."""
    a = make_filter(f).array
    return np.cumsum(a[::-1])[::-1][1:]


def levy_increment_scale(f: Filter, alpha: float) -> float:
    """SaS scale of sum_k a_k X(k) for standard Levy motion: (sum |b_j|^alpha)^(1/alpha)."""
    b = levy_increment_weights(f)
    return float(np.sum(np.abs(b) ** alpha) ** (1.0 / alpha))
