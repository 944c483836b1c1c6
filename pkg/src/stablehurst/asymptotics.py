"""Asymptotic variances of the H and alpha estimators.

fBm (Gaussian, long memory)
    The H statistic is a functional of the stationary Gaussian sequence of
    normalised filtered increments.  Its limiting covariance matrix is
    assembled from Hermite coefficients of ``|x|^beta`` and the correlation
    functions ``rho`` (same scale) and ``rho1`` (fine versus coarse scale).

SaS Levy motion (independent increments)
    Filtered increments form a (K-1)-dependent sequence, so the limiting
    covariances are finite sums of covariances of ``|increment|^beta``.
    These have no closed form and are estimated by Monte Carlo.

Both cases finish with the delta method through the estimator maps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special

from .errors import DomainError, ValidationError
from .rng import SeedSpec, derive_stream, sample_standard_sas
from .specfun import BetaPair, h_uv_prime, neg_moment_closed_form, neg_moment_gaussian, psi_uv_gradient
from .variations import Filter, fbm_increment_variance, levy_increment_scale, make_filter

__all__ = [
    "CorrelationKernel",
    "HermiteExpansion",
    "AsymptoticVariance",
    "LevyCovTable",
    "rho",
    "rho1",
    "hermite_abs_moment",
    "hermite_abs_moment_sum",
    "hermite_coeffs",
    "hermite_parseval_check",
    "gradient_h_map",
    "gradient_alpha_map",
    "xi_fbm",
    "sigma_fbm",
    "levy_cov_table",
    "xi_levy",
    "sigma_levy",
]

LN2 = math.log(2.0)


# ------------------------------------------------------------------ correlations

@dataclass(frozen=True)
class CorrelationKernel:
    """Correlations of normalised filtered fBm increments.

    ``kind="RHO"``: corr(D_k, D_0) at the same scale.
    ``kind="RHO1"``: corr(D_k, D'_l) with D' taken on the grid of step 2,
    as a function of ``r = k - 2 l``.
    """

    filter: Filter
    H: float
    kind: str = "RHO"

    def __post_init__(self):
        object.__setattr__(self, "filter", make_filter(self.filter))
        if not 0.0 < self.H < 1.0:
            raise DomainError(f"H must lie in (0, 1), got {self.H}")
        if self.kind not in ("RHO", "RHO1"):
            raise ValidationError(f"kind must be RHO or RHO1, got {self.kind!r}")

    def __call__(self, r):
        return (rho if self.kind == "RHO" else rho1)(self, r)


def _kernel_sum(a, H, r, step):
    # sum_{p,p'} a_p a_p' |r + p - step p'|^(2H), vectorised in r
    k = np.arange(a.size)
    r = np.asarray(r, dtype=float)
    shifts = k[:, None] - step * k[None, :]
    w = a[:, None] * a[None, :]
    return np.tensordot(np.abs(r[..., None, None] + shifts) ** (2 * H), w, axes=([-2, -1], [0, 1]))


def rho(kernel: CorrelationKernel, k):
    """Same-scale correlation of normalised filtered increments at lag k."""
    a = kernel.filter.array
    num = _kernel_sum(a, kernel.H, k, 1)
    den = _kernel_sum(a, kernel.H, 0.0, 1)
    out = num / den
    return float(out) if np.ndim(out) == 0 else out


def rho1(kernel: CorrelationKernel, r):
    """Fine/coarse correlation corr(D_k, D'_l), r = k - 2l."""
    a = kernel.filter.array
    num = _kernel_sum(a, kernel.H, r, 2)
    den = 2.0 ** kernel.H * _kernel_sum(a, kernel.H, 0.0, 1)
    out = num / den
    return float(out) if np.ndim(out) == 0 else out


# ------------------------------------------------------------------ Hermite

def _abs_normal_moment(s):
    # E|Z|^s, Z ~ N(0, 1), s > -1
    return math.exp(0.5 * s * LN2 + special.gammaln((s + 1.0) / 2.0) - 0.5 * math.log(math.pi))


def hermite_abs_moment(beta: float, q: int) -> float:
    """E[|Z|^beta He_q(Z)] for Z ~ N(0, 1) and probabilists' Hermite He_q, product form.

    Zero for odd q.  For even q = 2m, Gaussian integration by parts (valid
    for large exponents and continued analytically in beta) gives

        beta (beta - 1) ... (beta - q + 1) * 2^((beta - q)/2) Gamma((beta - q + 1)/2) / sqrt(pi),

    evaluated in log space with explicit signs; there is no cancellation.
    """
    if q % 2:
        return 0.0
    if q == 0:
        return _abs_normal_moment(beta)
    # (beta)_q falling factorial: q negative factors for beta < 0 -> positive for even q.
    idx = np.arange(q)
    factors = beta - idx
    sign = np.prod(np.sign(factors))
    log_fall = np.sum(np.log(np.abs(factors)))
    z = (beta - q + 1.0) / 2.0
    sign *= special.gammasgn(z)
    log_val = log_fall + 0.5 * (beta - q) * LN2 + special.gammaln(z) - 0.5 * math.log(math.pi)
    return float(sign * math.exp(log_val))


def hermite_abs_moment_sum(beta: float, q: int) -> tuple[float, float]:
    """E[|Z|^beta He_q(Z)] by the explicit alternating sum over the monomials of He_q.

    Returns ``(value, rel_error_estimate)``.  Every term is formed in log
    space with its sign carried separately; the error estimate is
    ``eps * (number of terms) * sum|term| / |value|``, which grows with q
    as the alternating terms cancel.
    """
    if q % 2:
        return 0.0, 0.0
    m = q // 2
    j = np.arange(m + 1)
    z = (beta + 2 * m - 2 * j + 1.0) / 2.0
    log_t = (special.gammaln(q + 1.0) - special.gammaln(j + 1.0) - special.gammaln(2 * m - 2 * j + 1.0)
             - j * LN2 + math.log(2.0 / math.sqrt(2.0 * math.pi))
             + 0.5 * (beta + 2 * m - 2 * j - 1.0) * LN2 + special.gammaln(z))
    terms = np.where(j % 2, -1.0, 1.0) * special.gammasgn(z) * np.exp(log_t)
    value = math.fsum(terms)
    if value == 0.0:
        return value, math.inf
    rel = np.finfo(float).eps * terms.size * float(np.abs(terms).sum()) / abs(value)
    return value, rel


@dataclass(frozen=True)
class HermiteExpansion:
    """Hermite coefficients of f(x) = s^beta (|x|^beta - E|Z|^beta).

    ``coeffs[q] = E[f(Z) He_q(Z)] / q!`` for q = 0..Q; ``second_moment``
    is E f(Z)^2 in closed form and ``tail_bound`` its Parseval gap
    ``E f^2 - sum_{q<=Q} q! f_q^2``.
    """

    beta: float
    increment_std: float
    coeffs: np.ndarray
    Q: int
    second_moment: float
    tail_bound: float
    flagged: tuple = ()

    @property
    def energies(self) -> np.ndarray:
        q = np.arange(self.Q + 1)
        return special.factorial(q) * self.coeffs**2


def hermite_coeffs(beta: float, increment_std: float, Q: int = 40, method: str = "sum",
                   max_rel_error: float = 1e-6) -> HermiteExpansion:
    """Hermite coefficients f_0..f_Q of s^beta (|x|^beta - E|Z|^beta).

    ``method="sum"`` evaluates each moment by the alternating sum and falls
    back to the product form, recording q in ``flagged``, when the
    cancellation estimate exceeds ``max_rel_error``.  ``method="product"``
    uses the product form throughout.  f_0 = 0 (centring) and odd
    coefficients vanish by symmetry.
    """
    if not -0.5 < beta < 0.0:
        raise DomainError(f"beta must lie in (-1/2, 0), got {beta}")
    if Q < 4 or Q % 2:
        raise DomainError(f"Q must be an even integer >= 4, got {Q}")
    if method not in ("sum", "product"):
        raise ValidationError(f"method must be 'sum' or 'product', got {method!r}")
    scale = increment_std**beta
    coeffs = np.zeros(Q + 1)
    flagged = []
    for q in range(2, Q + 1, 2):
        if method == "sum":
            value, rel = hermite_abs_moment_sum(beta, q)
            if rel > max_rel_error:
                value = hermite_abs_moment(beta, q)
                flagged.append(q)
        else:
            value = hermite_abs_moment(beta, q)
        coeffs[q] = scale * value / math.factorial(q)
    second = scale**2 * (_abs_normal_moment(2 * beta) - _abs_normal_moment(beta) ** 2)
    partial = float(np.sum(special.factorial(np.arange(Q + 1)) * coeffs**2))
    return HermiteExpansion(beta, float(increment_std), coeffs, Q, second, max(second - partial, 0.0),
                            tuple(flagged))


def _cross_moment(fe: HermiteExpansion, ge: HermiteExpansion) -> float:
    # E[f(Z) g(Z)] in closed form
    s = fe.increment_std
    return s ** (fe.beta + ge.beta) * (_abs_normal_moment(fe.beta + ge.beta)
                                       - _abs_normal_moment(fe.beta) * _abs_normal_moment(ge.beta))


def _gaussian_series(fe: HermiteExpansion, ge: HermiteExpansion, corr: np.ndarray):
    """sum_r sum_q q! f_q g_q corr(r)^q with the exact value wherever |corr| = 1.

    Returns (value, q_tail_bound).
    """
    Q = min(fe.Q, ge.Q)
    q = np.arange(2, Q + 1, 2)
    w = special.factorial(q) * fe.coeffs[q] * ge.coeffs[q]
    corr = np.asarray(corr, dtype=float)
    unit = np.isclose(np.abs(corr), 1.0, rtol=0.0, atol=1e-14)
    inner = corr[~unit]
    value = float(np.sum(np.power.outer(inner, q) @ w)) if inner.size else 0.0
    value += unit.sum() * _cross_moment(fe, ge)
    gap = math.sqrt(fe.tail_bound * ge.tail_bound)
    q_tail = gap * float(np.sum(np.abs(inner) ** (Q + 2)))
    return value, q_tail


# ------------------------------------------------------------------ results

@dataclass
class AsymptoticVariance:
    """Delta-method variance ``gradient @ gamma @ gradient``."""

    value: float
    gamma: np.ndarray
    gradient: np.ndarray
    x0: np.ndarray
    truncation: dict = field(default_factory=dict)
    flags: list = field(default_factory=list)
    label: str = ""

    def report(self) -> str:
        g = self.gamma
        lines = [
            f"[{self.label}]" if self.label else "[variance]",
            f"value = {self.value!r}",
            f"gamma_11 = {float(g[0, 0])!r}",
            f"gamma_12 = {float(g[0, 1])!r}",
            f"gamma_22 = {float(g[1, 1])!r}",
            f"gradient_1 = {float(self.gradient[0])!r}",
            f"gradient_2 = {float(self.gradient[1])!r}",
            f"x0_1 = {float(self.x0[0])!r}",
            f"x0_2 = {float(self.x0[1])!r}",
        ]
        for key in sorted(self.truncation):
            lines.append(f"{key} = {self.truncation[key]!r}")
        lines.append(f"flags = {';'.join(self.flags) if self.flags else 'none'}")
        return "\n".join(lines) + "\n"


def _quadratic(grad, gamma):
    return float(grad @ gamma @ grad)


def gradient_h_map(m: float, beta: float) -> np.ndarray:
    """Gradient of (x, y) -> (1/beta) log2(y / x) at (m, m).

    ``x`` is the full-resolution statistic and ``y`` the subsampled one.
    """
    c = 1.0 / (beta * LN2 * m)
    return np.array([-c, c])


def gradient_alpha_map(x0, bp: BetaPair, alpha: float) -> np.ndarray:
    """Gradient of phi(psi(x, y)) at x0, where psi(x0) = h(alpha) < 0."""
    uv = bp.uv
    return psi_uv_gradient(uv, x0[0], x0[1]) / h_uv_prime(uv, alpha)


def _tail_r(kernel_fn, R, H):
    # |corr(r)| <= C |r|^(2H - 3) for large r; C from the last half of the window
    r = np.arange(max(R // 2, 2), R + 1)
    c = float(np.max(np.abs(kernel_fn(r)) * r ** (3.0 - 2.0 * H)))
    expo = 2.0 * (2.0 * H - 3.0)
    # sum_{|r| > R} (C r^(2H-3))^2 <= 2 C^2 R^(expo+1) / -(expo+1)
    return 2.0 * c * c * R ** (expo + 1.0) / (-(expo + 1.0))


def xi_fbm(f="second_difference", H: float = 0.5, beta: float = -0.25, Q: int = 40, R: int = 1024,
           unit_variance: float = 1.0) -> AsymptoticVariance:
    """Limit variance of sqrt(n) (H_hat - H) for fBm."""
    f = make_filter(f)
    var = fbm_increment_variance(f, H, unit_variance)
    fe = hermite_coeffs(beta, math.sqrt(var), Q)
    rr = np.arange(-R, R + 1)
    k_rho = CorrelationKernel(f, H, "RHO")
    k_rho1 = CorrelationKernel(f, H, "RHO1")
    s11, qt11 = _gaussian_series(fe, fe, rho(k_rho, rr))
    s12, qt12 = _gaussian_series(fe, fe, rho1(k_rho1, rr))
    gamma = np.array([[s11, s12], [s12, 2.0 * s11]])
    m = neg_moment_gaussian(math.sqrt(var), beta)
    grad = gradient_h_map(m, beta)
    value = _quadratic(grad, gamma)
    e2 = fe.second_moment
    r_tail = e2 * max(_tail_r(lambda r: rho(k_rho, r), R, H), _tail_r(lambda r: rho1(k_rho1, r), R, H))
    tail = (qt11 + qt12 + r_tail) * 3.0 * float(grad @ grad)
    trunc = {"Q": Q, "R": R, "q_tail_bound": qt11 + qt12, "r_tail_bound": r_tail,
             "value_tail_bound": tail, "hermite_parseval_gap": fe.tail_bound}
    flags = ["truncation tail above 1% of value"] if tail > 0.01 * abs(value) else []
    return AsymptoticVariance(value, gamma, grad, np.array([m, m]), trunc, flags, "xi_fbm")


def sigma_fbm(f="second_difference", H: float = 0.5, bp=BetaPair(-0.4, -0.1), Q: int = 40,
              R: int = 1024, unit_variance: float = 1.0) -> AsymptoticVariance:
    """Limit variance of sqrt(n) (alpha_hat - 2) for fBm."""
    f = make_filter(f)
    bp = bp if isinstance(bp, BetaPair) else BetaPair(*bp)
    var = fbm_increment_variance(f, H, unit_variance)
    s = math.sqrt(var)
    fe = hermite_coeffs(bp.beta1, s, Q)
    ge = hermite_coeffs(bp.beta2, s, Q)
    rr = np.arange(-R, R + 1)
    k_rho = CorrelationKernel(f, H, "RHO")
    corr = rho(k_rho, rr)
    sff, t1 = _gaussian_series(fe, fe, corr)
    sgg, t2 = _gaussian_series(ge, ge, corr)
    sfg, t3 = _gaussian_series(fe, ge, corr)
    gamma = np.array([[sff, sfg], [sfg, sgg]])
    x0 = np.array([neg_moment_gaussian(s, bp.beta1), neg_moment_gaussian(s, bp.beta2)])
    grad = gradient_alpha_map(x0, bp, 2.0)
    value = _quadratic(grad, gamma)
    r_tail = math.sqrt(fe.second_moment * ge.second_moment) * _tail_r(lambda r: rho(k_rho, r), R, H)
    tail = (t1 + t2 + 2 * t3 + 4 * r_tail) * float(grad @ grad)
    trunc = {"Q": Q, "R": R, "q_tail_bound": t1 + t2 + t3, "r_tail_bound": r_tail,
             "value_tail_bound": tail}
    flags = ["truncation tail above 1% of value"] if tail > 0.01 * abs(value) else []
    return AsymptoticVariance(value, gamma, grad, x0, trunc, flags, "sigma_fbm")


# ------------------------------------------------------------------ Levy motion

@dataclass
class LevyCovTable:
    """Covariances of |filtered increments|^beta of standard SaS Levy motion.

    Keys are ``(beta_a, scale_a, index_a, beta_b, scale_b, index_b)``;
    ``scale = 1`` means increments on the unit grid (Delta_{k,1}), ``scale = 2``
    on the half-step grid (Delta_{k,2}).  Values are ``(estimate, std_error)``.
    Same-variable entries are exact and entries for increments over disjoint
    intervals are exactly zero (standard error 0 in both cases).
    """

    alpha: float
    filter: Filter
    betas: tuple
    entries: dict
    mc_samples: int
    flags: list = field(default_factory=list)
    noisy: list = field(default_factory=list)
    accessed: set = field(default_factory=set, repr=False)

    def cov(self, beta_a, scale_a, index_a, beta_b, scale_b, index_b):
        key = (float(beta_a), scale_a, index_a, float(beta_b), scale_b, index_b)
        sym = (float(beta_b), scale_b, index_b, float(beta_a), scale_a, index_a)
        for k in (key, sym):
            if k in self.entries:
                self.accessed.add(k)
                return self.entries[k]
        raise KeyError(f"covariance table has no entry cov(|D_{{{index_a},{scale_a}}}|^{beta_a}, "
                       f"|D_{{{index_b},{scale_b}}}|^{beta_b})")

    def value(self, *key) -> float:
        return self.cov(*key)[0]

    def used_flags(self) -> list:
        """Flags restricted to entries read since ``accessed`` was last cleared."""
        bad = [k for k in self.noisy if k in self.accessed]
        if not bad:
            return []
        return [f"{len(bad)} covariance entries in use with std error above 5% of |value|: "
                + ", ".join(map(str, bad))]

    def max_std_error(self) -> float:
        return max(se for _, se in self.entries.values())


def levy_cov_table(alpha: float, f="second_difference", betas=(-0.25,), mc_samples: int = 1_000_000,
                   seed: SeedSpec = SeedSpec(0, 0), block: int = 250_000,
                   se_floor: float = 1e-3) -> LevyCovTable:
    """Monte Carlo covariance table for the Levy-motion variance formulas.

    Each sample is a Levy path on [0, 3K] with half-unit steps; from it the
    increments Delta_{k,1} and Delta_{j,2}, k, j = 0..2K-1, are formed
    directly.  Covariances of a variable with itself (or with another power
    of itself) use E|D|^(b1+b2) - E|D|^b1 E|D|^b2 from the closed-form
    moments; all other entries are sample covariances with standard errors.
    """
    if mc_samples < 2:
        raise ValidationError("mc_samples must be at least 2")
    f = make_filter(f)
    a = f.array
    K = f.K
    betas = tuple(float(b) for b in betas)
    nhalf = 6 * K
    nidx = 2 * K
    step_scale = 0.5 ** (1.0 / alpha)
    # Column layout: for each beta, unit-grid k = 0..2K-1 then half-grid j = 0..2K-1.
    labels = [(b, s, i) for b in betas for s in (1, 2) for i in range(nidx)]
    ncol = len(labels)
    sums = np.zeros(ncol)
    cross = np.zeros((ncol, ncol))
    cross2 = np.zeros((ncol, ncol))
    done, blk = 0, 0
    unit_pos = 2 * (np.arange(nidx)[:, None] + np.arange(K + 1)[None, :])     # half-step index of k + i
    half_pos = np.arange(nidx)[:, None] + np.arange(K + 1)[None, :]
    while done < mc_samples:
        size = min(block, mc_samples - done)
        stream = derive_stream(seed.child(blk))
        steps = sample_standard_sas(stream, alpha, (size, nhalf)) * step_scale
        path = np.concatenate([np.zeros((size, 1)), np.cumsum(steps, axis=1)], axis=1)
        d_unit = path[:, unit_pos] @ a
        d_half = path[:, half_pos] @ a
        cols = []
        for b in betas:
            cols.append(np.abs(d_unit) ** b)
            cols.append(np.abs(d_half) ** b)
        x = np.concatenate(cols, axis=1)
        sums += x.sum(axis=0)
        cross += x.T @ x
        cross2 += (x**2).T @ (x**2)
        done += size
        blk += 1
    N = float(mc_samples)
    mean = sums / N
    cov = cross / N - np.outer(mean, mean)
    # Std error of a mean of products, ignoring the (smaller) error of the centring means.
    var_prod = np.maximum(cross2 / N - (cross / N) ** 2, 0.0)
    se = np.sqrt(var_prod / N)

    unit_scale = levy_increment_scale(f, alpha)
    entries, flags, noisy = {}, [], []
    for i, (bi, si, ki) in enumerate(labels):
        for j, (bj, sj, kj) in enumerate(labels):
            if j < i:
                continue
            key = (bi, si, ki, bj, sj, kj)
            if si == sj and ki == kj:
                s = unit_scale * (0.5 ** (1.0 / alpha) if si == 2 else 1.0)
                exact = (s ** (bi + bj) * neg_moment_closed_form(alpha, bi + bj)
                         - s**bi * neg_moment_closed_form(alpha, bi) * s**bj * neg_moment_closed_form(alpha, bj))
                entries[key] = (exact, 0.0)
                continue
            if not _supports_overlap(si, ki, sj, kj, K):
                entries[key] = (0.0, 0.0)
                continue
            value, err = float(cov[i, j]), float(se[i, j])
            entries[key] = (value, err)
            if err > 0.05 * abs(value) + se_floor:
                noisy.append(key)
    if noisy:
        flags.append(f"{len(noisy)} covariance entries with std error above 5% of |value| + {se_floor:g}")
    return LevyCovTable(alpha, f, betas, entries, mc_samples, flags, noisy)


def _supports_overlap(sa, ka, sb, kb, K):
    # Delta_{k,s} depends on the increments over [k/s, (k+K)/s]; disjoint
    # intervals mean independence, so the covariance is exactly zero.
    lo = max(ka / sa, kb / sb)
    hi = min((ka + K) / sa, (kb + K) / sb)
    return lo < hi


def _levy_lrv(table, beta_a, beta_b, K):
    # sum_{|k| < K} cov(|D_0|^beta_a, |D_k|^beta_b) on the unit grid
    total = table.value(beta_a, 1, 0, beta_b, 1, 0)
    ses = [table.cov(beta_a, 1, 0, beta_b, 1, 0)[1]]
    for k in range(1, K):
        for key in ((beta_a, 1, 0, beta_b, 1, k), (beta_b, 1, 0, beta_a, 1, k)):
            v, e = table.cov(*key)
            total += v
            ses.append(e)
    return total, math.sqrt(sum(e * e for e in ses))


def _levy_gamma3(table: LevyCovTable, beta: float, formula: str):
    K = table.filter.K
    H = 1.0 / table.alpha
    c = 2.0 ** (beta * H)
    t = table.cov
    if formula == "printed":
        s1 = 2 * t(beta, 1, 0, beta, 1, 0)[0]
        for p in range(1, K):
            s1 += 2 * (t(beta, 1, 0, beta, 1, 2 * p)[0] + t(beta, 1, 0, beta, 1, 2 * p + 1)[0])
            s1 += 2 * (t(beta, 1, 1, beta, 1, 2 * p)[0] + t(beta, 1, 1, beta, 1, 2 * p + 1)[0])
        lrv, se_lrv = _levy_lrv(table, beta, beta, K)
        s2 = 2 * lrv
    elif formula == "corrected":
        lrv, se_lrv = _levy_lrv(table, beta, beta, K)
        s1 = lrv
        s2 = 2 * lrv
    else:
        raise ValidationError(f"formula must be 'corrected' or 'printed', got {formula!r}")
    # Fine/coarse cross term (the same in both readings).
    terms = [(beta, 2, 0, beta, 1, 0), (beta, 2, 1, beta, 1, 0)]
    for p in range(1, K):
        terms += [(beta, 2, 0, beta, 1, p), (beta, 2, 1, beta, 1, p)]
        terms += [(beta, 1, 0, beta, 2, 2 * p), (beta, 1, 0, beta, 2, 2 * p + 1)]
    vals = [t(*k) for k in terms]
    s12 = c * sum(v for v, _ in vals)
    se12 = c * math.sqrt(sum(e * e for _, e in vals))
    return np.array([[s1, s12], [s12, s2]]), {"se_lrv": se_lrv, "se_cross": se12}


def xi_levy(alpha: float, f="second_difference", beta: float = -0.25, table: LevyCovTable | None = None,
            formula: str = "corrected", mc_samples: int = 1_000_000,
            seed: SeedSpec = SeedSpec(0, 0)) -> AsymptoticVariance:
    """Limit variance of sqrt(n) (H_hat - 1/alpha) for SaS Levy motion.

    ``formula="corrected"`` uses the long-run variance of the
    (K-1)-dependent sequence for the full-resolution diagonal entry;
    ``formula="printed"`` uses the uncorrected expression for that
    entry, which over-counts the lag-0 variance (kept for comparison).
    """
    f = make_filter(f)
    if table is None:
        table = levy_cov_table(alpha, f, (beta,), mc_samples, seed)
    table.accessed.clear()
    gamma, ses = _levy_gamma3(table, float(beta), formula)
    s = levy_increment_scale(f, alpha)
    m = s**beta * neg_moment_closed_form(alpha, beta)
    grad = gradient_h_map(m, beta)
    value = _quadratic(grad, gamma)
    se_value = _levy_value_se(grad, ses)
    trunc = {"mc_samples": table.mc_samples, "std_error": se_value, "formula": formula,
             "table_max_std_error": table.max_std_error()}
    return AsymptoticVariance(value, gamma, grad, np.array([m, m]), trunc, table.used_flags(), "xi_levy")


def _levy_value_se(grad, ses):
    # value = g1^2 s1 + 2 g1 g2 s12 + g2^2 s2, with s2 = 2 lrv; independent-error approximation
    g1, g2 = grad
    return math.sqrt((g1 * g1 * ses["se_lrv"]) ** 2 + (g2 * g2 * 2 * ses["se_lrv"]) ** 2
                     + (2 * g1 * g2 * ses["se_cross"]) ** 2)


def sigma_levy(alpha: float, f="second_difference", bp=BetaPair(-0.4, -0.1), table: LevyCovTable | None = None,
               formula: str = "corrected", mc_samples: int = 1_000_000,
               seed: SeedSpec = SeedSpec(0, 0)) -> AsymptoticVariance:
    """Limit variance of sqrt(n) (alpha_hat - alpha) for SaS Levy motion.

    ``formula="printed"`` halves the lagged cross-covariances in the
    off-diagonal entry (the uncorrected form); ``"corrected"``
    uses the full long-run cross-covariance.
    """
    f = make_filter(f)
    bp = bp if isinstance(bp, BetaPair) else BetaPair(*bp)
    b1, b2 = bp.beta1, bp.beta2
    if table is None:
        table = levy_cov_table(alpha, f, (b1, b2), mc_samples, seed)
    K = f.K
    table.accessed.clear()
    s1, se1 = _levy_lrv(table, b1, b1, K)
    s2, se2 = _levy_lrv(table, b2, b2, K)
    if formula == "corrected":
        s12, se12 = _levy_lrv(table, b1, b2, K)
    elif formula == "printed":
        s12 = table.value(b1, 1, 0, b2, 1, 0)
        for k in range(1, K):
            s12 += 0.5 * (table.value(b1, 1, 0, b2, 1, k) + table.value(b2, 1, 0, b1, 1, k))
        se12 = _levy_lrv(table, b1, b2, K)[1]
    else:
        raise ValidationError(f"formula must be 'corrected' or 'printed', got {formula!r}")
    gamma = np.array([[s1, s12], [s12, s2]])
    s = levy_increment_scale(f, alpha)
    x0 = np.array([s**b1 * neg_moment_closed_form(alpha, b1), s**b2 * neg_moment_closed_form(alpha, b2)])
    grad = gradient_alpha_map(x0, bp, alpha)
    value = _quadratic(grad, gamma)
    g1, g2 = grad
    se_value = math.sqrt((g1 * g1 * se1) ** 2 + (g2 * g2 * se2) ** 2 + (2 * g1 * g2 * se12) ** 2)
    trunc = {"mc_samples": table.mc_samples, "std_error": se_value, "formula": formula,
             "table_max_std_error": table.max_std_error()}
    return AsymptoticVariance(value, gamma, grad, x0, trunc, table.used_flags(), "sigma_levy")


def hermite_parseval_check(beta: float, increment_std: float = 1.0) -> float:
    """E f(Z)^2 by quadrature (independent of the closed form), for tests and reports."""
    m = _abs_normal_moment(beta)
    s = increment_std**beta

    def integrand(x):
        return (s * (x**beta - m)) ** 2 * math.exp(-0.5 * x * x)

    head, _ = integrate.quad(integrand, 0.0, 1.0, limit=200)
    tail, _ = integrate.quad(integrand, 1.0, np.inf, limit=200)
    return 2.0 * (head + tail) / math.sqrt(2.0 * math.pi)
