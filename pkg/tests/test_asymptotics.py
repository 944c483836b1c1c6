import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate, special

from stablehurst.asymptotics import (CorrelationKernel, gradient_alpha_map, gradient_h_map, hermite_abs_moment,
                                     hermite_abs_moment_sum, hermite_coeffs, hermite_parseval_check,
                                     levy_cov_table, rho, rho1, sigma_fbm, sigma_levy, xi_fbm, xi_levy)
from stablehurst.errors import DomainError, ValidationError
from stablehurst.estimators import alpha_from_variations, h_from_variations
from stablehurst.rng import SeedSpec
from stablehurst.specfun import BetaPair, neg_moment_closed_form, neg_moment_gaussian
from stablehurst.variations import fbm_increment_variance, levy_increment_scale, make_filter

F2 = make_filter("second_difference")


@pytest.fixture(scope="module")
def table2():
    # alpha = 2: Gaussian increments of variance 2 per unit step
    return levy_cov_table(2.0, F2, (-0.25, -0.4, -0.1), 400_000, SeedSpec(3, 0))


@pytest.fixture(scope="module")
def table15():
    return levy_cov_table(1.5, F2, (-0.25, -0.4, -0.1), 400_000, SeedSpec(4, 0))


# ------------------------------------------------------------------ rho

def _random_walk_second_differences(reps=100_000, length=8, seed=0):
    g = np.random.default_rng(seed).standard_normal((reps, length))
    x = np.concatenate([np.zeros((reps, 1)), np.cumsum(g, axis=1)], axis=1)
    return x


def test_rho_zero_is_one():
    for H in (0.2, 0.5, 0.8):
        assert rho(CorrelationKernel(F2, H), 0) == 1.0


def test_rho_half_matches_exact_random_walk():
    # second differences of a random walk are e_{k+2} - e_{k+1}: var 2, lag-1 cov -1
    k = CorrelationKernel(F2, 0.5)
    assert rho(k, 1) == pytest.approx(-0.5, abs=1e-14)
    assert rho(k, 2) == pytest.approx(0.0, abs=1e-14)
    assert rho(k, np.arange(2, 40)) == pytest.approx(np.zeros(38), abs=1e-12)


def test_rho_half_matches_sample_covariance():
    x = _random_walk_second_differences()
    d = x[:, 2:] - 2 * x[:, 1:-1] + x[:, :-2]
    c = np.corrcoef(d[:, 0], d[:, 1])[0, 1]
    assert rho(CorrelationKernel(F2, 0.5), 1) == pytest.approx(c, abs=0.01)


def test_rho1_matches_mc_oracle():
    x = _random_walk_second_differences(seed=1)
    fine = x[:, 2] - 2 * x[:, 1] + x[:, 0]
    coarse = x[:, 4] - 2 * x[:, 2] + x[:, 0]
    c = np.corrcoef(coarse, fine)[0, 1]
    assert rho1(CorrelationKernel(F2, 0.5, "RHO1"), 0) == pytest.approx(c, abs=0.01)


@pytest.mark.parametrize("H", [0.2, 0.5, 0.7, 0.9])
def test_correlations_bounded_and_decay(H):
    r = np.arange(8, 65)
    for kind in ("RHO", "RHO1"):
        k = CorrelationKernel(F2, H, kind)
        vals = k(np.arange(-64, 65))
        assert np.all(np.abs(vals) <= 1.0 + 1e-12)
        scaled = np.abs(k(r)) * r ** (3.0 - 2.0 * H)
        # C |r|^(2H-3) with a constant that does not grow along the grid
        assert scaled[-1] <= 1.01 * scaled[:8].max() + 1e-12


def test_rho_symmetric_and_vectorised():
    for kind in ("RHO", "RHO1"):
        k = CorrelationKernel(F2, 0.35, kind)
        r = np.arange(-20, 21)
        v = k(r)
        assert v == pytest.approx([k(int(i)) for i in r], rel=1e-14)
    kr = CorrelationKernel(F2, 0.35)
    assert rho(kr, r) == pytest.approx(rho(kr, -r), rel=1e-14)


def test_rho1_symmetry_direct():
    # direct double sum over (p, p') against the vectorised kernel, both signs of r
    a = F2.array
    H = 0.63

    def direct(r):
        num = sum(a[p] * a[q] * abs(r + p - 2 * q) ** (2 * H) for p in range(3) for q in range(3))
        den = sum(a[p] * a[q] * abs(p - q) ** (2 * H) for p in range(3) for q in range(3))
        return num / (2**H * den)

    k = CorrelationKernel(F2, H, "RHO1")
    for r in range(-9, 10):
        assert rho1(k, r) == pytest.approx(direct(r), rel=1e-12, abs=1e-15)


def test_kernel_validation():
    with pytest.raises(DomainError):
        CorrelationKernel(F2, 1.0)
    with pytest.raises(ValidationError):
        CorrelationKernel(F2, 0.5, "RHO2")


def test_rho_series_cauchy_in_R():
    k = CorrelationKernel(F2, 0.8)
    s = [float(np.sum(np.abs(rho(k, np.arange(-R, R + 1))) ** 2)) for R in (128, 256, 512, 1024)]
    d = np.abs(np.diff(s))
    assert np.all(d[1:] < d[:-1])


# ------------------------------------------------------------------ Hermite

def _he(q, x):
    return special.eval_hermitenorm(q, x)


def _quad_moment(beta, q):
    def f(x):
        return x**beta * _he(q, x) * math.exp(-0.5 * x * x)

    # the cusp at 0 is integrable; split there and substitute x = t^2 near it
    head, _ = integrate.quad(lambda t: 2 * t * f(t * t), 0.0, 1.0, limit=400, epsabs=1e-14, epsrel=1e-13)
    tail, _ = integrate.quad(f, 1.0, np.inf, limit=400, epsabs=1e-13, epsrel=1e-11)
    return 2.0 * (head + tail) / math.sqrt(2 * math.pi)


@pytest.mark.parametrize("q", [0, 2, 4, 6, 10])
@pytest.mark.parametrize("beta", [-0.4, -0.25, -0.1])
def test_hermite_moment_routes_agree(beta, q):
    prod = hermite_abs_moment(beta, q)
    total, rel = hermite_abs_moment_sum(beta, q)
    assert rel < 1e-10
    assert total == pytest.approx(prod, rel=1e-10)
    assert prod == pytest.approx(_quad_moment(beta, q), rel=1e-7, abs=1e-12)


def test_hermite_sum_error_estimate_grows():
    rels = [hermite_abs_moment_sum(-0.25, q)[1] for q in (10, 30, 50, 70)]
    assert rels == sorted(rels)
    assert rels[-1] > 1e-6


def test_f2_matches_quadrature():
    s = math.sqrt(2.0)
    beta = -0.25
    e = hermite_coeffs(beta, s, 40)
    m = math.exp(0.5 * beta * math.log(2) + special.gammaln((beta + 1) / 2)) / math.sqrt(math.pi)

    def g(x):
        return s**beta * (abs(x) ** beta - m) * (x * x - 1) * math.exp(-0.5 * x * x)

    head, _ = integrate.quad(lambda t: 2 * t * g(t * t), 0.0, 1.0, limit=400, epsabs=1e-14, epsrel=1e-13)
    tail, _ = integrate.quad(g, 1.0, np.inf, limit=400, epsabs=1e-14, epsrel=1e-13)
    oracle = 2 * (head + tail) / math.sqrt(2 * math.pi) / 2
    assert e.coeffs[2] == pytest.approx(oracle, abs=1e-8)


@given(st.floats(-0.49, -0.01), st.floats(0.1, 10.0))
def test_hermite_low_and_odd_coefficients_vanish(beta, s):
    e = hermite_coeffs(beta, s, 20)
    assert abs(e.coeffs[0]) < 1e-10
    assert abs(e.coeffs[1]) < 1e-10
    assert np.all(np.abs(e.coeffs[1::2]) < 1e-10)


def test_parseval_gap_shrinks():
    beta, s = -0.3, 1.7
    ef2 = hermite_parseval_check(beta, s)
    gaps = []
    for Q in (4, 10, 20, 40):
        e = hermite_coeffs(beta, s, Q)
        assert e.second_moment == pytest.approx(ef2, rel=1e-8)
        partial = float(np.sum(e.energies))
        assert partial <= ef2 * (1 + 1e-10)
        gaps.append(ef2 - partial)
    assert all(b < a for a, b in zip(gaps, gaps[1:]))


def test_hermite_fallback_flags_and_matches_product():
    e = hermite_coeffs(-0.25, 1.0, 80)
    p = hermite_coeffs(-0.25, 1.0, 80, method="product")
    assert e.flagged and min(e.flagged) > 40
    assert e.coeffs == pytest.approx(p.coeffs, rel=1e-6, abs=0.0)
    assert hermite_coeffs(-0.25, 1.0, 40).flagged == ()


def test_hermite_validation():
    with pytest.raises(DomainError):
        hermite_coeffs(-0.6, 1.0)
    with pytest.raises(DomainError):
        hermite_coeffs(-0.25, 1.0, 7)
    with pytest.raises(ValidationError):
        hermite_coeffs(-0.25, 1.0, 10, method="quad")


# ------------------------------------------------------------------ gradients

@given(st.floats(0.1, 10.0), st.floats(-0.45, -0.05))
def test_gradient_h_map_finite_difference(m, beta):
    g = gradient_h_map(m, beta)

    def phi(x):
        return h_from_variations(x[1], x[0], beta)

    h = 1e-6 * m
    fd = [(phi([m + h, m]) - phi([m - h, m])) / (2 * h), (phi([m, m + h]) - phi([m, m - h])) / (2 * h)]
    assert g == pytest.approx(fd, rel=1e-6)


@pytest.mark.parametrize("alpha", [0.8, 1.5, 2.0])
@pytest.mark.parametrize("bp", [BetaPair(-0.4, -0.1), BetaPair(-0.25, -0.05)])
def test_gradient_alpha_map_finite_difference(alpha, bp):
    s = levy_increment_scale(F2, alpha)
    x0 = np.array([s**b * neg_moment_closed_form(alpha, b) for b in (bp.beta1, bp.beta2)])
    g = gradient_alpha_map(x0, bp, alpha)
    fd = []
    for i in range(2):
        h = 1e-6 * x0[i]
        up, dn = x0.copy(), x0.copy()
        up[i] += h
        dn[i] -= h
        fd.append((alpha_from_variations(up[0], up[1], bp)[0] - alpha_from_variations(dn[0], dn[1], bp)[0]) / (2 * h))
    assert g == pytest.approx(fd, rel=1e-6)
    assert alpha_from_variations(x0[0], x0[1], bp)[0] == pytest.approx(alpha, abs=1e-9)


def test_x0_two_ways_at_alpha_two():
    # standard SaS with alpha = 2 is N(0, 2); Levy filtered scale vs Gaussian std
    s_levy = levy_increment_scale(F2, 2.0)
    s_gauss = math.sqrt(fbm_increment_variance(F2, 0.5, 2.0))
    for b in (-0.4, -0.25, -0.1):
        assert s_levy**b * neg_moment_closed_form(2.0, b) == pytest.approx(neg_moment_gaussian(s_gauss, b), rel=1e-10)


# ------------------------------------------------------------------ fBm variances

def test_xi_half_is_R_independent():
    # rho vanishes for |r| >= 2 and rho1 outside -2..3 at H = 1/2, so the sums are exact from R = 3
    k1 = CorrelationKernel(F2, 0.5, "RHO1")
    assert rho1(k1, np.array([-5, -4, -3, 4, 5, 6])) == pytest.approx(np.zeros(6), abs=1e-14)
    vals = [xi_fbm(F2, 0.5, -0.25, 40, R).value for R in (3, 4, 16, 1024)]
    assert vals == pytest.approx([vals[0]] * 4, rel=1e-12)
    sig = [sigma_fbm(F2, 0.5, BetaPair(-0.4, -0.1), 40, R).value for R in (2, 16, 1024)]
    assert sig == pytest.approx([sig[0]] * 3, rel=1e-12)


@pytest.mark.parametrize("H", [0.3, 0.5, 0.8])
def test_xi_Q_self_convergence(H):
    a = xi_fbm(F2, H, -0.25, 20).value
    b = xi_fbm(F2, H, -0.25, 40).value
    assert abs(a - b) < 1e-3 * b


def test_fbm_variances_structure():
    for av in (xi_fbm(F2, 0.3), sigma_fbm(F2, 0.3)):
        g = av.gamma
        assert g == pytest.approx(g.T)
        assert np.linalg.eigvalsh(g).min() >= -1e-12
        assert av.value == pytest.approx(float(av.gradient @ g @ av.gradient), rel=1e-14)
        assert av.value >= 0
        assert {"Q", "R", "value_tail_bound"} <= set(av.truncation)
        assert av.flags == []


def test_xi_scale_free():
    assert xi_fbm(F2, 0.4, unit_variance=3.0).value == pytest.approx(xi_fbm(F2, 0.4).value, rel=1e-10)
    assert sigma_fbm(F2, 0.4, unit_variance=3.0).value == pytest.approx(sigma_fbm(F2, 0.4).value, rel=1e-10)


def test_report_is_key_value():
    text = xi_fbm(F2, 0.3).report()
    lines = text.strip().splitlines()
    assert lines[0] == "[xi_fbm]"
    kv = dict(line.split(" = ", 1) for line in lines[1:])
    assert float(kv["value"]) > 0
    assert kv["flags"] == "none"


# ------------------------------------------------------------------ Levy table

def _normal_abs_moment(mu, sigma, b):
    # E|N(mu, sigma^2)|^b
    return (sigma**b * 2 ** (b / 2) * math.gamma((b + 1) / 2) / math.sqrt(math.pi)
            * special.hyp1f1(-b / 2, 0.5, -mu * mu / (2 * sigma * sigma)))


def _gaussian_cov(b1, b2, var1, var2, c):
    # cov(|U|^b1, |V|^b2) for a centred normal pair; condition on U and integrate over it
    s1 = math.sqrt(var1)
    slope = c / var1
    cond_sd = math.sqrt(var2 - c * c / var1)

    def integrand(z):
        u = s1 * z
        return abs(u) ** b1 * _normal_abs_moment(slope * u, cond_sd, b2) * math.exp(-0.5 * z * z)

    head, _ = integrate.quad(lambda t: 2 * t * integrand(t * t), 0.0, 1.0, limit=400)
    tail, _ = integrate.quad(integrand, 1.0, np.inf, limit=400)
    joint = 2 * (head + tail) / math.sqrt(2 * math.pi)
    return joint - _normal_abs_moment(0, s1, b1) * _normal_abs_moment(0, math.sqrt(var2), b2)


def _gauss_increment_cov(sa, ka, sb, kb):
    # covariance of filtered increments of Brownian motion with variance 2 per unit time
    def weights(s, k):
        t = np.array([(k + i) / s for i in range(3)])
        return t, F2.array

    ta, wa = weights(sa, ka)
    tb, wb = weights(sb, kb)
    return float(sum(wa[i] * wb[j] * 2 * min(ta[i], tb[j]) for i in range(3) for j in range(3)))


@pytest.mark.parametrize("key", [
    (-0.25, 1, 0, -0.25, 1, 1),
    (-0.4, 1, 0, -0.1, 1, 1),
    (-0.25, 2, 0, -0.25, 1, 0),
    (-0.25, 2, 1, -0.25, 1, 0),
    (-0.25, 1, 0, -0.25, 2, 3),
])
def test_levy_table_gaussian_case(table2, key):
    b1, sa, ka, b2, sb, kb = key
    oracle = _gaussian_cov(b1, b2, _gauss_increment_cov(sa, ka, sa, ka), _gauss_increment_cov(sb, kb, sb, kb),
                           _gauss_increment_cov(sa, ka, sb, kb))
    value, se = table2.cov(*key)
    assert se > 0
    assert abs(value - oracle) < 4 * se + 1e-4


def test_levy_table_diagonal_closed_form(table15):
    s = levy_increment_scale(F2, 1.5)
    b = -0.25
    expect = s ** (2 * b) * neg_moment_closed_form(1.5, 2 * b) - (s**b * neg_moment_closed_form(1.5, b)) ** 2
    assert table15.cov(b, 1, 0, b, 1, 0) == (pytest.approx(expect, rel=1e-12), 0.0)
    assert table15.cov(b, 1, 1, b, 1, 1) == table15.cov(b, 1, 0, b, 1, 0)


def test_levy_table_independent_lags(table15):
    K = F2.K
    for k in range(K, 2 * K):
        assert table15.cov(-0.25, 1, 0, -0.25, 1, k) == (0.0, 0.0)


def test_levy_table_missing_key(table15):
    with pytest.raises(KeyError, match="no entry"):
        table15.cov(-0.3, 1, 0, -0.3, 1, 1)


def test_levy_table_validation():
    with pytest.raises(ValidationError):
        levy_cov_table(1.5, F2, (-0.25,), 1)


def test_levy_table_deterministic():
    a = levy_cov_table(1.2, F2, (-0.25,), 50_000, SeedSpec(5, 1), block=20_000)
    b = levy_cov_table(1.2, F2, (-0.25,), 50_000, SeedSpec(5, 1), block=20_000)
    assert a.entries == b.entries


def test_levy_alpha_two_matches_fbm_half(table2):
    x = xi_levy(2.0, F2, -0.25, table2)
    s = sigma_levy(2.0, F2, BetaPair(-0.4, -0.1), table2)
    assert abs(x.value - xi_fbm(F2, 0.5).value) < 4 * x.truncation["std_error"]
    assert abs(s.value - sigma_fbm(F2, 0.5).value) < 4 * s.truncation["std_error"]


def test_printed_formula_disagrees_with_gaussian_limit(table2):
    # the printed diagonal entry over-counts the lag-0 variance; the gap is far outside the MC error
    x = xi_levy(2.0, F2, -0.25, table2, formula="printed")
    assert x.value - xi_fbm(F2, 0.5).value > 10 * x.truncation["std_error"]


def test_levy_gamma_structure(table15):
    for av in (xi_levy(1.5, F2, -0.25, table15), sigma_levy(1.5, F2, BetaPair(-0.4, -0.1), table15)):
        g = av.gamma
        assert np.array_equal(g, g.T)
        assert np.linalg.eigvalsh(g).min() >= -1e-12
        assert av.value >= -1e-12
        assert av.truncation["std_error"] < 0.1 * av.value
        assert av.truncation["mc_samples"] == 400_000


def test_levy_assembly_by_hand(table15):
    # K = 2: every sum over p = 1..K-1 has a single term
    t = table15.value
    b = -0.25
    lrv = t(b, 1, 0, b, 1, 0) + 2 * t(b, 1, 0, b, 1, 1)
    cross = 2 ** (b / 1.5) * (t(b, 2, 0, b, 1, 0) + t(b, 2, 1, b, 1, 0) + t(b, 2, 0, b, 1, 1)
                             + t(b, 2, 1, b, 1, 1) + t(b, 1, 0, b, 2, 2) + t(b, 1, 0, b, 2, 3))
    x = xi_levy(1.5, F2, b, table15)
    assert x.gamma == pytest.approx(np.array([[lrv, cross], [cross, 2 * lrv]]), rel=1e-14)


def test_levy_formula_validation(table15):
    with pytest.raises(ValidationError):
        xi_levy(1.5, F2, -0.25, table15, formula="other")
    with pytest.raises(ValidationError):
        sigma_levy(1.5, F2, BetaPair(-0.4, -0.1), table15, formula="other")
