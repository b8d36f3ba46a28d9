import math

import numpy as np
import pytest

from spherecert.cert_ck import (PUBLISHED_S_BRACKETS, b_coefficients, beta_d, certify_ck,
                                ck_threshold, dnk_factor, frak_s, g_profile, g_profile_gamma_form,
                                small_ell_check)
from spherecert.closedforms import SUPPORTED_DIMENSIONS, Dimension, frak_r, gap_constant
from spherecert.kernel import eigen_prefactor
from spherecert.profiles import (HypothesisError, RadialProfile, axis_derivative,
                                 derivative_bounds, profile_eval)
from spherecert.specfun import DomainError, log_gegenbauer_norm_sq

DIMS = list(SUPPORTED_DIMENSIONS)
PUBLISHED_C = {3: 0.157, 4: 0.918, 5: 0.908, 6: 1.099, 7: 0.534}


def sigma(d):
    return 2 * math.pi ** (d / 2) / math.gamma(d / 2)


# --- D_{n,k} -----------------------------------------------------------------

@pytest.mark.parametrize("n,alpha", [(1, 0.5), (7, 1.5), (40, 2.5)])
def test_dnk_single_factor(n, alpha):
    assert dnk_factor(n, 1, alpha) == pytest.approx(2 * alpha / (n * (n + 2 * alpha)), rel=1e-15)


def test_dnk_hand_product():
    assert dnk_factor(4, 2, 1.0) == pytest.approx(1 / 63, rel=1e-15)


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
@pytest.mark.parametrize("alpha", [0.5, 2.5])
def test_dnk_asymptotic_scaling(k, alpha):
    n = 1000
    assert dnk_factor(2 * n, k, alpha) / dnk_factor(n, k, alpha) == pytest.approx(2.0 ** (-2 * k),
                                                                                  rel=0.05)


@pytest.mark.parametrize("n,k", [(2, 3), (0, 0), (5, 0)])
def test_dnk_domain(n, k):
    with pytest.raises(DomainError):
        dnk_factor(n, k, 1.0)


# --- s_d and b_{d,j} ---------------------------------------------------------

@pytest.mark.parametrize("d", DIMS)
def test_frak_s_in_published_bracket(d):
    lo, hi = PUBLISHED_S_BRACKETS[d]
    assert lo < frak_s(Dimension(d)) < hi


@pytest.mark.parametrize("d", DIMS)
def test_frak_s_is_branch_crossing(d):
    # f1 decreases from +inf and f2 increases, so the max of the min is their crossing.
    r = frak_r(Dimension(d))
    f1 = lambda s: (s * s + 2 * s + 2 + (s + 0.5) * r) / s
    f2 = lambda s: s * s + 4 * s + 4 + (s + 2) * r
    s = np.linspace(1e-3, 2, 20_001)
    diff = f1(s) - f2(s)
    i = int(np.argmax(diff < 0))
    assert 0 < i < s.size - 1 and diff[i - 1] > 0
    lo, hi = s[i - 1], s[i]
    for _ in range(80):
        mid = (lo + hi) / 2
        lo, hi = (mid, hi) if f1(mid) > f2(mid) else (lo, mid)
    assert frak_s(Dimension(d)) == pytest.approx(f2(lo), abs=1e-9)


@pytest.mark.parametrize("d", DIMS)
def test_frak_s_precision(d):
    # Refinement to 1e-10 in s: a denser grid gives the same value.
    dim = Dimension(d)
    assert frak_s(dim) == pytest.approx(frak_s(dim, grid_points=100_000), abs=1e-9)


def test_b_coefficients_d3():
    dim = Dimension(3)
    s = frak_s(dim)
    b = b_coefficients(dim)
    assert b[0] == s
    assert b[2] == pytest.approx(96 + 22 * (2 / 3) + 3 * s, rel=1e-14)


@pytest.mark.parametrize("d", DIMS)
def test_b_coefficients_positive_increasing(d):
    b = b_coefficients(Dimension(d))
    assert len(b) == 5 and b[0] > 0 and np.all(np.diff(b) > 0)


# --- G_d ---------------------------------------------------------------------

@pytest.mark.parametrize("d", DIMS)
def test_g_profile_at_most_one(d):
    dim = Dimension(d)
    ells = range(math.ceil(dim.k / 2), 10_001)
    assert max(g_profile(dim, ell) for ell in ells) <= 1.0


@pytest.mark.parametrize("d", DIMS)
def test_g_profile_limit(d):
    assert 0.999 < g_profile(Dimension(d), 10 ** 6) <= 1.0


@pytest.mark.parametrize("d,ell", [(3, 2), (5, 3), (7, 4), (4, 10), (6, 25)])
def test_g_profile_gamma_form(d, ell):
    dim = Dimension(d)
    assert g_profile(dim, ell) == pytest.approx(g_profile_gamma_form(dim, ell), rel=1e-12)


def test_g_profile_domain():
    with pytest.raises(DomainError):
        g_profile(Dimension(7), 2)


@pytest.mark.parametrize("d", DIMS)
def test_exponent_identity(d):
    dim = Dimension(d)
    p_conj = dim.p / (dim.p - 1)
    assert (dim.nu + dim.k - 0.5) - p_conj * (dim.k - 1) == pytest.approx(-0.5, abs=1e-14)


# --- beta_d and C_d ----------------------------------------------------------

@pytest.mark.parametrize("d", DIMS)
def test_ck_threshold_matches_published(d):
    C = ck_threshold(Dimension(d))
    assert abs(C - PUBLISHED_C[d]) <= 1e-3
    assert beta_d(Dimension(d)) == pytest.approx(1 / C, rel=1e-14)


@pytest.mark.parametrize("d", DIMS)
def test_ck_threshold_bracket_is_conservative(d):
    dim = Dimension(d)
    assert ck_threshold(dim, bracket=True) < ck_threshold(dim)
    assert abs(ck_threshold(dim, bracket=True) - PUBLISHED_C[d]) <= 1.5e-3


def _log_at_one(n, alpha):
    return math.lgamma(n + 2 * alpha) - math.lgamma(n + 1) - math.lgamma(2 * alpha)


def _unfactored_lambda_bound(dim, ell, M):
    """The |lambda_{d,g}(2 ell)| bound built factor by factor from D, C(1) and norms."""
    nu, k, p = dim.nu, dim.k, dim.p
    n = 2 * ell
    p_conj = p / (p - 1)
    log_ratio = (math.log(dnk_factor(n, k, nu))
                 + (1 - 2 / p) * _log_at_one(n - k, nu + k)
                 + (1 / p) * log_gegenbauer_norm_sq(n - k, nu + k)
                 - log_gegenbauer_norm_sq(n, nu))
    b = b_coefficients(dim)[k - 1]
    return (eigen_prefactor(dim, n) * math.exp(log_ratio)
            * 2 ** (1 / p_conj) * b * sigma(dim.d) ** 2 * M)


@pytest.mark.parametrize("d", DIMS)
def test_factored_chain_matches_unfactored(d):
    dim, M = Dimension(d), 0.37
    for ell in range(math.ceil(dim.k / 2), 101):
        lhs = beta_d(dim) * g_profile(dim, ell) * M
        rhs = _unfactored_lambda_bound(dim, ell, M) * ell ** d / gap_constant(dim)
        assert lhs == pytest.approx(rhs, rel=1e-10)


# --- small-ell patch ---------------------------------------------------------

@pytest.mark.parametrize("d,ells", [(3, [1]), (4, [1]), (5, [1]), (6, [1]), (7, [1, 2])])
def test_small_ell_rows(d, ells):
    rows = small_ell_check(Dimension(d), 0.0)
    assert [r[0] for r in rows] == ells
    assert all(r[3] for r in rows)


@pytest.mark.parametrize("d", DIMS)
def test_small_ell_below_threshold(d):
    dim = Dimension(d)
    rows = small_ell_check(dim, ck_threshold(dim) * (1 - 1e-9))
    assert all(r[3] for r in rows)
    for ell, lhs, rhs, _ in rows:
        assert rhs == pytest.approx(gap_constant(dim) * ell ** (-d), rel=1e-15)


# --- certify_ck --------------------------------------------------------------

@pytest.mark.parametrize("d", DIMS)
def test_gaussian_certified(d):
    cert = certify_ck(Dimension(d), RadialProfile.gaussian(1 / 11))
    assert cert.verdict == "certified"
    assert cert.bound_used < cert.threshold
    lo, hi = PUBLISHED_S_BRACKETS[d]
    assert lo < cert.s_d < hi


@pytest.mark.parametrize("d", DIMS)
def test_large_amplitude_rejected(d):
    dim = Dimension(d)
    amp = 1.01 * ck_threshold(dim)
    assert certify_ck(dim, RadialProfile.gaussian(amp)).verdict == "rejected"


def test_poly_bounds_against_finite_differences():
    # Symbolic axis derivatives agree with finite differences of profile_eval along
    # the xi_1 axis, and the certificate's bounds dominate them.
    p = RadialProfile.poly_r2([0.2, -0.05, 0.001])
    bounds = derivative_bounds(p, 3)
    x = np.linspace(-3.9, 3.9, 79)
    h = 1e-3
    f = lambda t: profile_eval(p, np.abs(t))
    fd = [f(x),
          (f(x + h) - f(x - h)) / (2 * h),
          (f(x + h) - 2 * f(x) + f(x - h)) / h ** 2,
          (f(x + 2 * h) - 2 * f(x + h) + 2 * f(x - h) - f(x - 2 * h)) / (2 * h ** 3)]
    for j in range(4):
        exact = axis_derivative(p, j, x)
        assert np.max(np.abs(fd[j] - exact)) <= 1e-6 * (1 + np.max(np.abs(exact)))
        assert np.max(np.abs(fd[j])) <= bounds[j]


def test_table_needs_declared_bounds():
    p = RadialProfile.table([0, 1, 2, 3, 4], [0.01, 0.01, 0.01, 0.01, 0.01])
    with pytest.raises(HypothesisError, match="R4.C data not supplied"):
        certify_ck(Dimension(5), p)
    q = RadialProfile.table([0, 1, 2, 3, 4], [0.01] * 5, derivative_bounds=[0.01] * 5)
    cert = certify_ck(Dimension(5), q)
    assert cert.verdict == "certified"
    assert "derivative bounds declared by user" in cert.notes


def test_negative_profile_rejected():
    cert = certify_ck(Dimension(4), RadialProfile.poly_r2([1e-4, -1e-4]))
    assert cert.verdict == "rejected" and cert.r3_status == "fail"


def test_margin_flips_verdict():
    dim = Dimension(6)
    C = ck_threshold(dim)
    p = RadialProfile.poly_r2([0.99 * C])  # constant: M_d is the value itself
    assert certify_ck(dim, p).verdict == "certified"
    assert certify_ck(dim, p, margin=0.02).verdict == "rejected"
