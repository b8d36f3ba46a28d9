import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import integrate

from oracles import kstar_gaussian_mp, lambda_gaussian_mp, mc_kernel, sphere_sigma
from spherecert.cert_analytic import kg_ellipse_bound, rho_from_R, wang_bound
from spherecert.closedforms import SUPPORTED_DIMENSIONS, Dimension
from spherecert.kernel import (GegenbauerSeries, InconclusiveError, PreconditionError,
                               eigen_prefactor, kernel_eval, kernel_series, kernel_values,
                               lambda_perturbed, sharp_constant)
from spherecert.profiles import RadialProfile, analytic_bound, check_r3
from spherecert.specfun import DomainError, GegenbauerParams, gauss_jacobi_rule, gegenbauer_at_one

DIMS = list(SUPPORTED_DIMENSIONS)
GAUSS = RadialProfile.gaussian(1 / 11)
ZERO = RadialProfile.table([0, 1, 2, 3, 4], [0, 0, 0, 0, 0])


def series(d, p, n_max=48, nodes=512):
    dim = Dimension(d)
    return kernel_series(dim, p, n_max, gauss_jacobi_rule(nodes, dim.nu))


# --- K_g* --------------------------------------------------------------------

@pytest.mark.parametrize("d", DIMS)
def test_zero_profile_gives_zero_kernel(d):
    np.testing.assert_array_equal(kernel_values(Dimension(d), ZERO, np.linspace(0, 2, 7)), 0.0)
    assert kernel_eval(Dimension(d), ZERO, 1.3) == 0.0


@pytest.mark.parametrize("d", DIMS)
def test_constant_profile_at_origin(d):
    # s = 0 leaves int (sigma*sigma)(x) |x|^2 dx = 2 sigma^2.
    got = kernel_eval(Dimension(d), RadialProfile.poly_r2([1.0]), 0.0)
    assert got == pytest.approx(2 * sphere_sigma(d) ** 2, rel=1e-12)


@pytest.mark.parametrize("d", DIMS)
@pytest.mark.parametrize("s", [0.0, 0.4, 1.1, 1.7, 2.0])
def test_gaussian_kernel_against_mpmath(d, s):
    ref = float(kstar_gaussian_mp(d, Fraction(1, 11), s))
    assert kernel_eval(Dimension(d), GAUSS, s) == pytest.approx(ref, rel=1e-13)


def test_gaussian_kernel_against_monte_carlo():
    est, se = mc_kernel(3, GAUSS, 2.0, 200_000, seed=5)
    assert abs(kernel_eval(Dimension(3), GAUSS, 2.0) - est) <= 3 * se


def test_refinement_failure_is_inconclusive():
    narrow = RadialProfile.gaussian(1.0, 0.2)
    with pytest.raises(InconclusiveError) as info:
        kernel_eval(Dimension(3), narrow, 1.0, radial_nodes=8, angular_nodes=8, tol=1e-12)
    assert info.value.coarse != info.value.fine


@pytest.mark.parametrize("kwargs", [dict(s=-0.1), dict(s=2.01), dict(s=float("nan")),
                                    dict(s=1.0, radial_nodes=4), dict(s=1.0, angular_nodes=7)])
def test_kernel_domain_errors(kwargs):
    with pytest.raises(DomainError):
        kernel_eval(Dimension(4), GAUSS, **kwargs)


@pytest.mark.parametrize("d", DIMS)
def test_kernel_amplitude_linear(d):
    s = np.linspace(0, 2, 9)
    a = kernel_values(Dimension(d), RadialProfile.gaussian(0.3, 1.2), s)
    b = kernel_values(Dimension(d), RadialProfile.gaussian(0.6, 1.2), s)
    np.testing.assert_allclose(b / a, 2.0, rtol=1e-12)


@pytest.mark.parametrize("p", [GAUSS, RadialProfile.poly_r2([1.0, 0.5]),
                               RadialProfile.poly_r2([1.0, -2.0, 1.0])])
@pytest.mark.parametrize("d", DIMS)
def test_kernel_positive_for_nonnegative_profiles(p, d):
    assert check_r3(p).ok
    vals = kernel_values(Dimension(d), p, np.linspace(0, 2, 41))
    assert np.min(vals) >= -1e-9 * np.max(np.abs(vals))


# --- Gegenbauer series -------------------------------------------------------

def test_zero_profile_gives_zero_series():
    ser = series(5, ZERO)
    np.testing.assert_array_equal(ser.coefficients, 0.0)
    assert ser.truncation_estimate == 0.0
    assert lambda_perturbed(Dimension(5), ser, 4) == 0.0


@pytest.mark.parametrize("d", DIMS)
@pytest.mark.parametrize("p", [GAUSS, RadialProfile.poly_r2([1.0, -0.1])])
def test_series_reconstructs_kernel(d, p):
    ser = series(d, p)
    k = np.arange(33)
    t = np.cos((2 * k + 1) * np.pi / 66)
    direct = kernel_values(Dimension(d), p, np.sqrt(2 + 2 * t))
    tol = max(1e-8, ser.truncation_estimate) * np.max(np.abs(direct))
    assert np.max(np.abs(ser(t) - direct)) <= tol


@pytest.mark.parametrize("d", DIMS)
def test_series_coefficients_decay(d):
    ser = series(d, GAUSS)
    nu = Dimension(d).nu
    mags = np.array([abs(a) * gegenbauer_at_one(GegenbauerParams(nu, n))
                     for n, a in enumerate(ser.coefficients)])
    # Strictly decreasing after a short burn-in, until the quadrature noise.
    stop = int(np.argmax(mags < 1e-10 * mags[0]))
    assert stop > 8
    assert np.all(np.diff(mags[3:stop]) < 0)


@pytest.mark.parametrize("d", DIMS)
def test_series_amplitude_linear(d):
    a = series(d, RadialProfile.gaussian(0.3), n_max=16, nodes=64)
    b = series(d, RadialProfile.gaussian(0.6), n_max=16, nodes=64)
    big = np.abs(a.coefficients) > 1e-6 * np.max(np.abs(a.coefficients))
    np.testing.assert_allclose(b.coefficients[big] / a.coefficients[big], 2.0, rtol=1e-12)


def test_series_rule_preconditions():
    dim = Dimension(4)
    with pytest.raises(DomainError):
        kernel_series(dim, GAUSS, 48, gauss_jacobi_rule(95, dim.nu))
    with pytest.raises(DomainError):
        kernel_series(dim, GAUSS, 8, gauss_jacobi_rule(64, 1.5))


def test_refined_series_records_deltas():
    ser = kernel_series(Dimension(5), GAUSS, 16, gauss_jacobi_rule(64, 1.5), refine=True)
    assert ser.refinement_delta.shape == ser.coefficients.shape
    assert np.max(ser.refinement_delta) < 1e-10 * abs(ser.coefficients[0])
    assert 0 <= ser.kernel_change < 1e-12


def test_series_is_read_only():
    ser = series(3, GAUSS, n_max=8, nodes=32)
    assert isinstance(ser, GegenbauerSeries)
    with pytest.raises(ValueError):
        ser.coefficients[0] = 1.0


# --- eigenvalues -------------------------------------------------------------

def test_lambda_zero_matches_one_dimensional_integral():
    # lambda_{3,g}(0) = sigma_1 int K_g(t) dt for ghat = 1 on B_4.
    dim = Dimension(3)
    p = RadialProfile.poly_r2([1.0])
    ser = series(3, p)
    K = lambda t: kernel_values(dim, p, math.sqrt(max(2 + 2 * t, 0.0)))
    ref, _ = integrate.quad(K, -1, 1, epsabs=0, epsrel=1e-13, limit=200)
    assert lambda_perturbed(dim, ser, 0) == pytest.approx(2 * math.pi * ref, rel=1e-9)


def test_lambda_requires_index_in_range():
    with pytest.raises(DomainError):
        lambda_perturbed(Dimension(3), series(3, GAUSS, n_max=8, nodes=32), 9)


@pytest.mark.parametrize("d", DIMS)
def test_coefficients_below_wang_envelope(d):
    dim = Dimension(d)
    R = 6.0
    ser = series(d, GAUSS)
    M = kg_ellipse_bound(dim, R, analytic_bound(GAUSS, R))
    rho = rho_from_R(R)
    for n in range(1, ser.n_max + 1):
        bound = wang_bound(n, rho, dim.nu, M)
        assert abs(ser.coefficients[n]) <= bound + ser.rounding_floor[n]


# One mp oracle run per dimension: at 34 digits lambda_g(2 ell) is resolved
# far below the double-precision floor, so the decay claim reads off the
# oracle and the library is held to its own rounding floor against it.
@pytest.fixture(scope="module")
def gaussian_spectrum():
    out = {}
    for d in DIMS:
        out[d] = (lambda_gaussian_mp(d, Fraction(1, 11), [0, 20, 40, 80], N=100),
                  lambda_gaussian_mp(d, Fraction(1, 11), [0, 20, 40, 80], N=120))
    return out


@pytest.mark.parametrize("d", DIMS)
def test_gaussian_spectrum_decays(d, gaussian_spectrum):
    coarse, fine = gaussian_spectrum[d]
    # Two rule sizes agree, so the oracle is not aliased.
    assert float(abs(fine[20] - coarse[20])) <= 1e-8 * float(abs(fine[20]))
    assert float(abs(fine[80] - coarse[80])) <= 1e-28 * float(fine[0])
    ell = 40
    assert float(abs(fine[2 * ell])) * ell ** (d + 2) < 1e-6


@pytest.mark.parametrize("d", DIMS)
def test_gaussian_spectrum_library_within_floor(d, gaussian_spectrum):
    _, fine = gaussian_spectrum[d]
    dim = Dimension(d)
    ser = kernel_series(dim, GAUSS, 80, gauss_jacobi_rule(512, dim.nu))
    for n in (0, 20, 40, 80):
        err = abs(lambda_perturbed(dim, ser, n) - float(fine[n]))
        assert err <= eigen_prefactor(dim, n) * ser.rounding_floor[n]


# --- sharp constant ----------------------------------------------------------

def test_sharp_constant_unperturbed_d3():
    assert sharp_constant(Dimension(3), series(3, ZERO)) == pytest.approx(2 * math.pi, rel=1e-12)


@pytest.mark.parametrize("d", DIMS)
def test_sharp_constant_unperturbed_positive(d):
    c = sharp_constant(Dimension(d), series(d, ZERO, n_max=4, nodes=16))
    assert math.isfinite(c) and c > 0


def test_sharp_constant_grows_with_positive_profile():
    assert sharp_constant(Dimension(3), series(3, GAUSS)) > 2 * math.pi


def test_sharp_constant_precondition():
    very_negative = RadialProfile.gaussian(-1e4)
    with pytest.raises(PreconditionError):
        sharp_constant(Dimension(3), series(3, very_negative, n_max=4, nodes=16))
