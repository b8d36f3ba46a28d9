"""The perturbation kernel K_g, its Gegenbauer expansion and eigenvalues.

With z = w1 + w2 (|z| = s) and y = w3 + w4 distributed by sigma * sigma,
the double sphere integral defining K_g collapses to

    K_g*(s) = 2^{3-d} sigma_{d-2}^2 int_0^2 int_{-1}^1 ghat(|z + y|)
              (s^2 + r^2 - s r c) (4 - r^2)^{(d-3)/2} r^{d-2} (1 - c^2)^{(d-3)/2} dc dr

where |z + y|^2 = s^2 + r^2 + 2 s r c.  Substituting r = 1 + x turns
(4 - r^2)^{(d-3)/2} r^{d-2} into (1 - x)^{(d-3)/2} (1 + x)^{d-2} (3 + x)^{(d-3)/2};
the first two factors go into a Gauss-Jacobi weight and the angular weight is
the Gegenbauer weight of order nu, so the remaining integrand is smooth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .closedforms import Dimension, lambda_unperturbed_zero, sphere_measure
from .profiles import (RadialProfile, R3Verdict, check_r3, is_identically_zero,
                       profile_eval, profile_eval_sq)
from .specfun import (DomainError, QuadratureRule, gauss_jacobi_rule, gegenbauer_table,
                      jacobi_rule, log_gegenbauer_norm_sq)

__all__ = [
    "InconclusiveError",
    "PreconditionError",
    "RadialProfile",
    "R3Verdict",
    "GegenbauerSeries",
    "profile_eval",
    "check_r3",
    "kernel_eval",
    "kernel_values",
    "kernel_series",
    "lambda_perturbed",
    "eigen_prefactor",
    "sharp_constant",
    "DEFAULT_NODES",
]

DEFAULT_NODES = {"radial": 128, "angular": 128, "gegenbauer": 512}
_CHUNK = 1 << 21  # integrand points per vectorized block


class InconclusiveError(RuntimeError):
    """Quadrature refinement did not settle; both estimates are attached."""

    def __init__(self, message, coarse, fine):
        super().__init__(message)
        self.coarse = coarse
        self.fine = fine


class PreconditionError(ValueError):
    pass


@lru_cache(maxsize=64)
def _rules(d: int, radial_nodes: int, angular_nodes: int, dtype_name: str):
    dtype = np.dtype(dtype_name)
    radial = jacobi_rule(radial_nodes, (d - 3) / 2, d - 2, dtype=dtype)
    angular = gauss_jacobi_rule(angular_nodes, (d - 2) / 2, dtype=dtype)
    return radial, angular


def _kstar(dim: Dimension, p: RadialProfile, s, radial_nodes: int, angular_nodes: int,
           dtype=np.float64):
    """K_g*(s) and the integral of the absolute integrand, both vectorized in s."""
    if radial_nodes < 8 or angular_nodes < 8:
        raise DomainError("node counts must be >= 8")
    d = dim.d
    dtype = np.dtype(dtype)
    s = np.atleast_1d(np.asarray(s, dtype=dtype))
    if np.any(~np.isfinite(s)) or np.any(s < 0) or np.any(s > 2):
        raise DomainError("K_g* is evaluated on s in [0, 2]")
    radial, angular = _rules(d, radial_nodes, angular_nodes, dtype.name)
    x, wr = radial.nodes, radial.weights
    c, wc = angular.nodes, angular.weights
    r = 1 + x
    half = dtype.type((d - 3) / 2)
    wr_eff = wr * (3 + x) ** half
    sigma = dtype.type(sphere_measure(d - 1))
    const = dtype.type(2.0 ** (3 - d)) * sigma * sigma

    value = np.empty(s.size, dtype=dtype)
    abs_value = np.empty(s.size, dtype=dtype)
    if is_identically_zero(p):
        value[:] = 0
        abs_value[:] = 0
        return value, abs_value
    block = max(1, _CHUNK // (x.size * c.size))
    rc = r[:, None] * c[None, :]
    r2 = (r * r)[:, None]
    for lo in range(0, s.size, block):
        sb = s[lo:lo + block, None, None]
        arg = sb * sb + r2 + 2 * sb * rc
        # Rounding can push the argument a hair past 16 at s = r = 2, c = 1.
        arg = np.clip(arg, 0, 16)
        f = profile_eval_sq(p, arg) * (sb * sb + r2 - sb * rc)
        inner = np.sum(f * wc, axis=2)
        inner_abs = np.sum(np.abs(f) * wc, axis=2)
        value[lo:lo + block] = const * np.sum(inner * wr_eff, axis=1)
        abs_value[lo:lo + block] = const * np.sum(inner_abs * wr_eff, axis=1)
    return value, abs_value


def kernel_values(dim: Dimension, p: RadialProfile, s, radial_nodes: int = 128,
                  angular_nodes: int = 128, dtype=np.float64):
    """K_g*(s) at many s without refinement."""
    value, _ = _kstar(dim, p, s, radial_nodes, angular_nodes, dtype)
    return value if np.ndim(s) else value[0]


def kernel_eval(dim: Dimension, p: RadialProfile, s: float, radial_nodes: int = 128,
                angular_nodes: int = 128, tol: float = 1e-9, dtype=np.float64) -> float:
    """K_g*(s), accepted only if doubling both node counts agrees to 10 tol.

    The comparison is relative to the integral of the absolute integrand, so
    a kernel that is zero (or nearly so) at s does not trip the check.
    """
    coarse, _ = _kstar(dim, p, [s], radial_nodes, angular_nodes, dtype)
    fine, fine_abs = _kstar(dim, p, [s], 2 * radial_nodes, 2 * angular_nodes, dtype)
    coarse, fine, scale = float(coarse[0]), float(fine[0]), float(fine_abs[0])
    if abs(fine - coarse) > 10 * tol * scale:
        raise InconclusiveError(
            f"kernel refinement at s={s}: {coarse!r} vs {fine!r}", coarse, fine)
    return fine


@dataclass(frozen=True)
class GegenbauerSeries:
    """Coefficients a_n of K_g(t) = sum a_n C_n^nu(t).

    ``rounding_floor[n]`` bounds the floating-point noise in a_n (64 ulp of
    the absolute-value integral); ``refinement_delta[n]`` is the change in
    a_n when the kernel quadrature is rerun with doubled node counts (zeros
    when no refinement was requested).
    """

    order: float
    coefficients: np.ndarray
    truncation_estimate: float
    rounding_floor: np.ndarray = field(repr=False)
    refinement_delta: np.ndarray = field(repr=False)
    kernel_change: float = 0.0
    kernel_scale: float = 0.0

    def __post_init__(self):
        for arr in (self.coefficients, self.rounding_floor, self.refinement_delta):
            arr.setflags(write=False)

    @property
    def n_max(self) -> int:
        return self.coefficients.size - 1

    def __call__(self, t):
        t = np.asarray(t, dtype=np.float64)
        table = gegenbauer_table(self.n_max, self.order, t)
        out = self.coefficients.astype(np.float64) @ table
        return out if t.ndim else float(out[0])


def _truncation_estimate(a: np.ndarray, order: float) -> float:
    """Tail size from a geometric fit of the last five |a_n| C_n(1)."""
    n_max = a.size - 1
    ns = np.arange(max(0, n_max - 4), n_max + 1)
    at_one = np.exp([math.lgamma(n + 2 * order) - math.lgamma(n + 1) - math.lgamma(2 * order)
                     for n in ns])
    mags = np.abs(a[ns].astype(np.float64)) * at_one
    if not np.any(mags > 0):
        return 0.0
    if np.all(mags > 0) and ns.size >= 2:
        slope = np.polyfit(ns, np.log(mags), 1)[0]
        q = math.exp(slope)
        if q < 0.9:
            return float(mags[-1] * q / (1 - q))
    # No evidence of geometric decay: report the size of the fitted block.
    return float(np.sum(mags))


def _coefficients(t, w, K, K_abs, n_max, order):
    table = gegenbauer_table(n_max, order, t)
    dtype = t.dtype.type
    inv_norm = np.array([math.exp(-log_gegenbauer_norm_sq(n, order)) for n in range(n_max + 1)])
    inv_norm = inv_norm.astype(t.dtype)
    a = (table * (w * K)).sum(axis=1) * inv_norm
    abs_sum = (np.abs(table) * (w * K_abs)).sum(axis=1) * inv_norm
    floor = dtype(64) * np.finfo(t.dtype).eps * abs_sum
    return a, floor


def kernel_series(dim: Dimension, p: RadialProfile, n_max: int, rule: QuadratureRule,
                  radial_nodes: int = 128, angular_nodes: int = 128,
                  refine: bool = False) -> GegenbauerSeries:
    """Gegenbauer coefficients a_n^nu of K_g for n = 0..n_max by quadrature.

    The computation runs in the dtype of ``rule``.  With ``refine`` the
    kernel is recomputed on doubled nodes and the per-coefficient change is
    recorded.
    """
    nu = dim.nu
    if rule.node_count < 2 * n_max:
        raise DomainError(f"rule has {rule.node_count} nodes, need >= {2 * n_max}")
    a_exp, b_exp = rule.exponents
    if not (a_exp == b_exp and abs(a_exp - (nu - 0.5)) < 1e-15):
        raise DomainError("rule must carry the Gegenbauer weight of order nu")
    t, w = rule.nodes, rule.weights
    s = np.sqrt(np.maximum(2 + 2 * t, 0))
    K, K_abs = _kstar(dim, p, s, radial_nodes, angular_nodes, t.dtype)
    a, floor = _coefficients(t, w, K, K_abs, n_max, nu)
    delta = np.zeros_like(a)
    change = 0.0
    scale = float(np.max(K_abs)) if K_abs.size else 0.0
    if refine:
        K2, K2_abs = _kstar(dim, p, s, 2 * radial_nodes, 2 * angular_nodes, t.dtype)
        a2, _ = _coefficients(t, w, K2, K2_abs, n_max, nu)
        delta = np.abs(a2 - a)
        change = float(np.max(np.abs(K2 - K))) / scale if scale > 0 else 0.0
        a = a2
    return GegenbauerSeries(order=nu, coefficients=a,
                            truncation_estimate=_truncation_estimate(a, nu),
                            rounding_floor=floor, refinement_delta=delta,
                            kernel_change=change, kernel_scale=scale)


def eigen_prefactor(dim: Dimension, n: int) -> float:
    """2 pi^{nu+1} / ((n + nu) Gamma(nu)), mapping a_n to lambda(n)."""
    nu = dim.nu
    return 2 * math.pi ** (nu + 1) / ((n + nu) * math.gamma(nu))


def lambda_perturbed(dim: Dimension, series: GegenbauerSeries, n: int) -> float:
    """lambda_{d,g}(n) from the Gegenbauer coefficient a_n."""
    if not 0 <= n <= series.n_max:
        raise DomainError(f"n={n} outside the series range 0..{series.n_max}")
    return eigen_prefactor(dim, n) * float(series.coefficients[n])


def sharp_constant(dim: Dimension, series: GegenbauerSeries) -> float:
    """(lambda_{d,h}(0) / (4 sigma))^{1/4} for h = 1 + g."""
    lam0 = lambda_unperturbed_zero(dim) + lambda_perturbed(dim, series, 0)
    if not lam0 > 0:
        raise PreconditionError(f"lambda_h(0) must be positive, got {lam0}")
    return (lam0 / (4 * sphere_measure(dim.d))) ** 0.25
