"""Dimension-indexed closed forms of the unperturbed problem.

Constants that are rational multiples of an integer power of pi (sphere
measures, kappa_d, the gap constants c_d) are carried exactly as
:class:`PiMonomial` values and converted to float once.  The eigenvalue
closed forms lambda_{d,1}(2l) are rational in l times kappa_d, and the
rational part is available exactly through :func:`lambda_unperturbed_ratio`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np

from .specfun import DomainError

__all__ = [
    "SUPPORTED_DIMENSIONS",
    "Dimension",
    "PiMonomial",
    "GapConstants",
    "sphere_measure",
    "sphere_measure_exact",
    "kappa_exact",
    "gap_constant_exact",
    "gap_constants",
    "kernel_unperturbed",
    "kernel_unperturbed_constant",
    "lambda_unperturbed",
    "lambda_unperturbed_ratio",
    "lambda_unperturbed_zero",
    "gap_constant",
    "twofold_convolution",
    "frak_r",
]

SUPPORTED_DIMENSIONS = (3, 4, 5, 6, 7)


@dataclass(frozen=True)
class Dimension:
    """Sphere S^{d-1} in R^d with the derived parameters nu, k(d), p(d)."""

    d: int

    def __post_init__(self):
        if self.d not in SUPPORTED_DIMENSIONS:
            raise DomainError(f"dimension must be one of {SUPPORTED_DIMENSIONS}, got {self.d}")

    @property
    def nu(self) -> float:
        return (self.d - 2) / 2

    @property
    def k(self) -> int:
        """Number of derivatives required by the C^k certificate."""
        return (self.d + 3) // 2

    @property
    def p(self) -> float:
        return 2.0 if self.d % 2 == 0 else 2.0 + 1.0 / self.d

    @property
    def p_conj(self) -> float:
        return self.p / (self.p - 1)


@dataclass(frozen=True)
class PiMonomial:
    """Exact value ``coef * pi**pi_power``."""

    coef: Fraction
    pi_power: int = 0

    def __mul__(self, other: "PiMonomial | Fraction | int") -> "PiMonomial":
        if isinstance(other, PiMonomial):
            return PiMonomial(self.coef * other.coef, self.pi_power + other.pi_power)
        return PiMonomial(self.coef * Fraction(other), self.pi_power)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "PiMonomial":
        return PiMonomial(self.coef ** e, self.pi_power * e)

    def __truediv__(self, other: "PiMonomial") -> "PiMonomial":
        return PiMonomial(self.coef / other.coef, self.pi_power - other.pi_power)

    def __float__(self) -> float:
        return float(self.coef) * math.pi ** self.pi_power


@lru_cache(maxsize=None)
def sphere_measure_exact(d: int) -> PiMonomial:
    """sigma(S^{d-1}) = 2 pi^{d/2} / Gamma(d/2) for d >= 2, as a PiMonomial."""
    if d < 2:
        raise DomainError("exact sphere measure needs d >= 2")
    if d % 2 == 0:
        m = d // 2
        return PiMonomial(Fraction(2, math.factorial(m - 1)), m)
    # Gamma(m + 1/2) = (2m)! sqrt(pi) / (4^m m!); the sqrt(pi) cancels pi^{1/2}.
    m = (d - 1) // 2
    gamma_half = Fraction(math.factorial(2 * m), 4 ** m * math.factorial(m))
    return PiMonomial(2 / gamma_half, m)


def sphere_measure(d: int) -> float:
    """Surface measure of the unit sphere S^{d-1} in R^d."""
    if d < 1:
        raise DomainError(f"sphere_measure requires d >= 1, got {d}")
    if d == 1:
        return 2.0
    return float(sphere_measure_exact(d))


@lru_cache(maxsize=None)
def kappa_exact(d: int) -> PiMonomial:
    two_pi = PiMonomial(Fraction(2), 1)
    return (two_pi ** d) * 3 * Fraction(2) ** (3 - d) * sphere_measure_exact(d - 1) ** 2


_GAP_CONSTANTS = {
    3: PiMonomial(Fraction(2 ** 8, 35), 5),
    4: PiMonomial(Fraction(2 ** 10, 15), 6),
    5: PiMonomial(Fraction(2 ** 15, 2145), 9),
    6: PiMonomial(Fraction(2 ** 15, 1575), 10),
    7: PiMonomial(Fraction(2 ** 21, 1322685), 13),
}


def gap_constant_exact(dim: Dimension) -> PiMonomial:
    return _GAP_CONSTANTS[dim.d]


def gap_constant(dim: Dimension) -> float:
    """c_d with lambda_{d,1}(2l) <= -c_d l^{-d} for every l >= 1."""
    return float(_GAP_CONSTANTS[dim.d])


@dataclass(frozen=True)
class GapConstants:
    kappa_d: float
    c_d: float


def gap_constants(dim: Dimension) -> GapConstants:
    return GapConstants(kappa_d=float(kappa_exact(dim.d)), c_d=gap_constant(dim))


def kernel_unperturbed_constant(dim: Dimension) -> float:
    d = dim.d
    return (2 * math.pi) ** d * 3 * 2 ** (2 - d / 2) * sphere_measure(d - 1)


def kernel_unperturbed(dim: Dimension, t):
    """K_1(t), the zonal kernel of the unperturbed quadratic form."""
    t = np.asarray(t, dtype=np.result_type(t, np.float64))
    d = dim.d
    val = kernel_unperturbed_constant(dim) * np.sqrt(1 + t) * (1 - t) ** ((d - 3) / 2)
    return val if val.ndim else val[()]


def lambda_unperturbed_ratio(dim: Dimension, ell: int) -> Fraction:
    """lambda_{d,1}(2 ell) / kappa_d as an exact rational."""
    if ell < 1:
        raise DomainError(f"ell must be >= 1, got {ell}")
    L = ell
    d = dim.d
    if d == 3:
        return Fraction(-8, (4 * L - 1) * (4 * L + 1) * (4 * L + 3))
    if d == 4:
        return Fraction(-8, (2 * L - 1) * (2 * L + 1) ** 2 * (2 * L + 3))
    if d == 5:
        num = -1536 * (2 * L + 1) * (2 * L + 2) * (4 * L * L + 6 * L - 3)
        den = comb(2 * L + 2, 2)
        for a in (-3, -1, 1, 3, 5, 7, 9):
            den *= 4 * L + a
        return Fraction(num, den)
    if d == 6:
        num = -32 * (2 * L + 2)
        den = comb(2 * L + 3, 3) * (2 * L - 1) * (2 * L + 1) * (2 * L + 3) * (2 * L + 5)
        return Fraction(num, den)
    num = (-163840 * (2 * L + 1) * (2 * L + 2) * (2 * L + 3) * (2 * L + 4)
           * (4 * L * L + 10 * L - 15) * (4 * L * L + 10 * L - 3))
    den = comb(2 * L + 4, 4)
    for a in (-5, -3, -1, 1, 3, 5, 7, 9, 11, 13, 15):
        den *= 4 * L + a
    return Fraction(num, den)


def lambda_unperturbed(dim: Dimension, ell: int) -> float:
    """Funk-Hecke eigenvalue lambda_{d,1}(2 ell) of K_1; strictly negative."""
    exact = kappa_exact(dim.d) * lambda_unperturbed_ratio(dim, ell)
    return float(exact)


def lambda_unperturbed_zero(dim: Dimension) -> float:
    """lambda_{d,1}(0), from the Beta integral of (1-t)^{d-3} (1+t)^{(d-2)/2}."""
    d = dim.d
    a, b = d - 3, (d - 2) / 2
    log_beta = (a + b + 1) * math.log(2) + math.lgamma(a + 1) + math.lgamma(b + 1) - math.lgamma(a + b + 2)
    return sphere_measure(d - 1) * kernel_unperturbed_constant(dim) * math.exp(log_beta)


def twofold_convolution(dim: Dimension, r):
    """Radial density of sigma * sigma at |x| = r; zero outside (0, 2)."""
    d = dim.d
    r = np.asarray(r, dtype=np.float64)
    inside = (r > 0) & (r < 2)
    rs = np.where(inside, r, 1.0)
    val = 2.0 ** (3 - d) * sphere_measure(d - 1) * (4 - rs * rs) ** ((d - 3) / 2) / rs
    val = np.where(inside, val, 0.0)
    return val if val.ndim else float(val)


def frak_r(dim: Dimension) -> float:
    """Average of |(w3 + w4) . zeta| over (S^{d-1})^2, normalized by sigma^2."""
    d = dim.d
    log_val = ((d - 1) * math.log(2) + 3 * math.lgamma(d / 2) - math.log(math.pi)
               - math.lgamma(d - 0.5) - math.lgamma((d + 1) / 2))
    return math.exp(log_val)
