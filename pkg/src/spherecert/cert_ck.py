"""C^k-route certificate: integration by parts against Gegenbauer weights.

Bounds on k(d) axis derivatives of ghat over the ball of radius 4 control
|K_g^{(j)}(t)| (2 + 2t)^{j-1}, and k integrations by parts followed by
Hoelder with exponent p(d) give |lambda_{d,g}(2l)| < c_d l^{-d} whenever
M_d < C_d = 1 / beta_d.  Indices with 2 <= 2l < k are handled separately by
Cauchy-Schwarz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .closedforms import Dimension, frak_r, gap_constant, sphere_measure
from .profiles import RadialProfile, check_r3, derivative_bounds
from .specfun import DomainError, log_gegenbauer_norm_sq

__all__ = [
    "CkCertificate",
    "PUBLISHED_S_BRACKETS",
    "dnk_factor",
    "frak_s",
    "b_coefficients",
    "g_profile",
    "g_profile_gamma_form",
    "beta_d",
    "ck_threshold",
    "small_ell_check",
    "certify_ck",
]

# Published two-digit enclosures of s_d.
PUBLISHED_S_BRACKETS = {
    3: (7.88, 7.89),
    4: (7.67, 7.68),
    5: (7.53, 7.54),
    6: (7.42, 7.43),
    7: (7.34, 7.35),
}

G_CHECK_LIMIT = 1000


def dnk_factor(n: int, k: int, alpha: float) -> float:
    """D_{n,k}^alpha = prod_{j<k} 2(alpha + j) / ((n - j)(n + 2 alpha + j))."""
    if k < 1 or n < k:
        raise DomainError(f"need n >= k >= 1, got n={n}, k={k}")
    out = 1.0
    for j in range(k):
        out *= 2 * (alpha + j) / ((n - j) * (n + 2 * alpha + j))
    return out


def _s_branches(s, r):
    f1 = (s * s + 2 * s + 2 + (s + 0.5) * r) / s
    f2 = s * s + 4 * s + 4 + (s + 2) * r
    return f1, f2


def frak_s(dim: Dimension, grid_points: int = 10_000, xtol: float = 1e-10) -> float:
    """max over s in [0, 2] of min(f1(s), f2(s)); f1 blows up at s = 0."""
    r = frak_r(dim)
    s = np.linspace(0.0, 2.0, grid_points + 1)[1:]
    vals = np.minimum(*_s_branches(s, r))
    i = int(np.argmax(vals))
    lo, hi = s[max(i - 1, 0)], s[min(i + 1, s.size - 1)]

    def neg(x):
        return -min(_s_branches(x, r))

    if i in (0, s.size - 1):
        return float(vals[i])
    res = minimize_scalar(neg, bracket=(lo, s[i], hi), method="golden", tol=xtol)
    return float(max(-res.fun, vals[i]))


def b_coefficients(dim: Dimension, s_value: float | None = None) -> list:
    """[b_{d,1}, ..., b_{d,5}]."""
    s = frak_s(dim) if s_value is None else s_value
    r = frak_r(dim)
    return [s, 16 + 4 * r + s, 96 + 22 * r + 3 * s, 664 + 144 * r + 15 * s,
            5568 + 1166 * r + 105 * s]


def _log_g_profile(dim: Dimension, ell: int) -> float:
    nu, k, p = dim.nu, dim.k, dim.p
    n = 2 * ell
    log_den = math.log(n + nu)
    for j in range(k):
        log_den += math.log(n - j) + math.log(n + 2 * nu + j)
    for r in range(1, int(round(2 * nu))):
        log_den += math.log(n + r)
    return dim.d * math.log(n) - log_den / p


def g_profile(dim: Dimension, ell: int) -> float:
    """G_d(ell); at most 1 for every 2 ell >= k(d)."""
    if 2 * ell < dim.k:
        raise DomainError(f"G_d needs 2 ell >= k = {dim.k}, got ell={ell}")
    return math.exp(_log_g_profile(dim, ell))


def g_profile_gamma_form(dim: Dimension, ell: int) -> float:
    """G_d(ell) from the unsimplified Gamma-function expression."""
    nu, k, p = dim.nu, dim.k, dim.p
    n = 2 * ell
    lg = math.lgamma
    val = dim.d * math.log(n) - math.log(n + nu)
    for j in range(k):
        val -= math.log(n - j) + math.log(n + 2 * nu + j)
    val += (1 - 2 / p) * (lg(n + 2 * nu + k) - lg(n - k + 1))
    val += (1 / p) * (lg(n + 2 * nu + k) - lg(n - k + 1) - math.log(n + nu))
    val += lg(n + 1) + math.log(n + nu) - lg(n + 2 * nu)
    return math.exp(val)


def _check_g_bound(dim: Dimension, limit: int = G_CHECK_LIMIT):
    """Assert G_d(ell) <= 1 from 2 ell >= k until the monotone argument takes over."""
    nu, k = dim.nu, dim.k
    analytic_from = math.ceil((k - 1) * (2 * nu + k - 1) / (2 * nu) / 2)
    top = max(limit, analytic_from)
    for ell in range(math.ceil(k / 2), top + 1):
        if _log_g_profile(dim, ell) > 1e-15:
            raise AssertionError(f"G_d({ell}) exceeds 1 for d={dim.d}")


def _log_beta(dim: Dimension, s_value: float) -> float:
    nu, k, p, d = dim.nu, dim.k, dim.p, dim.d
    p_conj = p / (p - 1)
    lg = math.lgamma
    b = b_coefficients(dim, s_value)[k - 1]
    sigma = sphere_measure(d)
    val = -math.log(gap_constant(dim)) - d * math.log(2)
    val += math.log(2) / p_conj + math.log(b) + 2 * math.log(sigma)
    val += math.log(2) + (nu + 1) * math.log(math.pi) - lg(nu)
    val += sum(math.log(2 * (nu + j)) for j in range(k))
    val += -(1 - 2 / p) * lg(2 * nu + 2 * k)
    val += (math.log(math.pi) + (1 - 2 * nu - 2 * k) * math.log(2) - 2 * lg(nu + k)) / p
    val += 2 * lg(nu) - math.log(math.pi) - (1 - 2 * nu) * math.log(2)
    return val


def beta_d(dim: Dimension, s_value: float | None = None) -> float:
    s = frak_s(dim) if s_value is None else s_value
    return math.exp(_log_beta(dim, s))


def ck_threshold(dim: Dimension, bracket: bool = False) -> float:
    """C_d = 1 / beta_d; ``bracket`` uses the upper published enclosure of s_d."""
    s = PUBLISHED_S_BRACKETS[dim.d][1] if bracket else frak_s(dim)
    return math.exp(-_log_beta(dim, s))


def small_ell_check(dim: Dimension, M: float) -> list:
    """Rows (ell, lhs, rhs, ok) for 2 <= 2 ell < k(d)."""
    nu = dim.nu
    r = frak_r(dim)
    sigma = sphere_measure(dim.d)
    h0 = math.exp(0.5 * log_gegenbauer_norm_sq(0, nu))
    rows = []
    for ell in range(1, (dim.k + 1) // 2):
        if not 2 <= 2 * ell < dim.k:
            continue
        h2l = math.exp(0.5 * log_gegenbauer_norm_sq(2 * ell, nu))
        lhs = (2 * (6 + r) * math.pi ** (nu + 1) * sigma ** 2 * h0
               / ((2 * ell + nu) * math.gamma(nu) * h2l)) * M
        rhs = gap_constant(dim) * ell ** (-dim.d)
        rows.append((ell, lhs, rhs, lhs < rhs))
    return rows


@dataclass(frozen=True)
class CkCertificate:
    threshold: float
    threshold_bracket: float
    bound_used: float
    s_d: float
    b_dk: float
    beta_d: float
    small_ell_margins: tuple
    verdict: str  # "certified" or "rejected"
    derivative_bounds: tuple = ()
    r3_status: str = "pass"
    notes: tuple = field(default_factory=tuple)


def certify_ck(dim: Dimension, p: RadialProfile, margin: float = 0.0) -> CkCertificate:
    """Certified iff M_d (1 + margin) < C_d and every small-ell row holds."""
    k = dim.k
    bounds = derivative_bounds(p, k)
    M = max(bounds)
    s = frak_s(dim)
    lo, hi = PUBLISHED_S_BRACKETS[dim.d]
    if not lo < s < hi:
        raise AssertionError(f"s_{dim.d} = {s} outside the published enclosure ({lo}, {hi})")
    _check_g_bound(dim)
    C = ck_threshold(dim)
    rows = tuple(small_ell_check(dim, M * (1 + margin)))
    r3 = check_r3(p)
    notes = []
    if p.derivative_bounds is not None:
        notes.append("derivative bounds declared by user")
    if r3.status == "fail":
        verdict = "rejected"
        notes.append(f"ghat negative at radius {r3.witness}")
    else:
        ok = M * (1 + margin) < C and all(row[3] for row in rows)
        verdict = "certified" if ok else "rejected"
    return CkCertificate(threshold=C, threshold_bracket=ck_threshold(dim, bracket=True),
                         bound_used=M, s_d=s, b_dk=b_coefficients(dim, s)[k - 1],
                         beta_d=1 / C, small_ell_margins=rows, verdict=verdict,
                         derivative_bounds=tuple(bounds), r3_status=r3.status,
                         notes=tuple(notes))
