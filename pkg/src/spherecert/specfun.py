"""Gegenbauer polynomials, Gamma-function helpers and Gauss-Jacobi rules.

Gegenbauer polynomials use the generating-function normalization
``(1 - 2rt + r^2)^(-alpha) = sum_n C_n^alpha(t) r^n``.  All Gamma ratios
are assembled in log-space and exponentiated once.

Quadrature rules are built from the Jacobi matrix of the weight
``(1 - t)^a (1 + t)^b``: eigenvalues give starting nodes, which are then
polished by Newton steps on the orthonormal recurrence carried out in the
requested floating dtype.  Weights come from the Christoffel function, so a
rule requested in ``np.longdouble`` is accurate to that precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

__all__ = [
    "DomainError",
    "QuadratureError",
    "GegenbauerParams",
    "QuadratureRule",
    "gegenbauer_eval",
    "gegenbauer_table",
    "gegenbauer_at_one",
    "gegenbauer_norm_sq",
    "gauss_jacobi_rule",
    "jacobi_rule",
    "log_gamma",
]


class DomainError(ValueError):
    """Argument outside the domain of a special function."""


class QuadratureError(RuntimeError):
    pass


@dataclass(frozen=True)
class GegenbauerParams:
    order_alpha: float
    degree_n: int

    def __post_init__(self):
        if not self.order_alpha > 0:
            raise DomainError(f"Gegenbauer order must be positive, got {self.order_alpha}")
        if int(self.degree_n) != self.degree_n or self.degree_n < 0:
            raise DomainError(f"degree must be a nonnegative integer, got {self.degree_n}")


def log_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0."""
    if not math.isfinite(x) or x <= 0:
        raise DomainError(f"log_gamma requires a finite x > 0, got {x}")
    return math.lgamma(x)


def _log_gegenbauer_at_one(n: int, alpha: float) -> float:
    return math.lgamma(n + 2 * alpha) - math.lgamma(n + 1) - math.lgamma(2 * alpha)


def gegenbauer_at_one(p: GegenbauerParams) -> float:
    """C_n^alpha(1) = Gamma(n + 2 alpha) / (n! Gamma(2 alpha))."""
    return math.exp(_log_gegenbauer_at_one(p.degree_n, p.order_alpha))


def log_gegenbauer_norm_sq(n: int, alpha: float) -> float:
    return (
        (1 - 2 * alpha) * math.log(2.0)
        + math.log(math.pi)
        + math.lgamma(n + 2 * alpha)
        - 2 * math.lgamma(alpha)
        - math.lgamma(n + 1)
        - math.log(n + alpha)
    )


def gegenbauer_norm_sq(p: GegenbauerParams) -> float:
    """Squared norm of C_n^alpha against (1 - t^2)^(alpha - 1/2) on [-1, 1]."""
    return math.exp(log_gegenbauer_norm_sq(p.degree_n, p.order_alpha))


def gegenbauer_eval(p: GegenbauerParams, t):
    """Evaluate C_n^alpha(t) by the forward three-term recurrence.

    ``t`` may be a scalar or an array; the computation runs in the dtype of
    ``t`` (float64 unless an extended dtype is passed).  Points with
    ``|t| > 1`` are evaluated by the same recurrence (extrapolation).
    """
    arr = np.asarray(t)
    if not np.issubdtype(arr.dtype, np.floating):
        arr = arr.astype(np.float64)
    if not np.all(np.isfinite(arr)):
        raise DomainError("gegenbauer_eval requires finite arguments")
    n, alpha = p.degree_n, arr.dtype.type(p.order_alpha)
    prev = np.ones_like(arr)
    if n == 0:
        return prev if arr.ndim else prev[()]
    cur = 2 * alpha * arr
    for m in range(1, n):
        nxt = (2 * (m + alpha) * arr * cur - (m + 2 * alpha - 1) * prev) / (m + 1)
        prev, cur = cur, nxt
    return cur if arr.ndim else cur[()]


def gegenbauer_table(n_max: int, alpha: float, t) -> np.ndarray:
    """All C_n^alpha(t) for n = 0..n_max; shape (n_max + 1, len(t))."""
    arr = np.atleast_1d(np.asarray(t))
    if not np.issubdtype(arr.dtype, np.floating):
        arr = arr.astype(np.float64)
    a = arr.dtype.type(alpha)
    out = np.empty((n_max + 1, arr.size), dtype=arr.dtype)
    out[0] = 1
    if n_max >= 1:
        out[1] = 2 * a * arr
    for m in range(1, n_max):
        out[m + 1] = (2 * (m + a) * arr * out[m] - (m + 2 * a - 1) * out[m - 1]) / (m + 1)
    return out


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss rule for the weight (1 - t)^a (1 + t)^b on [-1, 1].

    Nodes ascend; integration uses pairwise summation (``np.sum``) so results
    are reproducible bit for bit.
    """

    nodes: np.ndarray
    weights: np.ndarray
    exponents: tuple[float, float]
    polish_steps: int = field(default=0, compare=False)

    def __post_init__(self):
        for arr in (self.nodes, self.weights):
            arr.setflags(write=False)

    @property
    def node_count(self) -> int:
        return int(self.nodes.size)

    @property
    def weight_exponent(self) -> float:
        a, b = self.exponents
        if a != b:
            raise AttributeError("weight is not symmetric; use .exponents")
        return a

    @property
    def gegenbauer_order(self) -> float:
        """The alpha with weight (1 - t^2)^(alpha - 1/2), for symmetric rules."""
        return self.weight_exponent + 0.5

    def integrate(self, f) -> float:
        return np.sum(self.weights * f(self.nodes))


def _jacobi_recurrence(n: int, a: float, b: float, dtype):
    """Monic recurrence coefficients (diag, offdiag^2) for (1-t)^a (1+t)^b."""
    one = dtype(1)
    a, b = dtype(a) * one, dtype(b) * one
    k = np.arange(n, dtype=dtype)
    ab = a + b
    diag = np.empty(n, dtype=dtype)
    diag[0] = (b - a) / (ab + 2)
    if n > 1:
        kk = k[1:]
        diag[1:] = (b * b - a * a) / ((2 * kk + ab) * (2 * kk + ab + 2))
    off2 = np.empty(max(n - 1, 0), dtype=dtype)
    if n > 1:
        off2[0] = 4 * (1 + a) * (1 + b) / ((2 + ab) ** 2 * (3 + ab))
    if n > 2:
        kk = k[2:]
        s = 2 * kk + ab
        off2[1:] = 4 * kk * (kk + a) * (kk + b) * (kk + ab) / (s * s * (s + 1) * (s - 1))
    return diag, off2


def _orthonormal_values(x, diag, off, n):
    """p_n, p_n' and sum_{k<n} p_k^2 for the orthonormal family of the Jacobi matrix."""
    p_prev = np.zeros_like(x)
    p = np.ones_like(x)
    dp_prev = np.zeros_like(x)
    dp = np.zeros_like(x)
    christoffel = np.zeros_like(x)
    for k in range(n):
        christoffel += p * p
        b_k = off[k - 1] if k > 0 else 0
        b_next = off[k] if k < n - 1 else None
        scale = b_next if b_next is not None else 1
        p_new = ((x - diag[k]) * p - b_k * p_prev) / scale
        dp_new = ((x - diag[k]) * dp + p - b_k * dp_prev) / scale
        p_prev, p = p, p_new
        dp_prev, dp = dp, dp_new
    return p, dp, christoffel


def jacobi_rule(node_count: int, a: float, b: float, dtype=np.float64,
                polish_steps: int = 3) -> QuadratureRule:
    """Gauss rule for (1 - t)^a (1 + t)^b, exact to degree 2 node_count - 1."""
    if node_count < 1:
        raise DomainError(f"node_count must be >= 1, got {node_count}")
    if not (a > -1 and b > -1):
        raise DomainError(f"Jacobi exponents must exceed -1, got ({a}, {b})")
    dtype = np.dtype(dtype).type
    diag, off2 = _jacobi_recurrence(node_count, a, b, dtype)
    off = np.sqrt(off2)
    try:
        x0 = eigh_tridiagonal(diag.astype(np.float64), off.astype(np.float64),
                              eigvals_only=True)
    except np.linalg.LinAlgError as exc:
        raise QuadratureError(
            f"Jacobi-matrix eigensolver failed for node_count={node_count}") from exc
    x = np.sort(x0).astype(dtype)
    # The last recurrence step is unscaled, so p below is the monic-scaled
    # degree-n polynomial; its roots are the nodes.
    for _ in range(polish_steps):
        p, dp, _ = _orthonormal_values(x, diag, off, node_count)
        x = x - p / dp
    _, _, christoffel = _orthonormal_values(x, diag, off, node_count)
    log_mu0 = ((a + b + 1) * math.log(2.0) + math.lgamma(a + 1) + math.lgamma(b + 1)
               - math.lgamma(a + b + 2))
    weights = dtype(math.exp(log_mu0)) / christoffel
    if not (np.all(np.diff(x) > 0) and np.all(weights > 0)):
        raise QuadratureError(f"degenerate Gauss rule for node_count={node_count}")
    return QuadratureRule(nodes=x, weights=weights, exponents=(float(a), float(b)),
                          polish_steps=polish_steps)


def gauss_jacobi_rule(node_count: int, alpha: float, dtype=np.float64) -> QuadratureRule:
    """Gauss rule for the Gegenbauer weight (1 - t^2)^(alpha - 1/2)."""
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    return jacobi_rule(node_count, alpha - 0.5, alpha - 0.5, dtype=dtype)
