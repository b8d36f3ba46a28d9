"""Radial perturbation profiles ghat restricted to the ball of radius 4.

Three kinds are supported::

    gaussian   ghat(rho) = c * exp(-rho^2 / (2 w^2))
    poly_r2    ghat(rho) = sum_m c_m rho^(2m)
    table      cubic spline through (radius, value) knots covering [0, 4]

Gaussian and polynomial profiles are evaluated as functions of rho^2, which
is what the kernel integrand produces, so no square root is taken there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from numpy.polynomial import hermite_e as H
from numpy.polynomial import polynomial as P
from scipy.interpolate import CubicSpline

from .specfun import DomainError

__all__ = [
    "BALL_RADIUS",
    "RadialProfile",
    "R3Verdict",
    "profile_eval",
    "profile_eval_sq",
    "check_r3",
    "axis_derivative",
    "derivative_bounds",
    "analytic_bound",
    "is_identically_zero",
    "HypothesisError",
]

BALL_RADIUS = 4.0
KINDS = ("gaussian", "poly_r2", "table")


class HypothesisError(ValueError):
    """A certificate hypothesis cannot be checked from the supplied data."""


@dataclass(frozen=True)
class RadialProfile:
    """ghat on [0, 4] plus the metadata the certificates consume.

    ``analytic_bound`` is a declared M_{d,R} (max of the continuation over the
    complex disk of radius ``analytic_radius``); ``derivative_bounds`` lists
    declared maxima of |d^j ghat / d xi_1^j| over the closed ball, j = 0..k.
    """

    kind: str
    params: tuple
    analytic_bound: Optional[float] = None
    analytic_radius: Optional[float] = None
    derivative_bounds: Optional[tuple] = None
    _spline: Optional[CubicSpline] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown profile kind {self.kind!r}")
        if self.kind == "gaussian":
            amp, width = self.params
            if not (math.isfinite(amp) and math.isfinite(width)) or width <= 0:
                raise DomainError("gaussian needs a finite amplitude and width > 0")
        elif self.kind == "poly_r2":
            if len(self.params) == 0 or not all(math.isfinite(c) for c in self.params):
                raise DomainError("poly_r2 needs a nonempty list of finite coefficients")
        else:
            radii, values = (np.asarray(a, dtype=np.float64) for a in self.params)
            if radii.shape != values.shape or radii.ndim != 1 or radii.size < 4:
                raise DomainError("table needs matching radii/values lists of length >= 4")
            if not (np.all(np.isfinite(radii)) and np.all(np.isfinite(values))):
                raise DomainError("table entries must be finite")
            if np.any(np.diff(radii) <= 0):
                raise DomainError("table radii must be strictly increasing")
            if radii[0] != 0 or radii[-1] < BALL_RADIUS:
                raise DomainError("table radii must cover [0, 4]")
            # Radial profiles are even in rho, so the slope at the origin is 0.
            spline = CubicSpline(radii, values, bc_type=((1, 0.0), "not-a-knot"))
            object.__setattr__(self, "_spline", spline)
            object.__setattr__(self, "params", (tuple(radii.tolist()), tuple(values.tolist())))
        if self.analytic_bound is not None and not self.analytic_bound >= 0:
            raise DomainError("analytic_bound must be nonnegative")
        if self.analytic_radius is not None and not self.analytic_radius > BALL_RADIUS:
            raise DomainError("analytic_radius must exceed 4")
        if self.derivative_bounds is not None:
            object.__setattr__(self, "derivative_bounds", tuple(float(b) for b in self.derivative_bounds))
            if not all(b >= 0 and math.isfinite(b) for b in self.derivative_bounds):
                raise DomainError("derivative_bounds must be finite and nonnegative")

    @classmethod
    def gaussian(cls, amplitude: float, width: float = 1.0, **meta) -> "RadialProfile":
        return cls("gaussian", (float(amplitude), float(width)), **meta)

    @classmethod
    def poly_r2(cls, coefficients: Sequence[float], **meta) -> "RadialProfile":
        return cls("poly_r2", tuple(float(c) for c in coefficients), **meta)

    @classmethod
    def table(cls, radii: Sequence[float], values: Sequence[float], **meta) -> "RadialProfile":
        return cls("table", (tuple(radii), tuple(values)), **meta)

    def scaled(self, factor: float) -> "RadialProfile":
        """Same shape with amplitude multiplied by ``factor``; metadata is dropped."""
        if self.kind == "gaussian":
            return RadialProfile.gaussian(self.params[0] * factor, self.params[1])
        if self.kind == "poly_r2":
            return RadialProfile.poly_r2([c * factor for c in self.params])
        radii, values = self.params
        return RadialProfile.table(radii, [v * factor for v in values])


def _as_float_array(x):
    arr = np.asarray(x)
    if not np.issubdtype(arr.dtype, np.floating):
        arr = arr.astype(np.float64)
    return arr


def profile_eval_sq(p: RadialProfile, rho2):
    """ghat at radius sqrt(rho2); used by the kernel integrand."""
    u = _as_float_array(rho2)
    if p.kind == "gaussian":
        amp, width = (u.dtype.type(v) for v in p.params)
        return amp * np.exp(-u / (2 * width * width))
    if p.kind == "poly_r2":
        coeffs = np.asarray(p.params, dtype=u.dtype)
        return P.polyval(u, coeffs)
    rho = np.sqrt(np.maximum(u, 0))
    return p._spline(rho.astype(np.float64)).astype(u.dtype)


def profile_eval(p: RadialProfile, rho):
    """ghat at radius ``rho`` in [0, 4]."""
    r = _as_float_array(rho)
    if np.any(~np.isfinite(r)) or np.any(r < 0) or np.any(r > BALL_RADIUS):
        raise DomainError("profile_eval is defined on radii in [0, 4]")
    if p.kind == "table":
        out = p._spline(r.astype(np.float64))
    else:
        out = profile_eval_sq(p, r * r)
    return out if np.ndim(out) else float(out)


def is_identically_zero(p: RadialProfile) -> bool:
    if p.kind == "gaussian":
        return p.params[0] == 0
    if p.kind == "poly_r2":
        return all(c == 0 for c in p.params)
    return all(v == 0 for v in p.params[1])


@dataclass(frozen=True)
class R3Verdict:
    """Outcome of the sign check ghat >= 0 on the closed ball."""

    status: str  # "pass", "fail" or "heuristic_pass"
    witness: Optional[float] = None

    @property
    def ok(self) -> bool:
        return self.status != "fail"


def check_r3(p: RadialProfile, grid_size: int = 1025) -> R3Verdict:
    if grid_size < 16:
        raise DomainError("grid_size must be >= 16")
    grid = np.linspace(0.0, BALL_RADIUS, grid_size)
    values = np.asarray(profile_eval(p, grid))
    negative = np.flatnonzero(values < 0)
    if negative.size:
        return R3Verdict("fail", float(grid[negative[0]]))
    if is_identically_zero(p):
        return R3Verdict("pass")
    if p.kind == "gaussian":
        return R3Verdict("pass")
    if p.kind == "poly_r2":
        witness = _poly_min_point(p.params)
        if witness is None:
            return R3Verdict("pass")
        return R3Verdict("fail", witness)
    return R3Verdict("heuristic_pass")


def _poly_min_point(coeffs):
    """Radius where sum c_m u^m dips below zero on u in [0, 16], else None."""
    c = np.asarray(coeffs, dtype=np.float64)
    candidates = [0.0, BALL_RADIUS ** 2]
    if c.size > 2:
        for root in P.polyroots(P.polyder(c)):
            if abs(root.imag) < 1e-12 and 0 <= root.real <= BALL_RADIUS ** 2:
                candidates.append(float(root.real))
    u = np.array(candidates)
    vals = P.polyval(u, c)
    # Slack for rounding at double-root minima such as (1 - u)^2.
    slack = 64 * np.finfo(float).eps * float(np.sum(np.abs(c) * (BALL_RADIUS ** 2) ** np.arange(c.size)))
    i = int(np.argmin(vals))
    if vals[i] >= -slack:
        return None
    return math.sqrt(u[i])


def axis_derivative(p: RadialProfile, order: int, x):
    """d^order/dx^order of ghat(x e_1), for gaussian and poly_r2 profiles."""
    x = _as_float_array(x)
    if p.kind == "gaussian":
        amp, width = p.params
        y = x / width
        he = H.hermeval(y, [0] * order + [1])
        return (-1) ** order * amp * width ** (-order) * he * np.exp(-y * y / 2)
    if p.kind == "poly_r2":
        coeffs = np.zeros(2 * len(p.params) - 1)
        coeffs[::2] = p.params
        return P.polyval(x, P.polyder(coeffs, order)) if order < coeffs.size else np.zeros_like(x)
    raise DomainError("closed-form derivatives exist only for gaussian and poly_r2 profiles")


def _gaussian_derivative_max(order: int, amp: float, width: float) -> float:
    # |He_j(y) e^{-y^2/2}| peaks at a root of He_{j+1} or at the boundary.
    ymax = BALL_RADIUS / width
    roots = H.hermeroots([0] * (order + 1) + [1])
    pts = np.concatenate([roots[np.abs(roots) <= ymax], [0.0, ymax]])
    vals = np.abs(H.hermeval(pts, [0] * order + [1])) * np.exp(-pts * pts / 2)
    return abs(amp) * width ** (-order) * float(np.max(vals))


def derivative_bounds(p: RadialProfile, k: int) -> tuple:
    """Upper bounds for max over the closed ball of |d^j ghat / d xi_1^j|, j = 0..k.

    Declared bounds take precedence.  For gaussian profiles the bound is exact
    (the transverse factor peaks on the axis).  For poly_r2 the bound
    sum |c_m| D^j(x^{2m})|_{x=4} dominates every term because each term
    (x^2 + a)^m has nonnegative Taylor coefficients about any x >= 0.
    """
    if p.derivative_bounds is not None:
        if len(p.derivative_bounds) < k + 1:
            raise HypothesisError(f"R4.C data not supplied: need {k + 1} derivative bounds, "
                                  f"got {len(p.derivative_bounds)}")
        return p.derivative_bounds[: k + 1]
    if is_identically_zero(p):
        return (0.0,) * (k + 1)
    if p.kind == "gaussian":
        amp, width = p.params
        return tuple(_gaussian_derivative_max(j, amp, width) for j in range(k + 1))
    if p.kind == "poly_r2":
        out = []
        for j in range(k + 1):
            total = 0.0
            for m, c in enumerate(p.params):
                if 2 * m >= j:
                    total += abs(c) * math.perm(2 * m, j) * BALL_RADIUS ** (2 * m - j)
            out.append(total)
        return tuple(out)
    raise HypothesisError("R4.C data not supplied")


def analytic_bound(p: RadialProfile, R: float) -> float:
    """A valid max over |z| <= R of the continuation of ghat.

    Declared bounds take precedence; the declared radius must reach R.
    """
    if p.analytic_bound is not None:
        if p.analytic_radius is None or p.analytic_radius < R:
            raise HypothesisError("R4.A data not supplied")
        return float(p.analytic_bound)
    if is_identically_zero(p):
        return 0.0
    if p.kind == "gaussian":
        amp, width = p.params
        return abs(amp) * math.exp(R * R / (2 * width * width))
    if p.kind == "poly_r2":
        return float(sum(abs(c) * R ** (2 * m) for m, c in enumerate(p.params)))
    raise HypothesisError("R4.A data not supplied")
