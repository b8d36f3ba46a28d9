"""Self-test driver for the property suites in :mod:`spherecert.checks`."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import checks
from .closedforms import SUPPORTED_DIMENSIONS, Dimension
from .report import dumps
from .specfun import gauss_jacobi_rule

__all__ = ["SuiteResult", "SelftestSummary", "run_selftest", "FAULTS"]

FAULTS = ("energy_constant",)

FOSCHI_SAMPLES = 10_000
BRACKET_SAMPLES = 100_000
SAMPLER_SAMPLES = 100_000
SAMPLER_ALPHA = 0.01


@dataclass
class SuiteResult:
    name: str
    passed: int
    failed: int
    worst: float
    threshold: float
    detail: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.failed == 0


@dataclass
class SelftestSummary:
    seed: int
    suites: list

    @property
    def passed(self) -> int:
        return sum(s.passed for s in self.suites)

    @property
    def failed(self) -> int:
        return sum(s.failed for s in self.suites)

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def to_dict(self) -> dict:
        return {"seed": self.seed, "passed": self.passed, "failed": self.failed,
                "suites": [{"name": s.name, "ok": s.ok, "passed": s.passed, "failed": s.failed,
                            "worst": s.worst, "threshold": s.threshold, "detail": s.detail}
                           for s in self.suites]}

    def to_text(self) -> str:
        lines = [f"selftest seed={self.seed}"]
        for s in self.suites:
            flag = "PASS" if s.ok else "FAIL"
            lines.append(f"  {flag} {s.name:<11} {s.passed:>4} passed {s.failed:>3} failed"
                         f"  worst={s.worst:.3e}  limit={s.threshold:.1e}")
        lines.append(f"total: {self.passed} passed, {self.failed} failed")
        return "\n".join(lines)

    def to_json(self) -> str:
        return dumps(self.to_dict())


def _tally(name, values: dict, threshold: float, smaller_is_better=True) -> SuiteResult:
    keys = list(values)
    vals = [values[k] for k in keys]
    bad = [v > threshold if smaller_is_better else v < threshold for v in vals]
    worst = max(vals) if smaller_is_better else min(vals)
    return SuiteResult(name, bad.count(False), bad.count(True), float(worst), threshold,
                       {str(k): float(v) for k, v in values.items()})


def _foschi(rng) -> SuiteResult:
    res = {}
    for d in SUPPORTED_DIMENSIONS:
        w = checks.sample_constrained_batch(d, FOSCHI_SAMPLES, rng)
        res[d] = float(np.max(np.abs(checks._foschi_lhs(*w) - 4)))
    return _tally("foschi", res, 1e-10)


def _bracket(rng) -> SuiteResult:
    res = {}
    for d in SUPPORTED_DIMENSIONS:
        w = [checks.sample_sphere(rng, d, BRACKET_SAMPLES) for _ in range(4)]
        res[d] = float(np.min(checks.kernel_bracket_nonneg(*w)))
    return _tally("bracket", res, -1e-13, smaller_is_better=False)


def _funk_hecke() -> SuiteResult:
    res = {}
    for d in SUPPORTED_DIMENSIONS:
        dim = Dimension(d)
        res[f"d={d} closed form"] = max(checks.unperturbed_eigen_residual(dim, ell)
                                        for ell in range(1, 21))
        # Two independent quadratures of a smooth zonal kernel.
        rule = gauss_jacobi_rule(64, dim.nu)
        kern = lambda t: np.exp(0.7 * t) * (2 + t)
        res[f"d={d} two-route"] = max(checks.funk_hecke_residual(dim, n, kern, rule)
                                      for n in range(0, 13))
    return _tally("funk_hecke", res, 1e-10)


def _energy(fault) -> SuiteResult:
    factor = 1.0 + 1e-6 if fault == "energy_constant" else 1.0
    res = {}
    for d in SUPPORTED_DIMENSIONS:
        dim = Dimension(d)
        res[f"d={d}"] = checks.energy_identity_residual(dim, rhs_factor=factor)
        res[f"d={d} scaled"] = checks.energy_identity_residual(dim, measure_scale=2.5,
                                                               rhs_factor=factor)
        res[f"d={d} mass"] = checks.radial_mass_residual(dim)
    return _tally("energy", res, 1e-9)


def _sampler(seed: int) -> SuiteResult:
    res = {d: checks.sampler_chi_square(d, SAMPLER_SAMPLES, seed + d) for d in SUPPORTED_DIMENSIONS}
    return _tally("sampler", res, SAMPLER_ALPHA, smaller_is_better=False)


def run_selftest(seed: int = 0, fault=None) -> SelftestSummary:
    """Run every suite; ``fault`` injects a corrupted constant (test hook)."""
    if fault is not None and fault not in FAULTS:
        raise ValueError(f"unknown fault {fault!r}")
    rng = np.random.default_rng(seed)
    suites = [_foschi(rng), _bracket(rng), _funk_hecke(), _energy(fault), _sampler(seed)]
    return SelftestSummary(seed, suites)
