"""Orchestration of the analytic, C^k and direct verification modes."""

from __future__ import annotations

import numpy as np

from .cert_analytic import certify_analytic, tail_threshold
from .cert_ck import certify_ck, ck_threshold, frak_s, small_ell_check
from .closedforms import (Dimension, frak_r, gap_constant, kappa_exact, lambda_unperturbed,
                          lambda_unperturbed_zero, sphere_measure)
from .config import JobConfig
from .kernel import eigen_prefactor, kernel_series
from .profiles import (HypothesisError, analytic_bound, check_r3, derivative_bounds,
                       is_identically_zero)
from .report import CertificateReport
from .specfun import gauss_jacobi_rule

__all__ = ["run_certify", "combine_verdicts"]


def _hypotheses(cfg: JobConfig, r3) -> dict:
    p = cfg.profile
    ledger = {
        "R1": {"status": "pass", "note": "profile is radial by construction"},
        "R2": {"status": "assumed", "note": "regularity and integrability of g assumed by user declaration"},
        "R3": {"status": r3.status, "witness": r3.witness},
    }
    if p.analytic_bound is not None:
        ledger["R4.A"] = {"status": "assumed" if p.kind == "table" else "declared",
                          "radius": p.analytic_radius}
    elif p.kind in ("gaussian", "poly_r2"):
        ledger["R4.A"] = {"status": "computed",
                          "radius": cfg.R if cfg.R is not None else p.analytic_radius}
    else:
        ledger["R4.A"] = {"status": "missing", "radius": None}
    if p.derivative_bounds is not None:
        ledger["R4.C"] = {"status": "assumed" if p.kind == "table" else "declared"}
    elif p.kind in ("gaussian", "poly_r2") or is_identically_zero(p):
        ledger["R4.C"] = {"status": "computed"}
    else:
        ledger["R4.C"] = {"status": "missing"}
    return ledger


def _constants(dim: Dimension) -> dict:
    return {
        "kappa_d": float(kappa_exact(dim.d)),
        "c_d": gap_constant(dim),
        "frak_r": frak_r(dim),
        "frak_s": frak_s(dim),
        "lambda_1_zero": lambda_unperturbed_zero(dim),
    }


def _analytic_block(cfg: JobConfig, R, margin) -> dict:
    dim, p = cfg.dimension, cfg.profile
    try:
        cert = certify_analytic(dim, p, R, margin=margin)
    except HypothesisError as exc:
        return {"verdict": "REJECTED", "reason": str(exc)}
    return {"verdict": cert.verdict.upper(), "R": cert.R, "rho": cert.rho, "beta": cert.beta,
            "ell_star": cert.ell_star, "threshold_A": cert.threshold, "bound_used": cert.bound_used,
            "kg_ellipse_bound": cert.kg_bound, "notes": list(cert.notes)}


def _ck_block(cfg: JobConfig, margin) -> dict:
    dim, p = cfg.dimension, cfg.profile
    try:
        cert = certify_ck(dim, p, margin=margin)
    except HypothesisError as exc:
        return {"verdict": "REJECTED", "reason": str(exc)}
    return {"verdict": cert.verdict.upper(), "threshold_C": cert.threshold,
            "threshold_C_bracket": cert.threshold_bracket, "bound_used": cert.bound_used,
            "derivative_bounds": list(cert.derivative_bounds), "s_d": cert.s_d, "b_dk": cert.b_dk,
            "beta_d": cert.beta_d,
            "small_ell": [{"ell": r[0], "lhs": r[1], "rhs": r[2], "ok": r[3]}
                          for r in cert.small_ell_margins],
            "notes": list(cert.notes)}


def _tail(cfg: JobConfig, l_max: int, margin: float) -> dict:
    """Close lambda_h(2l) < 0 for every l > l_max with a certificate bound."""
    dim, p = cfg.dimension, cfg.profile
    if is_identically_zero(p):
        return {"method": "trivial", "closed": True, "note": "ghat vanishes identically"}
    attempts = []
    R = cfg.R if cfg.R is not None else p.analytic_radius
    if R is not None:
        try:
            M = analytic_bound(p, R)
            A, ell_star = tail_threshold(dim, R, l_max + 1)
            ok = M * (1 + margin) < A
            attempts.append({"method": "analytic", "closed": ok, "R": float(R), "bound_used": M,
                             "threshold": A, "ell_star": ell_star})
            if ok:
                return attempts[-1]
        except HypothesisError as exc:
            attempts.append({"method": "analytic", "closed": False, "reason": str(exc)})
    try:
        bounds = derivative_bounds(p, dim.k)
        M = max(bounds)
        C = ck_threshold(dim)
        # The C^k bound covers 2l >= k; smaller l beyond l_max need the patch.
        rows = [r for r in small_ell_check(dim, M * (1 + margin)) if r[0] > l_max]
        ok = M * (1 + margin) < C and all(r[3] for r in rows)
        attempts.append({"method": "ck", "closed": ok, "bound_used": M, "threshold": C})
        if ok:
            return attempts[-1]
    except HypothesisError as exc:
        attempts.append({"method": "ck", "closed": False, "reason": str(exc)})
    return {"method": "none", "closed": False, "attempts": attempts}


def _direct_block(cfg: JobConfig, margin: float) -> tuple:
    dim, p = cfg.dimension, cfg.profile
    l_max = cfg.l_max
    nodes = cfg.nodes
    tol = cfg.tolerances["quadrature_rel"]
    rule = gauss_jacobi_rule(nodes["gegenbauer"], dim.nu)
    series = kernel_series(dim, p, 2 * l_max, rule, nodes["radial"], nodes["angular"], refine=True)
    lam1 = [lambda_unperturbed(dim, ell) for ell in range(1, l_max + 1)]
    err = [eigen_prefactor(dim, n) * float(series.refinement_delta[n] + series.rounding_floor[n])
           for n in range(2 * l_max + 1)]
    lamg = [eigen_prefactor(dim, n) * float(series.coefficients[n]) for n in range(2 * l_max + 1)]
    lamh0 = lambda_unperturbed_zero(dim) + lamg[0]
    lamh = [lam1[ell - 1] + lamg[2 * ell] for ell in range(1, l_max + 1)]
    spectra = {
        "ell": list(range(1, l_max + 1)),
        "lambda_1": lam1,
        "lambda_g": [lamg[2 * ell] for ell in range(1, l_max + 1)],
        "lambda_h": lamh,
        "error_bound": [err[2 * ell] for ell in range(1, l_max + 1)],
        "lambda_h_zero": lamh0,
        "lambda_g_zero": lamg[0],
        "error_bound_zero": err[0],
    }
    diagnostics = {"kernel_refinement_change": series.kernel_change,
                   "kernel_scale": series.kernel_scale,
                   "truncation_estimate": series.truncation_estimate,
                   "max_coefficient_delta": float(np.max(series.refinement_delta))}
    tail = _tail(cfg, l_max, margin)
    reasons = []
    if series.kernel_change > 10 * tol:
        verdict = "INCONCLUSIVE"
        reasons.append(f"kernel refinement change {series.kernel_change:.3e} exceeds 10 x {tol:g}")
    else:
        positive = [ell for ell, lh, e in zip(spectra["ell"], lamh, spectra["error_bound"])
                    if lh - e > 0]
        unresolved = [ell for ell, lh, l1, e in zip(spectra["ell"], lamh, lam1, spectra["error_bound"])
                      if not lh + e < -margin * abs(l1)]
        zero_ok = lamh0 - err[0] > 0
        if positive or lamh0 + err[0] < 0:
            verdict = "REJECTED"
            if positive:
                reasons.append(f"lambda_h(2l) > 0 for l in {positive[:8]}")
            if lamh0 + err[0] < 0:
                reasons.append("lambda_h(0) < 0")
        elif unresolved or not zero_ok:
            verdict = "INCONCLUSIVE"
            reasons.append(f"sign not resolved within error bounds for l in {unresolved[:8]}")
        elif not tail["closed"]:
            verdict = "INCONCLUSIVE"
            reasons.append("no certificate bound closes the tail l > l_max")
        else:
            verdict = "CERTIFIED"
    block = {"verdict": verdict, "reasons": reasons}
    return block, spectra, tail, diagnostics


def combine_verdicts(verdicts) -> str:
    """CERTIFIED if any route certifies, else INCONCLUSIVE if any is, else REJECTED."""
    verdicts = list(verdicts)
    if "CERTIFIED" in verdicts:
        return "CERTIFIED"
    if "INCONCLUSIVE" in verdicts:
        return "INCONCLUSIVE"
    return "REJECTED"


def run_certify(cfg: JobConfig) -> CertificateReport:
    dim, p = cfg.dimension, cfg.profile
    margin = cfg.tolerances["verdict_margin"]
    r3 = check_r3(p)
    hypotheses = _hypotheses(cfg, r3)
    constants = _constants(dim)
    modes = {}
    spectra, tail, diagnostics = {}, {}, {"seed": cfg.seed}
    wanted = ("analytic", "ck", "direct") if cfg.mode == "all" else (cfg.mode,)

    if r3.status == "fail":
        for m in wanted:
            modes[m] = {"verdict": "REJECTED", "reason": f"ghat < 0 at radius {r3.witness}"}
    else:
        if "analytic" in wanted:
            R = cfg.R if cfg.R is not None else p.analytic_radius
            if R is None:
                modes["analytic"] = {"verdict": "INCONCLUSIVE", "reason": "no continuation radius R"}
            else:
                modes["analytic"] = _analytic_block(cfg, R, margin)
                if "threshold_A" in modes["analytic"]:
                    constants["A_dR"] = modes["analytic"]["threshold_A"]
        if "ck" in wanted:
            modes["ck"] = _ck_block(cfg, margin)
            if "threshold_C" in modes["ck"]:
                constants["C_d"] = modes["ck"]["threshold_C"]
                constants["C_d_bracket"] = modes["ck"]["threshold_C_bracket"]
        if "direct" in wanted:
            block, spectra, tail, diag = _direct_block(cfg, margin)
            modes["direct"] = block
            diagnostics.update(diag)

    verdict = combine_verdicts(m["verdict"] for m in modes.values())
    if verdict == "CERTIFIED" and not spectra:
        # Certificates imply the sign pattern; record the unperturbed spectrum.
        lam1 = [lambda_unperturbed(dim, ell) for ell in range(1, cfg.l_max + 1)]
        spectra = {"ell": list(range(1, cfg.l_max + 1)), "lambda_1": lam1}
    sharp = None
    if verdict == "CERTIFIED":
        lamh0 = spectra.get("lambda_h_zero")
        if lamh0 is None:
            lamh0 = _lambda_h_zero(cfg)
            spectra["lambda_h_zero"] = lamh0
        sharp = (lamh0 / (4 * sphere_measure(dim.d))) ** 0.25
    return CertificateReport(config=cfg.raw, hypotheses=hypotheses, constants=constants,
                             spectra=spectra, tail=tail, verdict=verdict, sharp_constant=sharp,
                             modes=modes, diagnostics=diagnostics)


def _lambda_h_zero(cfg: JobConfig) -> float:
    dim, p = cfg.dimension, cfg.profile
    base = lambda_unperturbed_zero(dim)
    if is_identically_zero(p):
        return base
    rule = gauss_jacobi_rule(max(64, cfg.nodes["gegenbauer"] // 4), dim.nu)
    series = kernel_series(dim, p, 0, rule, cfg.nodes["radial"], cfg.nodes["angular"])
    return base + eigen_prefactor(dim, 0) * float(series.coefficients[0])
