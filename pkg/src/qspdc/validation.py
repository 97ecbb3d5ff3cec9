"""Residual checks against closed forms, exact laws and independent oracles.

Each check returns :class:`Check` rows; a row passes when the measured
residual sits inside its threshold. The ``validate`` subcommand runs
:func:`run_suite` and exits non-zero if any row fails.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analytics import (envelope_hwhm_ratio, gaussian_width_laws, narrowing_factors, rms_width,
                        spectrum_hwhm, width_sigmas)
from .correlations import biphoton_full, coherence_full, factorized_moments, mu_peak
from .crystal import PumpSpec
from .dispersion import FourierMode, QuadraticModel, SpaceTimePoint, TypeIModel
from .grids import GridSpec
from .kernels import QSModel, bogoliubov
from .oracles import (ansatz2_error_map, closed_form_f, factorization_error_map, first_order_kernel,
                      integrate_f_equations, integrate_kernel_equations, kernel_vs_qs, rk4_order_factor)


@dataclass(frozen=True)
class Check:
    name: str
    group: str
    measured: float
    threshold: float | tuple[float, float]
    detail: str = ""

    @property
    def passed(self) -> bool:
        if isinstance(self.threshold, tuple):
            lo, hi = self.threshold
            return bool(lo <= self.measured <= hi)
        return bool(abs(self.measured) < self.threshold)

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"{mark} {self.group}/{self.name}: measured={self.measured:.6g} threshold={self.threshold} {self.detail}"


def random_kernel_arguments(rng: np.random.Generator, n: int, galpha_max: float = 4.0, dbar_max: float = 20.0):
    """(D̄, gα) pairs with Γ² = (gα)² − D̄²/4 of both signs."""
    dbar = rng.uniform(-dbar_max, dbar_max, n)
    galpha = rng.uniform(0.0, galpha_max, n)
    return dbar, galpha


def kernel_identity(rng, n: int = 100_000) -> list[Check]:
    d, ga = random_kernel_arguments(rng, n)
    f1, f2, z = bogoliubov(d, ga)
    defect = np.max(np.abs(np.abs(f1) ** 2 - np.abs(f2) ** 2 - 1))
    return [Check("kernel_identity", "kernels", float(defect), 1e-12,
                  f"n={n} Γ²>0:{int(np.sum(z > 0))} Γ²<0:{int(np.sum(z < 0))}")]


def f_equations(model: QSModel, rng, n: int = 100) -> list[Check]:
    s, p = model.summary, model.pump
    og, qd = s.omega_gvd, s.q_diff
    w = FourierMode(rng.uniform(-3, 3, n) * qd, rng.uniform(-3, 3, n) * qd, rng.uniform(-3, 3, n) * og)
    xi = SpaceTimePoint(rng.uniform(-1.5, 1.5, n) * p.waist_um, rng.uniform(-1.5, 1.5, n) * p.waist_um,
                        rng.uniform(-1.5, 1.5, n) * p.tau_fs)
    f1, f2 = integrate_f_equations(s, p, w, xi, steps=128, check=False)
    r1, r2 = closed_form_f(model.dbar(w), p.gain * p.amplitude(xi.x, xi.y, xi.t))
    err = max(np.max(np.abs(f1 - r1)), np.max(np.abs(f2 - r2)))
    d = rng.uniform(-6, 6, 64)
    ga = rng.uniform(0.2, 2.0, 64)
    order = rk4_order_factor(d, ga, steps=64)
    return [Check("rk4_vs_closed_form", "kernels", float(err), 1e-7, f"n={n} steps=128"),
            Check("rk4_order_factor", "kernels", order, (12.0, 20.0), "err(64)/err(128)")]


def width_laws(pump: PumpSpec, summary, gains=(0.01, 1.0, 4.0, 10.0), tol: float = 0.01) -> list[Check]:
    spec = GridSpec.for_pump(pump, "omega", samples_per_width=32, widths=8)
    omega = spec.axis("t").conj_coords
    rows = []
    for g in gains:
        m = QSModel(summary, pump.with_gain(g))
        for rep in width_sigmas(g, m.pump):
            kind = rep.quantity.split("_")[1]
            num = rms_width(omega, mu_peak(m, spec, kind).values.real)
            rows.append(Check(f"sigma_{kind}_g{g:g}", "widths", rep.with_numeric(num).rel_gap, tol))
    return rows


def bandwidth_laws(model: QSModel, gains=(1.0, 2.0, 4.0), tol: float = 0.10) -> list[Check]:
    rows, ratios = [], []
    for g in gains:
        m = model.with_gain(g)
        g1_rep, _ = gaussian_width_laws(g)
        h_g1 = spectrum_hwhm(m, "G1")
        h_psi = spectrum_hwhm(m, "Psi")
        ratios.append(h_psi / h_g1)
        rows.append(Check(f"hwhm_G1_g{g:g}", "bandwidth", g1_rep.with_numeric(h_g1).rel_gap, tol))
        rows.append(Check(f"psi_over_g1_g{g:g}", "bandwidth", h_psi / h_g1, (1.0, np.inf)))
    steps = np.diff(ratios)
    rows.append(Check("psi_over_g1_decreasing", "bandwidth", float(np.max(steps)), (-np.inf, 0.0)))
    return rows


def narrowing(gains=None, tol: float = 0.05) -> list[Check]:
    gains = np.linspace(0.05, 6.0, 120) if gains is None else np.asarray(gains)
    gaps = {"coh": [], "corr": []}
    for g in gains:
        corr_f, coh_f = narrowing_factors(float(g))
        gaps["coh"].append(envelope_hwhm_ratio(float(g), "coh") / coh_f - 1)
        gaps["corr"].append(envelope_hwhm_ratio(float(g), "corr") / corr_f - 1)
    rows = []
    for kind, vals in gaps.items():
        vals = np.asarray(vals)
        i = int(np.argmax(np.abs(vals)))
        rows.append(Check(f"envelope_{kind}", "narrowing", float(vals[i]), tol, f"worst at g={gains[i]:.3g}"))
    return rows


def full_vs_factorized(model: QSModel, gains=(0.5, 1.0, 2.0), tol: float = 0.02) -> list[Check]:
    """Ψ(w,−w) and G1(w,w) from the full ξ integral against the factorized form."""
    spec = GridSpec.for_pump(model.pump, "omega", samples_per_width=32, widths=8)
    om = np.linspace(-1.0, 1.0, 21) * model.summary.omega_gvd
    w = FourierMode(0.0, 0.0, om)
    worst = {"psi": 0.0, "g1": 0.0}
    for g in gains:
        m = model.with_gain(g)
        psi_full = biphoton_full(m, spec, w, -w)
        g1_full = coherence_full(m, spec, w, w)
        psi_fac, g1_fac = factorized_moments(m, spec, w, -w)
        _, g1_fac = factorized_moments(m, spec, w, w)
        worst["psi"] = max(worst["psi"], float(np.max(np.abs(np.abs(psi_full) / np.abs(psi_fac) - 1))))
        worst["g1"] = max(worst["g1"], float(np.max(np.abs(np.abs(g1_full) / np.abs(g1_fac) - 1))))
    return [Check(f"full_vs_factorized_{k}", "factorization", v, tol, "|Ω| ≤ Ω_GVD") for k, v in worst.items()]


def factorization_map(model: QSModel, g: float = 1.8, tol: float = 0.10) -> list[Check]:
    corr, coh = factorization_error_map(model.with_gain(g))
    return [Check("map_corr", "factorization", corr.max_abs, tol, f"g={g}"),
            Check("map_coh", "factorization", coh.max_abs, tol, f"g={g}")]


def ansatz2(dispersion: TypeIModel, tau_fs: float = 150.0, tol: float = 0.05) -> list[Check]:
    emap = ansatz2_error_map(dispersion, tau_fs)
    i0 = int(np.argmin(np.abs(emap.coords[1])))
    centre = float(np.max(np.abs(emap.values[:, i0])))
    (om, _), val = emap.argmax(), emap.max_abs
    og = dispersion.summary().omega_gvd
    return [Check("map_at_zero_pump_offset", "ansatz2", centre, 1e-15),
            Check("map_max_2gvd", "ansatz2", val, tol, f"worst at Ω={om / og:.3g} Ω_GVD")]


def kernel_ode(summary, waist_um: float = 150.0, lambda_um: float = 0.515, tau_gvd: float = 20.0) -> list[Check]:
    """64-mode kernel ODE against first-order theory and the QS coherence."""
    quad = QuadraticModel.from_scales(summary.omega_gvd, summary.q_diff, summary.length_um)
    qsum = quad.summary()
    rows = []
    worst_unit = 0.0
    for g in (0.01, 1.0, 2.0):
        pump = PumpSpec(lambda_um, tau_gvd / summary.omega_gvd, waist_um, g)
        sol = integrate_kernel_equations(quad, pump)
        worst_unit = max(worst_unit, max(r for _, r in sol.unitarity_history))
        gap, _, _ = kernel_vs_qs(sol, quad, qsum, pump)
        rows.append(Check(f"ode_vs_qs_g{g:g}", "kernel_ode", gap, 0.05, f"τΩ_GVD={tau_gvd:g}"))
        if g == 0.01:
            w1 = first_order_kernel(quad, pump)
            fo = float(np.max(np.abs(sol.W - w1)) / np.max(np.abs(w1)))
            rows.append(Check("ode_vs_first_order", "kernel_ode", fo, 0.02, "g=0.01"))
    rows.append(Check("ode_unitarity", "kernel_ode", worst_unit, 1e-6, "all checkpoints"))
    return rows


def run_suite(model: QSModel, dispersion: TypeIModel, seed: int = 1) -> list[Check]:
    rng = np.random.default_rng(seed)
    rows = []
    rows += kernel_identity(rng)
    rows += f_equations(model, rng)
    rows += width_laws(model.pump, model.summary)
    rows += bandwidth_laws(model)
    rows += full_vs_factorized(model)
    rows += factorization_map(model)
    rows += ansatz2(dispersion, model.pump.tau_fs)
    rows += kernel_ode(model.summary, model.pump.waist_um, model.pump.lambda_um)
    return rows
