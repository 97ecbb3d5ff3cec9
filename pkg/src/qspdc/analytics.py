"""Gain-scaling laws for spectra, correlation widths and envelope narrowing,
plus the numeric width extraction used to check them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from .correlations import mu_at_zero, mu_peak, peak_kernels
from .dispersion import FourierMode
from .errors import DomainError
from .grids import GridSpec
from .kernels import QSModel, envelope_values

LN2 = np.log(2.0)
QUANTITIES = ("spectrum_G1", "spectrum_Psi", "mu_coh", "mu_corr", "env_coh", "env_corr")
AXES = ("omega", "q", "t", "x")
UNITS = {"omega": "rad/fs", "q": "rad/um", "t": "fs", "x": "um"}


@dataclass(frozen=True)
class WidthReport:
    quantity: str
    axis: str
    analytic: float
    numeric: float | None = None
    g: float | None = None

    def __post_init__(self):
        if self.quantity not in QUANTITIES:
            raise ValueError(f"unknown quantity {self.quantity!r}")
        if self.axis not in AXES:
            raise ValueError(f"unknown axis {self.axis!r}")

    @property
    def units(self) -> str:
        return UNITS[self.axis]

    @property
    def rel_gap(self) -> float | None:
        if self.numeric is None:
            return None
        return (self.numeric - self.analytic) / self.analytic

    def with_numeric(self, value: float) -> "WidthReport":
        return WidthReport(self.quantity, self.axis, self.analytic, float(value), self.g)


def spectra(model: QSModel, spec: GridSpec, w, transverse: str = "plane"):
    """(G1(w,w), Ψ(w,−w)) = (|F2(w,0)|² μ_coh(0), F1(w,0)F2(−w,0) μ_corr(0))."""
    w = w if isinstance(w, FourierMode) else FourierMode(*w)
    f1, f2 = peak_kernels(model, w)
    _, f2m = peak_kernels(model, -w)
    g1 = np.abs(f2) ** 2 * mu_at_zero(model, spec, "coh", transverse)
    psi = f1 * f2m * mu_at_zero(model, spec, "corr", transverse)
    return g1, psi


def _bandwidth_core(g: float, which: str) -> float:
    """4g² tanh(·) ln2/(g − tanh g) for which in {"G1", "Psi"}."""
    if not g > 0:
        raise DomainError("bandwidth law needs g > 0; use bandwidth_law_limit for g → 0")
    if g < 1e-2:
        # g − tanh g = g³/3 − 2g⁵/15 + 17g⁷/315
        gt = g**3 / 3 - 2 * g**5 / 15 + 17 * g**7 / 315
    else:
        gt = g - np.tanh(g)
    t = np.tanh(g) if which == "G1" else np.tanh(2 * g)
    return 4 * g * g * t * LN2 / gt


def bandwidth_law_limit(which: str = "G1") -> float:
    """g → 0 limit of the central-band law: (12 ln2)^¼ for G1, (24 ln2)^¼ for Ψ."""
    return (12 * LN2) ** 0.25 if which == "G1" else (24 * LN2) ** 0.25


def gaussian_width_laws(g: float, pm: float | None = None, axis: str = "omega"):
    """HWHM laws in units of Ω_GVD (or q_diff), returned as (G1, Ψ) reports.

    Central band when ``pm`` is None (or ≲ 1); arm law 1/(2·pm)·sqrt(core) otherwise.
    """
    out = []
    for which, quantity in (("G1", "spectrum_G1"), ("Psi", "spectrum_Psi")):
        core = _bandwidth_core(g, which)
        value = core**0.25 if pm is None else np.sqrt(core) / (2 * pm)
        out.append(WidthReport(quantity, axis, float(value), g=g))
    return tuple(out)


def width_sigmas(g: float, pump, axis: str = "omega"):
    """(σ_coh, σ_corr) rms widths of μ_coh and μ_corr in absolute units."""
    if g < 0:
        raise DomainError("g must be non-negative")
    base = pump.sigma_omega if axis == "omega" else pump.sigma_q
    if g < 1e-4:
        coh = 2 + 2 * g * g / 3
        corr = 1 + 4 * g * g / 3
    else:
        coh = 2 * g / np.tanh(g)
        corr = 2 * g / np.tanh(2 * g)
    return (WidthReport("mu_coh", axis, float(np.sqrt(coh) * base), g=g),
            WidthReport("mu_corr", axis, float(np.sqrt(corr) * base), g=g))


def narrowing_factors(g: float):
    """(sqrt(tanh 2g / 2g), sqrt(tanh g / g)); both 1 at g = 0."""
    if g < 0:
        raise DomainError("g must be non-negative")

    def f(x):
        if x < 1e-4:
            return 1 - x * x / 6
        return np.sqrt(np.tanh(x) / x)

    return float(f(2 * g)), float(f(g))


def hwhm(x, y, peak_index: int | None = None, side: str = "both"):
    """Half width at half maximum of sampled data.

    A cubic spline through the samples is bisected between the outermost
    sample still above half maximum and its outer neighbour, on each side.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    i0 = int(np.argmax(y)) if peak_index is None else int(peak_index)
    half = 0.5 * y[i0]
    spline = CubicSpline(x, y)
    widths = []
    if side in ("both", "right"):
        above = np.nonzero(y[i0:] >= half)[0]
        j = i0 + int(above[-1])
        if j + 1 >= len(x):
            raise DomainError("half maximum not reached on the right")
        r = brentq(lambda s: spline(s) - half, x[j], x[j + 1], xtol=1e-14 * max(1.0, abs(x[j])))
        widths.append(r - x[i0])
    if side in ("both", "left"):
        above = np.nonzero(y[: i0 + 1] >= half)[0]
        j = int(above[0])
        if j == 0:
            raise DomainError("half maximum not reached on the left")
        lft = brentq(lambda s: spline(s) - half, x[j - 1], x[j], xtol=1e-14 * max(1.0, abs(x[j])))
        widths.append(x[i0] - lft)
    return float(np.mean(widths))


def rms_width(x, y):
    """sqrt(Σ x² y / Σ y) for a centred non-negative distribution."""
    y = np.asarray(y, dtype=float)
    return float(np.sqrt(np.sum(np.square(x) * y) / np.sum(y)))


def envelope_hwhm_ratio(g: float, kind: str) -> float:
    """HWHM of F_β(t) over HWHM of its g → 0 limit (α for corr, α² for coh).

    Both HWHMs follow from a scalar root in α since F_β depends on t only
    through α = exp(−t²/τ²); the ratio is independent of τ.
    """
    if g == 0:
        return 1.0
    idx = 0 if kind == "corr" else 1

    def resid(a):
        return envelope_values(g, a)[idx] - 0.5

    a_half = brentq(resid, 1e-300, 1.0, xtol=1e-15, rtol=1e-15)
    a_ref = 0.5 if kind == "corr" else np.sqrt(0.5)
    return float(np.sqrt(np.log(a_half) / np.log(a_ref)))


def envelope_hwhm_sampled(model: QSModel, kind: str, n: int = 4001, span: float = 3.0) -> float:
    """HWHM of F_β along t from sampled values (spline route)."""
    tau = model.pump.tau_fs
    t = np.linspace(-span * tau, span * tau, n)
    corr, coh = envelope_values(model.gain, model.pump.amplitude(t=t))
    return hwhm(t, corr if kind == "corr" else coh)


def spectrum_hwhm(model: QSModel, which: str = "G1", omega_max: float = 6.0, n: int = 4001) -> float:
    """Numeric central-band HWHM along Ω at q = 0, in units of Ω_GVD."""
    og = model.summary.omega_gvd
    om = np.linspace(0.0, omega_max * og, n)
    w = FourierMode(0.0, 0.0, om)
    f1, f2 = peak_kernels(model, w)
    _, f2m = peak_kernels(model, -w)
    y = np.abs(f2) ** 2 if which == "G1" else np.abs(f1 * f2m)
    return hwhm(om, y, peak_index=0, side="right") / og


def widths_vs_gain(model: QSModel, gains, spec: GridSpec | None = None):
    """Analytic and numeric widths for every quantity over a gain sweep."""
    rows = []
    spec = spec or GridSpec.for_pump(model.pump, "omega", samples_per_width=32, widths=8)
    omega = spec.axis("t").conj_coords
    for g in gains:
        m = model.with_gain(float(g))
        for rep in gaussian_width_laws(float(g)):
            which = "G1" if rep.quantity == "spectrum_G1" else "Psi"
            rows.append(rep.with_numeric(spectrum_hwhm(m, which)))
        for rep in width_sigmas(float(g), m.pump):
            kind = rep.quantity.split("_")[1]
            mu = mu_peak(m, spec, kind).values.real
            rows.append(rep.with_numeric(rms_width(omega, mu)))
        corr_f, coh_f = narrowing_factors(float(g))
        rows.append(WidthReport("env_coh", "t", coh_f, envelope_hwhm_ratio(float(g), "coh"), float(g)))
        rows.append(WidthReport("env_corr", "t", corr_f, envelope_hwhm_ratio(float(g), "corr"), float(g)))
    return rows
