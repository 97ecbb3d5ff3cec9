"""Closed-form Bogoliubov kernels F1, F2 and the space-time envelopes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .crystal import PumpSpec
from .dispersion import DispersionModel, FourierMode, PhaseMatchSummary, SpaceTimePoint, mismatch_taylor
from .special import cosh_sqrt, sinhc_sqrt


@dataclass(frozen=True)
class KernelValue:
    F1: complex
    F2: complex
    gamma2: complex
    phi: float

    @property
    def unitarity_defect(self):
        return np.abs(self.F1) ** 2 - np.abs(self.F2) ** 2 - 1.0


def bogoliubov(dbar, galpha):
    """(F1, F2, Γ²) for mismatch D̄ and local gain g·α_p.

    F1 = C(Γ²) + i(D̄/2)S(Γ²), F2 = gα S(Γ²), Γ² = |gα|² − D̄²/4.
    """
    dbar = np.asarray(dbar, dtype=float)
    galpha = np.asarray(galpha)
    z = np.abs(galpha) ** 2 - 0.25 * dbar * dbar
    s = sinhc_sqrt(z)
    f1 = cosh_sqrt(z) + 0.5j * dbar * s
    f2 = galpha * s
    return f1, f2, z.astype(complex)


def sinh_ratio(a, b):
    """sinh(a)/sinh(b) for a, b ≥ 0 without overflow; b > 0."""
    a = np.asarray(a, dtype=float)
    return np.exp(a - b) * np.expm1(-2 * a) / np.expm1(-2 * b)


_SMALL_GAIN = 1e-4


def _ratio_series(x, a):
    """sinh(a x)/sinh(x) to O(x⁴)."""
    return a * (1 + x * x * (a * a - 1) / 6)


def envelope_values(g: float, alpha):
    """(F_corr, F_coh) for gain g at local pump amplitude α."""
    alpha = np.asarray(alpha, dtype=float)
    if g == 0:
        return alpha.copy(), alpha * alpha
    if g < _SMALL_GAIN:
        return _ratio_series(2 * g, alpha), _ratio_series(g, alpha) ** 2
    corr = sinh_ratio(2 * g * alpha, 2 * g)
    coh = sinh_ratio(g * alpha, g) ** 2
    return corr, coh


def envelopes(pump: PumpSpec, xi: SpaceTimePoint):
    """F_corr = sinh(2gα)/sinh(2g), F_coh = sinh²(gα)/sinh²g at ξ."""
    return envelope_values(pump.gain, pump.amplitude(xi.x, xi.y, xi.t))


class QSModel:
    """Quasi-stationary model: pump + mismatch D̄(w) ≡ D̄(w; −w).

    By default D̄ comes from the second-order Taylor form of ``summary``;
    pass ``dispersion`` to use the full wavenumbers instead.
    """

    def __init__(self, summary: PhaseMatchSummary, pump: PumpSpec, dispersion: DispersionModel | None = None):
        self.summary = summary
        self.pump = pump
        self.dispersion = dispersion

    @property
    def gain(self) -> float:
        return self.pump.gain

    def with_gain(self, g: float) -> "QSModel":
        return QSModel(self.summary, self.pump.with_gain(g), self.dispersion)

    def dbar(self, w: FourierMode):
        if self.dispersion is not None:
            return self.dispersion.mismatch_pair(w)
        return mismatch_taylor(w, self.summary)

    def alpha(self, xi: SpaceTimePoint):
        return self.pump.amplitude(xi.x, xi.y, xi.t)

    def kernels(self, w: FourierMode, xi: SpaceTimePoint):
        """(F1, F2) broadcast over the components of w and ξ."""
        f1, f2, _ = bogoliubov(self.dbar(w), self.gain * self.alpha(xi))
        return f1, f2

    def phase(self, w: FourierMode):
        """φ(w) = (l_c/2)[k_p + k_sz(w) − k_sz(−w)]."""
        lc = self.summary.length_um
        if self.dispersion is not None:
            d = self.dispersion
            return 0.5 * lc * (self.summary.k_p + d.kz_signal(w) - d.kz_signal(-w))
        return 0.5 * lc * self.summary.k_p + lc * self.summary.k1_s * np.asarray(w.omega)


def kernel_eval(summary: PhaseMatchSummary, pump: PumpSpec, w: FourierMode, xi: SpaceTimePoint,
                dispersion: DispersionModel | None = None) -> KernelValue:
    model = QSModel(summary, pump, dispersion)
    f1, f2, z = bogoliubov(model.dbar(w), pump.gain * model.alpha(xi))
    return KernelValue(f1, f2, z, model.phase(w))
