"""Uniaxial crystal optics: Sellmeier sets, refractive indices and pump specs.

Wavelengths are in micrometres throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import bisect

from .errors import DomainError, OutOfWindow

C_UM_PER_FS = 0.299792458


@dataclass(frozen=True)
class SellmeierSet:
    """Dispersion formula n(λ) for one polarization.

    form="handbook":  n² = A + B/(λ² − C) − D·λ², coefficients (A, B, C, D)
    form="sellmeier": n² = 1 + Σ Bᵢλ²/(λ² − Cᵢ), coefficients (B1, C1, B2, C2, ...)
    form="callable":  ``func(lam) -> n``; derivatives fall back to finite differences
    """

    form: str
    coefficients: tuple[float, ...] = ()
    window_um: tuple[float, float] = (0.2, 3.0)
    func: Callable | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.form not in ("handbook", "sellmeier", "callable"):
            raise ValueError(f"unknown Sellmeier form {self.form!r}")
        if self.form == "handbook" and len(self.coefficients) != 4:
            raise ValueError("handbook form needs 4 coefficients (A, B, C, D)")
        if self.form == "sellmeier" and (len(self.coefficients) == 0 or len(self.coefficients) % 2):
            raise ValueError("sellmeier form needs (B, C) pairs")
        if self.form == "callable" and self.func is None:
            raise ValueError("callable form needs func")

    def check_window(self, lam):
        lam = np.asarray(lam, dtype=float)
        lo, hi = self.window_um
        if np.any(lam < lo) or np.any(lam > hi) or np.any(~np.isfinite(lam)):
            bad = lam[(lam < lo) | (lam > hi) | ~np.isfinite(lam)]
            raise OutOfWindow(f"wavelength {bad.ravel()[0]!r} um outside window [{lo}, {hi}] um")

    def _f(self, x):
        """n² and its first two derivatives with respect to x = λ²."""
        c = self.coefficients
        if self.form == "handbook":
            a, b, cc, d = c
            dx = x - cc
            return a + b / dx - d * x, -b / dx**2 - d, 2 * b / dx**3
        f, f1, f2 = 1.0, 0.0, 0.0
        for b, cc in zip(c[0::2], c[1::2]):
            dx = x - cc
            f = f + b * x / dx
            f1 = f1 - b * cc / dx**2
            f2 = f2 + 2 * b * cc / dx**3
        return f, f1, f2

    def n(self, lam):
        self.check_window(lam)
        if self.form == "callable":
            return np.asarray(self.func(lam), dtype=float)
        return np.sqrt(self._f(np.asarray(lam, dtype=float) ** 2)[0])

    def derivatives(self, lam):
        """Return (n, dn/dλ, d²n/dλ²)."""
        self.check_window(lam)
        lam = np.asarray(lam, dtype=float)
        if self.form == "callable":
            from .dispersion import richardson_derivative

            n = np.asarray(self.func(lam), dtype=float)
            return (
                n,
                richardson_derivative(self.func, lam, order=1),
                richardson_derivative(self.func, lam, order=2),
            )
        x = lam**2
        f, f1, f2 = self._f(x)
        n = np.sqrt(f)
        dn = lam * f1 / n
        d2n = (f1 + 2 * x * f2) / n - dn**2 / n
        return n, dn, d2n


@dataclass(frozen=True)
class CrystalSpec:
    """Negative or positive uniaxial crystal of length ``length_um``.

    ``cut_angle`` is measured from the optic axis; None means "solve for
    collinear degenerate type-I matching at the pump wavelength".
    """

    name: str
    ordinary: SellmeierSet
    extraordinary: SellmeierSet
    length_um: float
    cut_angle: float | None = None

    def __post_init__(self):
        if not self.length_um > 0:
            raise ValueError("crystal length must be positive")

    def with_cut(self, theta: float | None) -> "CrystalSpec":
        return CrystalSpec(self.name, self.ordinary, self.extraordinary, self.length_um, theta)

    def n_o(self, lam):
        return self.ordinary.n(lam)

    def n_e(self, lam, theta):
        """Angle-dependent extraordinary index, 1/n² = cos²θ/n_o² + sin²θ/n_e²."""
        no = self.ordinary.n(lam)
        ne = self.extraordinary.n(lam)
        c2, s2 = np.cos(theta) ** 2, np.sin(theta) ** 2
        return (c2 / no**2 + s2 / ne**2) ** -0.5

    def n_e_derivatives(self, lam, theta):
        """(n, dn/dλ, d²n/dλ²) of the extraordinary wave at fixed θ."""
        no, dno, d2no = self.ordinary.derivatives(lam)
        ne, dne, d2ne = self.extraordinary.derivatives(lam)
        c2, s2 = np.cos(theta) ** 2, np.sin(theta) ** 2
        # u = n^-2 is linear in the principal u's
        u = c2 / no**2 + s2 / ne**2
        du = c2 * (-2 * dno / no**3) + s2 * (-2 * dne / ne**3)
        d2u = c2 * (-2 * d2no / no**3 + 6 * dno**2 / no**4) + s2 * (
            -2 * d2ne / ne**3 + 6 * dne**2 / ne**4
        )
        n = u**-0.5
        dn = -0.5 * u**-1.5 * du
        d2n = 0.75 * u**-2.5 * du**2 - 0.5 * u**-1.5 * d2u
        return n, dn, d2n


def index(crystal: CrystalSpec, pol: str, lam, theta=0.0):
    """Refractive index for ``pol`` in {"ordinary", "extraordinary"}."""
    if pol in ("o", "ordinary"):
        return crystal.n_o(lam)
    if pol in ("e", "extraordinary"):
        return crystal.n_e(lam, theta)
    raise ValueError(f"unknown polarization {pol!r}")


def collinear_cut_angle(crystal: CrystalSpec, lambda_pump_um: float, tol: float = 1e-12) -> float:
    """Angle θ with n_e(θ, λ_p) = n_o(2λ_p), found by bisection on [0, π/2]."""
    target = float(crystal.n_o(2 * lambda_pump_um))

    def resid(theta):
        return float(crystal.n_e(lambda_pump_um, theta)) - target

    lo, hi = 0.0, np.pi / 2
    if resid(lo) * resid(hi) > 0:
        raise DomainError(
            f"{crystal.name}: no collinear type-I match for pump {lambda_pump_um} um"
        )
    return bisect(resid, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=200)


@dataclass(frozen=True)
class PumpSpec:
    """Transform-limited Gaussian pump, α_p = exp(−r²/w² − t²/τ²), α_p(0) = 1."""

    lambda_um: float
    tau_fs: float
    waist_um: float
    gain: float

    def __post_init__(self):
        for name in ("lambda_um", "tau_fs", "waist_um"):
            if not getattr(self, name) > 0:
                raise ValueError(f"pump {name} must be positive")
        if not self.gain >= 0:
            raise ValueError("pump gain must be non-negative")

    def amplitude(self, x=0.0, y=0.0, t=0.0):
        return np.exp(-(np.square(x) + np.square(y)) / self.waist_um**2 - np.square(t) / self.tau_fs**2)

    def with_gain(self, g: float) -> "PumpSpec":
        return PumpSpec(self.lambda_um, self.tau_fs, self.waist_um, g)

    def spectral_amplitude_t(self, omega):
        """∫dt/√(2π) e^{iΩt} α(t) for the temporal profile."""
        return self.tau_fs / np.sqrt(2) * np.exp(-np.square(omega) * self.tau_fs**2 / 4)

    def spectral_amplitude_x(self, q):
        return self.waist_um / np.sqrt(2) * np.exp(-np.square(q) * self.waist_um**2 / 4)

    @property
    def sigma_omega(self) -> float:
        """rms width of the pump spectral amplitude, √2/τ."""
        return np.sqrt(2) / self.tau_fs

    @property
    def sigma_q(self) -> float:
        return np.sqrt(2) / self.waist_um


BBO_WINDOW = (0.189, 3.5)

BBO_ORDINARY = SellmeierSet("handbook", (2.7359, 0.01878, 0.01822, 0.01354), BBO_WINDOW)
BBO_EXTRAORDINARY = SellmeierSet("handbook", (2.3753, 0.01224, 0.01667, 0.01516), BBO_WINDOW)


def bbo(length_um: float = 2000.0, cut_angle: float | None = None) -> CrystalSpec:
    """β-BaB2O4, handbook Sellmeier set."""
    return CrystalSpec("BBO", BBO_ORDINARY, BBO_EXTRAORDINARY, length_um, cut_angle)


BUILTIN_CRYSTALS = {"bbo": bbo}


def sellmeier_from_list(form: str, coeffs: Sequence[float], window=(0.2, 3.0)) -> SellmeierSet:
    return SellmeierSet(form, tuple(float(c) for c in coeffs), tuple(window))
