"""Longitudinal wavenumbers, phase mismatch and characteristic scales.

Units: μm, fs, rad/fs, rad/μm. Signal/idler are ordinary waves near
λ_s = 2λ_p, the pump is extraordinary (type-I, quasi-degenerate).
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .crystal import C_UM_PER_FS, CrystalSpec, PumpSpec, collinear_cut_angle
from .errors import Evanescent

TWO_PI = 2 * np.pi


@dataclass(frozen=True)
class FourierMode:
    """w = (q_x, q_y, Ω). Components may be numpy arrays (broadcast together)."""

    qx: float = 0.0
    qy: float = 0.0
    omega: float = 0.0

    def __add__(self, other):
        return FourierMode(self.qx + other.qx, self.qy + other.qy, self.omega + other.omega)

    def __sub__(self, other):
        return FourierMode(self.qx - other.qx, self.qy - other.qy, self.omega - other.omega)

    def __neg__(self):
        return FourierMode(-self.qx, -self.qy, -self.omega)

    def scaled(self, s):
        return FourierMode(self.qx * s, self.qy * s, self.omega * s)

    @property
    def q2(self):
        return np.square(self.qx) + np.square(self.qy)

    def dot(self, xi: "SpaceTimePoint"):
        """w·ξ = x q_x + y q_y − Ω t."""
        return xi.x * self.qx + xi.y * self.qy - self.omega * xi.t


@dataclass(frozen=True)
class SpaceTimePoint:
    """ξ = (x, y, t)."""

    x: float = 0.0
    y: float = 0.0
    t: float = 0.0

    def __add__(self, other):
        return SpaceTimePoint(self.x + other.x, self.y + other.y, self.t + other.t)

    def __sub__(self, other):
        return SpaceTimePoint(self.x - other.x, self.y - other.y, self.t - other.t)

    def __neg__(self):
        return SpaceTimePoint(-self.x, -self.y, -self.t)

    def dot(self, w: FourierMode):
        return w.dot(self)


@dataclass(frozen=True)
class PhaseMatchSummary:
    delta0: float
    omega_gvd: float
    q_diff: float
    tau_gvm: float
    l_woff: float
    eta: int
    rho_p: float
    k_s: float
    k_p: float
    k1_s: float
    k1_p: float
    k2_s: float
    k2_p: float
    dkp_dqx: float
    theta_c: float
    length_um: float

    @property
    def gvm_fs_per_mm(self) -> float:
        return (self.k1_p - self.k1_s) * 1000.0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["gvm_fs_per_mm"] = self.gvm_fs_per_mm
        d["omega_gvd_trad_s"] = self.omega_gvd * 1e3
        d["q_diff_per_mm"] = self.q_diff * 1e3
        d["l_woff_um_per_mm"] = self.l_woff / self.length_um * 1000.0
        d["rho_p_deg"] = float(np.degrees(self.rho_p))
        d["theta_c_deg"] = float(np.degrees(self.theta_c))
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _propagating(k, q2):
    k2 = np.square(k)
    if np.any(q2 >= k2):
        raise Evanescent("transverse wavenumber exceeds total wavenumber")
    return np.sqrt(k2 - q2)


class DispersionModel:
    """Shared mismatch logic. Subclasses provide signal and pump wavenumbers."""

    length_um: float

    def kz_signal(self, w: FourierMode):
        return _propagating(self.k_signal(w.omega), w.q2)

    def mismatch_full(self, w: FourierMode, w0: FourierMode | None = None):
        """D̄ = l_c [k_sz(w) + k_sz(w0 − w) − k_pz(w0)]."""
        w0 = FourierMode() if w0 is None else w0
        ks = self.kz_signal(w) + self.kz_signal(w0 - w)
        return self.length_um * (ks - self.kz_pump(w0))

    def mismatch_pair(self, w: FourierMode):
        """D̄(w) ≡ D̄(w; −w)."""
        return self.mismatch_full(w, FourierMode())


class TypeIModel(DispersionModel):
    """Type-I e → o + o collinear-degenerate geometry in a uniaxial crystal."""

    def __init__(self, crystal: CrystalSpec, lambda_pump_um: float, exact_pump: bool = False):
        theta = crystal.cut_angle
        if theta is None:
            theta = collinear_cut_angle(crystal, lambda_pump_um)
        self.crystal = crystal.with_cut(theta)
        self.theta = float(theta)
        self.length_um = crystal.length_um
        self.lambda_p = float(lambda_pump_um)
        self.lambda_s = 2 * self.lambda_p
        self.omega_s = TWO_PI * C_UM_PER_FS / self.lambda_s
        self.omega_p = 2 * self.omega_s
        self.exact_pump = exact_pump

    def _lam(self, omega):
        return TWO_PI * C_UM_PER_FS / omega

    def k_signal(self, omega):
        om = self.omega_s + np.asarray(omega, dtype=float)
        return self.crystal.n_o(self._lam(om)) * om / C_UM_PER_FS

    def k_pump(self, omega):
        om = self.omega_p + np.asarray(omega, dtype=float)
        return self.crystal.n_e(self._lam(om), self.theta) * om / C_UM_PER_FS

    def _principal_sq(self, omega):
        lam = self._lam(self.omega_p + np.asarray(omega, dtype=float))
        return self.crystal.n_o(lam) ** 2, self.crystal.n_e(lam, np.pi / 2) ** 2

    def pump_slope(self, omega=0.0):
        """∂k_pz/∂q_x at q = 0 (tilt of the extraordinary wave surface)."""
        no2, ne2 = self._principal_sq(omega)
        s, c = np.sin(self.theta), np.cos(self.theta)
        delta = 1 / no2 - 1 / ne2
        return -c * s * delta / (1 / ne2 + c * c * delta)

    def kz_pump(self, w: FourierMode):
        if self.exact_pump:
            return self._kz_pump_exact(w)
        kp = self.k_pump(w.omega)
        return kp + self.pump_slope(w.omega) * w.qx - w.q2 / (2 * kp)

    def _kz_pump_exact(self, w: FourierMode):
        # optic axis (sinθ, 0, cosθ); solve the index ellipsoid for k_z
        no2, ne2 = self._principal_sq(w.omega)
        k0 = (self.omega_p + np.asarray(w.omega, dtype=float)) / C_UM_PER_FS
        s, c = np.sin(self.theta), np.cos(self.theta)
        delta = 1 / no2 - 1 / ne2
        a = 1 / ne2 + c * c * delta
        b = 2 * w.qx * s * c * delta
        cc = w.q2 / ne2 + np.square(w.qx) * s * s * delta - k0**2
        disc = b * b - 4 * a * cc
        if np.any(disc <= 0):
            raise Evanescent("pump transverse wavenumber beyond cutoff")
        return (-b + np.sqrt(disc)) / (2 * a)

    def derivative_constants(self):
        """Analytic k, k', k'' of signal (at ω_s) and pump (at ω_p)."""
        ls, lp = self.lambda_s, self.lambda_p
        ns, dns, d2ns = self.crystal.ordinary.derivatives(ls)
        np_, dnp, d2np = self.crystal.n_e_derivatives(lp, self.theta)
        c = C_UM_PER_FS
        out = {
            "k_s": float(TWO_PI * ns / ls),
            "k_p": float(TWO_PI * np_ / lp),
            "k1_s": float((ns - ls * dns) / c),
            "k1_p": float((np_ - lp * dnp) / c),
            "k2_s": float(ls**3 * d2ns / (TWO_PI * c * c)),
            "k2_p": float(lp**3 * d2np / (TWO_PI * c * c)),
            "dkp_dqx": float(self.pump_slope(0.0)),
        }
        return out

    def summary(self) -> PhaseMatchSummary:
        return _summary_from_constants(self.derivative_constants(), self.length_um, self.theta)


class QuadraticModel(DispersionModel):
    """Polynomial dispersion k(Ω) = k + k'Ω + k''Ω²/2 for signal and pump.

    Handy for symmetric or GVM-free test crystals where the QS assumptions
    hold exactly.
    """

    def __init__(self, k_s, k1_s, k2_s, k_p, k1_p, k2_p, length_um, dkp_dqx=0.0):
        self.k_s, self.k1_s, self.k2_s = float(k_s), float(k1_s), float(k2_s)
        self.k_p, self.k1_p, self.k2_p = float(k_p), float(k1_p), float(k2_p)
        self.length_um = float(length_um)
        self.dkp_dqx = float(dkp_dqx)

    @classmethod
    def from_scales(cls, omega_gvd, q_diff, length_um, eta=1, tau_gvm=0.0, k2_ratio=2.0, delta0=0.0):
        """Build a model with prescribed Ω_GVD, q_diff, τ_GVM and Δ̄0."""
        k_s = q_diff**2 * length_um
        k2_s = eta / (omega_gvd**2 * length_um)
        k1_s = k_s / (TWO_PI * C_UM_PER_FS / 1.03)  # any positive group delay
        k_p = 2 * k_s - delta0 / length_um
        return cls(k_s, k1_s, k2_s, k_p, k1_s + tau_gvm / length_um, k2_ratio * k2_s, length_um)

    def k_signal(self, omega):
        om = np.asarray(omega, dtype=float)
        return self.k_s + self.k1_s * om + 0.5 * self.k2_s * om * om

    def k_pump(self, omega):
        om = np.asarray(omega, dtype=float)
        return self.k_p + self.k1_p * om + 0.5 * self.k2_p * om * om

    def kz_pump(self, w: FourierMode):
        kp = self.k_pump(w.omega)
        return kp + self.dkp_dqx * w.qx - w.q2 / (2 * kp)

    def derivative_constants(self):
        return {
            "k_s": self.k_s, "k_p": self.k_p, "k1_s": self.k1_s, "k1_p": self.k1_p,
            "k2_s": self.k2_s, "k2_p": self.k2_p, "dkp_dqx": self.dkp_dqx,
        }

    def summary(self) -> PhaseMatchSummary:
        return _summary_from_constants(self.derivative_constants(), self.length_um, 0.0)


def _summary_from_constants(d, length_um, theta) -> PhaseMatchSummary:
    lc = length_um
    return PhaseMatchSummary(
        delta0=(2 * d["k_s"] - d["k_p"]) * lc,
        omega_gvd=abs(d["k2_s"] * lc) ** -0.5,
        q_diff=(d["k_s"] / lc) ** 0.5,
        tau_gvm=lc * (d["k1_p"] - d["k1_s"]),
        l_woff=d["dkp_dqx"] * lc,
        eta=1 if d["k2_s"] >= 0 else -1,
        rho_p=float(np.arctan(-d["dkp_dqx"])),
        k_s=d["k_s"], k_p=d["k_p"], k1_s=d["k1_s"], k1_p=d["k1_p"],
        k2_s=d["k2_s"], k2_p=d["k2_p"], dkp_dqx=d["dkp_dqx"],
        theta_c=float(theta), length_um=float(lc),
    )


def kz(crystal: CrystalSpec, pol: str, w: FourierMode, carrier_um: float, exact: bool = False):
    """Longitudinal wavenumber of a wave with carrier wavelength ``carrier_um``.

    Ordinary: sqrt(k² − q²). Extraordinary: the tilted wave surface at the
    crystal's cut angle, paraxial unless ``exact``.
    """
    omega_c = TWO_PI * C_UM_PER_FS / carrier_um
    om = omega_c + np.asarray(w.omega, dtype=float)
    lam = TWO_PI * C_UM_PER_FS / om
    if pol in ("o", "ordinary"):
        return _propagating(crystal.n_o(lam) * om / C_UM_PER_FS, w.q2)
    if pol in ("e", "extraordinary"):
        if crystal.cut_angle is None:
            raise ValueError("extraordinary kz needs an explicit cut angle")
        m = TypeIModel(crystal, carrier_um, exact_pump=exact)
        return m.kz_pump(w)
    raise ValueError(f"unknown polarization {pol!r}")


def mismatch_full(model: DispersionModel, w: FourierMode, w0: FourierMode | None = None):
    return model.mismatch_full(w, w0)


def mismatch_taylor(w: FourierMode, summary: PhaseMatchSummary):
    """Δ̄0 + η Ω̄² − q̄²."""
    om = np.asarray(w.omega, dtype=float) / summary.omega_gvd
    return summary.delta0 + summary.eta * om * om - w.q2 / summary.q_diff**2


def characteristic_scales(crystal: CrystalSpec, pump: PumpSpec) -> PhaseMatchSummary:
    return TypeIModel(crystal, pump.lambda_um).summary()


def richardson_derivative(f, x, order: int = 1, rel_step: float = 1e-2, levels: int = 5):
    """Central-difference derivative of order 1 or 2 with Richardson extrapolation."""
    x = np.asarray(x, dtype=float)
    h = rel_step * np.maximum(np.abs(x), 1e-3)
    table = []
    for i in range(levels):
        hi = h / 2**i
        if order == 1:
            d = (np.asarray(f(x + hi)) - np.asarray(f(x - hi))) / (2 * hi)
        elif order == 2:
            d = (np.asarray(f(x + hi)) - 2 * np.asarray(f(x)) + np.asarray(f(x - hi))) / hi**2
        else:
            raise ValueError("order must be 1 or 2")
        row = [d]
        for j in range(1, i + 1):
            fac = 4.0**j
            row.append((fac * row[j - 1] - table[i - 1][j - 1]) / (fac - 1))
        table.append(row)
    return table[-1][-1]
