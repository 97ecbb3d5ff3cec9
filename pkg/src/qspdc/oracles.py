"""Independent numerical oracles for the approximations of the QS model.

* z-integration of the two coupled f-equations, optionally with the pump
  drifting along x and t (walk-off and group-velocity mismatch);
* a dense mode-by-mode integration of the kernel equations on a 1D
  frequency grid at q = 0;
* error maps for the linearised mismatch and for the factorized kernels;
* discretized commutators of the output field.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .correlations import coherence_full
from .crystal import PumpSpec
from .dispersion import DispersionModel, FourierMode, PhaseMatchSummary, SpaceTimePoint, TypeIModel
from .errors import StepTooLarge
from .grids import Axis, GridSpec
from .kernels import QSModel, bogoliubov, envelope_values
from .special import sinc


@dataclass(frozen=True)
class ErrorMap:
    axes: tuple[str, str]
    coords: tuple[np.ndarray, np.ndarray]
    values: np.ndarray
    norm: str = "abs"

    def __post_init__(self):
        if self.norm not in ("abs", "rel-to-peak"):
            raise ValueError("norm must be 'abs' or 'rel-to-peak'")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("error map has non-finite values")

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    def argmax(self):
        i, j = np.unravel_index(np.argmax(np.abs(self.values)), self.values.shape)
        return float(self.coords[0][i]), float(self.coords[1][j])

    def restricted(self, limit0: float, limit1: float) -> "ErrorMap":
        m0 = np.abs(self.coords[0]) <= limit0 * (1 + 1e-12)
        m1 = np.abs(self.coords[1]) <= limit1 * (1 + 1e-12)
        return ErrorMap(self.axes, (self.coords[0][m0], self.coords[1][m1]),
                        self.values[np.ix_(m0, m1)], self.norm)


# f-equations -----------------------------------------------------------------

def _rk4_f(dbar, galpha_fn, steps):
    u = np.ones_like(dbar, dtype=complex)
    v = np.zeros_like(dbar, dtype=complex)
    h = 1.0 / steps

    def rhs(s, u, v):
        ga = galpha_fn(s)
        return ga * v * np.exp(-1j * dbar * s), np.conj(ga) * u * np.exp(1j * dbar * s)

    for k in range(steps):
        s = k * h
        a1, b1 = rhs(s, u, v)
        a2, b2 = rhs(s + h / 2, u + h / 2 * a1, v + h / 2 * b1)
        a3, b3 = rhs(s + h / 2, u + h / 2 * a2, v + h / 2 * b2)
        a4, b4 = rhs(s + h, u + h * a3, v + h * b3)
        u = u + h / 6 * (a1 + 2 * a2 + 2 * a3 + a4)
        v = v + h / 6 * (b1 + 2 * b2 + 2 * b3 + b4)
    return u, np.conj(v)


def integrate_f_equations(summary: PhaseMatchSummary, pump: PumpSpec, w: FourierMode, xi: SpaceTimePoint,
                          walkoff: bool = False, steps: int = 128, check: bool = True,
                          tol: float = 1e-6, dbar=None):
    """(f1(w,ξ), f2(−w,ξ)) at the exit face by RK4 in s = z/l_c ∈ [0, 1].

    Starts from f1 = 1, f2 = 0. With ``walkoff`` the gain profile is
    α_p(ξ + ξ_wo s), ξ_wo = (−l_woff, 0, τ_GVM). Without it the result equals
    e^{−iD̄/2}(F1, F2). ``dbar`` overrides the Taylor mismatch.
    """
    if steps < 64:
        raise ValueError("steps must be ≥ 64")
    model = QSModel(summary, pump)
    d = np.asarray(model.dbar(w) if dbar is None else dbar, dtype=float)
    x = np.asarray(xi.x, dtype=float)
    y = np.asarray(xi.y, dtype=float)
    t = np.asarray(xi.t, dtype=float)
    shape = np.broadcast(d, x, y, t).shape
    d, x, y, t = (np.broadcast_to(a, shape) for a in (d, x, y, t))
    g = pump.gain

    def galpha(s):
        if walkoff:
            return g * pump.amplitude(x - summary.l_woff * s, y, t + summary.tau_gvm * s)
        return g * pump.amplitude(x, y, t)

    f1, f2 = _rk4_f(d, galpha, steps)
    if check:
        f1b, f2b = _rk4_f(d, galpha, 2 * steps)
        change = max(np.max(np.abs(f1b - f1), initial=0), np.max(np.abs(f2b - f2), initial=0))
        if change > tol:
            raise StepTooLarge(f"step doubling changed f by {change:.3g} (> {tol})")
    return f1, f2


def closed_form_f(dbar, galpha):
    """e^{−iD̄/2}(F1, F2)."""
    f1, f2, _ = bogoliubov(dbar, galpha)
    ph = np.exp(-0.5j * np.asarray(dbar))
    return ph * f1, ph * f2


def rk4_order_factor(dbar, galpha, steps: int = 64) -> float:
    """err(steps)/err(2·steps) against the closed form; ≈ 16 for RK4."""
    dbar = np.asarray(dbar, dtype=float)
    galpha = np.asarray(galpha, dtype=float)
    ref1, ref2 = closed_form_f(dbar, galpha)
    errs = []
    for n in (steps, 2 * steps):
        f1, f2 = _rk4_f(dbar, lambda s: galpha, n)
        errs.append(max(np.max(np.abs(f1 - ref1)), np.max(np.abs(f2 - ref2))))
    return float(errs[0] / errs[1])


# kernel ODE on a frequency grid ---------------------------------------------------

@dataclass
class KernelSolution:
    omega: np.ndarray
    d_omega: float
    U: np.ndarray
    W: np.ndarray
    unitarity_history: list

    @property
    def unitarity(self) -> float:
        n = self.U.shape[0]
        return float(np.max(np.abs(self.U @ self.U.conj().T - self.W @ self.W.conj().T - np.eye(n))))

    def g1(self):
        """G1(Ω_n, Ω_m) = (W* Wᵀ)_{nm}/dΩ."""
        return self.W.conj() @ self.W.T / self.d_omega

    def psi(self):
        """Ψ(Ω_n, Ω_m) = (U Wᵀ)_{nm}/dΩ."""
        return self.U @ self.W.T / self.d_omega


def mode_grid(n_modes: int, tau_fs: float, time_window: float = 6.0):
    """Half-integer grid Ω_n = (n − (N−1)/2) dΩ with dΩ = 2π/(time_window·τ)."""
    d_omega = 2 * np.pi / (time_window * tau_fs)
    return (np.arange(n_modes) - (n_modes - 1) / 2) * d_omega, d_omega


def _pair_mismatch(dispersion: DispersionModel, omega):
    a = omega[:, None]
    b = omega[None, :]
    return dispersion.mismatch_full(FourierMode(0.0, 0.0, a), FourierMode(0.0, 0.0, a + b))


def coupling_amplitude(pump: PumpSpec, omega, d_omega, g):
    s = omega[:, None] + omega[None, :]
    return g * d_omega / np.sqrt(2 * np.pi) * pump.spectral_amplitude_t(s)


def integrate_kernel_equations(dispersion: DispersionModel, pump: PumpSpec, g: float | None = None,
                               n_modes: int = 64, time_window: float = 6.0, steps: int = 400,
                               checkpoints: int = 8, check: bool = False, tol: float = 1e-6):
    """Dense RK4 of dU/ds = M W*, dW/ds = M U*, U(0) = I, W(0) = 0.

    M_nk = g dΩ/√(2π) α̃(Ω_n + Ω_k) e^{−iD̄(Ω_n; Ω_k) s}, with b_n = √dΩ a(Ω_n)
    and the one-dimensional (2π)^{1/2} transform of the pump.
    """
    if n_modes > 64:
        raise ValueError("kernel grid is capped at 64 modes")
    g = pump.gain if g is None else g
    omega, d_omega = mode_grid(n_modes, pump.tau_fs, time_window)
    m0 = coupling_amplitude(pump, omega, d_omega, g)
    dbar = _pair_mismatch(dispersion, omega)

    def run(nsteps, record):
        U = np.eye(n_modes, dtype=complex)
        W = np.zeros((n_modes, n_modes), dtype=complex)
        h = 1.0 / nsteps
        hist = []
        every = max(1, nsteps // checkpoints)

        def rhs(s, U, W):
            M = m0 * np.exp(-1j * dbar * s)
            return M @ W.conj(), M @ U.conj()

        for k in range(nsteps):
            s = k * h
            a1, b1 = rhs(s, U, W)
            a2, b2 = rhs(s + h / 2, U + h / 2 * a1, W + h / 2 * b1)
            a3, b3 = rhs(s + h / 2, U + h / 2 * a2, W + h / 2 * b2)
            a4, b4 = rhs(s + h, U + h * a3, W + h * b3)
            U = U + h / 6 * (a1 + 2 * a2 + 2 * a3 + a4)
            W = W + h / 6 * (b1 + 2 * b2 + 2 * b3 + b4)
            if record and (k + 1) % every == 0:
                res = np.max(np.abs(U @ U.conj().T - W @ W.conj().T - np.eye(n_modes)))
                hist.append(((k + 1) * h, float(res)))
        return U, W, hist

    U, W, hist = run(steps, True)
    if check:
        U2, W2, _ = run(2 * steps, False)
        change = max(np.max(np.abs(U2 - U)), np.max(np.abs(W2 - W)))
        if change > tol:
            raise StepTooLarge(f"step doubling changed kernels by {change:.3g} (> {tol})")
    return KernelSolution(omega, d_omega, U, W, hist)


def first_order_kernel(dispersion: DispersionModel, pump: PumpSpec, g: float | None = None,
                       n_modes: int = 64, time_window: float = 6.0):
    """W ≈ g dΩ/√(2π) α̃(Ω_n+Ω_k) e^{−iD̄/2} sinc(D̄/2) to first order in g."""
    g = pump.gain if g is None else g
    omega, d_omega = mode_grid(n_modes, pump.tau_fs, time_window)
    dbar = _pair_mismatch(dispersion, omega)
    return coupling_amplitude(pump, omega, d_omega, g) * np.exp(-0.5j * dbar) * sinc(dbar / 2)


def kernel_vs_qs(solution: KernelSolution, dispersion: DispersionModel, summary: PhaseMatchSummary,
                 pump: PumpSpec, band: float = 1.0, samples_per_tau: int = 32):
    """Max relative gap of diag G1 between the kernel ODE and the QS coherence,
    over |Ω| ≤ band·Ω_GVD."""
    qs = QSModel(summary, pump, dispersion)
    n = int(2 ** np.ceil(np.log2(16 * samples_per_tau)))
    spec = GridSpec((Axis("t", n, pump.tau_fs / samples_per_tau),))
    w = FourierMode(0.0, 0.0, solution.omega)
    g1_qs = coherence_full(qs, spec, w, w).real
    g1_ode = np.real(np.diag(solution.g1()))
    sel = np.abs(solution.omega) <= band * summary.omega_gvd
    return float(np.max(np.abs(g1_ode[sel] / g1_qs[sel] - 1))), g1_ode, g1_qs


# linearised-mismatch maps -------------------------------------------------------------

def ansatz2_mismatch(dispersion: DispersionModel, summary: PhaseMatchSummary, w: FourierMode, w0: FourierMode):
    """D̄(w; −w) − τ_GVM Ω0 − l_woff q0x."""
    return dispersion.mismatch_pair(w) - summary.tau_gvm * np.asarray(w0.omega) - summary.l_woff * np.asarray(w0.qx)


def ansatz2_error_map(dispersion: DispersionModel, tau_fs: float, n_omega: int = 401, n_omega0: int = 201,
                      omega_max: float = 2.0, summary: PhaseMatchSummary | None = None) -> ErrorMap:
    """sinc(D̄_appr/2) − sinc(D̄_full/2) over Ω ∈ ±omega_max·Ω_GVD, Ω0 ∈ ±2/τ at q = q0 = 0."""
    summary = summary or dispersion.summary()
    om = np.linspace(-omega_max, omega_max, n_omega) * summary.omega_gvd
    om0 = np.linspace(-2.0, 2.0, n_omega0) / tau_fs
    w = FourierMode(0.0, 0.0, om[:, None])
    w0 = FourierMode(0.0, 0.0, om0[None, :])
    full = dispersion.mismatch_full(w, w0)
    appr = ansatz2_mismatch(dispersion, summary, w, w0)
    return ErrorMap(("omega", "omega0"), (om, om0), sinc(appr / 2) - sinc(full / 2))


def phase_matching_q(dispersion: DispersionModel, omega: float, q_max: float):
    """Smallest q > 0 with D̄((q,0,Ω); −w) = 0, or None."""
    from scipy.optimize import brentq

    def f(q):
        return float(dispersion.mismatch_pair(FourierMode(q, 0.0, omega)))

    qs = np.linspace(1e-9, q_max, 200)
    vals = [f(q) for q in qs]
    for a, b, fa, fb in zip(qs[:-1], qs[1:], vals[:-1], vals[1:]):
        if fa == 0:
            return a
        if fa * fb < 0:
            return brentq(f, a, b, xtol=1e-14)
    return None


def ansatz2_locus(crystal_model: TypeIModel, tau_fs: float, waist_um: float, n: int = 40,
                  omega_max: float = 2.0, direction: str = "+x"):
    """Error along the phase-matching locus with Ω0 = 2/τ, q0 = (2/w_p, 0).

    ``direction`` places the signal q along +x, −x or +y. Returns (Ω, error).
    The pump wave surface is evaluated exactly.
    """
    summary = crystal_model.summary()
    exact = TypeIModel(crystal_model.crystal, crystal_model.lambda_p, exact_pump=True)
    og = summary.omega_gvd
    omegas = np.linspace(0.05, omega_max, n) * og
    w0 = FourierMode(2.0 / waist_um, 0.0, 2.0 / tau_fs)
    errs = []
    for om in omegas:
        q = phase_matching_q(exact, om, 10 * summary.q_diff)
        if q is None:
            errs.append(np.nan)
            continue
        w = {"+x": FourierMode(q, 0.0, om), "-x": FourierMode(-q, 0.0, om),
             "+y": FourierMode(0.0, q, om)}[direction]
        full = exact.mismatch_full(w, w0)
        appr = ansatz2_mismatch(exact, summary, w, w0)
        errs.append(float(sinc(appr / 2) - sinc(full / 2)))
    return omegas, np.array(errs)


# factorization maps --------------------------------------------------------------------

def factorization_error_map(model: QSModel, n_omega: int = 201, n_t: int = 201,
                            omega_max: float = 1.0, t_max: float = 1.0):
    """Pair of rel-to-peak maps over (Ω, t) at q = 0, x = y = 0.

    corr: |F1F2(Ω,t) − F_corr(t)·F1F2(Ω,0)| / (cosh g sinh g)
    coh:  |F2²(Ω,t) − F_coh(t)·F2²(Ω,0)| / sinh² g
    """
    g = model.gain
    om = np.linspace(-omega_max, omega_max, n_omega) * model.summary.omega_gvd
    t = np.linspace(-t_max, t_max, n_t) * model.pump.tau_fs
    d = model.dbar(FourierMode(0.0, 0.0, om))[:, None]
    alpha = model.pump.amplitude(t=t)[None, :]
    f1, f2, _ = bogoliubov(d, g * alpha)
    p1, p2, _ = bogoliubov(d, g)
    corr, coh = envelope_values(g, alpha)
    e_corr = np.abs(f1 * f2 - corr * p1 * p2) / (np.cosh(g) * np.sinh(g))
    e_coh = np.abs(f2 * f2 - coh * p2 * p2) / np.sinh(g) ** 2
    return (ErrorMap(("omega", "t"), (om, t), e_corr, "rel-to-peak"),
            ErrorMap(("omega", "t"), (om, t), e_coh, "rel-to-peak"))


# unitarity ----------------------------------------------------------------------------

def commutators(model: QSModel, spec: GridSpec, w: FourierMode, w_prime: FourierMode):
    """Discretized [A(w), A†(w′)] and [A(w), A(w′)] of the QS input-output map.

    [A,A†] = e^{i[φ(w)−φ(w′)]} ∫dξ/(2π)^d e^{i(w′−w)·ξ}[F1(w)F1*(w′) − F2(w)F2*(w′)]
    [A,A]  = e^{i[φ(w)+φ(w′)]} ∫dξ/(2π)^d e^{−i(w+w′)·ξ}[F1(w)F2(w′) − F2(w)F1(w′)]
    """
    mesh = spec.mesh()
    xi = SpaceTimePoint(mesh.get("x", 0.0), mesh.get("y", 0.0), mesh.get("t", 0.0))
    ga = model.gain * model.alpha(xi)
    a1, a2, _ = bogoliubov(model.dbar(w), ga)
    b1, b2, _ = bogoliubov(model.dbar(w_prime), ga)
    norm = spec.cell / (2 * np.pi) ** spec.ndim
    d1 = w_prime - w
    d2 = w + w_prime
    e1 = np.exp(1j * d1.dot(xi))
    e2 = np.exp(-1j * d2.dot(xi))
    c1 = np.sum(e1 * (a1 * np.conj(b1) - a2 * np.conj(b2))) * norm
    c2 = np.sum(e2 * (a1 * b2 - a2 * b1)) * norm
    c1 *= np.exp(1j * (model.phase(w) - model.phase(w_prime)))
    c2 *= np.exp(1j * (model.phase(w) + model.phase(w_prime)))
    return complex(c1), complex(c2)


@dataclass(frozen=True)
class UnitarityReport:
    tau_fs: float
    offdiag: float
    diag_mass: float
    anticomm: float


def unitarity_residual(model: QSModel, omega: float, spec: GridSpec | None = None,
                       window: float = 8.0) -> UnitarityReport:
    """Commutator residuals at w = (0, 0, Ω) over w′ on the conjugate Ω grid.

    offdiag   = max |[A,A†](w,w′) − δ/dΩ|·dΩ over w′ ≠ w within ±window pump widths
    diag_mass = Σ_{w′} [A,A†] dΩ
    anticomm  = max |[A,A](w,w′)| / (|F1F2|(w,0) μ_corr(0)) over w′ near −w
    """
    if spec is None:
        spec = GridSpec.for_pump(model.pump, "omega", samples_per_width=16, widths=12)
    ax = spec.axis("t")
    d_om = ax.conj_step
    w = FourierMode(0.0, 0.0, omega)
    shifts = ax.conj_coords
    near = np.abs(shifts) <= window * model.pump.sigma_omega
    c1 = np.array([commutators(model, spec, w, FourierMode(0.0, 0.0, omega + s))[0] for s in shifts[near]])
    c2 = np.array([commutators(model, spec, w, FourierMode(0.0, 0.0, -omega + s))[1] for s in shifts[near]])
    zero = np.argmin(np.abs(shifts[near]))
    delta = np.zeros_like(c1)
    delta[zero] = 1.0 / d_om
    off = float(np.max(np.abs(c1 - delta)) * d_om)
    from .correlations import mu_at_zero, peak_kernels

    f1, f2 = peak_kernels(model, w)
    scale = float(np.abs(f1 * f2) * mu_at_zero(model, spec, "corr"))
    anti = float(np.max(np.abs(c2)) / scale) if scale > 0 else float(np.max(np.abs(c2)))
    return UnitarityReport(model.pump.tau_fs, off, float(np.real(np.sum(c1)) * d_om), anti)


def with_tau_gvm(summary: PhaseMatchSummary, tau_gvm: float, l_woff: float | None = None) -> PhaseMatchSummary:
    changes = {"tau_gvm": float(tau_gvm)}
    if l_woff is not None:
        changes["l_woff"] = float(l_woff)
    return dataclasses.replace(summary, **changes)
