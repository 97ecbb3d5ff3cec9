"""Biphoton amplitude Ψ and coherence G1: full and factorized forms.

Reduced dimensionality: the space-time grid carries a subset of (x, y, t).
Suppressed axes are either treated as a plane-wave slice at coordinate 0
(``transverse="plane"``) or integrated over the Gaussian pump profile with
Gauss-Legendre quadrature (``transverse="integrate"``), which evaluates the
suppressed Fourier components at zero.

Global phases (e^{i k_p l_c} and the transit phases) are dropped in the
default second-line forms; observables used here depend on moduli only.
"""

from __future__ import annotations

import numpy as np

from .dispersion import FourierMode, SpaceTimePoint
from .errors import GridTooCoarse
from .grids import DIMS, KERNEL_SIGN, SPACE_TIME_AXES, FieldGrid, GridSpec, check_pump_resolution, to_fourier, to_spacetime
from .kernels import QSModel, bogoliubov, envelope_values

_QUAD_NODES = 64
_QUAD_HALF_WIDTHS = 7.0


def _suppressed(spec: GridSpec):
    return [n for n in SPACE_TIME_AXES if n not in spec.names]


def xi_samples(model: QSModel, spec: GridSpec, transverse: str = "plane"):
    """Yield (ξ on the grid, weight) pairs covering the suppressed axes."""
    mesh = spec.mesh()
    base = {n: mesh.get(n, 0.0) for n in SPACE_TIME_AXES}
    missing = _suppressed(spec)
    if transverse == "plane" or not missing:
        yield SpaceTimePoint(base["x"], base["y"], base["t"]), 1.0
        return
    if transverse != "integrate":
        raise ValueError("transverse must be 'plane' or 'integrate'")
    nodes, weights = np.polynomial.legendre.leggauss(_QUAD_NODES)
    per_axis = []
    for name in missing:
        width = model.pump.tau_fs if name == "t" else model.pump.waist_um
        half = _QUAD_HALF_WIDTHS * width
        per_axis.append((name, nodes * half, weights * half / (2 * np.pi)))
    idx = np.stack(np.meshgrid(*[np.arange(_QUAD_NODES)] * len(per_axis), indexing="ij"), -1)
    for combo in idx.reshape(-1, len(per_axis)):
        coords = dict(base)
        wgt = 1.0
        for (name, pts, wts), j in zip(per_axis, combo):
            coords[name] = pts[j]
            wgt *= wts[j]
        yield SpaceTimePoint(coords["x"], coords["y"], coords["t"]), wgt


def envelope_grid(model: QSModel, spec: GridSpec, kind: str, transverse: str = "plane"):
    """F_corr or F_coh on the grid, integrated over suppressed axes if asked."""
    total = 0.0
    for xi, wgt in xi_samples(model, spec, transverse):
        corr, coh = envelope_values(model.gain, model.alpha(xi))
        total = total + wgt * (corr if kind == "corr" else coh)
    return np.broadcast_to(total, spec.shape).astype(float)


def mu_peak(model: QSModel, spec: GridSpec, kind: str, transverse: str = "plane",
            min_samples: float = 8.0) -> FieldGrid:
    """μ_β(w0) on the conjugate grid by FFT of F_β."""
    if kind not in ("corr", "coh"):
        raise ValueError("kind must be 'corr' or 'coh'")
    check_pump_resolution(spec, model.pump, min_samples)
    env = envelope_grid(model, spec, kind, transverse)
    return FieldGrid(spec, to_fourier(env, spec), "fourier")


def mu_at_zero(model: QSModel, spec: GridSpec, kind: str, transverse: str = "plane") -> float:
    """μ_β(0) = ∫dξ/(2π)^d F_β."""
    env = envelope_grid(model, spec, kind, transverse)
    return float(np.sum(env) * spec.cell / (2 * np.pi) ** spec.ndim)


def _as_modes(w):
    return w if isinstance(w, FourierMode) else FourierMode(*w)


def _kernel_points(spec: GridSpec, total: FourierMode):
    """Per-axis Fourier coordinate of the e^{−i W·ξ} factor, W the total mode."""
    comp = {"x": total.qx, "y": total.qy, "t": total.omega}
    return {a.conj_name: np.asarray(comp[a.name], dtype=float) for a in spec.axes}


def _direct_sum(spec: GridSpec, integrand_fn, total: FourierMode, shape, chunk=512):
    """Σ_ξ e^{−i total·ξ} integrand(i, ξ) dξ/(2π)^d for each flat point i."""
    mesh = spec.mesh()
    coords = {n: mesh[n].ravel() for n in spec.names}
    pts = {k: np.broadcast_to(v, shape).ravel() for k, v in _kernel_points(spec, total).items()}
    npts = int(np.prod(shape)) if shape else 1
    out = np.empty(npts, dtype=complex)
    norm = spec.cell / (2 * np.pi) ** spec.ndim
    for s in range(0, npts, chunk):
        sl = slice(s, min(s + chunk, npts))
        phase = 0.0
        for a in spec.axes:
            phase = phase + KERNEL_SIGN[a.name] * np.outer(pts[a.conj_name][sl], coords[a.name])
        vals = integrand_fn(sl)
        out[sl] = np.sum(np.exp(1j * phase) * vals, axis=1) * norm
    return out.reshape(shape)


def _flat(mode: FourierMode, shape):
    return FourierMode(*(np.broadcast_to(np.asarray(c, dtype=float), shape).ravel()
                         for c in (mode.qx, mode.qy, mode.omega)))


def _check(model, spec, min_samples=8.0):
    check_pump_resolution(spec, model.pump, min_samples)


def biphoton_full(model: QSModel, spec: GridSpec, w, w_prime, anchor: str = "symmetric",
                  transverse: str = "plane"):
    """Ψ(w, w′) = ∫dξ/(2π)^d e^{−i(w+w′)·ξ} F1(w̄,ξ) F2(−w̄,ξ).

    anchor="symmetric": w̄ = (w − w′)/2, exchange-symmetric by construction.
    anchor="first":     w̄ = w.
    anchor="exact":     F1(w,ξ) F2(w′,ξ) e^{i[φ(w)+φ(w′)]}.
    """
    _check(model, spec)
    w, wp = _as_modes(w), _as_modes(w_prime)
    shape = np.broadcast(*[np.asarray(c) for c in (w.qx, w.qy, w.omega, wp.qx, wp.qy, wp.omega)]).shape
    wf, wpf = _flat(w, shape), _flat(wp, shape)
    if anchor == "symmetric":
        d1 = d2 = model.dbar((wf - wpf).scaled(0.5))
    elif anchor == "first":
        d1 = d2 = model.dbar(wf)
    elif anchor == "exact":
        d1, d2 = model.dbar(wf), model.dbar(wpf)
    else:
        raise ValueError("anchor must be symmetric, first or exact")
    samples = list(xi_samples(model, spec, transverse))

    def integrand(sl):
        acc = 0.0
        for xi, wgt in samples:
            ga = model.gain * np.ravel(np.broadcast_to(model.alpha(xi), spec.shape))
            f1, _, _ = bogoliubov(d1[sl, None], ga[None, :])
            _, f2, _ = bogoliubov(d2[sl, None], ga[None, :])
            acc = acc + wgt * f1 * f2
        return acc

    out = _direct_sum(spec, integrand, wf + wpf, (wf.omega.size,))
    if anchor == "exact":
        out = out * np.exp(1j * (model.phase(wf) + model.phase(wpf)))
    return out.reshape(shape)


def coherence_full(model: QSModel, spec: GridSpec, w, w_prime, anchor: str = "symmetric",
                   transverse: str = "plane"):
    """G1(w, w′) = ∫dξ/(2π)^d e^{−i(w′−w)·ξ} |F2(w̄,ξ)|².

    anchor="symmetric": w̄ = (w + w′)/2, Hermitian by construction.
    anchor="first":     w̄ = w.
    anchor="exact":     F2(w,ξ) F2*(w′,ξ) e^{i[φ(w′)−φ(w)]}.
    """
    _check(model, spec)
    w, wp = _as_modes(w), _as_modes(w_prime)
    shape = np.broadcast(*[np.asarray(c) for c in (w.qx, w.qy, w.omega, wp.qx, wp.qy, wp.omega)]).shape
    wf, wpf = _flat(w, shape), _flat(wp, shape)
    if anchor == "symmetric":
        d1 = d2 = model.dbar((wf + wpf).scaled(0.5))
    elif anchor == "first":
        d1 = d2 = model.dbar(wf)
    elif anchor == "exact":
        d1, d2 = model.dbar(wf), model.dbar(wpf)
    else:
        raise ValueError("anchor must be symmetric, first or exact")
    samples = list(xi_samples(model, spec, transverse))

    def integrand(sl):
        acc = 0.0
        for xi, wgt in samples:
            ga = model.gain * np.ravel(np.broadcast_to(model.alpha(xi), spec.shape))
            _, f2a, _ = bogoliubov(d1[sl, None], ga[None, :])
            _, f2b, _ = bogoliubov(d2[sl, None], ga[None, :])
            acc = acc + wgt * f2a * np.conj(f2b)
        return acc

    out = _direct_sum(spec, integrand, wpf - wf, (wf.omega.size,))
    if anchor == "exact":
        out = out * np.exp(1j * (model.phase(wpf) - model.phase(wf)))
    return out.reshape(shape)


def peak_kernels(model: QSModel, w):
    """(F1(w,0), F2(w,0)); the pump amplitude at ξ = 0 is 1."""
    f1, f2, _ = bogoliubov(model.dbar(_as_modes(w)), model.gain)
    return f1, f2


def mu_value(model: QSModel, spec: GridSpec, kind: str, w0, transverse: str = "plane"):
    """μ_β at arbitrary Fourier offsets by direct summation."""
    w0 = _as_modes(w0)
    shape = np.broadcast(*[np.asarray(c) for c in (w0.qx, w0.qy, w0.omega)]).shape
    env = envelope_grid(model, spec, kind, transverse).ravel()
    w0f = _flat(w0, shape)
    return _direct_sum(spec, lambda sl: env[None, :], w0f, (w0f.omega.size,)).reshape(shape)


def factorized_moments(model: QSModel, spec: GridSpec, w, w_prime, transverse: str = "plane"):
    """(Ψ_fact, G1_fact) = (F1(w,0)F2(−w,0) μ_corr(w+w′), |F2(w,0)|² μ_coh(w′−w))."""
    _check(model, spec)
    w, wp = _as_modes(w), _as_modes(w_prime)
    f1, f2 = peak_kernels(model, w)
    _, f2m = peak_kernels(model, -w)
    psi = f1 * f2m * mu_value(model, spec, "corr", w + wp, transverse)
    g1 = np.abs(f2) ** 2 * mu_value(model, spec, "coh", wp - w, transverse)
    return psi, g1


def spectral_integrands(model: QSModel, fourier_spec: GridSpec, check_band: bool = True,
                        band_tol: float = 1e-3):
    """F1(w,0)F2(−w,0) and |F2(w,0)|² on the conjugate grid of ``fourier_spec``."""
    cm = fourier_spec.conj_mesh()
    w = FourierMode(cm.get("qx", 0.0), cm.get("qy", 0.0), cm.get("omega", 0.0))
    f1, f2 = peak_kernels(model, w)
    _, f2m = peak_kernels(model, -w)
    pair = np.broadcast_to(f1 * f2m, fourier_spec.shape)
    inten = np.broadcast_to(np.abs(f2) ** 2, fourier_spec.shape)
    if check_band:
        edge = np.zeros(fourier_spec.shape, dtype=bool)
        for i in range(fourier_spec.ndim):
            sl = [slice(None)] * fourier_spec.ndim
            sl[i] = 0
            edge[tuple(sl)] = True
            sl[i] = -1
            edge[tuple(sl)] = True
        if np.max(inten[edge]) > band_tol * np.max(inten):
            raise GridTooCoarse("Fourier grid does not cover the phase-matched band")
    return pair, inten


def spacetime_peaks(model: QSModel, fourier_spec: GridSpec, check_band: bool = True):
    """Space-time correlation and coherence peaks P(Δξ) on the grid of Δξ = ξ′ − ξ.

    P_corr(Δ) = ∫dw/(2π)^d e^{i w·Δ} F1(w,0)F2(−w,0), P_coh likewise with |F2|².
    """
    pair, inten = spectral_integrands(model, fourier_spec, check_band)
    norm = (2 * np.pi) ** fourier_spec.ndim
    return (FieldGrid(fourier_spec, to_spacetime(pair, fourier_spec) / norm),
            FieldGrid(fourier_spec, to_spacetime(inten, fourier_spec) / norm))


def spacetime_moments(model: QSModel, fourier_spec: GridSpec, xi, xi_prime, check_band: bool = True):
    """(ψ(ξ,ξ′), G1(ξ,ξ′)) = (F_corr(ξ) P_corr(ξ′−ξ), F_coh(ξ) P_coh(ξ′−ξ)).

    The Fourier factor is summed directly so ξ′ − ξ need not lie on the grid.
    """
    xi = xi if isinstance(xi, SpaceTimePoint) else SpaceTimePoint(*xi)
    xp = xi_prime if isinstance(xi_prime, SpaceTimePoint) else SpaceTimePoint(*xi_prime)
    pair, inten = spectral_integrands(model, fourier_spec, check_band)
    d = xp - xi
    cm = fourier_spec.conj_mesh()
    comp = {"qx": d.x, "qy": d.y, "omega": d.t}
    shape = np.broadcast(*[np.asarray(c) for c in (d.x, d.y, d.t)]).shape
    flat = {k: np.broadcast_to(np.asarray(v, dtype=float), shape).ravel() for k, v in comp.items()}
    ph = 0.0
    for a in fourier_spec.axes:
        sign = -1.0 if a.name == "t" else 1.0  # e^{+i w·Δ}
        ph = ph + sign * np.outer(flat[a.conj_name], cm[a.conj_name].ravel())
    kern = np.exp(1j * ph) * fourier_spec.conj_cell / (2 * np.pi) ** fourier_spec.ndim
    pc = (kern @ pair.ravel()).reshape(shape)
    ph_ = (kern @ inten.ravel()).reshape(shape)
    corr, coh = envelope_values(model.gain, model.alpha(xi))
    return corr * pc, coh * ph_


def intensity_correlation(model: QSModel, spec: GridSpec, w, w_prime, transverse: str = "plane"):
    """(shot, auto, cross) terms of ⟨δI(w)δI(w′)⟩ in the factorized model.

    shot is ⟨I(w)⟩ times a discrete delta of weight 1/(conjugate cell) at w′ = w.
    """
    w, wp = _as_modes(w), _as_modes(w_prime)
    psi, g1 = factorized_moments(model, spec, w, wp, transverse)
    _, i_w = factorized_moments(model, spec, w, w, transverse)
    same = (np.asarray(w.qx) == np.asarray(wp.qx)) & (np.asarray(w.qy) == np.asarray(wp.qy)) & (
        np.asarray(w.omega) == np.asarray(wp.omega))
    shot = np.real(i_w) * same / spec.conj_cell
    return shot, np.abs(g1) ** 2, np.abs(psi) ** 2


def reduced_spec_for(model: QSModel, dims: str = "omega", **kw) -> GridSpec:
    if dims not in DIMS:
        raise ValueError(f"dims must be one of {tuple(DIMS)}")
    return GridSpec.for_pump(model.pump, dims, **kw)
