import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qspdc.analytics import rms_width, width_sigmas
from qspdc.correlations import (biphoton_full, coherence_full, factorized_moments, intensity_correlation,
                                mu_at_zero, mu_peak, mu_value, spacetime_moments, spacetime_peaks,
                                spectral_integrands)
from qspdc.crystal import PumpSpec
from qspdc.dispersion import FourierMode, SpaceTimePoint
from qspdc.errors import GridTooCoarse
from qspdc.grids import Axis, GridSpec
from qspdc.kernels import QSModel, bogoliubov


@pytest.fixture(scope="module")
def spec(pump):
    return GridSpec.for_pump(pump, "omega", samples_per_width=32, widths=8)


@settings(max_examples=25)
@given(st.floats(0.01, 8.0))
def test_mu_rms_widths_follow_exact_laws(qs, spec, g):
    m = qs.with_gain(g)
    om = spec.axis("t").conj_coords
    coh, corr = width_sigmas(g, m.pump)
    assert rms_width(om, mu_peak(m, spec, "coh").values.real) == pytest.approx(coh.analytic, rel=1e-9)
    assert rms_width(om, mu_peak(m, spec, "corr").values.real) == pytest.approx(corr.analytic, rel=1e-9)


def test_mu_at_zero_low_gain(qs, spec):
    # ∫dt/(2π) α = τ√π/(2π), ∫dt/(2π) α² = τ√(π/2)/(2π)
    m = qs.with_gain(1e-6)
    tau = m.pump.tau_fs
    assert mu_at_zero(m, spec, "corr") == pytest.approx(tau * np.sqrt(np.pi) / (2 * np.pi), rel=1e-9)
    assert mu_at_zero(m, spec, "coh") == pytest.approx(tau * np.sqrt(np.pi / 2) / (2 * np.pi), rel=1e-9)


def test_mu_value_agrees_with_fft(qs, spec):
    grid = mu_peak(qs, spec, "corr")
    om = spec.axis("t").conj_coords
    sel = slice(len(om) // 2 - 5, len(om) // 2 + 6)
    direct = mu_value(qs, spec, "corr", FourierMode(0.0, 0.0, om[sel]))
    assert np.allclose(direct, grid.values[sel], atol=1e-12 * np.max(np.abs(grid.values)))


def test_psi_exchange_symmetry_and_g1_hermitian(qs, spec):
    s = qs.summary
    w = FourierMode(0.0, 0.0, np.array([0.3, -0.7, 1.1]) * s.omega_gvd)
    wp = FourierMode(0.0, 0.0, np.array([-0.31, 0.69, -1.08]) * s.omega_gvd)
    assert np.allclose(biphoton_full(qs, spec, w, wp), biphoton_full(qs, spec, wp, w), rtol=1e-12)
    assert np.allclose(coherence_full(qs, spec, w, wp), np.conj(coherence_full(qs, spec, wp, w)), rtol=1e-12)


def test_anchors_coincide_on_conjugate_line(qs, spec):
    om = np.linspace(-1, 1, 7) * qs.summary.omega_gvd
    w = FourierMode(0.0, 0.0, om)
    a = biphoton_full(qs, spec, w, -w, anchor="symmetric")
    b = biphoton_full(qs, spec, w, -w, anchor="first")
    c = biphoton_full(qs, spec, w, -w, anchor="exact")
    assert np.allclose(a, b, rtol=1e-13)
    assert np.allclose(np.abs(a), np.abs(c), rtol=1e-12)
    with pytest.raises(ValueError):
        biphoton_full(qs, spec, w, -w, anchor="middle")


def test_diagonal_coherence_is_spectrum(qs, spec):
    # G1(w,w) = ∫dt/(2π) |F2(w,t)|²
    om = np.array([0.0, 0.5, 1.2]) * qs.summary.omega_gvd
    g1 = coherence_full(qs, spec, FourierMode(0.0, 0.0, om), FourierMode(0.0, 0.0, om))
    t = spec.axis("t").coords
    d = qs.dbar(FourierMode(0.0, 0.0, om))[:, None]
    _, f2, _ = bogoliubov(d, qs.gain * qs.pump.amplitude(t=t)[None, :])
    ref = np.sum(np.abs(f2) ** 2, axis=1) * spec.axis("t").step / (2 * np.pi)
    assert np.allclose(g1.real, ref, rtol=1e-12)
    assert np.max(np.abs(g1.imag)) < 1e-12 * np.max(ref)


def test_factorization_exact_at_phase_matching(bbo_summary):
    # D̄ = 0 at the origin makes F1F2 and |F2|² exactly separable
    from dataclasses import replace
    s = replace(bbo_summary, delta0=0.0)
    pump = PumpSpec(0.515, 150.0, 150.0, 1.5)
    m = QSModel(s, pump)
    spec = GridSpec.for_pump(pump, "omega", 32, 8)
    w = FourierMode(0.0, 0.0, 0.0)
    psi_full = biphoton_full(m, spec, w, w)
    g1_full = coherence_full(m, spec, w, w)
    psi_fac, g1_fac = factorized_moments(m, spec, w, w)
    assert psi_full == pytest.approx(psi_fac, rel=1e-12)
    assert g1_full == pytest.approx(g1_fac, rel=1e-12)


def test_long_pulse_factorization_gap_shrinks(bbo_summary):
    om = np.linspace(-1, 1, 9) * bbo_summary.omega_gvd
    w = FourierMode(0.0, 0.0, om)
    gaps = []
    for tau in (100.0, 400.0, 1600.0):
        pump = PumpSpec(0.515, tau, 150.0, 1.0)
        m = QSModel(bbo_summary, pump)
        spec = GridSpec.for_pump(pump, "omega", 16, 8)
        full = coherence_full(m, spec, w, w)
        _, fac = factorized_moments(m, spec, w, w)
        gaps.append(np.max(np.abs(full.real / fac.real - 1)))
    # the factorization error does not depend on τ for diagonal G1
    assert np.allclose(gaps, gaps[0], rtol=1e-6)


def test_spacetime_peak_at_origin(qs):
    s = qs.summary
    fspec = GridSpec((Axis("t", 2048, np.pi / (12 * s.omega_gvd)),))
    pc, ph = spacetime_peaks(qs, fspec)
    pair, inten = spectral_integrands(qs, fspec)
    i0 = fspec.shape[0] // 2
    cell = fspec.axis("t").conj_step / (2 * np.pi)
    assert ph.values[i0] == pytest.approx(np.sum(inten) * cell, rel=1e-12)
    assert pc.values[i0] == pytest.approx(np.sum(pair) * cell, rel=1e-12)
    xi = SpaceTimePoint(0.0, 0.0, 0.0)
    psi, g1 = spacetime_moments(qs, fspec, xi, SpaceTimePoint(0.0, 0.0, 0.0))
    assert g1 == pytest.approx(ph.values[i0], rel=1e-10)
    assert psi == pytest.approx(pc.values[i0], rel=1e-10)


def test_band_check(qs):
    narrow = GridSpec((Axis("t", 64, np.pi / (1.5 * qs.summary.omega_gvd)),))
    with pytest.raises(GridTooCoarse):
        spectral_integrands(qs, narrow)


def test_intensity_correlation_terms(qs, spec):
    w = FourierMode(0.0, 0.0, 0.05)
    shot, auto, cross = intensity_correlation(qs, spec, w, w)
    assert shot > 0 and auto > 0
    shot2, _, cross2 = intensity_correlation(qs, spec, w, FourierMode(0.0, 0.0, -0.05))
    assert shot2 == 0 and cross2 > auto
