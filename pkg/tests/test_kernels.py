import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qspdc.crystal import PumpSpec
from qspdc.dispersion import FourierMode, SpaceTimePoint
from qspdc.kernels import QSModel, bogoliubov, envelope_values, kernel_eval, sinh_ratio

dbars = st.floats(-30.0, 30.0)
gains = st.floats(0.0, 4.0)


@given(dbars, gains)
def test_unitarity(d, ga):
    f1, f2, _ = bogoliubov(d, ga)
    assert abs(abs(f1) ** 2 - abs(f2) ** 2 - 1) < 1e-12


@given(dbars, gains)
def test_kernel_parity(d, ga):
    # F1(−D̄) = F1(D̄)*, F2 even in D̄
    f1, f2, _ = bogoliubov(d, ga)
    g1, g2, _ = bogoliubov(-d, ga)
    assert g1 == pytest.approx(np.conj(f1), abs=1e-12)
    assert g2 == pytest.approx(f2, abs=1e-12)


@given(gains)
def test_phase_matched_limit(ga):
    f1, f2, z = bogoliubov(0.0, ga)
    assert f1 == pytest.approx(np.cosh(ga), rel=1e-13)
    assert f2 == pytest.approx(np.sinh(ga), rel=1e-13, abs=1e-300)
    assert z == pytest.approx(ga * ga)


@given(dbars)
def test_zero_gain(d):
    f1, f2, _ = bogoliubov(d, 0.0)
    assert f1 == pytest.approx(np.exp(0.5j * d), abs=1e-13)
    assert f2 == 0


def test_both_gamma_signs_present():
    d = np.array([0.0, 10.0])
    _, _, z = bogoliubov(d, 1.0)
    assert z[0].real > 0 > z[1].real


@given(st.floats(0.0, 1.0), st.floats(1e-6, 5000.0))
def test_sinh_ratio_stable(frac, b):
    a = frac * b
    r = sinh_ratio(a, b)
    assert np.isfinite(r) and 0.0 <= r <= 1.0
    if b < 300:
        assert r == pytest.approx(np.sinh(a) / np.sinh(b), rel=1e-10, abs=1e-300)


@given(st.floats(0.0, 50.0), st.floats(0.0, 1.0))
def test_envelopes_bounded_and_ordered(g, a):
    corr, coh = envelope_values(g, a)
    assert 0.0 <= coh <= corr * (1 + 1e-12) and corr <= 1.0 + 1e-15
    assert envelope_values(g, 1.0)[0] == pytest.approx(1.0)


def test_envelopes_zero_gain_limit():
    a = np.linspace(0, 1, 5)
    corr, coh = envelope_values(0.0, a)
    assert np.allclose(corr, a) and np.allclose(coh, a * a)
    c2, h2 = envelope_values(1e-7, a)
    assert np.allclose(c2, a, atol=1e-12) and np.allclose(h2, a * a, atol=1e-12)


def test_qs_model_uses_taylor_by_default(bbo_summary, pump, bbo_model):
    m = QSModel(bbo_summary, pump)
    w = FourierMode(0.02, 0.0, 0.05)
    assert m.dbar(w) == pytest.approx(bbo_summary.delta0 + (0.05 / bbo_summary.omega_gvd) ** 2
                                      - (0.02 / bbo_summary.q_diff) ** 2)
    full = QSModel(bbo_summary, pump, bbo_model)
    assert full.dbar(w) == bbo_model.mismatch_pair(w)


def test_kernel_eval_record(bbo_summary):
    p = PumpSpec(0.515, 100.0, 100.0, 2.0)
    kv = kernel_eval(bbo_summary, p, FourierMode(0.0, 0.0, 0.03), SpaceTimePoint(10.0, 0.0, 20.0))
    assert abs(kv.unitarity_defect) < 1e-13
    alpha = p.amplitude(10.0, 0.0, 20.0)
    assert kv.F2 == pytest.approx(bogoliubov(QSModel(bbo_summary, p).dbar(FourierMode(0.0, 0.0, 0.03)),
                                             2.0 * alpha)[1])
