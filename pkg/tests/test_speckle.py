import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qspdc.errors import EmptyPixel, GridTooCoarse, NegativeEstimate
from qspdc.speckle import (Moments, Pixel, SpeckleGrid, band_pixel, correlation_peaks, dense_transfer,
                           draw_inputs, factorized_transfer, mirror_pixel, noise_reduction_factor,
                           nrf_exact, nrf_with_error, ordering_corrections, pixel_photon_moments, run_ensemble,
                           sample_shot, shot_image, tree_merge, two_mode_squeezer)


@pytest.fixture(scope="module")
def grid(qs):
    return SpeckleGrid.for_model(qs)


@pytest.fixture(scope="module")
def small_grid(qs):
    return SpeckleGrid.for_model(qs, band=2.0, window=12.0)


def test_grid_layout(qs, grid):
    assert grid.n_modes == 400
    om = grid.omega
    assert np.allclose(om + om[grid.mirror(np.arange(grid.n_modes))], 0, atol=1e-15)
    assert grid.t[grid.n_modes // 2] == 0
    assert grid.omega[-1] >= 4 * qs.summary.omega_gvd - grid.d_omega


def test_inputs_have_vacuum_variance():
    z = draw_inputs(3, 0, 2000, 64)
    assert np.mean(np.abs(z) ** 2) == pytest.approx(0.5, rel=0.02)
    assert abs(np.mean(z * z)) < 0.01


def test_inputs_independent_of_sharding():
    a = draw_inputs(5, 0, 10, 16)
    b = np.concatenate([draw_inputs(5, 0, 4, 16), draw_inputs(5, 4, 6, 16)])
    assert np.array_equal(a, b)


def test_zero_gain_is_unitary_dft(qs, small_grid):
    tr = dense_transfer(qs.with_gain(0.0), small_grid)
    assert tr.commutator_defect() < 1e-12
    assert np.max(np.abs(tr.E2)) == 0
    ens = run_ensemble(tr, 4000, seed=1)
    n, err = ens.spectrum()
    assert abs(np.mean(n)) < 4 * np.mean(err) / np.sqrt(small_grid.n_modes)


def test_dense_transfer_needs_resolution(qs):
    coarse = SpeckleGrid(16, 2 * np.pi / (20 * qs.pump.tau_fs))
    with pytest.raises(GridTooCoarse):
        dense_transfer(qs, coarse)


def test_commutator_defect_small_at_moderate_gain(qs, grid):
    assert dense_transfer(qs.with_gain(0.5), grid).commutator_defect() < 5e-3


def test_two_mode_squeezer_photon_statistics():
    g = 0.8
    tr = two_mode_squeezer(g)
    ens = run_ensemble(tr, 100_000, seed=7, pixels=[Pixel("s", [0]), Pixel("i", [1])])
    pm = pixel_photon_moments(ens)
    nbar = np.sinh(g) ** 2
    assert pm.mean == pytest.approx([nbar, nbar], rel=0.02)
    assert pm.cov[0, 0] == pytest.approx(nbar * (nbar + 1), rel=0.05)
    # perfectly correlated twin beams: Var(N_s − N_i) = 0
    assert noise_reduction_factor(ens, [("s", "i")])[0] == pytest.approx(0.0, abs=0.02)
    assert nrf_exact(tr, [0], [1]) == pytest.approx(0.0, abs=1e-12)


def test_pi_phase_flips_sign_of_field(qs, small_grid):
    tr = dense_transfer(qs, small_grid)
    a = sample_shot(9, 3, tr)
    b = sample_shot(9, 3, tr, phase=np.pi)
    assert np.allclose(a, -b, rtol=1e-12, atol=1e-14)


def test_global_phase_invariance_of_statistics(qs, small_grid):
    tr = dense_transfer(qs, small_grid)
    n0, e0 = run_ensemble(tr, 4000, seed=2).spectrum()
    n1, e1 = run_ensemble(tr, 4000, seed=2, phase=0.7).spectrum()
    z = (n0 - n1) / np.sqrt(e0**2 + e1**2)
    assert np.mean(np.abs(z) > 4) < 0.01


def test_bitwise_identical_across_worker_counts(qs, small_grid):
    tr = dense_transfer(qs, small_grid)
    px = [band_pixel(small_grid, 0.05, 4, "s")]
    runs = [run_ensemble(tr, 2500, seed=11, pixels=px, workers=w, chunk=500) for w in (1, 2, 5)]
    for r in runs[1:]:
        assert np.array_equal(r.intensity.mean, runs[0].intensity.mean)
        assert np.array_equal(r.intensity.m2, runs[0].intensity.m2)
        assert np.array_equal(r.pixel_sums.m2, runs[0].pixel_sums.m2)


@settings(max_examples=30)
@given(st.lists(st.integers(2, 40), min_size=1, max_size=7), st.booleans())
def test_chan_merge_matches_full_batch(sizes, full):
    rng = np.random.default_rng(sum(sizes))
    x = rng.normal(size=(sum(sizes), 3)) * [1, 10, 100] + 5
    parts, start = [], 0
    for n in sizes:
        parts.append(Moments.from_samples(x[start:start + n], covariance=full))
        start += n
    merged = tree_merge(parts)
    ref = np.cov(x, rowvar=False)
    assert merged.count == x.shape[0]
    assert np.allclose(merged.mean, x.mean(0), rtol=1e-12)
    assert np.allclose(merged.var, np.diag(ref), rtol=1e-10)
    if full:
        assert np.allclose(merged.cov, ref, rtol=1e-10, atol=1e-10)


def test_ordering_corrections():
    pm = ordering_corrections([3.0, 1.0], [[2.0, 0.5], [0.5, 1.0]], [4, 2])
    assert pm.mean.tolist() == [1.0, 0.0]
    assert pm.cov.tolist() == [[1.0, 0.5], [0.5, 0.5]]
    assert pm.negative == ()
    flagged = ordering_corrections([1.0], [[1.0]], [4])
    assert flagged.negative == (0,) and flagged.mean[0] == -1.0
    with pytest.raises(NegativeEstimate):
        ordering_corrections([1.0], [[1.0]], [4], strict=True)


def test_pixels(small_grid):
    with pytest.raises(EmptyPixel):
        Pixel("none", [])
    p = band_pixel(small_grid, 0.02, 6, "s")
    m = mirror_pixel(small_grid, p, "i")
    assert p.size == m.size == 6
    assert np.allclose(np.sort(small_grid.omega[p.modes]), np.sort(-small_grid.omega[m.modes]))
    with pytest.raises(EmptyPixel):
        band_pixel(small_grid, 0.02, 0)


def test_spectrum_matches_transfer_moments(qs, small_grid):
    tr = dense_transfer(qs.with_gain(1.0), small_grid)
    ens = run_ensemble(tr, 20_000, seed=4, full_covariance=False)
    n, err = ens.spectrum()
    exact = np.real(np.diag(tr.normal_moments()[0]))
    z = (n - exact) / err
    assert np.mean(np.abs(z) <= 3) >= 0.99
    assert abs(np.mean(z)) < 4 / np.sqrt(small_grid.n_modes)


def test_monte_carlo_error_scaling(qs, small_grid):
    tr = dense_transfer(qs.with_gain(1.0), small_grid)
    exact = np.real(np.diag(tr.normal_moments()[0]))
    shots = np.array([1000, 4000, 16000])
    rms = []
    for s in shots:
        errs = [np.sqrt(np.mean((run_ensemble(tr, int(s), seed=k, full_covariance=False).spectrum()[0] - exact) ** 2))
                for k in (21, 22, 23)]
        rms.append(np.mean(errs))
    slope = np.polyfit(np.log(shots), np.log(rms), 1)[0]
    assert -0.6 <= slope <= -0.4


def test_nrf_exact_matches_monte_carlo(qs):
    # spread over seeds at 2e4 shots is about 0.035 at g = 1
    m = qs.with_gain(1.0)
    grid = SpeckleGrid.for_model(m)
    tr = dense_transfer(m, grid)
    s = band_pixel(grid, m.summary.omega_gvd * 0.5, 16, "s")
    i = mirror_pixel(grid, s, "i")
    ens = run_ensemble(tr, 20_000, seed=3, pixels=[s, i], full_covariance=False)
    mc = noise_reduction_factor(ens, [("s", "i")])[0]
    assert mc == pytest.approx(nrf_exact(tr, s.modes, i.modes), abs=0.15)


def test_auto_peak_at_zero_offset_is_squared_coherence(qs, small_grid):
    tr = dense_transfer(qs.with_gain(2.0), small_grid)
    ens = run_ensemble(tr, 10_000, seed=8)
    refs = np.arange(small_grid.n_modes // 2 + 10, small_grid.n_modes // 2 + 20)
    offs, auto, cross, auto_err, _ = correlation_peaks(ens, refs, 4)
    # Gaussian field: Var(|b|²) − ⟨b†b⟩ = |G1|² + |Ψ|² at equal mode
    g1, psi = tr.normal_moments()
    expected = np.mean(np.abs(g1[refs, refs]) ** 2 + np.abs(psi[refs, refs]) ** 2)
    assert auto[offs == 0][0] == pytest.approx(expected, rel=0.1)
    with pytest.raises(ValueError):
        correlation_peaks(run_ensemble(tr, 100, seed=1, full_covariance=False), refs, 4)


def test_factorized_transfer_close_to_dense(qs, small_grid):
    m = qs.with_gain(1.0)
    d = dense_transfer(m, small_grid).E2
    f = factorized_transfer(m, small_grid).E2
    band = np.abs(small_grid.omega) <= m.summary.omega_gvd
    # ⟨b†b⟩ = Σ_m |E2[n,m]|² for vacuum input
    ratio = np.sum(np.abs(f) ** 2, axis=1)[band] / np.sum(np.abs(d) ** 2, axis=1)[band]
    assert np.max(np.abs(ratio - 1)) < 0.05


def test_shot_image_vacuum_and_gain(qs):
    _, _, img0 = shot_image(qs.with_gain(0.0), seed=1, shot_index=0, n=64)
    assert np.mean(img0) == pytest.approx(0.5, rel=0.05)
    qx, om, img = shot_image(qs.with_gain(2.0), seed=1, shot_index=0, n=64)
    assert img.shape == (qx.size, om.size)
    assert np.mean(img) > np.mean(img0)


def test_nrf_batches_pool_to_single_run():
    tr = two_mode_squeezer(0.6)
    px = [Pixel("s", [0]), Pixel("i", [1])]
    pooled, err = nrf_with_error(tr, px, ("s", "i"), 4000, seed=2, batches=4)
    single = noise_reduction_factor(run_ensemble(tr, 4000, 2, px, full_covariance=False), [("s", "i")])[0]
    assert pooled == pytest.approx(single, abs=1e-9)
    assert err >= 0
