"""Command-line front end.

Exit status: 0 on success, 1 on configuration or I/O errors, 2 when a
validation threshold (or a ``--check`` verification) fails.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from . import io
from .analytics import spectra, widths_vs_gain
from .config import GRID_PRESETS, PRESETS, RunConfig, load_config, with_overrides
from .correlations import coherence_full, mu_peak, spacetime_peaks
from .dispersion import FourierMode
from .errors import ConfigError, IoError, QSPDCError, ValidationFailure
from .grids import Axis, GridSpec
from .kernels import envelope_values
from .oracles import ansatz2_error_map, factorization_error_map
from .validation import run_suite
from . import speckle as sp

EXIT_OK, EXIT_CONFIG, EXIT_VALIDATION = 0, 1, 2


class Run:
    """Output directory plus the manifest being assembled for one subcommand."""

    def __init__(self, cfg: RunConfig, subcommand: str, out_dir: Path):
        self.cfg = cfg
        self.out = out_dir
        self.manifest = io.RunManifest(subcommand, cfg.digest(), cfg.seed)
        try:
            out_dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise IoError(f"cannot create {out_dir}: {exc}") from None

    def path(self, name: str) -> Path:
        return self.out / name

    def keep(self, path: Path) -> Path:
        self.manifest.add(self.out, path)
        return path

    def finish(self, status: str = "ok"):
        self.manifest.status = status
        self.manifest.write(self.out)


def cmd_scales(run: Run):
    s = run.cfg.dispersion().summary()
    d = s.to_dict()
    d["gvm_fs_per_mm"] = s.gvm_fs_per_mm
    run.keep(io.write_json(run.path("scales.json"), d))
    run.keep(io.write_csv(run.path("scales.csv"), ["quantity", "value"], sorted(d.items())))
    print(f"Omega_GVD = {s.omega_gvd:.6g} rad/fs, q_diff = {s.q_diff * 1e3:.6g} /mm, "
          f"GVM = {s.gvm_fs_per_mm:.6g} fs/mm, theta_c = {np.degrees(s.theta_c):.6g} deg")


def _spectral_spec(cfg: RunConfig, model):
    return GridSpec.for_pump(model.pump, "omega", cfg.grid.samples_per_width, cfg.grid.widths)


def cmd_spectrum(run: Run):
    cfg = run.cfg
    m = cfg.qs_model()
    s = m.summary
    n, span = cfg.grid.spectrum_points, cfg.grid.spectrum_span_gvd
    om = np.linspace(-span, span, n) * s.omega_gvd
    spec = _spectral_spec(cfg, m)
    if cfg.grid.dims == "omega":
        g1, psi = spectra(m, spec, FourierMode(0.0, 0.0, om))
        cols = {"omega": om, "omega_over_gvd": om / s.omega_gvd, "G1": np.real(g1),
                "psi_re": np.real(psi), "psi_im": np.imag(psi)}
        io.line_plot(run.path("spectrum.svg"), om / s.omega_gvd,
                     {"G1": np.real(g1) / np.max(np.real(g1)), "|Psi|": np.abs(psi) / np.max(np.abs(psi))},
                     "spectrum at q = 0", "Omega / Omega_GVD", "normalized")
    else:
        q = np.linspace(-span, span, n) * s.q_diff
        qq, oo = np.meshgrid(q, om, indexing="ij")
        g1, psi = spectra(m, spec, FourierMode(qq, 0.0, oo))
        cols = {"qx": qq, "omega": oo, "G1": np.real(g1), "psi_abs": np.abs(psi)}
        io.heatmap(run.path("spectrum.svg"), q / s.q_diff, om / s.omega_gvd, np.real(g1).T,
                   "G1(w, w)", "q_x / q_diff", "Omega / Omega_GVD")
    run.keep(run.path("spectrum.svg"))
    run.keep(io.write_columns_csv(run.path("spectrum.csv"), cols))
    run.keep(io.write_columns(run.path("spectrum.qscol"), cols, {"gain": m.gain}))


def cmd_peaks(run: Run):
    cfg = run.cfg
    m = cfg.qs_model()
    spec = GridSpec.for_pump(m.pump, cfg.grid.dims, cfg.grid.samples_per_width, cfg.grid.widths)
    series = {}
    for kind in ("coh", "corr"):
        grid = mu_peak(m, spec, kind)
        cols = io.columns_from_grid(grid)
        run.keep(io.write_columns_csv(run.path(f"mu_{kind}.csv"), cols))
        run.keep(io.write_columns(run.path(f"mu_{kind}.qscol"), cols, {"gain": m.gain, "kind": kind}))
        if spec.ndim == 1:
            series[f"mu_{kind}"] = grid.values.real / np.max(grid.values.real)
    if series:
        w = spec.axis("t").conj_coords * m.pump.tau_fs
        keep = np.abs(w) <= 8
        run.keep(io.line_plot(run.path("peaks.svg"), w[keep], {k: v[keep] for k, v in series.items()},
                              "correlation and coherence peaks", "w0 tau_p", "normalized"))


def cmd_widths(run: Run):
    cfg = run.cfg
    rows = widths_vs_gain(cfg.qs_model(), cfg.gains)
    out = [(r.g, r.quantity, r.axis, r.analytic, r.numeric, r.rel_gap) for r in rows]
    run.keep(io.write_csv(run.path("widths_vs_gain.csv"),
                          ["g", "quantity", "axis", "analytic", "numeric", "rel_gap"], out))
    g = np.array(cfg.gains)
    env = {q: np.array([r.numeric for r in rows if r.quantity == q]) for q in ("env_coh", "env_corr")}
    run.keep(io.line_plot(run.path("widths_vs_gain.svg"), g, env, "envelope HWHM narrowing", "g", "ratio"))


def cmd_spacetime(run: Run):
    cfg = run.cfg
    m = cfg.qs_model()
    s = m.summary
    band = 12.0
    if cfg.grid.dims == "omega":
        fspec = GridSpec((Axis("t", 2048, np.pi / (band * s.omega_gvd)),))
        pc, ph = spacetime_peaks(m, fspec)
        t = fspec.axis("t").coords
        corr, coh = envelope_values(m.gain, m.pump.amplitude(t=t))
        cols = {"t": t, "P_corr_re": pc.values.real, "P_corr_im": pc.values.imag,
                "P_coh_re": ph.values.real, "P_coh_im": ph.values.imag, "F_corr": corr, "F_coh": coh}
        keep = np.abs(t) <= 3 * m.pump.tau_fs
        run.keep(io.line_plot(run.path("spacetime.svg"), t[keep],
                              {"|P_corr|": np.abs(pc.values[keep]) / np.max(np.abs(pc.values)),
                               "|P_coh|": np.abs(ph.values[keep]) / np.max(np.abs(ph.values)),
                               "F_corr": corr[keep], "F_coh": coh[keep]},
                              "space-time peaks and envelopes", "t [fs]", "normalized"))
    else:
        fspec = GridSpec((Axis("x", 256, np.pi / (band * s.q_diff)), Axis("t", 256, np.pi / (band * s.omega_gvd))))
        pc, ph = spacetime_peaks(m, fspec, check_band=False)
        mesh = fspec.mesh()
        cols = {"x": mesh["x"], "t": mesh["t"], "P_corr_re": pc.values.real, "P_corr_im": pc.values.imag,
                "P_coh_re": ph.values.real, "P_coh_im": ph.values.imag}
        xs, ts = fspec.axis("x").coords, fspec.axis("t").coords
        sx, st = np.abs(xs) <= 8 * np.pi / s.q_diff, np.abs(ts) <= 8 * np.pi / s.omega_gvd
        run.keep(io.heatmap(run.path("spacetime.svg"), xs[sx], ts[st], np.abs(pc.values[np.ix_(sx, st)]).T,
                            "|P_corr(x, t)|", "x [um]", "t [fs]"))
    run.keep(io.write_columns_csv(run.path("spacetime.csv"), cols))
    run.keep(io.write_columns(run.path("spacetime.qscol"), cols, {"gain": m.gain}))


def _write_map(run: Run, name: str, emap, meta: dict):
    c0, c1 = emap.coords
    rows = [[v] + list(r) for v, r in zip(c0, emap.values)]
    run.keep(io.write_csv(run.path(f"{name}.csv"), [f"{emap.axes[0]}\\{emap.axes[1]}"] + [io.fmt(v) for v in c1], rows))
    meta = dict(meta, axes=list(emap.axes), norm=emap.norm, max_abs=emap.max_abs, shape=list(emap.values.shape))
    run.keep(io.write_json(run.path(f"{name}.json"), meta))


def cmd_validate(run: Run):
    cfg = run.cfg
    m = cfg.qs_model()
    disp = cfg.dispersion()
    rows = run_suite(m, disp, cfg.seed)
    for r in rows:
        print(r.line())
    out = []
    for r in rows:
        lo, hi = r.threshold if isinstance(r.threshold, tuple) else (-r.threshold, r.threshold)
        out.append((r.group, r.name, r.measured, lo, hi, r.passed, r.detail))
    run.keep(io.write_csv(run.path("validate.csv"),
                          ["group", "check", "measured", "lower", "upper", "passed", "detail"], out))
    _write_map(run, "ansatz2_map", ansatz2_error_map(disp, m.pump.tau_fs),
               {"quantity": "sinc(D_appr/2) - sinc(D_full/2)", "tau_p_fs": m.pump.tau_fs})
    corr, coh = factorization_error_map(m.with_gain(1.8))
    _write_map(run, "factorization_corr_map", corr, {"quantity": "corr", "g": 1.8})
    _write_map(run, "factorization_coh_map", coh, {"quantity": "coh", "g": 1.8})
    failed = [r for r in rows if not r.passed]
    if failed:
        raise ValidationFailure(f"{len(failed)} of {len(rows)} checks failed: " + ", ".join(r.name for r in failed))
    print(f"all {len(rows)} checks passed")


def cmd_speckle(run: Run):
    cfg = run.cfg
    sc = cfg.speckle
    m = cfg.qs_model()
    s = m.summary
    grid = sp.SpeckleGrid.for_model(m, sc.band_gvd, sc.window_tau)
    build = sp.dense_transfer if sc.transfer == "dense" else sp.factorized_transfer
    sig = sp.band_pixel(grid, sc.pixel_centre_gvd * s.omega_gvd, sc.pixel_modes, "signal")
    idl = sp.mirror_pixel(grid, sig, "idler")
    far = sp.band_pixel(grid, -(sc.pixel_centre_gvd + 1.0) * s.omega_gvd, sc.pixel_modes, "offset")
    pixels = [sig, idl, far]

    tr = build(m, grid)
    ens = sp.run_ensemble(tr, sc.shots, cfg.seed, pixels, workers=sc.workers)
    n_mc, err = ens.spectrum()
    spec = GridSpec.for_pump(m.pump, "omega", 32, 8)
    n_qs = coherence_full(m, spec, FourierMode(0.0, 0.0, grid.omega), FourierMode(0.0, 0.0, grid.omega)).real
    run.keep(io.write_columns_csv(run.path("speckle_spectrum.csv"), {
        "omega": grid.omega, "n_mc": n_mc, "n_err": err, "n_qs": n_qs * grid.d_omega}))

    ref = [n for n in range(grid.n_modes) if abs(grid.omega[n]) <= s.omega_gvd and abs(grid.omega[n]) > 0.2 * s.omega_gvd]
    offs, auto, cross, auto_e, cross_e = sp.correlation_peaks(ens, ref, max_offset=12)
    run.keep(io.write_columns_csv(run.path("speckle_peaks.csv"), {
        "offset": offs, "omega_offset": offs * grid.d_omega, "auto": auto, "auto_err": auto_e,
        "cross": cross, "cross_err": cross_e}))

    nrf_rows = []
    for g in sc.gains:
        tg = build(m.with_gain(g), grid)
        eg = ens if g == m.gain else sp.run_ensemble(tg, sc.shots, cfg.seed, pixels, workers=sc.workers)
        pm = sp.pixel_photon_moments(eg)
        matched, indep = sp.noise_reduction_factor(eg, [("signal", "idler"), ("signal", "offset")])
        nrf_rows.append((g, "matched", matched, sp.nrf_exact(tg, sig.modes, idl.modes), pm.mean[0] + pm.mean[1]))
        nrf_rows.append((g, "independent", indep, sp.nrf_exact(tg, sig.modes, far.modes), pm.mean[0] + pm.mean[2]))
    run.keep(io.write_csv(run.path("speckle_nrf.csv"), ["g", "pair", "nrf_mc", "nrf_exact", "mean_total"], nrf_rows))

    qx, om, img = sp.shot_image(m, cfg.seed, 0)
    run.keep(io.heatmap(run.path("speckle_shot.svg"), qx / s.q_diff, om / s.omega_gvd, img.T,
                        f"single-shot intensity, g = {m.gain:g}", "q_x / q_diff", "Omega / Omega_GVD"))
    for k in range(sc.dump_shots):
        b = sp.sample_shot(cfg.seed, k, tr)
        run.keep(io.write_columns(run.path(f"shots/shot_{k:05d}.qscol"),
                                  {"omega": grid.omega, "re": b.real, "im": b.imag}, {"shot": k, "seed": cfg.seed}))
    for g, pair, mc, ex, tot in nrf_rows:
        print(f"g={g:g} {pair:11s} NRF_mc={mc:.4f} NRF_exact={ex:.4f} <N>={tot:.4g}")


COMMANDS = {
    "scales": cmd_scales,
    "spectrum": cmd_spectrum,
    "peaks": cmd_peaks,
    "widths-vs-gain": cmd_widths,
    "spacetime": cmd_spacetime,
    "validate": cmd_validate,
    "speckle": cmd_speckle,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI run configuration")
    common.add_argument("--preset", choices=sorted(PRESETS), help="built-in configuration (file keys override it)")
    common.add_argument("--out", help="output directory (default: [run] out_dir)")
    common.add_argument("--seed", type=int, help="RNG seed")
    common.add_argument("--shots", type=int, help="Monte-Carlo shot count")
    common.add_argument("--grid", choices=sorted(GRID_PRESETS), help="grid preset")
    common.add_argument("--dump-shots", type=int, default=None, help="write the first N shot fields")
    common.add_argument("--check", action="store_true", help="verify existing outputs against the manifest")
    parser = argparse.ArgumentParser(prog="qspdc", description="Quasi-stationary twin-beam correlation toolkit.")
    parser.add_argument("--version", action="version", version=f"qspdc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def _check_outputs(out: Path) -> int:
    problems = io.verify_manifest(out)
    for p in problems:
        print(f"check: {p}", file=sys.stderr)
    if problems:
        return EXIT_VALIDATION
    print(f"check: all outputs in {out} verify")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.check and args.config is None and args.preset is None:
            return _check_outputs(Path(args.out or "out"))
        cfg = load_config(args.config, args.preset)
        cfg = with_overrides(cfg, seed=args.seed, shots=args.shots, grid=args.grid, out_dir=args.out)
        if args.dump_shots is not None:
            cfg = replace(cfg, speckle=replace(cfg.speckle, dump_shots=args.dump_shots))
        out = Path(cfg.out_dir)
        if args.check:
            return _check_outputs(out)
        run = Run(cfg, args.command, out)
        try:
            COMMANDS[args.command](run)
        except ValidationFailure:
            run.finish("validation-failed")
            raise
        run.finish()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValidationFailure as exc:
        print(f"validation failed: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except IoError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except QSPDCError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
