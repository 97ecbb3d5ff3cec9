#!/usr/bin/env python3
"""Render the linearised-mismatch and factorization error maps as SVG heatmaps."""
import argparse
from pathlib import Path

import numpy as np

from qspdc.config import load_config
from qspdc.io import heatmap
from qspdc.oracles import ansatz2_error_map, factorization_error_map


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--preset", default="bbo_1030_collinear")
    ap.add_argument("--gain", type=float, default=1.8)
    ap.add_argument("--out", type=Path, default=Path("maps"))
    args = ap.parse_args()

    cfg = load_config(preset=args.preset)
    model = cfg.qs_model().with_gain(args.gain)
    og, tau = model.summary.omega_gvd, model.pump.tau_fs

    emap = ansatz2_error_map(cfg.dispersion(), tau)
    om, om0 = emap.coords
    heatmap(args.out / "ansatz2.svg", om / og, om0 * tau, np.abs(emap.values).T,
            f"|sinc error|, max {emap.max_abs:.3g}", "Omega / Omega_GVD", "Omega0 tau")
    for name, m in zip(("corr", "coh"), factorization_error_map(model)):
        heatmap(args.out / f"factorization_{name}.svg", m.coords[0] / og, m.coords[1] / tau, m.values.T,
                f"{name} factorization error, g = {args.gain:g}, max {m.max_abs:.3g}",
                "Omega / Omega_GVD", "t / tau")
    print(f"wrote maps to {args.out}/")


if __name__ == "__main__":
    main()
