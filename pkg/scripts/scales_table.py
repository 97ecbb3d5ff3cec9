#!/usr/bin/env python3
"""Print BBO collinear type-I scales over a range of pump wavelengths."""
import argparse
import math

from qspdc.config import build_config


def summary_at(lambda_p, length_um):
    pump = {"lambda_p_um": str(lambda_p), "tau_p_fs": "150", "w_p_um": "150", "gain": "1"}
    cfg = build_config({"crystal": {"name": "bbo", "length_um": str(length_um)}, "pump": pump})
    return cfg.crystal_spec(), cfg.dispersion().summary()


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--length-um", type=float, default=2000.0)
    ap.add_argument("pumps", nargs="*", type=float, default=[0.352, 0.4, 0.515, 0.6, 0.65])
    args = ap.parse_args()
    print(f"{'lambda_s/um':>11} {'theta/deg':>9} {'GVM fs/mm':>10} {'Omega_GVD Trad/s':>16} {'q_diff /mm':>10}")
    for lp in args.pumps:
        crystal, s = summary_at(lp, args.length_um)
        print(f"{2 * lp:11.3f} {math.degrees(crystal.cut_angle):9.3f} {s.gvm_fs_per_mm:10.2f} "
              f"{s.omega_gvd * 1e3:16.2f} {s.q_diff * 1e3:10.2f}")


if __name__ == "__main__":
    main()
