#!/usr/bin/env python3
"""Regenerate the golden CSVs under tests/golden from the default preset."""
import shutil
import tempfile
from pathlib import Path

from qspdc.cli import main

GOLDEN = Path(__file__).resolve().parent.parent / "tests" / "golden"
RUNS = {"scales": "scales.csv", "widths-vs-gain": "widths_vs_gain.csv"}


def regenerate():
    GOLDEN.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        for command, name in RUNS.items():
            out = Path(tmp) / command
            if main([command, "--preset", "bbo_1030_collinear", "--out", str(out)]) != 0:
                raise SystemExit(f"{command} failed")
            shutil.copyfile(out / name, GOLDEN / name)
            print(f"updated {GOLDEN / name}")


if __name__ == "__main__":
    regenerate()
