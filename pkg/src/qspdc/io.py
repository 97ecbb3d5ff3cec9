"""Artifact writers: CSV, binary column files, JSON manifests and small SVG plots.

Floats are written with ``repr`` (shortest round-trip form), so identical
inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import hashlib
import json
import struct
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .errors import IoError
from .grids import FieldGrid

MANIFEST_NAME = "manifest.json"
MANIFEST_SCHEMA = 1
COLUMN_MAGIC = b"QSCOL1\n"


def fmt(value) -> str:
    if isinstance(value, (str, bytes)):
        return value if isinstance(value, str) else value.decode()
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if value is None:
        return ""
    return repr(float(value))


def write_csv(path: str | Path, header, rows) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([fmt(v) for v in row])
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from None
    return path


def read_csv(path: str | Path):
    with Path(path).open(encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def columns_from_grid(grid: FieldGrid) -> dict[str, np.ndarray]:
    """One entry per sample: axis coordinates then re, im."""
    cols = {name: c.ravel() for name, c in zip(grid.axis_names(), grid.coords().values())}
    cols["re"] = grid.values.real.ravel()
    cols["im"] = grid.values.imag.ravel()
    return cols


def write_columns_csv(path, columns: dict[str, np.ndarray]) -> Path:
    names = list(columns)
    arrays = [np.asarray(columns[n]).ravel() for n in names]
    return write_csv(path, names, zip(*arrays))


def write_grid_csv(path, grid: FieldGrid) -> Path:
    return write_columns_csv(path, columns_from_grid(grid))


def write_columns(path: str | Path, columns: dict[str, np.ndarray], meta: dict | None = None) -> Path:
    """Binary column file: magic, u32 header length, JSON header, then each
    column as contiguous little-endian float64 in header order."""
    path = Path(path)
    names = list(columns)
    arrays = [np.ascontiguousarray(np.asarray(columns[n], dtype="<f8").ravel()) for n in names]
    nrows = {a.size for a in arrays}
    if len(nrows) > 1:
        raise ValueError("columns differ in length")
    header = json.dumps({"columns": names, "dtype": "<f8", "nrows": nrows.pop() if arrays else 0,
                         "meta": meta or {}}, sort_keys=True).encode()
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("wb") as fh:
            fh.write(COLUMN_MAGIC)
            fh.write(struct.pack("<I", len(header)))
            fh.write(header)
            for a in arrays:
                fh.write(a.tobytes())
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from None
    return path


def read_columns(path: str | Path):
    data = Path(path).read_bytes()
    if not data.startswith(COLUMN_MAGIC):
        raise IoError(f"{path} is not a column file")
    off = len(COLUMN_MAGIC)
    (hlen,) = struct.unpack_from("<I", data, off)
    off += 4
    header = json.loads(data[off:off + hlen])
    off += hlen
    n = header["nrows"]
    cols = {}
    for name in header["columns"]:
        cols[name] = np.frombuffer(data, dtype="<f8", count=n, offset=off).copy()
        off += 8 * n
    if off != len(data):
        raise IoError(f"{path}: trailing or missing bytes")
    return cols, header["meta"]


def write_json(path: str | Path, payload) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    with Path(path).open("rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


@dataclass
class RunManifest:
    subcommand: str
    config_hash: str
    seed: int
    files: list[dict] = field(default_factory=list)
    version: str = __version__
    timestamp: str = ""
    status: str = "ok"

    def add(self, out_dir: Path, path: Path):
        rel = path.relative_to(out_dir).as_posix()
        self.files = [f for f in self.files if f["path"] != rel]
        self.files.append({"path": rel, "sha256": sha256_file(path), "bytes": path.stat().st_size})

    def to_dict(self) -> dict:
        return {
            "schema": MANIFEST_SCHEMA,
            "tool": "qspdc",
            "version": self.version,
            "timestamp": self.timestamp or datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "subcommand": self.subcommand,
            "config_sha256": self.config_hash,
            "seed": self.seed,
            "status": self.status,
            "files": sorted(self.files, key=lambda f: f["path"]),
        }

    def write(self, out_dir: Path) -> Path:
        return write_json(Path(out_dir) / MANIFEST_NAME, self.to_dict())


def verify_manifest(out_dir: str | Path) -> list[str]:
    """Problems found re-checking every listed file; empty when all verify."""
    out_dir = Path(out_dir)
    mpath = out_dir / MANIFEST_NAME
    if not mpath.exists():
        return [f"no {MANIFEST_NAME} in {out_dir}"]
    manifest = json.loads(mpath.read_text(encoding="utf-8"))
    problems = []
    for entry in manifest.get("files", []):
        p = out_dir / entry["path"]
        if not p.exists():
            problems.append(f"missing {entry['path']}")
        elif sha256_file(p) != entry["sha256"]:
            problems.append(f"checksum mismatch {entry['path']}")
    return problems


# SVG ----------------------------------------------------------------------------------

_W, _H, _PAD = 640, 420, 56
_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf")


def _n(v: float) -> str:
    return f"{v:.2f}"


def _frame(title, xlabel, ylabel, x0, x1, y0, y1):
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" viewBox="0 0 {_W} {_H}">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
        f'<rect x="{_PAD}" y="{_PAD // 2}" width="{_W - 1.5 * _PAD:.0f}" height="{_H - 1.5 * _PAD:.0f}" '
        'fill="none" stroke="black"/>',
        f'<text x="{_W / 2:.0f}" y="16" text-anchor="middle" font-size="13">{title}</text>',
        f'<text x="{_W / 2:.0f}" y="{_H - 8}" text-anchor="middle" font-size="12">{xlabel}</text>',
        f'<text x="14" y="{_H / 2:.0f}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 14 {_H / 2:.0f})">{ylabel}</text>',
        f'<text x="{_PAD}" y="{_H - _PAD + 14}" font-size="10">{x0:.4g}</text>',
        f'<text x="{_W - _PAD / 2:.0f}" y="{_H - _PAD + 14}" text-anchor="end" font-size="10">{x1:.4g}</text>',
        f'<text x="{_PAD - 4}" y="{_H - _PAD}" text-anchor="end" font-size="10">{y0:.4g}</text>',
        f'<text x="{_PAD - 4}" y="{_PAD // 2 + 10}" text-anchor="end" font-size="10">{y1:.4g}</text>',
    ]
    return parts


def _scale(v, lo, hi, a, b):
    return a + (b - a) * (v - lo) / (hi - lo if hi != lo else 1.0)


def line_plot(path, x, series: dict[str, np.ndarray], title="", xlabel="", ylabel="") -> Path:
    x = np.asarray(x, dtype=float)
    ys = {k: np.asarray(v, dtype=float) for k, v in series.items()}
    finite = np.concatenate([v[np.isfinite(v)] for v in ys.values()])
    y0, y1 = float(finite.min()), float(finite.max())
    x0, x1 = float(x.min()), float(x.max())
    parts = _frame(title, xlabel, ylabel, x0, x1, y0, y1)
    left, right, top, bottom = _PAD, _W - _PAD / 2, _PAD / 2, _H - _PAD
    for i, (name, y) in enumerate(ys.items()):
        pts = " ".join(f"{_n(_scale(a, x0, x1, left, right))},{_n(_scale(b, y0, y1, bottom, top))}"
                       for a, b in zip(x, y) if np.isfinite(b))
        c = _COLORS[i % len(_COLORS)]
        parts.append(f'<polyline fill="none" stroke="{c}" stroke-width="1.5" points="{pts}"/>')
        parts.append(f'<text x="{right - 4:.0f}" y="{top + 14 * (i + 1):.0f}" text-anchor="end" '
                     f'font-size="11" fill="{c}">{name}</text>')
    parts.append("</svg>")
    return _write_svg(path, parts)


def heatmap(path, x, y, z, title="", xlabel="", ylabel="") -> Path:
    """z has shape (len(y), len(x)); grey scale from min (white) to max (black)."""
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    lo, hi = float(np.min(z)), float(np.max(z))
    parts = _frame(title, xlabel, ylabel, x[0], x[-1], y[0], y[-1])
    left, right, top, bottom = _PAD, _W - _PAD / 2, _PAD / 2, _H - _PAD
    cw, ch = (right - left) / len(x), (bottom - top) / len(y)
    for j in range(len(y)):
        for i in range(len(x)):
            level = 255 - int(round(255 * (z[j, i] - lo) / (hi - lo if hi > lo else 1.0)))
            parts.append(f'<rect x="{_n(left + i * cw)}" y="{_n(bottom - (j + 1) * ch)}" width="{_n(cw + 0.05)}" '
                         f'height="{_n(ch + 0.05)}" fill="#{level:02x}{level:02x}{level:02x}"/>')
    parts.append("</svg>")
    return _write_svg(path, parts)


def _write_svg(path, parts) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(parts) + "\n", encoding="utf-8")
    return path
