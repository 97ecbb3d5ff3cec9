"""Run configuration: sectioned INI files whose keys carry their units."""

from __future__ import annotations

import configparser
import hashlib
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

from .crystal import BUILTIN_CRYSTALS, CrystalSpec, PumpSpec, collinear_cut_angle, sellmeier_from_list
from .dispersion import TypeIModel
from .errors import ConfigError
from .kernels import QSModel

GRID_PRESETS = {
    "coarse": {"samples_per_width": 8, "widths": 5.0},
    "standard": {"samples_per_width": 16, "widths": 6.0},
    "fine": {"samples_per_width": 32, "widths": 8.0},
}


@dataclass(frozen=True)
class CrystalConfig:
    name: str = "bbo"
    length_um: float = 2000.0
    theta_c_deg: float | None = None  # None: collinear degenerate cut
    sellmeier_form: str = "handbook"
    sellmeier_o: tuple[float, ...] | None = None
    sellmeier_e: tuple[float, ...] | None = None
    window_um: tuple[float, float] = (0.189, 3.5)
    exact_pump: bool = False

    def build(self) -> CrystalSpec:
        if self.sellmeier_o is not None or self.sellmeier_e is not None:
            if self.sellmeier_o is None or self.sellmeier_e is None:
                raise ConfigError("[crystal] needs both sellmeier_o and sellmeier_e")
            o = sellmeier_from_list(self.sellmeier_form, self.sellmeier_o, self.window_um)
            e = sellmeier_from_list(self.sellmeier_form, self.sellmeier_e, self.window_um)
            crystal = CrystalSpec(self.name, o, e, self.length_um)
        elif self.name.lower() in BUILTIN_CRYSTALS:
            crystal = BUILTIN_CRYSTALS[self.name.lower()](self.length_um)
        else:
            raise ConfigError(f"[crystal] name {self.name!r} is not built in and no Sellmeier set is given")
        if self.theta_c_deg is not None:
            crystal = crystal.with_cut(math.radians(self.theta_c_deg))
        return crystal


@dataclass(frozen=True)
class PumpConfig:
    lambda_p_um: float
    tau_p_fs: float
    w_p_um: float
    gain: float

    def build(self) -> PumpSpec:
        return PumpSpec(self.lambda_p_um, self.tau_p_fs, self.w_p_um, self.gain)


@dataclass(frozen=True)
class GridConfig:
    preset: str = "standard"
    dims: str = "omega"
    samples_per_width: int = 16
    widths: float = 6.0
    spectrum_points: int = 201
    spectrum_span_gvd: float = 4.0


@dataclass(frozen=True)
class SpeckleConfig:
    shots: int = 10000
    workers: int = 4
    band_gvd: float = 4.0
    window_tau: float = 20.0
    pixel_modes: int = 8
    pixel_centre_gvd: float = 1.0
    transfer: str = "dense"
    gains: tuple[float, ...] = (0.5, 1.0, 2.0, 4.0)
    dump_shots: int = 0


@dataclass(frozen=True)
class RunConfig:
    crystal: CrystalConfig
    pump: PumpConfig
    grid: GridConfig = field(default_factory=GridConfig)
    speckle: SpeckleConfig = field(default_factory=SpeckleConfig)
    gains: tuple[float, ...] = (0.01, 0.5, 1.0, 2.0, 4.0, 6.0)
    seed: int = 1
    out_dir: str = "out"

    def crystal_spec(self) -> CrystalSpec:
        crystal = self.crystal.build()
        if crystal.cut_angle is None:
            crystal = crystal.with_cut(collinear_cut_angle(crystal, self.pump.lambda_p_um))
        return crystal

    def dispersion(self) -> TypeIModel:
        return TypeIModel(self.crystal_spec(), self.pump.lambda_p_um, exact_pump=self.crystal.exact_pump)

    def qs_model(self, full_mismatch: bool = False) -> QSModel:
        disp = self.dispersion()
        return QSModel(disp.summary(), self.pump.build(), disp if full_mismatch else None)

    def canonical(self) -> str:
        """Sorted ``section.key=value`` lines; the basis of :meth:`digest`."""
        lines = []
        for section, values in sorted(asdict(self).items()):
            if isinstance(values, dict):
                for k, v in sorted(values.items()):
                    lines.append(f"{section}.{k}={v!r}")
            else:
                lines.append(f"{section}={values!r}")
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()


PRESETS: dict[str, dict[str, dict[str, str]]] = {
    "bbo_1030_collinear": {
        "crystal": {"name": "bbo", "length_um": "2000", "theta_c_deg": "auto"},
        "pump": {"lambda_p_um": "0.515", "tau_p_fs": "150", "w_p_um": "150", "gain": "1.0"},
    },
    "bbo_704_352": {
        "crystal": {"name": "bbo", "length_um": "2000", "theta_c_deg": "auto"},
        "pump": {"lambda_p_um": "0.352", "tau_p_fs": "150", "w_p_um": "150", "gain": "1.0"},
    },
}

# section -> key -> (parser, required)
_FLOAT = float
_INT = int


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.replace(";", ",").split(",") if v.strip())


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _angle(text: str):
    return None if text.strip().lower() == "auto" else float(text)


SCHEMA = {
    "crystal": {
        "name": (str, False), "length_um": (_FLOAT, False), "theta_c_deg": (_angle, False),
        "sellmeier_form": (str, False), "sellmeier_o": (_floats, False), "sellmeier_e": (_floats, False),
        "window_um": (_floats, False), "exact_pump": (_bool, False),
    },
    "pump": {
        "lambda_p_um": (_FLOAT, True), "tau_p_fs": (_FLOAT, True), "w_p_um": (_FLOAT, True),
        "gain": (_FLOAT, True),
    },
    "grid": {
        "preset": (str, False), "dims": (str, False), "samples_per_width": (_INT, False),
        "widths": (_FLOAT, False), "spectrum_points": (_INT, False), "spectrum_span_gvd": (_FLOAT, False),
    },
    "speckle": {
        "shots": (_INT, False), "workers": (_INT, False), "band_gvd": (_FLOAT, False),
        "window_tau": (_FLOAT, False), "pixel_modes": (_INT, False), "pixel_centre_gvd": (_FLOAT, False),
        "transfer": (str, False), "gains": (_floats, False), "dump_shots": (_INT, False),
    },
    "sweep": {"gains": (_floats, False)},
    "run": {"seed": (_INT, False), "out_dir": (str, False)},
}


def _parse_sections(sections: dict[str, dict[str, str]]) -> dict[str, dict]:
    out: dict[str, dict] = {}
    for section, values in sections.items():
        if section not in SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        parsed = {}
        for key, raw in values.items():
            if key not in SCHEMA[section]:
                raise ConfigError(f"unknown key {key!r} in [{section}]")
            conv, _ = SCHEMA[section][key]
            try:
                parsed[key] = conv(raw)
            except ValueError as exc:
                raise ConfigError(f"[{section}] {key}: {exc}") from None
        out[section] = parsed
    for section, keys in SCHEMA.items():
        for key, (_, required) in keys.items():
            if required and key not in out.get(section, {}):
                raise ConfigError(f"missing required key {key!r} in [{section}]")
    return out


def _merge(base: dict[str, dict[str, str]], over: dict[str, dict[str, str]]):
    merged = {s: dict(v) for s, v in base.items()}
    for s, v in over.items():
        merged.setdefault(s, {}).update(v)
    return merged


def read_sections(path: str | Path) -> dict[str, dict[str, str]]:
    parser = configparser.ConfigParser(interpolation=None, strict=True)
    parser.optionxform = str
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return {s: dict(parser.items(s)) for s in parser.sections()}


def build_config(sections: dict[str, dict[str, str]]) -> RunConfig:
    p = _parse_sections(sections)
    crystal = p.get("crystal", {})
    if "window_um" in crystal:
        if len(crystal["window_um"]) != 2:
            raise ConfigError("[crystal] window_um needs two values")
    try:
        crystal_cfg = CrystalConfig(**crystal)
        pump_cfg = PumpConfig(**p["pump"])
        pump_cfg.build()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    grid = dict(p.get("grid", {}))
    preset = grid.get("preset", "standard")
    if preset not in GRID_PRESETS:
        raise ConfigError(f"[grid] unknown preset {preset!r}; choose from {sorted(GRID_PRESETS)}")
    grid = {**GRID_PRESETS[preset], **grid}
    if grid.get("dims", "omega") not in ("omega", "qx_omega", "full"):
        raise ConfigError("[grid] dims must be omega, qx_omega or full")
    sp = p.get("speckle", {})
    if sp.get("transfer", "dense") not in ("dense", "factorized"):
        raise ConfigError("[speckle] transfer must be dense or factorized")
    run = p.get("run", {})
    kwargs = {}
    if "gains" in p.get("sweep", {}):
        kwargs["gains"] = p["sweep"]["gains"]
    return RunConfig(crystal_cfg, pump_cfg, GridConfig(**grid), SpeckleConfig(**sp), seed=run.get("seed", 1),
                     out_dir=run.get("out_dir", "out"), **kwargs)


def load_config(path: str | Path | None = None, preset: str | None = None) -> RunConfig:
    """Config from a preset, a file, or a file layered over a preset."""
    if path is None and preset is None:
        raise ConfigError("give a config file or a preset")
    base = {}
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
        base = PRESETS[preset]
    over = read_sections(path) if path is not None else {}
    return build_config(_merge(base, over))


def with_overrides(cfg: RunConfig, seed: int | None = None, shots: int | None = None,
                   grid: str | None = None, out_dir: str | None = None) -> RunConfig:
    if seed is not None:
        cfg = replace(cfg, seed=seed)
    if shots is not None:
        cfg = replace(cfg, speckle=replace(cfg.speckle, shots=shots))
    if grid is not None:
        if grid not in GRID_PRESETS:
            raise ConfigError(f"unknown grid preset {grid!r}; choose from {sorted(GRID_PRESETS)}")
        cfg = replace(cfg, grid=replace(cfg.grid, preset=grid, **GRID_PRESETS[grid]))
    if out_dir is not None:
        cfg = replace(cfg, out_dir=out_dir)
    return cfg
