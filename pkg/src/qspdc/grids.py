"""Uniform centred grids and the space-time ↔ Fourier transform pair.

Convention (per axis, with w·ξ = x q_x + y q_y − Ω t):

    μ(w) = ∫ dξ/(2π)^d e^{−i w·ξ} F(ξ)
    F(ξ) = ∫ dw e^{+i w·ξ} μ(w)

Sample k of an axis with n points and step d sits at (k − n//2)·d, so the
origin is always a grid point. The conjugate step is 2π/(n d).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .crystal import PumpSpec
from .errors import GridTooCoarse

SPACE_TIME_AXES = ("x", "y", "t")
CONJUGATE = {"x": "qx", "y": "qy", "t": "omega"}
# sign of i in e^{−i w·ξ} along each axis
KERNEL_SIGN = {"x": -1, "y": -1, "t": +1}

DIMS = {
    "omega": ("t",),
    "qx_omega": ("x", "t"),
    "full": ("x", "y", "t"),
}


@dataclass(frozen=True)
class Axis:
    name: str
    n: int
    step: float

    def __post_init__(self):
        if self.name not in SPACE_TIME_AXES:
            raise ValueError(f"axis name must be one of {SPACE_TIME_AXES}")
        if self.n < 2 or not self.step > 0:
            raise ValueError("axis needs n ≥ 2 and a positive step")

    @property
    def coords(self) -> np.ndarray:
        return (np.arange(self.n) - self.n // 2) * self.step

    @property
    def conj_step(self) -> float:
        return 2 * np.pi / (self.n * self.step)

    @property
    def conj_coords(self) -> np.ndarray:
        return (np.arange(self.n) - self.n // 2) * self.conj_step

    @property
    def conj_name(self) -> str:
        return CONJUGATE[self.name]


@dataclass(frozen=True)
class GridSpec:
    """Space-time sampling; Fourier sampling is implied by the FFT."""

    axes: tuple[Axis, ...] = field(default_factory=tuple)

    def __post_init__(self):
        names = [a.name for a in self.axes]
        if len(set(names)) != len(names):
            raise ValueError("duplicate axis")

    @property
    def ndim(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(a.n for a in self.axes)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.axes)

    @property
    def cell(self) -> float:
        return float(np.prod([a.step for a in self.axes]))

    @property
    def conj_cell(self) -> float:
        return float(np.prod([a.conj_step for a in self.axes]))

    def axis(self, name: str) -> Axis:
        for a in self.axes:
            if a.name == name or a.conj_name == name:
                return a
        raise KeyError(name)

    def mesh(self) -> dict[str, np.ndarray]:
        """Space-time coordinates broadcast to the grid shape, keyed x/y/t."""
        grids = np.meshgrid(*[a.coords for a in self.axes], indexing="ij")
        return dict(zip(self.names, grids))

    def conj_mesh(self) -> dict[str, np.ndarray]:
        grids = np.meshgrid(*[a.conj_coords for a in self.axes], indexing="ij")
        return {a.conj_name: g for a, g in zip(self.axes, grids)}

    @classmethod
    def for_pump(cls, pump: PumpSpec, dims: str = "omega", samples_per_width: int = 16,
                 widths: float = 6.0, fast_sizes: bool = True) -> "GridSpec":
        """Grid with ≥ ``samples_per_width`` points per pump 1/e half-width
        and a half-extent of ≥ ``widths`` such widths."""
        axes = []
        for name in DIMS[dims]:
            width = pump.tau_fs if name == "t" else pump.waist_um
            step = width / samples_per_width
            n = int(np.ceil(2 * widths * samples_per_width))
            if fast_sizes:
                n = 1 << int(np.ceil(np.log2(n)))
            axes.append(Axis(name, n, step))
        return cls(tuple(axes))


def check_pump_resolution(spec: GridSpec, pump: PumpSpec, min_samples: float = 8.0):
    for a in spec.axes:
        width = pump.tau_fs if a.name == "t" else pump.waist_um
        if width / a.step < min_samples:
            raise GridTooCoarse(
                f"axis {a.name}: {width / a.step:.2f} samples per pump 1/e width (< {min_samples})"
            )


def _ft_axis(arr, ax, step, sign):
    a = np.fft.ifftshift(arr, axes=ax)
    if sign < 0:
        a = np.fft.fft(a, axis=ax)
    else:
        a = np.fft.ifft(a, axis=ax) * arr.shape[ax]
    return np.fft.fftshift(a, axes=ax) * step


def to_fourier(values, spec: GridSpec):
    """μ on the conjugate grid from F on the space-time grid."""
    out = np.asarray(values, dtype=complex)
    for i, a in enumerate(spec.axes):
        out = _ft_axis(out, i, a.step / (2 * np.pi), KERNEL_SIGN[a.name])
    return out


def to_spacetime(values, spec: GridSpec):
    """Inverse of :func:`to_fourier`."""
    out = np.asarray(values, dtype=complex)
    for i, a in enumerate(spec.axes):
        out = _ft_axis(out, i, a.conj_step, -KERNEL_SIGN[a.name])
    return out


def direct_transform(values, spec: GridSpec, points: dict[str, np.ndarray], chunk: int = 4096):
    """∫dξ/(2π)^d e^{−i w·ξ} F(ξ) at arbitrary Fourier points by direct summation.

    ``points`` maps conjugate axis names (qx, qy, omega) to equal-shape arrays.
    """
    mesh = spec.mesh()
    vals = np.asarray(values, dtype=complex).ravel()
    coords = [mesh[a.name].ravel() for a in spec.axes]
    shape = np.broadcast(*[np.asarray(points.get(a.conj_name, 0.0)) for a in spec.axes]).shape
    pts = [np.broadcast_to(np.asarray(points.get(a.conj_name, 0.0), dtype=float), shape).ravel()
           for a in spec.axes]
    signs = [KERNEL_SIGN[a.name] for a in spec.axes]
    out = np.empty(len(pts[0]) if pts else 1, dtype=complex)
    norm = spec.cell / (2 * np.pi) ** spec.ndim
    for s in range(0, out.size, chunk):
        phase = np.zeros((min(chunk, out.size - s), vals.size))
        for c, p, sg in zip(coords, pts, signs):
            phase += sg * np.outer(p[s:s + chunk], c)
        out[s:s + chunk] = np.exp(1j * phase) @ vals * norm
    return out.reshape(shape)


def parseval_gap(values, spec: GridSpec) -> float:
    """Relative gap between ∫|F|²dξ/(2π)^d and ∫|μ|²dw."""
    f = np.asarray(values, dtype=complex)
    mu = to_fourier(f, spec)
    lhs = np.sum(np.abs(f) ** 2) * spec.cell / (2 * np.pi) ** spec.ndim
    rhs = np.sum(np.abs(mu) ** 2) * spec.conj_cell
    return abs(lhs - rhs) / max(abs(lhs), 1e-300)


@dataclass
class FieldGrid:
    """Complex samples on a grid; ``domain`` is "spacetime" or "fourier"."""

    spec: GridSpec
    values: np.ndarray
    domain: str = "spacetime"

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != self.spec.shape:
            raise ValueError(f"values shape {self.values.shape} != grid shape {self.spec.shape}")
        if self.domain not in ("spacetime", "fourier"):
            raise ValueError("domain must be 'spacetime' or 'fourier'")

    def coords(self) -> dict[str, np.ndarray]:
        return self.spec.mesh() if self.domain == "spacetime" else self.spec.conj_mesh()

    def axis_names(self) -> tuple[str, ...]:
        if self.domain == "spacetime":
            return self.spec.names
        return tuple(a.conj_name for a in self.spec.axes)

    def transformed(self) -> "FieldGrid":
        if self.domain == "spacetime":
            return FieldGrid(self.spec, to_fourier(self.values, self.spec), "fourier")
        return FieldGrid(self.spec, to_spacetime(self.values, self.spec), "spacetime")
