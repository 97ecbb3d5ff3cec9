"""Wigner-representation Monte Carlo of the output field.

Each shot draws complex white noise ζ on the space-time grid with
E|ζ|² = 1/2 (vacuum in symmetric ordering) and maps it through the
discretized input-output relation

    b_n = Σ_m E1[n,m] ζ_m + E2[n,m] ζ_m*,
    E_j[n,m] = e^{iΩ_n t_m} F_j(Ω_n, t_m)/√N,

where b_n = √dΩ A(Ω_n). At zero gain E1 is a unitary DFT. Photon-counting
moments follow from the Wigner moments by ordering corrections.

Random streams are keyed by (seed, shot index) with a Philox counter
generator, so the sample set does not depend on how shots are sharded.
Accumulators are merged pairwise along a fixed tree over fixed-size chunks,
so results are bitwise reproducible for any worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dispersion import FourierMode
from .errors import EmptyPixel, GridTooCoarse, NegativeEstimate
from .grids import Axis, GridSpec, check_pump_resolution, to_fourier
from .kernels import QSModel, bogoliubov

_CHUNK = 1000


@dataclass(frozen=True)
class SpeckleGrid:
    """Ω grid Ω_n = (n − (N−1)/2) dΩ (mirror of n is N−1−n) and its time grid."""

    n_modes: int
    d_omega: float

    @property
    def omega(self) -> np.ndarray:
        return (np.arange(self.n_modes) - (self.n_modes - 1) / 2) * self.d_omega

    @property
    def dt(self) -> float:
        return 2 * np.pi / (self.n_modes * self.d_omega)

    @property
    def t(self) -> np.ndarray:
        return (np.arange(self.n_modes) - self.n_modes // 2) * self.dt

    def mirror(self, idx):
        return self.n_modes - 1 - np.asarray(idx)

    def index_of(self, omega: float) -> int:
        return int(np.argmin(np.abs(self.omega - omega)))

    @classmethod
    def for_model(cls, model: QSModel, band: float = 4.0, window: float = 20.0, even: bool = True):
        """dΩ = 2π/(window·τ); N covers ±band·Ω_GVD."""
        d_omega = 2 * np.pi / (window * model.pump.tau_fs)
        n = int(np.ceil(2 * band * model.summary.omega_gvd / d_omega))
        if even and n % 2:
            n += 1
        return cls(n, d_omega)


@dataclass
class Transfer:
    grid: SpeckleGrid
    E1: np.ndarray
    E2: np.ndarray

    def apply(self, zeta):
        """b for a batch of inputs ζ with shape (shots, N)."""
        return zeta @ self.E1.T + np.conj(zeta) @ self.E2.T

    def wigner_second_moments(self):
        """(E[b_a* b_b], E[b_a b_b]) of the Wigner field."""
        s = 0.5 * (self.E1.conj() @ self.E1.T + self.E2.conj() @ self.E2.T)
        p = 0.5 * (self.E1 @ self.E2.T + self.E2 @ self.E1.T)
        return s, p

    def normal_moments(self):
        """Discrete (G1, Ψ) as ⟨b_a† b_b⟩ and ⟨b_a b_b⟩ (dΩ times the densities)."""
        s, p = self.wigner_second_moments()
        return s - 0.5 * np.eye(self.grid.n_modes), p

    def commutator_defect(self) -> float:
        n = self.grid.n_modes
        return float(np.max(np.abs(self.E1 @ self.E1.conj().T - self.E2 @ self.E2.conj().T - np.eye(n))))


def dense_transfer(model: QSModel, grid: SpeckleGrid, min_samples: float = 8.0) -> Transfer:
    if model.pump.tau_fs / grid.dt < min_samples:
        raise GridTooCoarse(f"{model.pump.tau_fs / grid.dt:.2f} samples per pump width (< {min_samples})")
    om, t = grid.omega, grid.t
    d = model.dbar(FourierMode(0.0, 0.0, om))[:, None]
    ga = model.gain * model.pump.amplitude(t=t)[None, :]
    f1, f2, _ = bogoliubov(d, ga)
    ph = np.exp(1j * np.outer(om, t)) / np.sqrt(grid.n_modes)
    return Transfer(grid, ph * f1, ph * f2)


def factorized_transfer(model: QSModel, grid: SpeckleGrid) -> Transfer:
    """F_j(w,ξ) ≈ F_j(w,0)·r_j(ξ), r1 = cosh(gα)/cosh g, r2 = sinh(gα)/sinh g."""
    g = model.gain
    om, t = grid.omega, grid.t
    alpha = model.pump.amplitude(t=t)
    p1, p2, _ = bogoliubov(model.dbar(FourierMode(0.0, 0.0, om)), g)
    if g == 0:
        r1, r2 = np.ones_like(alpha), alpha
    else:
        r1 = np.cosh(g * alpha) / np.cosh(g)
        r2 = np.sinh(g * alpha) / np.sinh(g)
    ph = np.exp(1j * np.outer(om, t)) / np.sqrt(grid.n_modes)
    return Transfer(grid, ph * p1[:, None] * r1[None, :], ph * p2[:, None] * r2[None, :])


def two_mode_squeezer(g: float) -> Transfer:
    """Ideal two-mode squeezer on modes (0, 1): b0 = cosh g ζ0 + sinh g ζ1*."""
    e1 = np.cosh(g) * np.eye(2, dtype=complex)
    e2 = np.sinh(g) * np.array([[0, 1], [1, 0]], dtype=complex)
    return Transfer(SpeckleGrid(2, 1.0), e1, e2)


def shot_image(model: QSModel, seed: int, shot_index: int, n: int = 128, span: float = 4.0):
    """Single-shot intensity |b(q_x, Ω)|² from the factorized kernels via FFT.

    The mode grid covers ±span·q_diff and ±span·Ω_GVD with n points per axis.
    Returns (q_x, Ω, intensity) with intensity[i, j] at (q_x[i], Ω[j]).
    """
    s = model.summary
    spec = GridSpec((Axis("x", n, np.pi / (span * s.q_diff)), Axis("t", n, np.pi / (span * s.omega_gvd))))
    check_pump_resolution(spec, model.pump)
    mesh, cm = spec.mesh(), spec.conj_mesh()
    g = model.gain
    alpha = model.pump.amplitude(x=mesh["x"], t=mesh["t"])
    if g == 0:
        r1, r2 = np.ones_like(alpha), alpha
    else:
        r1 = np.cosh(g * alpha) / np.cosh(g)
        r2 = np.sinh(g * alpha) / np.sinh(g)
    p1, p2, _ = bogoliubov(model.dbar(FourierMode(cm["qx"], 0.0, cm["omega"])), g)
    zeta = draw_inputs(seed, shot_index, 1, n * n)[0].reshape(n, n)
    norm = (2 * np.pi) ** 2 / (spec.cell * n)  # unitary DFT scaling
    b = norm * (p1 * to_fourier(r1 * zeta, spec) + p2 * to_fourier(r2 * np.conj(zeta), spec))
    return spec.axis("x").conj_coords, spec.axis("t").conj_coords, np.abs(b) ** 2


def draw_inputs(seed: int, first_shot: int, n_shots: int, n_modes: int, phase: float = 0.0):
    """ζ with E|ζ|² = 1/2, one Philox stream per shot index."""
    out = np.empty((n_shots, n_modes), dtype=complex)
    for i in range(n_shots):
        bg = np.random.Philox(key=int(seed), counter=[0, 0, 0, first_shot + i])
        z = np.random.Generator(bg).standard_normal(2 * n_modes)
        out[i] = (z[:n_modes] + 1j * z[n_modes:]) * 0.5
    if phase:
        out *= np.exp(1j * phase)
    return out


def sample_shot(seed: int, shot_index: int, transfer: Transfer, phase: float = 0.0):
    """Output field b_n = √dΩ A(Ω_n) for one shot."""
    zeta = draw_inputs(seed, shot_index, 1, transfer.grid.n_modes, phase)
    return transfer.apply(zeta)[0]


@dataclass
class Moments:
    """Running count, mean and centred second moment (Chan et al. merge)."""

    count: int
    mean: np.ndarray
    m2: np.ndarray | None

    @classmethod
    def from_samples(cls, x, covariance: bool = True):
        mean = x.mean(axis=0)
        if covariance:
            c = x - mean
            m2 = c.T @ c
        else:
            m2 = np.sum((x - mean) ** 2, axis=0)
        return cls(x.shape[0], mean, m2)

    def merge(self, other: "Moments") -> "Moments":
        n = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * (other.count / n)
        f = self.count * other.count / n
        if self.m2.ndim == 2:
            m2 = self.m2 + other.m2 + np.outer(delta, delta) * f
        else:
            m2 = self.m2 + other.m2 + delta * delta * f
        return Moments(n, mean, m2)

    @property
    def cov(self):
        return self.m2 / (self.count - 1)

    @property
    def var(self):
        return np.diag(self.m2) / (self.count - 1) if self.m2.ndim == 2 else self.m2 / (self.count - 1)


def tree_merge(parts: list[Moments]) -> Moments:
    while len(parts) > 1:
        nxt = [parts[i].merge(parts[i + 1]) for i in range(0, len(parts) - 1, 2)]
        if len(parts) % 2:
            nxt.append(parts[-1])
        parts = nxt
    return parts[0]


@dataclass
class Pixel:
    """Set of mode indices summed into one detector pixel."""

    name: str
    modes: np.ndarray

    def __post_init__(self):
        self.modes = np.asarray(self.modes, dtype=int)
        if self.modes.size == 0:
            raise EmptyPixel(f"pixel {self.name!r} captures no modes")

    @property
    def size(self) -> int:
        return int(self.modes.size)


def band_pixel(grid: SpeckleGrid, centre: float, width_modes: int, name: str = "") -> Pixel:
    """``width_modes`` contiguous modes starting at the mode nearest ``centre``
    and extending towards larger Ω."""
    i0 = grid.index_of(centre) - width_modes // 2
    idx = np.arange(i0, i0 + width_modes)
    idx = idx[(idx >= 0) & (idx < grid.n_modes)]
    return Pixel(name or f"px@{centre:.4g}", idx)


def mirror_pixel(grid: SpeckleGrid, pixel: Pixel, name: str = "") -> Pixel:
    return Pixel(name or f"mirror({pixel.name})", np.sort(grid.mirror(pixel.modes)))


@dataclass
class ShotEnsemble:
    grid: SpeckleGrid
    shots: int
    seed: int
    intensity: Moments
    pixels: list[Pixel] = field(default_factory=list)
    pixel_sums: Moments | None = None
    vacuum_mean: float = 0.5
    chunk: int = _CHUNK

    def spectrum(self):
        """Ordering-corrected mean occupation ⟨b†b⟩ per mode and its standard error."""
        return self.intensity.mean - self.vacuum_mean, np.sqrt(self.intensity.var / self.shots)

    def pixel_index(self, name: str) -> int:
        for i, p in enumerate(self.pixels):
            if p.name == name:
                return i
        raise KeyError(name)


def _chunk_moments(transfer, seed, start, n, pixels, full_cov, phase):
    zeta = draw_inputs(seed, start, n, transfer.grid.n_modes, phase)
    inten = np.abs(transfer.apply(zeta)) ** 2
    mi = Moments.from_samples(inten, covariance=full_cov)
    mp = None
    if pixels:
        sums = np.stack([inten[:, p.modes].sum(axis=1) for p in pixels], axis=1)
        mp = Moments.from_samples(sums, covariance=True)
    return mi, mp


def run_ensemble(transfer: Transfer, shots: int, seed: int, pixels: list[Pixel] | None = None,
                 workers: int = 4, chunk: int = _CHUNK, full_covariance: bool = True,
                 phase: float = 0.0, first_shot: int = 0) -> ShotEnsemble:
    """Accumulate intensity and pixel-sum moments over shots first_shot … first_shot + shots − 1."""
    pixels = list(pixels or [])
    starts = list(range(first_shot, first_shot + shots, chunk))
    sizes = [min(chunk, first_shot + shots - s) for s in starts]

    def job(k):
        return _chunk_moments(transfer, seed, starts[k], sizes[k], pixels, full_covariance, phase)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(job, range(len(starts))))
    else:
        results = [job(k) for k in range(len(starts))]
    inten = tree_merge([r[0] for r in results])
    psums = tree_merge([r[1] for r in results]) if pixels else None
    return ShotEnsemble(transfer.grid, shots, seed, inten, pixels, psums, chunk=chunk)


@dataclass(frozen=True)
class PhotonMoments:
    mean: np.ndarray
    cov: np.ndarray
    negative: tuple[int, ...] = ()


def ordering_corrections(mean_w, cov_w, sizes, strict: bool = False) -> PhotonMoments:
    """Normal-ordered photon-number moments of disjoint pixels from Wigner moments.

    ⟨N⟩ = E_W[S] − K/2, Var N = Var_W(S) − K/4, Cov(N_a, N_b) = Cov_W(S_a, S_b)
    for pixel sums S over K modes each. Negative means are flagged, not clamped.
    """
    k = np.asarray(sizes, dtype=float)
    mean = np.asarray(mean_w, dtype=float) - k / 2
    cov = np.array(cov_w, dtype=float, copy=True)
    cov[np.diag_indices_from(cov)] -= k / 4
    neg = tuple(int(i) for i in np.nonzero(mean < 0)[0])
    if neg and strict:
        raise NegativeEstimate(f"negative photon-number estimate for pixels {neg}")
    return PhotonMoments(mean, cov, neg)


def pixel_photon_moments(ensemble: ShotEnsemble, strict: bool = False) -> PhotonMoments:
    return ordering_corrections(ensemble.pixel_sums.mean, ensemble.pixel_sums.cov,
                                [p.size for p in ensemble.pixels], strict)


def noise_reduction_factor(ensemble: ShotEnsemble, pairs) -> list[float]:
    """Var(N_s − N_i)/⟨N_s + N_i⟩ for each (signal, idler) pixel-name pair."""
    pm = pixel_photon_moments(ensemble)
    out = []
    for s_name, i_name in pairs:
        s, i = ensemble.pixel_index(s_name), ensemble.pixel_index(i_name)
        var = pm.cov[s, s] + pm.cov[i, i] - 2 * pm.cov[s, i]
        out.append(float(var / (pm.mean[s] + pm.mean[i])))
    return out


def nrf_with_error(transfer: Transfer, pixels: list[Pixel], pair, shots: int, seed: int,
                   batches: int = 10, workers: int = 4) -> tuple[float, float]:
    """NRF over all shots and its standard error from the spread of batch estimates."""
    size = shots // batches
    parts = [run_ensemble(transfer, size, seed, pixels, workers=workers, full_covariance=False,
                          first_shot=k * size) for k in range(batches)]
    each = [noise_reduction_factor(e, [pair])[0] for e in parts]
    pooled = ShotEnsemble(transfer.grid, size * batches, seed, tree_merge([e.intensity for e in parts]),
                          pixels, tree_merge([e.pixel_sums for e in parts]))
    return noise_reduction_factor(pooled, [pair])[0], float(np.std(each, ddof=1) / np.sqrt(batches))


def nrf_exact(transfer: Transfer, s_modes, i_modes) -> float:
    """NRF from the Gaussian moment theorem applied to the discrete transfer."""
    s, p = transfer.wigner_second_moments()
    c = np.abs(s) ** 2 + np.abs(p) ** 2
    n = transfer.grid.n_modes
    wv = np.zeros(n)
    wv[np.asarray(s_modes)] += 1
    wv[np.asarray(i_modes)] -= 1
    k = len(s_modes) + len(i_modes)
    mean = np.real(np.diag(s))
    num = wv @ c @ wv - k / 4
    den = mean[np.asarray(s_modes)].sum() + mean[np.asarray(i_modes)].sum() - k / 2
    return float(num / den)


def correlation_peaks(ensemble: ShotEnsemble, ref_modes, max_offset: int):
    """Auto and cross intensity covariance profiles along w′ = w + w0 and w′ = −w + w0.

    Averaged over ``ref_modes``. Returns (offsets, auto, cross, auto_err, cross_err),
    the errors being the spread over reference modes divided by √(#refs).
    """
    if ensemble.intensity.m2.ndim != 2:
        raise ValueError("ensemble lacks the full intensity covariance")
    cov = ensemble.intensity.cov
    grid = ensemble.grid
    offs = np.arange(-max_offset, max_offset + 1)
    auto, cross = [], []
    for n in ref_modes:
        a = cov[n, np.clip(n + offs, 0, grid.n_modes - 1)].copy()
        a[offs == 0] = cov[n, n] - ensemble.intensity.mean[n] + 0.25  # Var_W − (n+½) + ¼ = |G1|²
        auto.append(a)
        cross.append(cov[n, np.clip(grid.mirror(n) + offs, 0, grid.n_modes - 1)])
    auto, cross = np.array(auto), np.array(cross)
    r = np.sqrt(len(ref_modes))
    return offs, auto.mean(0), cross.mean(0), auto.std(0) / r, cross.std(0) / r
