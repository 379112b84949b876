"""Point-scatterer echo synthesis for the circular-arc MIMO aperture.

The two-way echo model is purely phase-based: each sample is the coherent sum
over targets of reflectivity * exp(-j k (R_T + R_R)), with no spreading loss
by default.  An optional 1/(R_T R_R) decay and additive complex noise are
available for robustness experiments.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import arcfile
from .geometry import ArrayGeometry, PointTarget
from .spectral import C_LIGHT

_COINCIDENT_TOL = 1e-9


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform stepped-frequency grid; wavenumbers are k = 2 pi f / c."""

    f_start: float
    f_stop: float
    count: int

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("frequency count must be >= 1")
        if self.f_start <= 0:
            raise ValueError("start frequency must be positive")
        if self.count == 1:
            if self.f_stop != self.f_start:
                raise ValueError("single-frequency grid requires f_stop == f_start")
        elif self.f_stop <= self.f_start:
            raise ValueError("f_stop must exceed f_start")

    @property
    def frequencies(self) -> np.ndarray:
        if self.count == 1:
            return np.asarray([self.f_start])
        return np.linspace(self.f_start, self.f_stop, self.count)

    @property
    def wavenumbers(self) -> np.ndarray:
        return 2.0 * np.pi * self.frequencies / C_LIGHT

    @property
    def bandwidth(self) -> float:
        return self.f_stop - self.f_start

    @property
    def center_wavelength(self) -> float:
        return C_LIGHT / (0.5 * (self.f_start + self.f_stop))

    @property
    def min_wavelength(self) -> float:
        return C_LIGHT / self.f_stop


@dataclass
class EchoCube:
    """Sampled scattered data s(k, theta_T, theta_R, z')."""

    data: np.ndarray
    freqs: FrequencyGrid
    geom: ArrayGeometry

    def __post_init__(self):
        expected = (self.freqs.count, self.geom.tx_angles.size,
                    self.geom.rx_angles.size, self.geom.z_positions.size)
        if self.data.shape != expected:
            raise ValueError(f"echo shape {self.data.shape} does not match axes {expected}")
        if not np.all(np.isfinite(self.data.view(float))):
            raise ValueError("echo contains non-finite samples")

    @property
    def k(self) -> np.ndarray:
        return self.freqs.wavenumbers

    @property
    def theta_t(self) -> np.ndarray:
        return self.geom.tx_angles

    @property
    def theta_r(self) -> np.ndarray:
        return self.geom.rx_angles

    @property
    def z(self) -> np.ndarray:
        return self.geom.z_positions


@dataclass
class MonostaticEcho:
    """Co-located transmit/receive samples s(k, theta, z'), phase -2kR."""

    data: np.ndarray
    freqs: FrequencyGrid
    radius: float
    theta: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        expected = (self.freqs.count, self.theta.size, self.z.size)
        if self.data.shape != expected:
            raise ValueError(f"echo shape {self.data.shape} does not match axes {expected}")


def _radial_distances(angles, radius, x0, y0):
    ax = radius * np.sin(angles)
    ay = -radius * np.cos(angles)
    return np.sqrt((x0 - ax) ** 2 + (y0 - ay) ** 2)


def _accumulate_phase_sum(out, k, distance, amplitude):
    """out += amplitude * exp(-j k * distance), k along the first axis.

    The frequency loop runs over powers of exp(-j dk D) so only two complex
    exponentials are evaluated per spatial sample.
    """
    k = np.asarray(k)
    phase = amplitude * np.exp(-1j * k[0] * distance)
    if k.size == 1:
        out[0] += phase
        return
    step = np.exp(-1j * (k[1] - k[0]) * distance)
    for ik in range(k.size):
        out[ik] += phase
        phase = phase * step


def simulate_echo(geom: ArrayGeometry, freqs: FrequencyGrid,
                  targets: Sequence[PointTarget], *,
                  amplitude_decay: bool = False,
                  noise_snr_db: Optional[float] = None,
                  noise_seed: int = 0) -> EchoCube:
    """Synthesize the 4-D echo cube from point targets.

    Sample order is deterministic: targets are accumulated in list order and
    every sample is independent, so results do not depend on threading.

    Raises if the target list is empty or a target coincides with an antenna.
    """
    if not targets:
        raise ValueError("at least one target is required")
    k = freqs.wavenumbers
    nt, nr, nz = geom.tx_angles.size, geom.rx_angles.size, geom.z_positions.size
    data = np.zeros((k.size, nt, nr, nz), dtype=np.complex128)
    zp = geom.z_positions
    for tgt in targets:
        x0, y0, z0 = tgt.position
        rho_t = _radial_distances(geom.tx_angles, geom.radius, x0, y0)
        rho_r = _radial_distances(geom.rx_angles, geom.radius, x0, y0)
        dz2 = (z0 - zp) ** 2
        r_t = np.sqrt(rho_t[:, None] ** 2 + dz2[None, :])   # (nt, nz)
        r_r = np.sqrt(rho_r[:, None] ** 2 + dz2[None, :])   # (nr, nz)
        if r_t.min() < _COINCIDENT_TOL or r_r.min() < _COINCIDENT_TOL:
            raise ValueError(f"target {tgt.position} coincides with an antenna")
        total = r_t[:, None, :] + r_r[None, :, :]           # (nt, nr, nz)
        amp = complex(tgt.reflectivity)
        if amplitude_decay:
            amp = amp / (r_t[:, None, :] * r_r[None, :, :])
        _accumulate_phase_sum(data, k, total, amp)
    if noise_snr_db is not None:
        data += _complex_noise(data, noise_snr_db, noise_seed)
    return EchoCube(data=data, freqs=freqs, geom=geom)


def simulate_monostatic(radius: float, angles, freqs: FrequencyGrid,
                        targets: Sequence[PointTarget],
                        z_positions=(0.0,)) -> MonostaticEcho:
    """Co-located transmit/receive synthesis with two-way phase -2kR."""
    if not targets:
        raise ValueError("at least one target is required")
    angles = np.asarray(angles, dtype=float)
    zp = np.asarray(z_positions, dtype=float)
    k = freqs.wavenumbers
    data = np.zeros((k.size, angles.size, zp.size), dtype=np.complex128)
    for tgt in targets:
        x0, y0, z0 = tgt.position
        rho = _radial_distances(angles, radius, x0, y0)
        r = np.sqrt(rho[:, None] ** 2 + (z0 - zp[None, :]) ** 2)
        if r.min() < _COINCIDENT_TOL:
            raise ValueError(f"target {tgt.position} coincides with an antenna")
        _accumulate_phase_sum(data, 2.0 * k, r, complex(tgt.reflectivity))
    return MonostaticEcho(data=data, freqs=freqs, radius=radius, theta=angles, z=zp)


def _complex_noise(signal, snr_db, seed):
    rng = np.random.default_rng(seed)
    power = np.mean(np.abs(signal) ** 2)
    sigma = np.sqrt(power * 10.0 ** (-snr_db / 10.0) / 2.0)
    return sigma * (rng.standard_normal(signal.shape)
                    + 1j * rng.standard_normal(signal.shape))


# ---------------------------------------------------------------------------
# persistence
# ---------------------------------------------------------------------------

_ECHO_LABELS = ("k_radpm", "theta_t_rad", "theta_r_rad", "z_scan_m")


def save_echo(cube: EchoCube, path):
    """Write the cube in the ARCMIMO1 container (see arcfile)."""
    k = cube.k
    dk = float(k[1] - k[0]) if k.size > 1 else 0.0
    axes = [
        arcfile.Axis(_ECHO_LABELS[0], float(k[0]), dk, k.size),
        arcfile.Axis(_ECHO_LABELS[1], float(cube.theta_t[0]),
                     float(cube.theta_t[1] - cube.theta_t[0]), cube.theta_t.size),
        arcfile.Axis(_ECHO_LABELS[2], float(cube.theta_r[0]),
                     float(cube.theta_r[1] - cube.theta_r[0]), cube.theta_r.size),
        arcfile.Axis(_ECHO_LABELS[3], float(cube.z[0]), cube.geom.z_step, cube.z.size),
    ]
    arcfile.save(path, cube.data, axes)


def load_external_echo(path, radius: float) -> EchoCube:
    """Load an externally produced echo cube.

    The file stores only the sampled axes; the arc radius comes from the
    scenario config (it is supplied by the caller).  Axis labels and rank are
    validated against the echo layout.
    """
    data, axes = arcfile.load(path)
    if len(axes) != 4:
        raise arcfile.HeaderError(f"echo cube must have rank 4, found {len(axes)}")
    labels = tuple(a.label for a in axes)
    if labels != _ECHO_LABELS:
        raise arcfile.HeaderError(f"unexpected axis labels {labels}")
    k_ax, tt_ax, tr_ax, z_ax = axes
    f0 = k_ax.origin * C_LIGHT / (2.0 * np.pi)
    f1 = (k_ax.origin + k_ax.step * (k_ax.count - 1)) * C_LIGHT / (2.0 * np.pi)
    freqs = FrequencyGrid(f_start=f0, f_stop=f1 if k_ax.count > 1 else f0, count=k_ax.count)
    geom = ArrayGeometry(
        radius=radius,
        tx_angles=tt_ax.origin + tt_ax.step * np.arange(tt_ax.count),
        rx_angles=tr_ax.origin + tr_ax.step * np.arange(tr_ax.count),
        z_positions=z_ax.origin + z_ax.step * np.arange(z_ax.count),
    )
    return EchoCube(data=data, freqs=freqs, geom=geom)
