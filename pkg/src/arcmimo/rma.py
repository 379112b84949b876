"""Wavenumber-domain reconstruction for the circular-arc MIMO aperture.

Stage chain: scan-axis Fourier transform, dimension increase over the
frequency axis, angular Hankel-function deconvolution on both arc axes,
polar-to-Cartesian regridding with dimension reduction, and a 3-D inverse
FFT referenced to the scene origin.

One global convention note: the echo model accrues phase exp(-j k (R_T+R_R))
while the angular deconvolution (first-kind Hankel functions, plane-wave map
with the spectral band near k_y = -2 k_c) is written for waves of the
opposite temporal convention.  :func:`reconstruct` therefore conjugates the
echo once up front; every stage below is stated for the conjugated data.
Peak-normalized magnitudes, which all quality metrics use, are unaffected.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import arcfile
from .forward import EchoCube
from .geometry import SceneGrid
from .spectral import axis_fft, fft_frequencies, hankel_tables

log = logging.getLogger(__name__)

_COS_CLAMP = 0.1
_ORDER_MARGIN = 20


# ---------------------------------------------------------------------------
# containers
# ---------------------------------------------------------------------------

@dataclass
class ScanSpectrum:
    """Echo after the scan-axis transform: s(k, theta_T, theta_R, k_z)."""

    data: np.ndarray
    k: np.ndarray
    theta_t: np.ndarray
    theta_r: np.ndarray
    k_z: np.ndarray
    z_origin: float
    z_step: float
    radius: float


@dataclass
class IncreasedSpectrum:
    """Data re-indexed over (k_T, k_R) with k = k_T + k_R (dimension increase)."""

    data: np.ndarray
    k_t: np.ndarray
    k_r: np.ndarray
    theta_t: np.ndarray
    theta_r: np.ndarray
    k_z: np.ndarray
    radius: float


@dataclass
class PolarSpectrum:
    """Deconvolved spectrum on the polar support; angles now read as phi."""

    data: np.ndarray
    k_t: np.ndarray
    k_r: np.ndarray
    theta_t: np.ndarray
    theta_r: np.ndarray
    k_z: np.ndarray
    radius: float


@dataclass(frozen=True)
class WavenumberGrid:
    """Uniform Cartesian (k_x, k_y, k_z) target grid for the regridding."""

    kx_origin: float
    kx_step: float
    kx_count: int
    ky_origin: float
    ky_step: float
    ky_count: int
    kz_origin: float
    kz_step: float
    kz_count: int

    def axis(self, name: str) -> np.ndarray:
        return (getattr(self, f"{name}_origin")
                + getattr(self, f"{name}_step") * np.arange(getattr(self, f"{name}_count")))

    @property
    def shape(self):
        return (self.kx_count, self.ky_count, self.kz_count)


@dataclass
class SpatialSpectrum:
    """G(k_x, k_y, k_z) with per-cell scatter weights."""

    data: np.ndarray
    weights: np.ndarray
    grid: WavenumberGrid


@dataclass
class ImageVolume:
    """Complex reflectivity on the scene grid."""

    data: np.ndarray
    grid: SceneGrid

    def __post_init__(self):
        if self.data.shape != self.grid.shape:
            raise ValueError(f"image shape {self.data.shape} != grid {self.grid.shape}")
        if not np.all(np.isfinite(self.data.view(float))):
            raise ValueError("image contains non-finite values")


@dataclass
class ReconstructOptions:
    eps_h: float = 1e-3
    eps_w: float = 1e-8
    matched_filter: bool = False
    # per-cell weight normalization whitens the occupied band (sharper lobes,
    # more sidelobe energy); the default averages the redundant
    # half-wavenumber pairs instead, which preserves the natural band taper
    whiten_spectrum: bool = False
    theta_z: Optional[float] = None   # enables the scan-step warning when set
    grid: Optional[WavenumberGrid] = None
    verbose: bool = False
    debug_dir: Optional[str] = None


# ---------------------------------------------------------------------------
# stage 1: scan-axis transform
# ---------------------------------------------------------------------------

def scan_axis_ft(echo: EchoCube, theta_z: Optional[float] = None) -> ScanSpectrum:
    """Unitary Fourier transform along z' with a zero-centered k_z axis.

    The transform kernel is exp(-j k_z z'); the scan-axis origin phase is
    applied explicitly so the output matches the continuous-transform
    convention regardless of where the scan starts.
    """
    z = echo.z
    nz = z.size
    dz = echo.geom.z_step if nz > 1 else 1.0
    if nz > 1:
        d = np.diff(z)
        if np.max(np.abs(d - d.mean())) > 1e-12:
            raise ValueError("scan axis must be uniform")
        if theta_z is not None and theta_z > 0:
            lam_min = 2.0 * np.pi / float(np.max(echo.k))
            bound = lam_min / (4.0 * math.sin(theta_z / 2.0))
            if dz > bound * (1.0 + 1e-12):
                warnings.warn(
                    f"scan step {dz:.4g} m exceeds the anti-aliasing bound {bound:.4g} m",
                    RuntimeWarning, stacklevel=2)
    k_z = fft_frequencies(nz, dz)
    data = axis_fft(echo.data, axis=-1, direction="forward")
    data = data * np.exp(-1j * k_z * float(z[0]))
    return ScanSpectrum(data=data, k=echo.k.copy(), theta_t=echo.theta_t.copy(),
                        theta_r=echo.theta_r.copy(), k_z=k_z,
                        z_origin=float(z[0]), z_step=dz, radius=echo.geom.radius)


def inverse_scan_axis_ft(spec: ScanSpectrum) -> np.ndarray:
    """Inverse of :func:`scan_axis_ft`; returns the echo samples."""
    data = spec.data * np.exp(+1j * spec.k_z * spec.z_origin)
    return axis_fft(data, axis=-1, direction="inverse")


# ---------------------------------------------------------------------------
# stage 2: dimension increase
# ---------------------------------------------------------------------------

def dimension_increase(scan: ScanSpectrum) -> IncreasedSpectrum:
    """Re-index s(k, ...) over (k_T, k_R) with k = k_T + k_R.

    Both half-wavenumber grids span [k_min/2, k_max/2] with the original
    sample count, so a cell's sum k_T + k_R always lands on the measured band:
    even index sums hit frequency samples exactly and odd sums sit halfway
    between neighbors, where linear interpolation reduces to their average.
    Values are constant along anti-diagonals by construction.
    """
    k = scan.k
    nf = k.size
    if nf > 1:
        dk = np.diff(k)
        if np.max(np.abs(dk - dk.mean())) > 1e-9 * abs(dk.mean()):
            raise ValueError("frequency axis must be uniform")
        half_step = dk.mean() / 2.0
    else:
        half_step = 0.0
    k_half = k[0] / 2.0 + half_step * np.arange(nf)

    shape = (nf, nf) + scan.data.shape[1:]
    data = np.empty(shape, dtype=np.complex128)
    for i in range(nf):
        for j in range(nf):
            s = i + j
            if s % 2 == 0:
                data[i, j] = scan.data[s // 2]
            else:
                data[i, j] = 0.5 * (scan.data[(s - 1) // 2] + scan.data[(s + 1) // 2])
    return IncreasedSpectrum(data=data, k_t=k_half, k_r=k_half.copy(),
                             theta_t=scan.theta_t, theta_r=scan.theta_r,
                             k_z=scan.k_z, radius=scan.radius)


# ---------------------------------------------------------------------------
# stage 3: angular deconvolution
# ---------------------------------------------------------------------------

def split_dispersion(k_half: np.ndarray, k_z: np.ndarray) -> np.ndarray:
    """k_rho = sqrt(4 k_half^2 - k_z^2/4) per (k_half, k_z); 0 marks evanescent."""
    arg = 4.0 * k_half[:, None] ** 2 - k_z[None, :] ** 2 / 4.0
    return np.where(arg > 0.0, np.sqrt(np.maximum(arg, 0.0)), 0.0)


def _angle_transform_pair(angles: np.ndarray, cap: int):
    """Zero-padded-circle Fourier pair for an arc at integer orders |xi| <= cap.

    Forward rows compute Fourier-series coefficients of the arc data extended
    by zero over the full period; inverse rows evaluate the series back on the
    arc angles (the crop to the original support happens by construction).
    """
    d = float(angles[1] - angles[0])
    xi = np.arange(-cap, cap + 1)
    fwd = np.exp(-1j * np.outer(xi, angles)) * (d / (2.0 * np.pi))
    inv = np.exp(+1j * np.outer(angles, xi))
    return xi, fwd, inv


def angular_deconvolution_matrix(angles, hankel_arg: float, *,
                                 eps_h: float = 1e-3,
                                 matched_filter: bool = False,
                                 j_table=None, y_table=None) -> np.ndarray:
    """Arc-to-arc operator inverting one angular convolution with the
    cylindrical-wave kernel.

    Pipeline form of the per-order division: transform to integer Fourier
    orders, multiply by exp(-j pi xi / 2), divide by H^(1)_xi(hankel_arg)
    (reflection H_{-n} = (-1)^n H_n for negative orders), transform back and
    keep the arc support.  Orders beyond the angular Nyquist pi/dtheta or
    beyond hankel_arg + 20 are dropped; inside the retained band the division
    is floored at eps_h times the slice's peak |H|.
    """
    angles = np.asarray(angles, dtype=float)
    if angles.size < 2:
        raise ValueError("angle axis needs at least two samples")
    d = float(angles[1] - angles[0])
    cap = int(min(math.floor(math.pi / d), math.floor(hankel_arg) + _ORDER_MARGIN))
    xi, fwd, inv = _angle_transform_pair(angles, cap)
    if j_table is None or y_table is None:
        j_table, y_table = hankel_tables(np.asarray([hankel_arg]), cap)
        j_table, y_table = j_table[:, 0], y_table[:, 0]
    h = j_table[np.abs(xi)] + 1j * y_table[np.abs(xi)]
    h = np.where((xi < 0) & (np.abs(xi) % 2 == 1), -h, h)
    mag = np.abs(h)
    retained = np.abs(xi) <= math.floor(hankel_arg) + _ORDER_MARGIN
    floor = eps_h * mag[retained].max()
    ok = retained & (mag > floor)
    rot = np.exp(-1j * np.pi * xi / 2.0)
    if matched_filter:
        denom = np.maximum(mag ** 2, floor ** 2)
        fac = np.where(ok, rot * np.conj(h) / denom, 0.0)
    else:
        fac = np.where(ok, rot / np.where(ok, h, 1.0), 0.0)
    return (inv * fac[None, :]) @ fwd


def angular_deconvolve(inc: IncreasedSpectrum, radius: float, *,
                       eps_h: float = 1e-3,
                       matched_filter: bool = False) -> PolarSpectrum:
    """Invert the two angular convolutions and remove the polar prefactor.

    Each (k_T, k_z) slice gets its transmit-axis operator and each (k_R, k_z)
    slice its receive-axis operator; slices where either radial wavenumber is
    evanescent are zeroed.  The result is divided by
    k_rho_T k_rho_R cos(theta_T) cos(theta_R), with |cos| clamped at 0.1.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    th_t, th_r, k_z = inc.theta_t, inc.theta_r, inc.k_z
    krho_t = split_dispersion(inc.k_t, k_z)    # (nkt, nkz)
    krho_r = split_dispersion(inc.k_r, k_z)    # (nkr, nkz)
    nkt, nkr = inc.k_t.size, inc.k_r.size
    nkz = k_z.size

    # one joint Bessel table per axis covers every propagating slice
    def tables_for(krho, angles):
        args = krho[krho > 0.0] * radius
        if args.size == 0:
            return None, 0
        d = float(angles[1] - angles[0])
        cap = int(min(math.floor(math.pi / d), math.floor(args.max()) + _ORDER_MARGIN))
        j, y = hankel_tables(args, cap)
        lut = {}
        idx = 0
        for im, val in np.ndenumerate(krho):
            if val > 0.0:
                lut[im] = (j[:, idx], y[:, idx])
                idx += 1
        return lut, cap

    lut_t, _ = tables_for(krho_t, th_t)
    lut_r, _ = tables_for(krho_r, th_r)

    out = np.zeros_like(inc.data)
    for m in range(nkz):
        plane = inc.data[..., m]
        work = np.zeros_like(plane)
        # transmit-axis deconvolution per k_T
        for i in range(nkt):
            if krho_t[i, m] <= 0.0:
                continue
            jt, yt = lut_t[(i, m)]
            mat = angular_deconvolution_matrix(
                th_t, krho_t[i, m] * radius, eps_h=eps_h,
                matched_filter=matched_filter, j_table=jt, y_table=yt)
            # contract the theta_T axis of (nkr, nth_t, nth_r)
            work[i] = np.tensordot(mat, plane[i], axes=([1], [1])).transpose(1, 0, 2)
        # receive-axis deconvolution per k_R
        for j in range(nkr):
            if krho_r[j, m] <= 0.0:
                work[:, j] = 0.0
                continue
            jr, yr = lut_r[(j, m)]
            mat = angular_deconvolution_matrix(
                th_r, krho_r[j, m] * radius, eps_h=eps_h,
                matched_filter=matched_filter, j_table=jr, y_table=yr)
            work[:, j] = np.tensordot(work[:, j], mat, axes=([2], [1]))
        out[..., m] = work

    cos_t = np.sign(np.cos(th_t)) * np.maximum(np.abs(np.cos(th_t)), _COS_CLAMP)
    cos_r = np.sign(np.cos(th_r)) * np.maximum(np.abs(np.cos(th_r)), _COS_CLAMP)
    with np.errstate(divide="ignore", invalid="ignore"):
        pref = 1.0 / (krho_t[:, None, None, None, :] * krho_r[None, :, None, None, :]
                      * cos_t[None, None, :, None, None]
                      * cos_r[None, None, None, :, None])
    pref = np.where(np.isfinite(pref), pref, 0.0)
    out *= pref
    return PolarSpectrum(data=out, k_t=inc.k_t, k_r=inc.k_r, theta_t=th_t,
                         theta_r=th_r, k_z=k_z, radius=inc.radius)


# ---------------------------------------------------------------------------
# stage 4: polar to Cartesian regridding
# ---------------------------------------------------------------------------

def polar_to_cartesian_coords(krho_t, krho_r, phi_t, phi_r):
    """Map polar spectral samples to (k_x, k_y):
    k_x = k_rho_T sin(phi_T) + k_rho_R sin(phi_R),
    k_y = -(k_rho_T cos(phi_T) + k_rho_R cos(phi_R)).
    Inputs broadcast."""
    kx = krho_t * np.sin(phi_t) + krho_r * np.sin(phi_r)
    ky = -(krho_t * np.cos(phi_t) + krho_r * np.cos(phi_r))
    return kx, ky


def _next_pow2(n: int) -> int:
    p = 1
    while p < n:
        p *= 2
    return p


def occupied_band(polar: PolarSpectrum):
    """Outer bounds of the (k_x, k_y, k_z) support of the propagating samples."""
    krho_t = split_dispersion(polar.k_t, polar.k_z)
    krho_r = split_dispersion(polar.k_r, polar.k_z)
    pt = krho_t[krho_t > 0]
    pr = krho_r[krho_r > 0]
    if pt.size == 0 or pr.size == 0:
        raise ValueError("spectrum has no propagating support")
    sin_t, cos_t = np.sin(polar.theta_t), np.cos(polar.theta_t)
    sin_r, cos_r = np.sin(polar.theta_r), np.cos(polar.theta_r)
    kx_hi = pt.max() * max(sin_t.max(), 0) + pr.max() * max(sin_r.max(), 0)
    kx_lo = pt.max() * min(sin_t.min(), 0) + pr.max() * min(sin_r.min(), 0)
    ky_lo = -(pt.max() * cos_t.max() + pr.max() * cos_r.max())
    ky_hi = -(pt.min() * cos_t.min() + pr.min() * cos_r.min())
    kz_lo, kz_hi = float(polar.k_z.min()), float(polar.k_z.max())
    return (kx_lo, kx_hi), (ky_lo, ky_hi), (kz_lo, kz_hi)


def default_wavenumber_grid(polar: PolarSpectrum, scene: SceneGrid,
                            padding: int = 2) -> WavenumberGrid:
    """Cartesian grid whose inverse FFT lands exactly on scene voxels.

    Per axis the step is 2 pi / (N * scene_step) with N the next power of two
    at or above ``padding`` times the scene count, so the image FOV covers the
    scene with margin and the occupied band is oversampled about twofold.
    Raises when a scene step is too coarse for the band to fit.
    """
    bands = occupied_band(polar)
    spec = {}
    for name, (lo, hi) in zip(("kx", "ky", "kz"), bands):
        s_step = getattr(scene, f"{name[1]}_step")
        s_count = getattr(scene, f"{name[1]}_count")
        n = _next_pow2(max(padding * s_count, 2))
        step = 2.0 * np.pi / (n * s_step)
        while (hi - lo) > (n - 2) * step:   # need head room for trilinear spill
            n *= 2
            step = 2.0 * np.pi / (n * s_step)
            if step * (n - 2) >= (hi - lo):
                break
            if (hi - lo) / (n - 2) < 1e-16:
                break
        if (hi - lo) > (n - 2) * step:
            need = 2.0 * np.pi / ((hi - lo) / (n - 2))
            raise ValueError(
                f"scene {name[1]} step {s_step:.4g} m too coarse for the occupied "
                f"band {hi - lo:.4g} rad/m; need a step below {need:.4g} m")
        origin = 0.5 * (lo + hi) - (n / 2) * step
        spec[f"{name}_origin"] = origin
        spec[f"{name}_step"] = step
        spec[f"{name}_count"] = n
    return WavenumberGrid(**spec)


def stolt_grid(polar: PolarSpectrum, grid: WavenumberGrid,
               eps_w: float = 1e-8, normalize: bool = True,
               sample_weights=None) -> SpatialSpectrum:
    """Scatter the polar samples onto the uniform Cartesian wavenumber grid.

    Every propagating sample is deposited with trilinear weights into the
    eight neighboring cells (weights always sum to one); per-cell accumulated
    weights are kept and cells with weight above ``eps_w`` are normalized,
    the rest zeroed.  Accumulation order is fixed, so output is bit-stable.

    ``normalize=False`` keeps the raw accumulation instead, and
    ``sample_weights`` (broadcastable to the polar data shape) scales each
    deposit; :func:`reconstruct` uses both to realize the dimension
    reduction as an average over the redundant half-wavenumber pairs.
    """
    krho_t = split_dispersion(polar.k_t, polar.k_z)
    krho_r = split_dispersion(polar.k_r, polar.k_z)
    nkx, nky, nkz = grid.shape
    flat_len = nkx * nky * nkz
    acc_re = np.zeros(flat_len)
    acc_im = np.zeros(flat_len)
    acc_w = np.zeros(flat_len)

    sin_t, cos_t = np.sin(polar.theta_t), np.cos(polar.theta_t)
    sin_r, cos_r = np.sin(polar.theta_r), np.cos(polar.theta_r)
    if sample_weights is not None:
        sample_weights = np.broadcast_to(np.asarray(sample_weights, float),
                                         polar.data.shape)

    for i in range(polar.k_t.size):      # chunk over k_T to bound memory
        kt_slice = polar.data[i]          # (nkr, nt, nr, nkz)
        # broadcast coordinates: (nkr, nt, nr, nkz)
        kx = (krho_t[i][None, None, None, :] * sin_t[None, :, None, None]
              + krho_r[:, None, None, :] * sin_r[None, None, :, None])
        ky = -(krho_t[i][None, None, None, :] * cos_t[None, :, None, None]
               + krho_r[:, None, None, :] * cos_r[None, None, :, None])
        kz = np.broadcast_to(polar.k_z[None, None, None, :], kx.shape)
        mask = (krho_t[i][None, None, None, :] > 0) & (krho_r[:, None, None, :] > 0)
        mask = np.broadcast_to(mask, kx.shape)
        vals = kt_slice[mask]
        if vals.size == 0:
            continue
        depot = np.ones(vals.size) if sample_weights is None \
            else sample_weights[i][mask]
        fx = (kx[mask] - grid.kx_origin) / grid.kx_step
        fy = (ky[mask] - grid.ky_origin) / grid.ky_step
        fz = (kz[mask] - grid.kz_origin) / grid.kz_step
        if (fx.min() < 0 or fy.min() < 0 or fz.min() < 0
                or fx.max() >= nkx - 1 or fy.max() >= nky - 1 or fz.max() >= nkz - 1):
            bands = occupied_band(polar)
            raise ValueError(
                "wavenumber grid does not cover the occupied band; required "
                f"extents kx={bands[0]}, ky={bands[1]}, kz={bands[2]}")
        i0 = np.floor(fx).astype(np.int64)
        j0 = np.floor(fy).astype(np.int64)
        m0 = np.floor(fz).astype(np.int64)
        tx, ty, tz = fx - i0, fy - j0, fz - m0
        for di in (0, 1):
            wx = tx if di else 1.0 - tx
            for dj in (0, 1):
                wy = ty if dj else 1.0 - ty
                for dm in (0, 1):
                    wz = tz if dm else 1.0 - tz
                    w = wx * wy * wz * depot
                    idx = ((i0 + di) * nky + (j0 + dj)) * nkz + (m0 + dm)
                    acc_re += np.bincount(idx, weights=vals.real * w, minlength=flat_len)
                    acc_im += np.bincount(idx, weights=vals.imag * w, minlength=flat_len)
                    acc_w += np.bincount(idx, weights=w, minlength=flat_len)

    weights = acc_w.reshape(grid.shape)
    data = (acc_re + 1j * acc_im).reshape(grid.shape)
    covered = weights > eps_w
    if normalize:
        data = np.where(covered, data / np.where(covered, weights, 1.0), 0.0)
    else:
        data = np.where(covered, data, 0.0)
    return SpatialSpectrum(data=data, weights=weights, grid=grid)


# ---------------------------------------------------------------------------
# stage 5: inverse transform to the scene
# ---------------------------------------------------------------------------

def volume_invert(spec: SpatialSpectrum, scene: SceneGrid) -> ImageVolume:
    """Inverse 3-D FFT of the Cartesian spectrum onto the scene grid.

    The occupied band sits far from k = 0 (around k_y of minus twice the
    center wavenumber), so the scene-origin phase reference
    exp(+j (k_x x0 + k_y y0 + k_z z0)) is applied explicitly before the
    unitary inverse FFT; the per-voxel carrier ramp is restored afterwards
    and the result is cropped to the scene counts.
    """
    g = spec.grid
    for name in ("x", "y", "z"):
        kstep = getattr(g, f"k{name}_step")
        kcount = getattr(g, f"k{name}_count")
        sstep = getattr(scene, f"{name}_step")
        scount = getattr(scene, f"{name}_count")
        if kcount < scount:
            raise ValueError(f"k{name} axis shorter than the scene axis")
        if abs(kstep * kcount * sstep - 2.0 * np.pi) > 1e-6:
            raise ValueError(
                f"inconsistent grid spec on {name}: k-step {kstep} with count "
                f"{kcount} does not match scene step {sstep}")

    kx, ky, kz = g.axis("kx"), g.axis("ky"), g.axis("kz")
    x0, y0, z0 = scene.x_origin, scene.y_origin, scene.z_origin
    phased = spec.data * np.exp(1j * kx[:, None, None] * x0)
    phased *= np.exp(1j * ky[None, :, None] * y0)
    phased *= np.exp(1j * kz[None, None, :] * z0)
    img = np.fft.ifftn(phased) * math.sqrt(phased.size)

    # carrier ramp: exp(+j k0 (r - r0)) per axis
    ramps = []
    for name, axis0, sstep, scount in (("x", x0, scene.x_step, scene.x_count),
                                       ("y", y0, scene.y_step, scene.y_count),
                                       ("z", z0, scene.z_step, scene.z_count)):
        k0 = getattr(g, f"k{name}_origin")
        ramps.append(np.exp(1j * k0 * sstep * np.arange(scount)))
    img = img[: scene.x_count, : scene.y_count, : scene.z_count]
    img = img * ramps[0][:, None, None] * ramps[1][None, :, None] * ramps[2][None, None, :]
    return ImageVolume(data=np.ascontiguousarray(img), grid=scene)


# ---------------------------------------------------------------------------
# full pipeline
# ---------------------------------------------------------------------------

def _stage_note(options, name, data):
    if options.verbose:
        energy = float(np.sum(np.abs(data) ** 2))
        log.info("stage %-18s energy %.6e shape %s", name, energy, data.shape)


def _dump(options, name, data, axes):
    if options.debug_dir:
        import os
        arcfile.save(os.path.join(options.debug_dir, f"stage_{name}.bin"), data, axes)


def reconstruct(echo: EchoCube, scene: SceneGrid,
                options: Optional[ReconstructOptions] = None) -> ImageVolume:
    """Run the full wavenumber-domain chain on an echo cube.

    Applies the one-time conjugation (see the module docstring), then
    scan_axis_ft, dimension_increase, angular_deconvolve, stolt_grid and
    volume_invert.  Per-stage energies are logged when ``verbose`` is set and
    intermediate spectra are dumped in ARCMIMO1 format when ``debug_dir`` is.
    """
    options = options or ReconstructOptions()

    conj = EchoCube(data=np.conj(echo.data), freqs=echo.freqs, geom=echo.geom)
    scan = scan_axis_ft(conj, theta_z=options.theta_z)
    _stage_note(options, "scan_axis_ft", scan.data)

    inc = dimension_increase(scan)
    _stage_note(options, "dimension_increase", inc.data)
    del scan

    polar = angular_deconvolve(inc, echo.geom.radius, eps_h=options.eps_h,
                               matched_filter=options.matched_filter)
    _stage_note(options, "angular_deconvolve", polar.data)
    if options.debug_dir:
        axes = [arcfile.Axis("k_t_radpm", float(polar.k_t[0]),
                             float(polar.k_t[1] - polar.k_t[0]) if polar.k_t.size > 1 else 0.0,
                             polar.k_t.size),
                arcfile.Axis("k_r_radpm", float(polar.k_r[0]),
                             float(polar.k_r[1] - polar.k_r[0]) if polar.k_r.size > 1 else 0.0,
                             polar.k_r.size),
                arcfile.Axis("phi_t_rad", float(polar.theta_t[0]),
                             float(polar.theta_t[1] - polar.theta_t[0]), polar.theta_t.size),
                arcfile.Axis("phi_r_rad", float(polar.theta_r[0]),
                             float(polar.theta_r[1] - polar.theta_r[0]), polar.theta_r.size),
                arcfile.Axis("k_z_radpm", float(polar.k_z[0]),
                             float(polar.k_z[1] - polar.k_z[0]) if polar.k_z.size > 1 else 0.0,
                             polar.k_z.size)]
        _dump(options, "polar", polar.data, axes)
    del inc

    grid = options.grid or default_wavenumber_grid(polar, scene)
    spatial = stolt_grid(polar, grid, eps_w=options.eps_w)
    _stage_note(options, "stolt_grid", spatial.data)
    if options.verbose:
        bands = occupied_band(polar)
        log.info("occupied band kx=%s ky=%s kz=%s", *bands)
    if options.debug_dir:
        axes = [arcfile.Axis("k_x_radpm", grid.kx_origin, grid.kx_step, grid.kx_count),
                arcfile.Axis("k_y_radpm", grid.ky_origin, grid.ky_step, grid.ky_count),
                arcfile.Axis("k_z_radpm", grid.kz_origin, grid.kz_step, grid.kz_count)]
        _dump(options, "spatial", spatial.data, axes)
    del polar

    img = volume_invert(spatial, scene)
    _stage_note(options, "volume_invert", img.data)
    return img
