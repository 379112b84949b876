"""Image-quality measurements: peak location, main-lobe widths, sidelobe
levels and normalized image comparison.

All measurements work on magnitudes and are invariant under global complex
scaling, because the reconstruction drops constant phase factors by
construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .rma import ImageVolume

_AXIS_INDEX = {"x": 0, "y": 1, "z": 2}
# main-lobe boundary: first local minimum below this fraction of the peak
_LOBE_BOUNDARY_LEVEL = 10.0 ** (-6.0 / 20.0)   # -6 dB


@dataclass
class PeakLocation:
    index: Tuple[int, int, int]
    position: Tuple[float, float, float]
    magnitude: float


@dataclass
class PeakReport:
    index: Tuple[int, int, int]
    position: Tuple[float, float, float]
    magnitude: float
    width_x: float
    width_y: float
    width_z: float
    sidelobe_db: float

    def as_keyvalues(self) -> str:
        return "\n".join([
            f"peak_index = {self.index[0]} {self.index[1]} {self.index[2]}",
            f"peak_position_m = {self.position[0]!r} {self.position[1]!r} {self.position[2]!r}",
            f"peak_magnitude = {self.magnitude!r}",
            f"width_x_m = {self.width_x!r}",
            f"width_y_m = {self.width_y!r}",
            f"width_z_m = {self.width_z!r}",
            f"sidelobe_db = {self.sidelobe_db!r}",
        ])


def _parabolic_offset(lo, mid, hi) -> float:
    """Sub-sample offset of a parabola through three log-magnitude samples."""
    denom = lo - 2.0 * mid + hi
    if denom >= 0 or not np.isfinite(denom):
        return 0.0
    return 0.5 * (lo - hi) / denom


def peak_location(img: ImageVolume) -> PeakLocation:
    """Global magnitude argmax with parabolic sub-voxel refinement.

    Ties break to the lowest linear (C-order) index.  The refinement fits a
    parabola to log magnitude along each axis; at grid edges or next to zero
    samples the offset falls back to zero.
    """
    mag = np.abs(img.data)
    peak = float(mag.max())
    if peak == 0.0:
        raise ValueError("image is identically zero")
    flat = int(np.argmax(mag))
    idx = np.unravel_index(flat, mag.shape)
    position = []
    for ax, name in enumerate("xyz"):
        axis_vals = img.grid.axis(name)
        i = idx[ax]
        offset = 0.0
        if 0 < i < mag.shape[ax] - 1:
            sel = list(idx)
            sel[ax] = slice(i - 1, i + 2)
            triple = mag[tuple(sel)]
            if np.all(triple > 0):
                logs = np.log(triple)
                offset = _parabolic_offset(logs[0], logs[1], logs[2])
                offset = float(np.clip(offset, -0.5, 0.5))
        step = getattr(img.grid, f"{name}_step")
        position.append(float(axis_vals[i]) + offset * step)
    return PeakLocation(index=tuple(int(i) for i in idx),
                        position=tuple(position), magnitude=peak)


def _cut_through(img: ImageVolume, axis: str, index=None) -> Tuple[np.ndarray, float]:
    ax = _AXIS_INDEX[axis]
    if index is None:
        index = peak_location(img).index
    sel = list(index)
    sel[ax] = slice(None)
    cut = np.abs(img.data[tuple(sel)])
    return cut, getattr(img.grid, f"{axis}_step")


def mainlobe_width(img: ImageVolume, axis: str, index=None) -> float:
    """-3 dB full width of the 1-D cut through the peak, in meters.

    Crossings are found by linear interpolation between magnitude samples.
    Raises when the lobe does not drop below -3 dB inside the scene.
    """
    cut, step = _cut_through(img, axis, index)
    i = int(np.argmax(cut))
    peak = cut[i]
    if peak == 0:
        raise ValueError("cut is identically zero")
    level = peak / math.sqrt(2.0)

    right = i
    while right < cut.size - 1 and cut[right + 1] >= level:
        right += 1
    if right == cut.size - 1:
        raise ValueError(f"main lobe exceeds the scene along {axis}")
    rf = right + (cut[right] - level) / (cut[right] - cut[right + 1])

    left = i
    while left > 0 and cut[left - 1] >= level:
        left -= 1
    if left == 0:
        raise ValueError(f"main lobe exceeds the scene along {axis}")
    lf = left - (cut[left] - level) / (cut[left] - cut[left - 1])
    return float((rf - lf) * step)


def _lobe_bounds(cut: np.ndarray, i: int) -> Tuple[int, int]:
    """Indices of the first local minima below -6 dB on both sides of i."""
    level = cut[i] * _LOBE_BOUNDARY_LEVEL

    right = cut.size - 1
    for j in range(i + 1, cut.size - 1):
        if cut[j] <= level and cut[j] <= cut[j - 1] and cut[j] <= cut[j + 1]:
            right = j
            break
    left = 0
    for j in range(i - 1, 0, -1):
        if cut[j] <= level and cut[j] <= cut[j - 1] and cut[j] <= cut[j + 1]:
            left = j
            break
    return left, right


def sidelobe_level(img: ImageVolume, axis: str, index=None) -> float:
    """Highest sidelobe on the 1-D cut, in dB relative to the peak.

    The main lobe is bounded by the first local minima below -6 dB on each
    side; the highest local maximum outside it sets the level.  Monotone
    decay (no sidelobe) reports -inf.
    """
    cut, _ = _cut_through(img, axis, index)
    i = int(np.argmax(cut))
    if cut[i] == 0:
        raise ValueError("cut is identically zero")
    left, right = _lobe_bounds(cut, i)
    best = 0.0
    for j in range(1, cut.size - 1):
        if left <= j <= right:
            continue
        if cut[j] >= cut[j - 1] and cut[j] >= cut[j + 1]:
            best = max(best, cut[j])
    # edge samples can hide a clipped sidelobe only if they rise outward
    if left > 0 and cut[0] > cut[1]:
        best = max(best, cut[0])
    if right < cut.size - 1 and cut[-1] > cut[-2]:
        best = max(best, cut[-1])
    if best == 0.0:
        return float("-inf")
    return float(20.0 * math.log10(best / cut[i]))


def peak_report(img: ImageVolume, index=None) -> PeakReport:
    """Full point-target report: location, widths, worst 1-D sidelobe."""
    loc = peak_location(img)
    if index is None:
        index = loc.index
    widths = {ax: mainlobe_width(img, ax, index) for ax in "xyz"}
    sll = max(sidelobe_level(img, ax, index) for ax in "xyz")
    return PeakReport(index=index, position=loc.position, magnitude=loc.magnitude,
                      width_x=widths["x"], width_y=widths["y"], width_z=widths["z"],
                      sidelobe_db=sll)


def image_nrmse(a: ImageVolume, b: ImageVolume) -> float:
    """Normalized magnitude RMSE between two images on the same grid.

    || |a|/max|a| - |b|/max|b| ||_2 / || |b|/max|b| ||_2.  Phase is excluded
    because global constants are dropped throughout the pipeline.
    """
    if a.data.shape != b.data.shape or a.grid != b.grid:
        raise ValueError("images are on different grids")
    am = np.abs(a.data)
    bm = np.abs(b.data)
    if am.max() == 0 or bm.max() == 0:
        raise ValueError("images must be non-zero")
    am = am / am.max()
    bm = bm / bm.max()
    return float(np.linalg.norm(am - bm) / np.linalg.norm(bm))
