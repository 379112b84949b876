"""Circular-arc MIMO aperture geometry, scan axis and scene grids.

Coordinate conventions: the mechanical scan axis is z and coincides with the
cylinder axis at (x, y) = (0, 0).  An antenna at arc angle ``theta`` and scan
height ``z`` sits at ``(R0 sin(theta), -R0 cos(theta), z)``, so the arc faces
the scene from y < 0 and ``theta = 0`` points at the scene center.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from .config import ScenarioConfig

_Z_UNIFORMITY_TOL = 1e-12


def _readonly(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ArrayGeometry:
    """Circular-arc MIMO aperture swept vertically over a cylindrical surface.

    Immutable after construction; instances may be shared across threads.
    """

    radius: float
    tx_angles: np.ndarray
    rx_angles: np.ndarray
    z_positions: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "tx_angles", _readonly(self.tx_angles))
        object.__setattr__(self, "rx_angles", _readonly(self.rx_angles))
        object.__setattr__(self, "z_positions", _readonly(self.z_positions))
        if not (self.radius > 0):
            raise ValueError(f"arc radius must be positive, got {self.radius}")
        for name, angles in (("tx", self.tx_angles), ("rx", self.rx_angles)):
            if angles.size == 0:
                raise ValueError(f"{name} angle list is empty")
            if np.any(np.abs(angles) >= math.pi / 2):
                raise ValueError(f"{name} angles must lie strictly inside (-pi/2, pi/2)")
            if angles.size > 1 and not np.all(np.diff(angles) > 0):
                raise ValueError(f"{name} angles must be strictly increasing")
        z = self.z_positions
        if z.size == 0:
            raise ValueError("z position list is empty")
        if z.size > 1:
            d = np.diff(z)
            if np.max(np.abs(d - d.mean())) >= _Z_UNIFORMITY_TOL:
                raise ValueError("z positions are not uniformly spaced")
            if d.mean() <= 0:
                raise ValueError("z positions must be increasing")

    @property
    def z_step(self) -> float:
        """Scan step in meters (0.0 for a single scan position)."""
        if self.z_positions.size < 2:
            return 0.0
        return float(np.diff(self.z_positions).mean())

    @property
    def scan_length(self) -> float:
        return float(self.z_positions[-1] - self.z_positions[0])


@dataclass(frozen=True)
class SceneGrid:
    """Axis-aligned Cartesian reconstruction grid (origin, step, count per axis)."""

    x_origin: float
    x_step: float
    x_count: int
    y_origin: float
    y_step: float
    y_count: int
    z_origin: float
    z_step: float
    z_count: int

    def __post_init__(self):
        for ax in "xyz":
            if getattr(self, f"{ax}_step") <= 0:
                raise ValueError(f"{ax} step must be positive")
            if getattr(self, f"{ax}_count") < 1:
                raise ValueError(f"{ax} count must be >= 1")
        # cylinder axis (x = 0, y = 0) must lie inside the x-y extent
        for ax in "xy":
            lo, hi = self.extent(ax)
            if not (lo <= 0.0 <= hi):
                raise ValueError(f"cylinder axis outside the {ax} extent [{lo}, {hi}]")

    def axis(self, name: str) -> np.ndarray:
        origin = getattr(self, f"{name}_origin")
        step = getattr(self, f"{name}_step")
        count = getattr(self, f"{name}_count")
        return origin + step * np.arange(count)

    def extent(self, name: str) -> tuple:
        origin = getattr(self, f"{name}_origin")
        step = getattr(self, f"{name}_step")
        count = getattr(self, f"{name}_count")
        return (origin, origin + step * (count - 1))

    @property
    def shape(self) -> tuple:
        return (self.x_count, self.y_count, self.z_count)

    @property
    def center(self) -> tuple:
        return tuple(0.5 * (lo + hi) for lo, hi in
                     (self.extent("x"), self.extent("y"), self.extent("z")))

    def contains(self, point) -> bool:
        return all(lo - 1e-12 <= p <= hi + 1e-12 for p, (lo, hi) in
                   zip(point, (self.extent("x"), self.extent("y"), self.extent("z"))))


@dataclass(frozen=True)
class PointTarget:
    """Ideal point scatterer with complex reflectivity."""

    position: tuple
    reflectivity: complex = 1.0 + 0.0j

    def __post_init__(self):
        if len(self.position) != 3:
            raise ValueError("target position must be (x, y, z)")
        if not all(math.isfinite(p) for p in self.position):
            raise ValueError("target position must be finite")
        if not (math.isfinite(self.reflectivity.real) and math.isfinite(self.reflectivity.imag)):
            raise ValueError("target reflectivity must be finite")


def _centered_angles(count: int, arc_interval: float, radius: float, label: str) -> np.ndarray:
    if count < 2:
        raise ValueError(f"{label} array needs at least 2 elements, got {count}")
    if arc_interval <= 0:
        raise ValueError(f"{label} arc interval must be positive (degenerate arc)")
    dtheta = arc_interval / radius
    angles = (np.arange(count) - (count - 1) / 2.0) * dtheta
    if angles[-1] >= math.pi / 2:
        raise ValueError(f"{label} arc exceeds the half circle (-pi/2, pi/2)")
    return angles


def build_geometry(config: "ScenarioConfig") -> ArrayGeometry:
    """Construct the aperture from a scenario config.

    Arc intervals in the config are arc lengths along the circumference and
    are converted to angular steps by dividing by the radius.  Both arrays
    and the scan axis come out centered on zero.
    """
    g = config.geometry
    if g.radius_m <= 0:
        raise ValueError(f"radius must be positive, got {g.radius_m}")
    tx = _centered_angles(g.tx_count, g.tx_arc_interval_m, g.radius_m, "tx")
    rx = _centered_angles(g.rx_count, g.rx_arc_interval_m, g.radius_m, "rx")
    if g.z_count < 1:
        raise ValueError("z_count must be >= 1")
    if g.z_count > 1 and g.z_step_m <= 0:
        raise ValueError("z_step must be positive")
    z = (np.arange(g.z_count) - (g.z_count - 1) / 2.0) * g.z_step_m
    return ArrayGeometry(radius=g.radius_m, tx_angles=tx, rx_angles=rx, z_positions=z)


def antenna_position(angle: float, z: float, radius: float):
    """Cartesian position of an arc element: (R0 sin(angle), -R0 cos(angle), z)."""
    return (radius * math.sin(angle), -radius * math.cos(angle), z)


def aperture_angles(geom: ArrayGeometry, grid: SceneGrid, beamwidth: float = math.pi):
    """Effective aperture angles (theta_h, theta_z).

    theta_h is the full angular span of the wider of the two arcs (transmit
    endpoints normally coincide with the receive endpoints).  theta_z is the
    smaller of the element beamwidth and the angle subtended by the scan
    length from the scene center.
    """
    span_t = float(geom.tx_angles[-1] - geom.tx_angles[0])
    span_r = float(geom.rx_angles[-1] - geom.rx_angles[0])
    theta_h = max(span_t, span_r)

    cx, cy, cz = grid.center
    aperture_center = (0.0, -geom.radius, float(np.mean(geom.z_positions)))
    rng = math.sqrt((cx - aperture_center[0]) ** 2
                    + (cy - aperture_center[1]) ** 2
                    + (cz - aperture_center[2]) ** 2)
    scan_angle = 2.0 * math.atan2(geom.scan_length / 2.0, rng)
    theta_z = min(beamwidth, scan_angle)
    return theta_h, theta_z
