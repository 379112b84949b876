"""Sampling-criteria and resolution calculators plus the scenario validator.

All bounds are anti-aliasing guidance rather than physical impossibilities;
the validator reports violations as data and the CLI only turns them into a
non-zero exit code under --strict.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import List, Tuple

from .forward import FrequencyGrid
from .spectral import C_LIGHT

# returned instead of an infinite scan-step bound for a degenerate aperture
SCAN_STEP_CAP = 1.0e6


@dataclass
class Violation:
    rule: str
    actual: float
    bound: float

    def __str__(self):
        return f"{self.rule}: actual {self.actual:.6g} exceeds bound {self.bound:.6g}"


@dataclass
class DesignReport:
    max_rx_angular_step: float
    max_scan_step: float
    delta_x: float
    delta_y: float
    delta_z: float
    violations: List[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def as_text(self) -> str:
        lines = [
            "design report",
            f"  receive angular-step bound : {self.max_rx_angular_step * 1e3:.4f} mrad",
            f"  scan-step bound            : {self.max_scan_step * 1e3:.4f} mm",
            f"  resolution x (cross-range) : {self.delta_x * 1e3:.3f} mm",
            f"  resolution y (down-range)  : {self.delta_y * 1e3:.3f} mm",
            f"  resolution z (height)      : {self.delta_z * 1e3:.3f} mm",
        ]
        if self.violations:
            lines.append("  violations:")
            lines.extend(f"    - {v}" for v in self.violations)
        else:
            lines.append("  violations: none")
        return "\n".join(lines)

    def as_keyvalues(self) -> str:
        lines = [
            f"max_rx_angular_step_rad = {self.max_rx_angular_step!r}",
            f"max_scan_step_m = {self.max_scan_step!r}",
            f"delta_x_m = {self.delta_x!r}",
            f"delta_y_m = {self.delta_y!r}",
            f"delta_z_m = {self.delta_z!r}",
            f"violation_count = {len(self.violations)}",
        ]
        for i, v in enumerate(self.violations):
            lines.append(f"violation_{i} = {v.rule} {v.actual!r} {v.bound!r}")
        return "\n".join(lines)


def max_rx_spacing(lambda_min: float, aperture_d: float) -> float:
    """Largest alias-free receive angular step, lambda_min / D."""
    if lambda_min <= 0 or aperture_d <= 0:
        raise ValueError("wavelength and scene dimension must be positive")
    return lambda_min / aperture_d


def max_scan_step(lambda_min: float, theta_z: float) -> float:
    """Largest alias-free vertical scan step, lambda_min / (4 sin(theta_z/2))."""
    if lambda_min <= 0:
        raise ValueError("wavelength must be positive")
    if not (0.0 < theta_z <= math.pi):
        raise ValueError(f"theta_z must be in (0, pi], got {theta_z}")
    s = math.sin(theta_z / 2.0)
    bound = lambda_min / (4.0 * s)
    if bound > SCAN_STEP_CAP:
        warnings.warn("scan aperture is degenerate; scan-step bound capped",
                      RuntimeWarning, stacklevel=2)
        return SCAN_STEP_CAP
    return bound


def resolutions(lambda_c: float, bandwidth: float,
                theta_h: float, theta_z: float) -> Tuple[float, float, float]:
    """(delta_x, delta_y, delta_z) closed forms.

    delta_x = lambda_c / (4 sin(theta_h/2)), delta_y = c / (2 B),
    delta_z = lambda_c / (4 sin(theta_z/2)).
    """
    if lambda_c <= 0 or bandwidth <= 0 or theta_h <= 0 or theta_z <= 0:
        raise ValueError("all resolution inputs must be positive")
    dx = lambda_c / (4.0 * math.sin(theta_h / 2.0))
    dy = C_LIGHT / (2.0 * bandwidth)
    dz = lambda_c / (4.0 * math.sin(theta_z / 2.0))
    return dx, dy, dz


def validate_config(cfg) -> DesignReport:
    """Evaluate the three sampling/resolution rules against a scenario.

    The cross-range aperture D defaults to the configured scene x extent.
    The config is never mutated and violations come back as data, so even
    configs that the geometry builder would reject (single transmitter,
    degenerate arcs) still produce a report.
    """
    scene = cfg.scene_grid()
    freqs = FrequencyGrid(cfg.band.f_start_hz, cfg.band.f_stop_hz, cfg.band.count)
    lam_min = freqs.min_wavelength
    lam_c = freqs.center_wavelength

    # aperture angles from config arithmetic (no geometry construction)
    g = cfg.geometry
    span_t = max(g.tx_count - 1, 0) * g.tx_arc_interval_m / g.radius_m
    span_r = max(g.rx_count - 1, 0) * g.rx_arc_interval_m / g.radius_m
    theta_h = max(span_t, span_r)
    scan_length = max(g.z_count - 1, 0) * g.z_step_m
    cx, cy, cz = scene.center
    rng = math.sqrt(cx ** 2 + (cy + g.radius_m) ** 2 + cz ** 2)
    theta_z = min(cfg.options.beamwidth_rad,
                  2.0 * math.atan2(scan_length / 2.0, rng))
    violations: List[Violation] = []

    lo, hi = scene.extent("x")
    aperture_d = hi - lo if hi > lo else scene.x_step
    rx_bound = max_rx_spacing(lam_min, aperture_d)
    rx_actual = cfg.geometry.rx_arc_interval_m / cfg.geometry.radius_m
    if rx_actual > rx_bound * (1.0 + 1e-12):
        violations.append(Violation("receive angular step", rx_actual, rx_bound))

    if theta_z > 0:
        scan_bound = max_scan_step(lam_min, theta_z)
        if cfg.geometry.z_count > 1 and cfg.geometry.z_step_m > scan_bound * (1.0 + 1e-12):
            violations.append(Violation("scan step", cfg.geometry.z_step_m, scan_bound))
    else:
        scan_bound = SCAN_STEP_CAP
        violations.append(Violation("scan aperture degenerate", theta_z, 0.0))

    # transmit rule: at least two elements, endpoints at or outside the
    # receive endpoints
    if cfg.geometry.tx_count < 2:
        violations.append(Violation("transmit endpoints", cfg.geometry.tx_count, 2.0))
    else:
        tx_half = (cfg.geometry.tx_count - 1) / 2.0 \
            * cfg.geometry.tx_arc_interval_m / cfg.geometry.radius_m
        rx_half = (cfg.geometry.rx_count - 1) / 2.0 \
            * cfg.geometry.rx_arc_interval_m / cfg.geometry.radius_m
        if tx_half < rx_half * (1.0 - 1e-9):
            violations.append(Violation("transmit endpoints", tx_half, rx_half))

    if theta_h <= 0 or theta_z <= 0:
        dx = dy = dz = float("nan")
    else:
        dx, dy, dz = resolutions(lam_c, freqs.bandwidth, theta_h, theta_z)
    return DesignReport(max_rx_angular_step=rx_bound, max_scan_step=scan_bound,
                        delta_x=dx, delta_y=dy, delta_z=dz, violations=violations)
