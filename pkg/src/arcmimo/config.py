"""Scenario configuration: line-oriented ``key = value`` files with
``[section]`` headers.

The format is deliberately dependency-free so alternate implementations can
parse it.  Unknown sections or keys are rejected with line-precise errors;
``target`` is the only repeatable key.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional

from .geometry import PointTarget, SceneGrid


class ConfigError(Exception):
    """Scenario file error with a line-precise message."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass
class BandConfig:
    f_start_hz: float = 30e9
    f_stop_hz: float = 35e9
    count: int = 25


@dataclass
class GeometryConfig:
    radius_m: float = 1.0
    tx_count: int = 5
    tx_arc_interval_m: float = 0.099
    rx_count: int = 41
    rx_arc_interval_m: float = 0.0099
    z_count: int = 51
    z_step_m: float = 0.01


@dataclass
class SceneConfig:
    x_origin_m: float = -0.15
    x_step_m: float = 0.005
    x_count: int = 61
    y_origin_m: float = -0.24
    y_step_m: float = 0.008
    y_count: int = 61
    z_origin_m: float = -0.12
    z_step_m: float = 0.004
    z_count: int = 61


@dataclass
class OptionsConfig:
    beamwidth_rad: float = math.pi
    epsilon_h: float = 1e-3
    epsilon_w: float = 1e-8
    matched_filter: bool = False
    amplitude_decay: bool = False
    noise_snr_db: Optional[float] = None
    noise_seed: int = 0


@dataclass
class OutputConfig:
    echo_path: str = ""
    image_path: str = ""


@dataclass
class TargetSpec:
    x_m: float
    y_m: float
    z_m: float
    reflectivity: complex = 1.0 + 0.0j

    def as_point_target(self) -> PointTarget:
        return PointTarget(position=(self.x_m, self.y_m, self.z_m),
                           reflectivity=self.reflectivity)


@dataclass
class ScenarioConfig:
    band: BandConfig = field(default_factory=BandConfig)
    geometry: GeometryConfig = field(default_factory=GeometryConfig)
    scene: SceneConfig = field(default_factory=SceneConfig)
    options: OptionsConfig = field(default_factory=OptionsConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    targets: List[TargetSpec] = field(default_factory=list)

    def scene_grid(self) -> SceneGrid:
        s = self.scene
        return SceneGrid(x_origin=s.x_origin_m, x_step=s.x_step_m, x_count=s.x_count,
                         y_origin=s.y_origin_m, y_step=s.y_step_m, y_count=s.y_count,
                         z_origin=s.z_origin_m, z_step=s.z_step_m, z_count=s.z_count)

    def point_targets(self) -> List[PointTarget]:
        return [t.as_point_target() for t in self.targets]


_INT_KEYS = {"count", "tx_count", "rx_count", "z_count",
             "x_count", "y_count", "z_count", "noise_seed"}
_BOOL_KEYS = {"matched_filter", "amplitude_decay"}
_OPTIONAL_FLOAT_KEYS = {"noise_snr_db"}
_STR_KEYS = {"echo_path", "image_path"}

_SECTION_FIELDS = {
    "band": {"f_start_hz", "f_stop_hz", "count"},
    "geometry": {"radius_m", "tx_count", "tx_arc_interval_m", "rx_count",
                 "rx_arc_interval_m", "z_count", "z_step_m"},
    "scene": {"x_origin_m", "x_step_m", "x_count", "y_origin_m", "y_step_m",
              "y_count", "z_origin_m", "z_step_m", "z_count"},
    "options": {"beamwidth_rad", "epsilon_h", "epsilon_w", "matched_filter",
                "amplitude_decay", "noise_snr_db", "noise_seed"},
    "output": {"echo_path", "image_path"},
    "targets": {"target"},
}


def _parse_bool(raw: str, lineno: int) -> bool:
    low = raw.strip().lower()
    if low in ("true", "1", "yes", "on"):
        return True
    if low in ("false", "0", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {raw!r}", lineno)


def _parse_target(raw: str, lineno: int) -> TargetSpec:
    parts = raw.split()
    if len(parts) not in (4, 5):
        raise ConfigError("target needs 'x y z re [im]'", lineno)
    try:
        vals = [float(p) for p in parts]
    except ValueError as exc:
        raise ConfigError(f"bad target component in {raw!r}", lineno) from exc
    im = vals[4] if len(vals) == 5 else 0.0
    return TargetSpec(x_m=vals[0], y_m=vals[1], z_m=vals[2],
                      reflectivity=complex(vals[3], im))


def parse_config(text: str) -> ScenarioConfig:
    """Parse scenario text; unknown sections/keys are errors."""
    cfg = ScenarioConfig()
    sections = {"band": cfg.band, "geometry": cfg.geometry, "scene": cfg.scene,
                "options": cfg.options, "output": cfg.output}
    current = None
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"malformed section header {raw_line.strip()!r}", lineno)
            name = line[1:-1].strip()
            if name not in _SECTION_FIELDS:
                raise ConfigError(f"unknown section [{name}]", lineno)
            current = name
            continue
        if current is None:
            raise ConfigError("key outside of any [section]", lineno)
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw_line.strip()!r}", lineno)
        key, _, raw_value = line.partition("=")
        key = key.strip()
        raw_value = raw_value.strip()
        if key not in _SECTION_FIELDS[current]:
            raise ConfigError(f"unknown key {key!r} in section [{current}]", lineno)
        if current == "targets":
            cfg.targets.append(_parse_target(raw_value, lineno))
            continue
        obj = sections[current]
        try:
            if key in _BOOL_KEYS:
                value = _parse_bool(raw_value, lineno)
            elif key in _STR_KEYS:
                value = raw_value
            elif key in _OPTIONAL_FLOAT_KEYS:
                value = None if raw_value in ("", "none") else float(raw_value)
            elif key in _INT_KEYS:
                value = int(raw_value)
            else:
                value = float(raw_value)
        except ValueError as exc:
            raise ConfigError(f"bad value {raw_value!r} for key {key!r}", lineno) from exc
        setattr(obj, key, value)
    _validate(cfg)
    return cfg


def _validate(cfg: ScenarioConfig) -> None:
    b = cfg.band
    if b.count < 1:
        raise ConfigError("band count must be >= 1")
    if b.f_start_hz <= 0 or (b.count > 1 and b.f_stop_hz <= b.f_start_hz):
        raise ConfigError("band must satisfy 0 < f_start < f_stop")
    g = cfg.geometry
    if g.radius_m <= 0:
        raise ConfigError("radius must be positive")
    if g.z_count < 1:
        raise ConfigError("z_count must be >= 1")
    cfg.scene_grid()   # raises on bad scene values


def parse_sections(text: str):
    """Generic pass over the same syntax: {section: [(lineno, key, value)]}.

    Used by the experiment-study configs, which have their own schemas on top
    of the shared line format.
    """
    out = {}
    current = None
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"malformed section header {raw_line.strip()!r}", lineno)
            current = line[1:-1].strip()
            out.setdefault(current, [])
            continue
        if current is None:
            raise ConfigError("key outside of any [section]", lineno)
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw_line.strip()!r}", lineno)
        key, _, raw_value = line.partition("=")
        out[current].append((lineno, key.strip(), raw_value.strip()))
    return out


def load_config(path) -> ScenarioConfig:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            return parse_config(fh.read())
        except ConfigError as exc:
            raise ConfigError(f"{path}: {exc}") from exc


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def serialize_config(cfg: ScenarioConfig) -> str:
    """Canonical text form; parse(serialize(cfg)) round-trips byte-exactly."""
    lines = ["[band]"]
    for key in ("f_start_hz", "f_stop_hz", "count"):
        lines.append(f"{key} = {_fmt(getattr(cfg.band, key))}")
    lines.append("")
    lines.append("[geometry]")
    for key in sorted(_SECTION_FIELDS["geometry"]):
        lines.append(f"{key} = {_fmt(getattr(cfg.geometry, key))}")
    lines.append("")
    lines.append("[scene]")
    for key in sorted(_SECTION_FIELDS["scene"]):
        lines.append(f"{key} = {_fmt(getattr(cfg.scene, key))}")
    lines.append("")
    lines.append("[options]")
    for key in sorted(_SECTION_FIELDS["options"]):
        value = getattr(cfg.options, key)
        lines.append(f"{key} = {'none' if value is None else _fmt(value)}")
    lines.append("")
    lines.append("[output]")
    for key in sorted(_SECTION_FIELDS["output"]):
        lines.append(f"{key} = {_fmt(getattr(cfg.output, key))}")
    lines.append("")
    lines.append("[targets]")
    for t in cfg.targets:
        lines.append(f"target = {t.x_m!r} {t.y_m!r} {t.z_m!r} "
                     f"{t.reflectivity.real!r} {t.reflectivity.imag!r}")
    lines.append("")
    return "\n".join(lines)


def save_config(cfg: ScenarioConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_config(cfg))
