"""Near-field imaging for circular-arc MIMO arrays.

Echo simulation for arc apertures with vertical mechanical scanning, a
wavenumber-domain reconstruction pipeline, a back-projection reference,
sampling/resolution design rules and image-quality metrics.
"""

from .geometry import (ArrayGeometry, PointTarget, SceneGrid, antenna_position,
                       aperture_angles, build_geometry)
from .forward import (EchoCube, FrequencyGrid, MonostaticEcho,
                      load_external_echo, save_echo, simulate_echo,
                      simulate_monostatic)
from .rma import (ImageVolume, ReconstructOptions, reconstruct)
from .bp import bp_reconstruct, bp_reconstruct_monostatic
from .design import DesignReport, max_rx_spacing, max_scan_step, resolutions, \
    validate_config
from .metrics import image_nrmse, mainlobe_width, peak_location, peak_report, \
    sidelobe_level
from .config import ScenarioConfig, load_config, parse_config, save_config

__version__ = "0.1.0"

__all__ = [
    "ArrayGeometry", "PointTarget", "SceneGrid", "antenna_position",
    "aperture_angles", "build_geometry",
    "EchoCube", "FrequencyGrid", "MonostaticEcho", "load_external_echo",
    "save_echo", "simulate_echo", "simulate_monostatic",
    "ImageVolume", "ReconstructOptions", "reconstruct",
    "bp_reconstruct", "bp_reconstruct_monostatic",
    "DesignReport", "max_rx_spacing", "max_scan_step", "resolutions",
    "validate_config",
    "image_nrmse", "mainlobe_width", "peak_location", "peak_report",
    "sidelobe_level",
    "ScenarioConfig", "load_config", "parse_config", "save_config",
    "__version__",
]
