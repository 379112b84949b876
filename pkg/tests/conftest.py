import numpy as np
import pytest

from arcmimo.config import ScenarioConfig, BandConfig, GeometryConfig, SceneConfig, TargetSpec
from arcmimo.forward import FrequencyGrid, simulate_echo
from arcmimo.geometry import PointTarget, SceneGrid, build_geometry


def mini_config(targets=((0.02, 0.01, 0.03),)) -> ScenarioConfig:
    """Small scenario that keeps full pipeline runs around a second."""
    cfg = ScenarioConfig()
    cfg.band = BandConfig(f_start_hz=30e9, f_stop_hz=35e9, count=9)
    cfg.geometry = GeometryConfig(radius_m=1.0, tx_count=5, tx_arc_interval_m=0.099,
                                  rx_count=21, rx_arc_interval_m=0.0198,
                                  z_count=31, z_step_m=0.01)
    cfg.scene = SceneConfig(x_origin_m=-0.0575, x_step_m=0.005, x_count=24,
                            y_origin_m=-0.069, y_step_m=0.006, y_count=24,
                            z_origin_m=-0.0575, z_step_m=0.005, z_count=24)
    cfg.targets = [TargetSpec(x_m=t[0], y_m=t[1], z_m=t[2]) for t in targets]
    return cfg


@pytest.fixture(scope="session")
def mini_cfg():
    return mini_config()


@pytest.fixture(scope="session")
def mini_echo(mini_cfg):
    geom = build_geometry(mini_cfg)
    freqs = FrequencyGrid(mini_cfg.band.f_start_hz, mini_cfg.band.f_stop_hz,
                          mini_cfg.band.count)
    return simulate_echo(geom, freqs, mini_cfg.point_targets())


@pytest.fixture(scope="session")
def mini_scene(mini_cfg):
    return mini_cfg.scene_grid()
