import math

import numpy as np
import pytest

from arcmimo.bp import bp_reconstruct, bp_reconstruct_monostatic
from arcmimo.design import (SCAN_STEP_CAP, max_rx_spacing, max_scan_step,
                            resolutions, validate_config)
from arcmimo.forward import FrequencyGrid, simulate_echo, simulate_monostatic
from arcmimo.geometry import ArrayGeometry, PointTarget, SceneGrid
from arcmimo.metrics import mainlobe_width, sidelobe_level
from arcmimo.spectral import C_LIGHT
from tests.conftest import mini_config

LAMBDA_MIN_35GHZ = C_LIGHT / 35e9     # 8.5655 mm


def table2_config(scene_x_extent=0.5):
    cfg = mini_config()
    cfg.geometry.rx_count = 41
    cfg.geometry.rx_arc_interval_m = 0.0099
    cfg.geometry.z_count = 51
    cfg.geometry.z_step_m = 0.01
    cfg.band.count = 25
    n = cfg.scene.x_count
    cfg.scene.x_step_m = scene_x_extent / (n - 1)
    cfg.scene.x_origin_m = -scene_x_extent / 2
    return cfg


def test_max_rx_spacing_closed_form():
    assert max_rx_spacing(LAMBDA_MIN_35GHZ, 0.5) == LAMBDA_MIN_35GHZ / 0.5
    assert max_rx_spacing(LAMBDA_MIN_35GHZ, 0.5) == pytest.approx(0.017131, abs=1e-6)
    assert max_rx_spacing(1.0, 1.0) == 1.0


def test_max_rx_spacing_reference_interval_bound():
    # the 9.9 mrad receive step stays alias-free for any aperture D <= 0.865 m
    d_limit = LAMBDA_MIN_35GHZ / 0.0099
    assert d_limit == pytest.approx(0.8652, abs=2e-4)
    assert max_rx_spacing(LAMBDA_MIN_35GHZ, 0.5) > 0.0099
    assert max_rx_spacing(LAMBDA_MIN_35GHZ, 0.9) < 0.0099


def test_max_rx_spacing_rejects_bad_inputs():
    with pytest.raises(ValueError):
        max_rx_spacing(0.0, 1.0)
    with pytest.raises(ValueError):
        max_rx_spacing(1.0, -2.0)


def test_max_scan_step_closed_form():
    assert max_scan_step(LAMBDA_MIN_35GHZ, math.pi) == LAMBDA_MIN_35GHZ / 4.0
    got = max_scan_step(LAMBDA_MIN_35GHZ, 0.4899)
    expected = LAMBDA_MIN_35GHZ / (4.0 * math.sin(0.4899 / 2.0))
    assert got == expected
    assert got == pytest.approx(0.008829, abs=2e-6)
    assert got < 0.01   # the 1 cm reference scan step is marginal here


def test_max_scan_step_degenerate_cap():
    with pytest.warns(RuntimeWarning):
        assert max_scan_step(LAMBDA_MIN_35GHZ, 1e-12) == SCAN_STEP_CAP
    with pytest.raises(ValueError):
        max_scan_step(LAMBDA_MIN_35GHZ, 0.0)
    with pytest.raises(ValueError):
        max_scan_step(LAMBDA_MIN_35GHZ, 4.0)


def test_resolutions_closed_forms():
    lam_c = C_LIGHT / 32.5e9
    dx, dy, dz = resolutions(lam_c, 5e9, 0.396, 0.4899)
    assert dy == pytest.approx(0.029979, abs=1e-6)            # c / 2B
    assert dx == pytest.approx(lam_c / (4 * math.sin(0.198)), rel=1e-12)
    assert dx == pytest.approx(0.01172, abs=2e-5)
    assert dz == pytest.approx(lam_c / (4 * math.sin(0.4899 / 2)), rel=1e-12)


def test_resolutions_theta_equality():
    dx, _, dz = resolutions(0.009, 5e9, 0.4, 0.4)
    assert dx == dz


def test_resolution_scaling_with_aperture():
    # doubling sin(theta_h/2) halves delta_x
    lam_c = 0.0092
    th1 = 0.3
    th2 = 2.0 * math.asin(2.0 * math.sin(th1 / 2.0))
    dx1, _, _ = resolutions(lam_c, 5e9, th1, 0.5)
    dx2, _, _ = resolutions(lam_c, 5e9, th2, 0.5)
    assert dx2 == pytest.approx(dx1 / 2.0, rel=1e-12)


def test_bound_monotonicity_grids():
    lams = np.linspace(0.006, 0.012, 5)
    ds = np.linspace(0.2, 1.0, 5)
    for lam in lams:
        vals = [max_rx_spacing(lam, d) for d in ds]
        assert all(a > b for a, b in zip(vals, vals[1:]))
    thetas = np.linspace(0.2, 3.0, 6)
    for lam in lams:
        vals = [max_scan_step(lam, t) for t in thetas]
        assert all(a > b for a, b in zip(vals, vals[1:]))


def test_validate_reference_scenario_scan_step_flagged():
    report = validate_config(table2_config(scene_x_extent=0.5))
    rules = [v.rule for v in report.violations]
    # receive spacing passes for D = 0.5 m, the 1 cm scan step is marginal
    assert "receive angular step" not in rules
    assert "scan step" in rules
    assert report.max_rx_angular_step == pytest.approx(0.017131, abs=1e-6)


def test_validate_flags_single_tx():
    cfg = table2_config()
    cfg.geometry.tx_count = 1
    report = validate_config(cfg)
    assert any(v.rule == "transmit endpoints" for v in report.violations)


def test_validate_flags_short_tx_span():
    cfg = table2_config()
    cfg.geometry.tx_arc_interval_m = 0.01   # tx span well inside the rx span
    report = validate_config(cfg)
    assert any(v.rule == "transmit endpoints" for v in report.violations)


def test_validate_flags_doubled_scan_step():
    cfg = table2_config()
    cfg.geometry.z_step_m = 0.02
    report = validate_config(cfg)
    scan = [v for v in report.violations if v.rule == "scan step"]
    assert scan and scan[0].actual == pytest.approx(0.02)
    assert scan[0].bound < 0.02


def test_validate_rx_violation_when_scene_grows():
    cfg = table2_config(scene_x_extent=1.0)
    report = validate_config(cfg)
    assert any(v.rule == "receive angular step" for v in report.violations)


def test_report_serialization_forms():
    report = validate_config(table2_config())
    text = report.as_text()
    assert "design report" in text and "violations" in text
    kv = report.as_keyvalues()
    assert "max_scan_step_m" in kv and "violation_count" in kv


# ---------------------------------------------------------------------------
# transmit-count behavior (1-D BP cuts)
# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def nt_study_cuts():
    freqs = FrequencyGrid(30e9, 35e9, 25)
    span = 0.396
    rx = np.linspace(-span / 2, span / 2, 31)
    target = [PointTarget(position=(0.0, 0.0, 0.0))]
    scene = SceneGrid(x_origin=-0.08, x_step=0.001, x_count=161,
                      y_origin=0.0, y_step=1.0, y_count=1,
                      z_origin=0.0, z_step=1.0, z_count=1)
    out = {}
    for nt in (2, 3, 31):
        geom = ArrayGeometry(radius=1.0, tx_angles=np.linspace(-span / 2, span / 2, nt),
                             rx_angles=rx, z_positions=np.asarray([0.0]))
        cube = simulate_echo(geom, freqs, target)
        img = bp_reconstruct(cube, scene)
        out[nt] = (mainlobe_width(img, "x"), sidelobe_level(img, "x"))
    mono = simulate_monostatic(1.0, np.linspace(-span / 2, span / 2, 61), freqs, target)
    img = bp_reconstruct_monostatic(mono, scene)
    out["mono"] = (mainlobe_width(img, "x"), sidelobe_level(img, "x"))
    return out


def test_two_transmitters_narrower_but_noisier(nt_study_cuts):
    w2, s2 = nt_study_cuts[2]
    w3, s3 = nt_study_cuts[3]
    assert w2 <= w3
    assert s2 >= s3


def test_two_transmitters_recover_monostatic_width(nt_study_cuts):
    # transmitters at the receive-array endpoints tile the cross-range
    # spectrum uniformly, so the N_t = 2 main lobe matches the 61-pair
    # monostatic one almost exactly
    w2, _ = nt_study_cuts[2]
    wm, _ = nt_study_cuts["mono"]
    assert abs(w2 - wm) / wm < 0.05


def test_dense_tx_width_follows_triangle_weighting(nt_study_cuts):
    # a filled transmit array weights the cross-range spectrum with a
    # triangle, which widens the -3 dB lobe by sinc^2/sinc ~ 1.44 relative to
    # the monostatic benchmark and pushes the first sidelobe toward -26.5 dB
    # (the acceptance suite tracks the nominal 15% figure separately)
    w31, s31 = nt_study_cuts[31]
    wm, _ = nt_study_cuts["mono"]
    assert 1.25 < w31 / wm < 1.55
    assert s31 < -24.0
