import math

import numpy as np
import pytest

from arcmimo.bp import bp_reconstruct, bp_reconstruct_monostatic
from arcmimo.forward import EchoCube, FrequencyGrid, simulate_echo, simulate_monostatic
from arcmimo.geometry import ArrayGeometry, PointTarget, SceneGrid


def geom_small():
    return ArrayGeometry(radius=1.0,
                         tx_angles=np.asarray([-0.15, 0.0, 0.15]),
                         rx_angles=np.linspace(-0.15, 0.15, 9),
                         z_positions=np.linspace(-0.06, 0.06, 7))


def freqs_small():
    return FrequencyGrid(30e9, 35e9, 7)


def scene_small():
    # 0.004 m voxels; odd counts put the origin exactly on voxel (7, 7, 7)
    return SceneGrid(x_origin=-0.028, x_step=0.004, x_count=15,
                     y_origin=-0.028, y_step=0.004, y_count=15,
                     z_origin=-0.028, z_step=0.004, z_count=15)


def test_bp_peak_at_target_voxel_with_sample_count_value():
    geom, freqs, scene = geom_small(), freqs_small(), scene_small()
    # target exactly on a voxel center
    pos = (scene.axis("x")[7], scene.axis("y")[9], scene.axis("z")[5])
    cube = simulate_echo(geom, freqs, [PointTarget(position=pos)])
    img = bp_reconstruct(cube, scene)
    idx = np.unravel_index(np.argmax(np.abs(img.data)), img.data.shape)
    assert idx == (7, 9, 5)
    n_samples = cube.data.size
    assert abs(img.data[idx]) == pytest.approx(n_samples, rel=1e-12)


def test_bp_zero_echo_gives_zero_image():
    geom, freqs, scene = geom_small(), freqs_small(), scene_small()
    cube = EchoCube(data=np.zeros((freqs.count, 3, 9, 7), dtype=complex),
                    freqs=freqs, geom=geom)
    img = bp_reconstruct(cube, scene)
    assert np.all(img.data == 0)


def test_bp_two_equal_targets_equal_peaks():
    geom, freqs = geom_small(), freqs_small()
    # delta_x ~ 10 mm here; separate by ~24 mm > 2 delta_x
    scene = SceneGrid(x_origin=-0.036, x_step=0.004, x_count=19,
                      y_origin=-0.012, y_step=0.004, y_count=7,
                      z_origin=-0.012, z_step=0.004, z_count=7)
    xs = scene.axis("x")
    pa = (xs[3], 0.0, 0.0)
    pb = (xs[15], 0.0, 0.0)
    cube = simulate_echo(geom, freqs, [PointTarget(position=pa), PointTarget(position=pb)])
    img = bp_reconstruct(cube, scene)
    mag = np.abs(img.data)
    peak_a = mag[3, 3, 3]
    peak_b = mag[15, 3, 3]
    assert abs(peak_a - peak_b) / max(peak_a, peak_b) < 0.05


def test_bp_is_adjoint_of_forward():
    geom, freqs, scene = geom_small(), freqs_small(), scene_small()
    rng = np.random.default_rng(17)
    echo_shape = (freqs.count, geom.tx_angles.size, geom.rx_angles.size,
                  geom.z_positions.size)
    e = rng.standard_normal(echo_shape) + 1j * rng.standard_normal(echo_shape)
    cube_e = EchoCube(data=e, freqs=freqs, geom=geom)

    # sparse target set on voxel centers
    xs, ys, zs = scene.axis("x"), scene.axis("y"), scene.axis("z")
    voxels = [(2, 3, 4), (7, 9, 5), (12, 1, 14), (5, 5, 5)]
    weights = rng.standard_normal(len(voxels)) + 1j * rng.standard_normal(len(voxels))
    targets = [PointTarget(position=(xs[i], ys[j], zs[k]), reflectivity=w)
               for (i, j, k), w in zip(voxels, weights)]

    forward_echo = simulate_echo(geom, freqs, targets)
    back = bp_reconstruct(cube_e, scene)
    lhs = np.vdot(forward_echo.data, e)
    rhs = sum(np.conj(w) * back.data[idx] for idx, w in zip(voxels, weights))
    assert abs(lhs - rhs) / abs(rhs) < 1e-9


def test_bp_translation_consistency_in_z():
    geom, freqs, scene = geom_small(), freqs_small(), scene_small()
    zs = scene.axis("z")
    a = simulate_echo(geom, freqs, [PointTarget(position=(0.0, 0.0, zs[6]))])
    b = simulate_echo(geom, freqs, [PointTarget(position=(0.0, 0.0, zs[7]))])
    ia = np.unravel_index(np.argmax(np.abs(bp_reconstruct(a, scene).data)), scene.shape)
    ib = np.unravel_index(np.argmax(np.abs(bp_reconstruct(b, scene).data)), scene.shape)
    assert ib[2] - ia[2] == 1
    assert ia[:2] == ib[:2]


def test_bp_monostatic_peak_on_axis():
    freqs = freqs_small()
    angles = np.linspace(-0.2, 0.2, 31)
    echo = simulate_monostatic(1.0, angles, freqs,
                               [PointTarget(position=(0.0, 0.0, 0.0))],
                               z_positions=np.linspace(-0.05, 0.05, 5))
    scene = scene_small()
    img = bp_reconstruct_monostatic(echo, scene)
    idx = np.unravel_index(np.argmax(np.abs(img.data)), img.data.shape)
    # origin voxel is index 7 on every axis (origin -0.03, step 0.004)
    assert idx == (7, 7, 7)


def test_bp_monostatic_width_matches_formula():
    # 61-element arc spanning 0.4 rad: delta_x = lambda_c / (4 sin(theta_h/2))
    freqs = FrequencyGrid(30e9, 35e9, 25)
    span = 0.4
    angles = np.linspace(-span / 2, span / 2, 61)
    echo = simulate_monostatic(1.0, angles, freqs, [PointTarget(position=(0.0, 0.0, 0.0))])
    scene = SceneGrid(x_origin=-0.05, x_step=0.001, x_count=101,
                      y_origin=0.0, y_step=1.0, y_count=1,
                      z_origin=0.0, z_step=1.0, z_count=1)
    img = bp_reconstruct_monostatic(echo, scene)
    cut = np.abs(img.data[:, 0, 0])
    i = np.argmax(cut)
    level = cut[i] / math.sqrt(2)
    right = i
    while cut[right] > level:
        right += 1
    left = i
    while cut[left] > level:
        left -= 1
    rf = right - (level - cut[right]) / (cut[right - 1] - cut[right])
    lf = left + (level - cut[left]) / (cut[left + 1] - cut[left])
    width = (rf - lf) * scene.x_step
    lam_c = 299792458.0 / 32.5e9
    formula = lam_c / (4.0 * math.sin(span / 2.0))
    assert abs(width - formula) / formula < 0.3


def test_bp_monostatic_single_frequency_has_no_range_resolution():
    freqs = FrequencyGrid(32.5e9, 32.5e9, 1)
    angles = np.linspace(-0.2, 0.2, 61)
    echo = simulate_monostatic(1.0, angles, freqs, [PointTarget(position=(0.0, 0.0, 0.0))])
    scene = SceneGrid(x_origin=0.0, x_step=1.0, x_count=1,
                      y_origin=-0.05, y_step=0.002, y_count=51,
                      z_origin=0.0, z_step=1.0, z_count=1)
    img = bp_reconstruct_monostatic(echo, scene)
    cut = np.abs(img.data[0, :, 0])
    assert cut.min() / cut.max() > 0.8


def test_bp_amplitude_decay_weighting():
    geom, freqs, scene = geom_small(), freqs_small(), scene_small()
    cube = simulate_echo(geom, freqs, [PointTarget(position=(0.0, 0.0, 0.0))])
    plain = bp_reconstruct(cube, scene)
    weighted = bp_reconstruct(cube, scene, amplitude_decay=True)
    # matched weights shrink the values (R ~ 1 m) but keep the peak location
    ip = np.unravel_index(np.argmax(np.abs(plain.data)), scene.shape)
    iw = np.unravel_index(np.argmax(np.abs(weighted.data)), scene.shape)
    assert ip == iw
    assert not np.allclose(plain.data, weighted.data)
