import numpy as np
import pytest

from arcmimo import arcfile
from arcmimo.cli import load_image, main, resolve_config_path, save_image
from arcmimo.config import load_config, parse_config, save_config, serialize_config, ConfigError
from arcmimo.geometry import SceneGrid
from arcmimo.rma import ImageVolume
from tests.conftest import mini_config


@pytest.fixture()
def mini_cfg_file(tmp_path):
    path = tmp_path / "mini.cfg"
    save_config(mini_config(), path)
    return str(path)


# ---------------------------------------------------------------------------
# config parsing
# ---------------------------------------------------------------------------

def test_parse_rejects_unknown_key():
    text = "[band]\nf_start_hz = 30e9\nbogus_key = 1\n"
    with pytest.raises(ConfigError, match="bogus_key"):
        parse_config(text)


def test_parse_rejects_unknown_section():
    with pytest.raises(ConfigError, match="mystery"):
        parse_config("[mystery]\nx = 1\n")


def test_parse_error_reports_line_number():
    text = "[band]\nf_start_hz = 30e9\ncount = notanumber\n"
    with pytest.raises(ConfigError, match="line 3"):
        parse_config(text)


def test_config_round_trip_is_byte_identical(tmp_path):
    cfg = load_config(resolve_config_path("table2"))
    first = tmp_path / "a.cfg"
    save_config(cfg, first)
    again = tmp_path / "b.cfg"
    save_config(load_config(first), again)
    assert first.read_bytes() == again.read_bytes()


def test_bundled_scenarios_resolve_and_parse():
    for name in ("table2",):
        cfg = load_config(resolve_config_path(name))
        assert cfg.band.count == 25
        assert cfg.geometry.rx_count == 41
    for name in ("table1_conv", "fig6_nt"):
        resolve_config_path(name)
    with pytest.raises(FileNotFoundError):
        resolve_config_path("nonexistent_scenario")


def test_serialize_targets_preserved():
    cfg = mini_config(targets=((0.01, -0.02, 0.005),))
    cfg.targets[0].reflectivity = 0.5 - 0.25j
    round_tripped = parse_config(serialize_config(cfg))
    assert round_tripped.targets[0].reflectivity == 0.5 - 0.25j


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

def test_simulate_reference_scenario_dims_and_warning(tmp_path, capsys):
    out = tmp_path / "echo.bin"
    code = main(["simulate", "table2", "--out", str(out)])
    captured = capsys.readouterr().out
    assert code == 0
    assert "echo dims = 25x5x41x51" in captured
    # the 1 cm scan step is marginal for this geometry, so the report flags it
    assert "scan step" in captured
    assert out.exists()


def test_simulate_strict_fails_on_marginal_scan_step(tmp_path):
    out = tmp_path / "echo.bin"
    code = main(["simulate", "table2", "--out", str(out), "--strict"])
    assert code == 1
    assert not out.exists()


def test_simulate_is_deterministic(tmp_path, mini_cfg_file):
    a = tmp_path / "a.bin"
    b = tmp_path / "b.bin"
    assert main(["simulate", mini_cfg_file, "--out", str(a)]) == 0
    assert main(["simulate", mini_cfg_file, "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_simulate_bad_config_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("[band]\nf_start_hz = oops\n")
    code = main(["simulate", str(bad), "--out", str(tmp_path / "x.bin")])
    assert code == 2
    assert "f_start_hz" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# reconstruct
# ---------------------------------------------------------------------------

@pytest.fixture()
def mini_echo_file(tmp_path, mini_cfg_file):
    out = tmp_path / "echo.bin"
    assert main(["simulate", mini_cfg_file, "--out", str(out)]) == 0
    return str(out)


def test_reconstruct_rma_and_bp_agree(tmp_path, mini_cfg_file, mini_echo_file, capsys):
    img_rma = tmp_path / "rma.bin"
    img_bp = tmp_path / "bp.bin"
    assert main(["reconstruct", mini_echo_file, mini_cfg_file,
                 "--algo", "rma", "--out", str(img_rma)]) == 0
    out_rma = capsys.readouterr().out
    assert "peak_index" in out_rma and "runtime_s" in out_rma
    assert main(["reconstruct", mini_echo_file, mini_cfg_file,
                 "--algo", "bp", "--out", str(img_bp)]) == 0
    a = load_image(img_rma)
    b = load_image(img_bp)
    ia = np.unravel_index(np.argmax(np.abs(a.data)), a.data.shape)
    ib = np.unravel_index(np.argmax(np.abs(b.data)), b.data.shape)
    assert all(abs(x - y) <= 1 for x, y in zip(ia, ib))


def test_reconstruct_is_deterministic(tmp_path, mini_cfg_file, mini_echo_file):
    a = tmp_path / "a.bin"
    b = tmp_path / "b.bin"
    assert main(["reconstruct", mini_echo_file, mini_cfg_file, "--out", str(a)]) == 0
    assert main(["reconstruct", mini_echo_file, mini_cfg_file, "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_reconstruct_axis_mismatch(tmp_path, mini_echo_file, capsys):
    other = mini_config()
    other.geometry.rx_count = 11
    other_path = tmp_path / "other.cfg"
    save_config(other, other_path)
    code = main(["reconstruct", mini_echo_file, str(other_path),
                 "--out", str(tmp_path / "img.bin")])
    assert code == 3
    assert "axis mismatch" in capsys.readouterr().err


def test_reconstruct_missing_echo(tmp_path, mini_cfg_file):
    code = main(["reconstruct", str(tmp_path / "nope.bin"), mini_cfg_file,
                 "--out", str(tmp_path / "img.bin")])
    assert code == 2


# ---------------------------------------------------------------------------
# slices
# ---------------------------------------------------------------------------

def impulse_image(tmp_path):
    grid = SceneGrid(x_origin=-0.02, x_step=0.004, x_count=11,
                     y_origin=-0.02, y_step=0.004, y_count=9,
                     z_origin=-0.02, z_step=0.004, z_count=7)
    data = np.zeros(grid.shape, dtype=complex)
    data[3, 4, 2] = 1.0
    path = tmp_path / "img.bin"
    save_image(ImageVolume(data=data, grid=grid), path)
    return path, grid


def parse_pgm(blob):
    assert blob.startswith(b"P5\n")
    header, rest = blob.split(b"\n65535\n", 1)
    dims = header.split(b"\n")[1].split()
    w, h = int(dims[0]), int(dims[1])
    img = np.frombuffer(rest, dtype=">u2").reshape(h, w)
    return img


def test_slices_impulse_single_white_pixel(tmp_path):
    path, grid = impulse_image(tmp_path)
    out = tmp_path / "slice.pgm"
    code = main(["slices", str(path), "--plane", "xy",
                 "--coord", str(grid.axis("z")[2]), "--dynamic-range", "20",
                 "--out", str(out)])
    assert code == 0
    img = parse_pgm(out.read_bytes())
    assert img.shape == (9, 11)      # rows = y, cols = x
    assert img[4, 3] == 65535
    assert np.count_nonzero(img) == 1


def test_slices_zero_image_uniform_black(tmp_path):
    grid = SceneGrid(x_origin=-0.01, x_step=0.002, x_count=6,
                     y_origin=-0.01, y_step=0.002, y_count=6,
                     z_origin=-0.01, z_step=0.002, z_count=6)
    path = tmp_path / "zero.bin"
    save_image(ImageVolume(data=np.zeros(grid.shape, dtype=complex), grid=grid), path)
    out = tmp_path / "z.pgm"
    assert main(["slices", str(path), "--plane", "xz", "--coord", "0.0",
                 "--out", str(out)]) == 0
    img = parse_pgm(out.read_bytes())
    assert np.all(img == 0)


def test_slices_coordinate_out_of_range(tmp_path, capsys):
    path, _ = impulse_image(tmp_path)
    code = main(["slices", str(path), "--plane", "xy", "--coord", "0.5",
                 "--out", str(tmp_path / "s.pgm")])
    assert code == 3
    assert "outside" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# studies and usage
# ---------------------------------------------------------------------------

def test_conv_study_bundled(capsys):
    assert main(["conv-study", "table1_conv"]) == 0
    out = capsys.readouterr().out
    disc = float([l for l in out.splitlines() if l.startswith("discrepancy")][0].split("=")[1])
    assert disc < 0.15
    rho_t = float([l for l in out.splitlines() if l.startswith("rho_t")][0].split("=")[1])
    assert rho_t == pytest.approx(1.110635, abs=1e-5)


def test_nt_study_bundled(capsys):
    assert main(["nt-study", "fig6_nt"]) == 0
    out = capsys.readouterr().out
    assert "monostatic" in out
    assert "nt=31" in out


def test_usage_error_exit_code():
    assert main(["frobnicate"]) == 2
    assert main(["reconstruct"]) == 2


def test_image_round_trip(tmp_path):
    path, grid = impulse_image(tmp_path)
    img = load_image(path)
    again = tmp_path / "again.bin"
    save_image(img, again)
    assert path.read_bytes() == again.read_bytes()
