"""Scenario runner.

Subcommands
-----------
simulate      synthesize an echo cube from a scenario config
reconstruct   image an echo cube with the wavenumber pipeline or BP
design-check  evaluate the sampling/resolution rules for a scenario
slices        export a 2-D dB slice of an image volume as 16-bit PGM
conv-study    convolution-accuracy experiment (closed form vs oracle)
nt-study      transmit-count experiment (1-D BP cuts vs a monostatic arc)

Config arguments accept either a file path or the name of a bundled scenario
(``table2``, ``table1_conv``, ``fig6_nt``).

Exit codes: 0 success, 1 validation violation under --strict, 2 usage or
parse error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import importlib.resources
import logging
import math
import os
import struct
import sys
import time
import warnings

import numpy as np

from . import arcfile, bp, design, metrics, rma
from .config import ConfigError, load_config, parse_sections
from .forward import FrequencyGrid, load_external_echo, save_echo, simulate_echo, \
    simulate_monostatic
from .geometry import SceneGrid, build_geometry, antenna_position, PointTarget
from .rma import ImageVolume, ReconstructOptions
from .spectral import aligned_discrepancy, convolution_oracle, \
    sp_convolution_closed_form

_IMAGE_LABELS = ("x_m", "y_m", "z_m")


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def resolve_config_path(arg: str) -> str:
    if os.path.exists(arg):
        return arg
    if os.sep not in arg and not arg.endswith(".cfg"):
        candidate = importlib.resources.files("arcmimo") / "scenarios" / f"{arg}.cfg"
        if candidate.is_file():
            return str(candidate)
    raise FileNotFoundError(f"no config file or bundled scenario named {arg!r}")


def save_image(img: ImageVolume, path) -> None:
    g = img.grid
    axes = [arcfile.Axis(_IMAGE_LABELS[0], g.x_origin, g.x_step, g.x_count),
            arcfile.Axis(_IMAGE_LABELS[1], g.y_origin, g.y_step, g.y_count),
            arcfile.Axis(_IMAGE_LABELS[2], g.z_origin, g.z_step, g.z_count)]
    arcfile.save(path, img.data, axes)


def load_image(path) -> ImageVolume:
    data, axes = arcfile.load(path)
    if len(axes) != 3 or tuple(a.label for a in axes) != _IMAGE_LABELS:
        raise arcfile.HeaderError(f"{path}: not an image volume")
    x, y, z = axes
    grid = SceneGrid(x_origin=x.origin, x_step=x.step, x_count=x.count,
                     y_origin=y.origin, y_step=y.step, y_count=y.count,
                     z_origin=z.origin, z_step=z.step, z_count=z.count)
    return ImageVolume(data=data, grid=grid)


def write_pgm(path, gray: np.ndarray) -> None:
    """16-bit binary PGM (P5), big-endian samples, rows top to bottom."""
    h, w = gray.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n65535\n".encode("ascii"))
        fh.write(gray.astype(">u2").tobytes())


def _print_design_report(cfg, strict: bool) -> int:
    report = design.validate_config(cfg)
    print(report.as_text())
    if report.violations and strict:
        return 1
    return 0


def _target_window_report(img: ImageVolume, target: PointTarget, half: int = 5):
    """Peak report for the local maximum near a configured target."""
    g = img.grid
    idx = []
    for ax, pos in zip("xyz", target.position):
        axis = g.axis(ax)
        idx.append(int(np.argmin(np.abs(axis - pos))))
    sel = tuple(slice(max(0, i - half), min(n, i + half + 1))
                for i, n in zip(idx, img.data.shape))
    window = np.abs(img.data[sel])
    local = np.unravel_index(int(np.argmax(window)), window.shape)
    peak_idx = tuple(s.start + l for s, l in zip(sel, local))
    return metrics.peak_report(img, index=peak_idx)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_simulate(args) -> int:
    cfg = load_config(resolve_config_path(args.config))
    code = _print_design_report(cfg, args.strict)
    if code:
        return code
    geom = build_geometry(cfg)
    freqs = FrequencyGrid(cfg.band.f_start_hz, cfg.band.f_stop_hz, cfg.band.count)
    t0 = time.perf_counter()
    cube = simulate_echo(geom, freqs, cfg.point_targets(),
                         amplitude_decay=cfg.options.amplitude_decay,
                         noise_snr_db=cfg.options.noise_snr_db,
                         noise_seed=cfg.options.noise_seed)
    out = args.out or cfg.output.echo_path
    if not out:
        raise ConfigError("no output path given (argument or [output] echo_path)")
    save_echo(cube, out)
    print(f"echo dims = {'x'.join(str(n) for n in cube.data.shape)}")
    print(f"runtime_s = {time.perf_counter() - t0:.3f}")
    print(f"wrote {out}")
    return 0


def cmd_reconstruct(args) -> int:
    cfg = load_config(resolve_config_path(args.config))
    echo = load_external_echo(args.echo, radius=cfg.geometry.radius_m)
    geom = build_geometry(cfg)
    for name, got, want in (
            ("k", echo.k.size, cfg.band.count),
            ("theta_t", echo.theta_t.size, geom.tx_angles.size),
            ("theta_r", echo.theta_r.size, geom.rx_angles.size),
            ("z", echo.z.size, geom.z_positions.size)):
        if got != want:
            raise RuntimeError(f"echo/config axis mismatch on {name}: "
                               f"echo has {got}, config expects {want}")

    scene = cfg.scene_grid()
    t0 = time.perf_counter()
    if args.algo == "rma":
        from .geometry import aperture_angles
        _, theta_z = aperture_angles(geom, scene, cfg.options.beamwidth_rad)
        opts = ReconstructOptions(eps_h=cfg.options.epsilon_h,
                                  eps_w=cfg.options.epsilon_w,
                                  matched_filter=cfg.options.matched_filter,
                                  theta_z=theta_z, verbose=args.verbose)
        img = rma.reconstruct(echo, scene, opts)
    else:
        img = bp.bp_reconstruct(echo, scene,
                                amplitude_decay=cfg.options.amplitude_decay)
    runtime = time.perf_counter() - t0

    out = args.out or cfg.output.image_path
    if not out:
        raise ConfigError("no output path given (argument or [output] image_path)")
    save_image(img, out)
    print(f"algo = {args.algo}")
    for i, tgt in enumerate(cfg.point_targets()):
        report = _target_window_report(img, tgt)
        print(f"[target {i} @ ({tgt.position[0]:.4f}, {tgt.position[1]:.4f}, "
              f"{tgt.position[2]:.4f})]")
        print(report.as_keyvalues())
    print(f"runtime_s = {runtime:.3f}")
    print(f"wrote {out}")
    return 0


def cmd_design_check(args) -> int:
    cfg = load_config(resolve_config_path(args.config))
    return _print_design_report(cfg, args.strict)


def cmd_slices(args) -> int:
    img = load_image(args.image)
    g = img.grid
    plane = args.plane
    axis_names = {"xy": ("x", "y", "z"), "xz": ("x", "z", "y"), "yz": ("y", "z", "x")}
    a_name, b_name, c_name = axis_names[plane]
    c_axis = g.axis(c_name)
    lo, hi = g.extent(c_name)
    if not (lo - 1e-12 <= args.coord <= hi + 1e-12):
        raise RuntimeError(f"{c_name} coordinate {args.coord} outside [{lo}, {hi}]")
    ci = int(np.argmin(np.abs(c_axis - args.coord)))
    take = {"x": 0, "y": 1, "z": 2}
    mag = np.abs(np.take(img.data, ci, axis=take[c_name]))
    # after np.take the remaining axes keep their x->y->z order
    remaining = [n for n in "xyz" if n != c_name]
    if (remaining[0], remaining[1]) != (a_name, b_name):
        mag = mag.T
    peak = mag.max()
    dr = float(args.dynamic_range)
    if peak == 0.0:
        db = np.full_like(mag, -dr)
    else:
        with np.errstate(divide="ignore"):
            db = 20.0 * np.log10(mag / peak)
        db = np.clip(db, -dr, 0.0)
    gray = np.round((db + dr) / dr * 65535.0).astype(np.uint16)
    # rows run along the second named axis
    write_pgm(args.out, gray.T)
    print(f"wrote {args.out} ({a_name}{b_name} plane at {c_name} = {c_axis[ci]:.4g} m, "
          f"{dr:.0f} dB range)")
    return 0


def _study_values(section, fields, path):
    got = {}
    for lineno, key, value in section:
        if key not in fields:
            raise ConfigError(f"{path}: unknown study key {key!r}", lineno)
        got[key] = value
    missing = [k for k in fields if k not in got]
    if missing:
        raise ConfigError(f"{path}: missing study keys {missing}")
    return got


def cmd_conv_study(args) -> int:
    path = resolve_config_path(args.config)
    with open(path, "r", encoding="utf-8") as fh:
        sections = parse_sections(fh.read())
    if "conv_study" not in sections:
        raise ConfigError(f"{path}: missing [conv_study] section")
    vals = _study_values(sections["conv_study"],
                         {"radius_m", "frequency_hz", "theta_t_deg", "theta_r_deg",
                          "pixel_x_m", "pixel_y_m", "z_step_m", "zeta_count"}, path)
    radius = float(vals["radius_m"])
    k = 2.0 * np.pi * float(vals["frequency_hz"]) / 299792458.0
    tt = math.radians(float(vals["theta_t_deg"]))
    tr = math.radians(float(vals["theta_r_deg"]))
    px, py = float(vals["pixel_x_m"]), float(vals["pixel_y_m"])
    tx = antenna_position(tt, 0.0, radius)
    rx = antenna_position(tr, 0.0, radius)
    rho_t = math.hypot(px - tx[0], py - tx[1])
    rho_r = math.hypot(px - rx[0], py - rx[1])

    t0 = time.perf_counter()
    n = int(vals["zeta_count"])
    zeta = np.linspace(-k, k, n)
    kz_axis, oracle = convolution_oracle(k, rho_t, rho_r, zeta)
    band = np.abs(kz_axis) <= np.pi / float(vals["z_step_m"])
    closed = sp_convolution_closed_form(k, kz_axis[band], rho_t, rho_r)
    disc = aligned_discrepancy(closed, oracle[band])
    runtime = time.perf_counter() - t0
    print(f"rho_t_m = {rho_t:.6f}")
    print(f"rho_r_m = {rho_r:.6f}")
    print(f"plotted_band_radpm = {np.pi / float(vals['z_step_m']):.3f}")
    print(f"discrepancy = {disc:.6f}")
    print(f"runtime_s = {runtime:.3f}")
    return 0


def cmd_nt_study(args) -> int:
    path = resolve_config_path(args.config)
    with open(path, "r", encoding="utf-8") as fh:
        sections = parse_sections(fh.read())
    for name in ("band", "nt_study"):
        if name not in sections:
            raise ConfigError(f"{path}: missing [{name}] section")
    band = _study_values(sections["band"], {"f_start_hz", "f_stop_hz", "count"}, path)
    vals = _study_values(sections["nt_study"],
                         {"radius_m", "arc_span_rad", "rx_count", "nt_values",
                          "monostatic_count", "cut_extent_m", "cut_count"}, path)
    freqs = FrequencyGrid(float(band["f_start_hz"]), float(band["f_stop_hz"]),
                          int(band["count"]))
    radius = float(vals["radius_m"])
    span = float(vals["arc_span_rad"])
    target = [PointTarget(position=(0.0, 0.0, 0.0))]
    extent = float(vals["cut_extent_m"])
    count = int(vals["cut_count"])
    scene = SceneGrid(x_origin=-extent / 2, x_step=extent / (count - 1), x_count=count,
                      y_origin=0.0, y_step=1.0, y_count=1,
                      z_origin=0.0, z_step=1.0, z_count=1)

    from .geometry import ArrayGeometry
    rx = np.linspace(-span / 2, span / 2, int(vals["rx_count"]))
    print(f"{'array':>12} {'width_mm':>9} {'sidelobe_db':>12}")
    widths = {}
    for nt in (int(v) for v in vals["nt_values"].split()):
        tx = np.linspace(-span / 2, span / 2, nt)
        geom = ArrayGeometry(radius=radius, tx_angles=tx, rx_angles=rx,
                             z_positions=np.asarray([0.0]))
        cube = simulate_echo(geom, freqs, target)
        img = bp.bp_reconstruct(cube, scene)
        w = metrics.mainlobe_width(img, "x")
        sll = metrics.sidelobe_level(img, "x")
        widths[nt] = w
        print(f"{'nt=' + str(nt):>12} {w * 1e3:9.3f} {sll:12.2f}")
    mono = simulate_monostatic(radius, np.linspace(-span / 2, span / 2,
                                                   int(vals["monostatic_count"])),
                               freqs, target)
    img = bp.bp_reconstruct_monostatic(mono, scene)
    w = metrics.mainlobe_width(img, "x")
    sll = metrics.sidelobe_level(img, "x")
    print(f"{'monostatic':>12} {w * 1e3:9.3f} {sll:12.2f}")
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="arcmimo", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="synthesize an echo cube")
    p.add_argument("config")
    p.add_argument("--out", default="", help="echo output path")
    p.add_argument("--strict", action="store_true",
                   help="treat design violations as errors")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("reconstruct", help="image an echo cube")
    p.add_argument("echo")
    p.add_argument("config")
    p.add_argument("--algo", choices=("rma", "bp"), default="rma")
    p.add_argument("--out", default="", help="image output path")
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("design-check", help="evaluate sampling and resolution rules")
    p.add_argument("config")
    p.add_argument("--strict", action="store_true")
    p.set_defaults(func=cmd_design_check)

    p = sub.add_parser("slices", help="export a 2-D dB slice as 16-bit PGM")
    p.add_argument("image")
    p.add_argument("--plane", choices=("xy", "xz", "yz"), required=True)
    p.add_argument("--coord", type=float, required=True,
                   help="coordinate along the remaining axis [m]")
    p.add_argument("--dynamic-range", type=float, default=20.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_slices)

    p = sub.add_parser("conv-study", help="convolution accuracy experiment")
    p.add_argument("config")
    p.set_defaults(func=cmd_conv_study)

    p = sub.add_parser("nt-study", help="transmit-count experiment")
    p.add_argument("config")
    p.set_defaults(func=cmd_nt_study)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    if getattr(args, "verbose", False):
        logging.basicConfig(level=logging.INFO, format="%(message)s")
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            return args.func(args)
    except (ConfigError, arcfile.FileFormatError, FileNotFoundError, struct.error) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:   # runtime failures
        print(f"error: {exc}", file=sys.stderr)
        return 3


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
