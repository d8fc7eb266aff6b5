"""Command-line front end.

Every subcommand writes CSV files whose first lines are ``#`` comments
holding the fully resolved configuration, so a file can be regenerated from
its own header.  Nothing time- or host-dependent goes into the output.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from .array_model import ArrayConfig, ArrayType, directivity, half_power_beamwidth, make_grid
from .codebook import build_phase_mapper, mapper_to_csv, measure_pattern
from .config import load_config
from .error_model import PositioningErrorModel
from .exceptions import HSTBeamError
from .optimizer import (search_beam_count, sweep_directivity_vs_sigma,
                        sweep_directivity_vs_theta, sweep_spacing_vs_theta, tradeoff_curve)
from .rail_geometry import DeploymentGeometry
from .traversal import (TraversalConfig, events_to_csv, sector_rail_span, simulate_traversal,
                        summarize)

logger = logging.getLogger("hstbeam")

SUBCOMMANDS = ("tradeoff", "optimize", "sweep-theta", "sweep-spacing", "sweep-sigma",
               "codebook", "simulate")


def array_from_config(cfg: dict) -> ArrayConfig:
    a = cfg["array"]
    wavelength = a["wavelength_m"]
    kwargs = dict(array_type=ArrayType.parse(a["array_type"]),
                  beamwidth_constant=a["beamwidth_constant"],
                  element_count=a["element_count"])
    if wavelength is None:
        return ArrayConfig.from_carrier(a["carrier_frequency_hz"], a["spacing_over_lambda"],
                                        **kwargs)
    return ArrayConfig(spacing=a["spacing_over_lambda"] * wavelength, wavelength=wavelength,
                       **kwargs)


def interior_grid(lo: float, hi: float, n: int) -> np.ndarray:
    """``n`` evenly spaced points strictly inside ``(lo, hi)``."""
    return np.linspace(lo, hi, n + 2)[1:-1]


def _header(subcommand: str, cfg: dict) -> list[str]:
    # the output directory is left out so a file's bytes don't depend on where it lands
    scenario = {k: v for k, v in cfg.items() if k != "output"}
    scenario["output"] = {k: v for k, v in cfg["output"].items() if k != "directory"}
    return [f"hstbeam {__version__} {subcommand}",
            "config=" + json.dumps(scenario, sort_keys=True, separators=(",", ":")),
            f"seed={cfg['traversal']['seed']}"]


def _fmt(value, precision: int) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.{precision}g}"
    return str(value)


def _table(header_lines, columns, rows, precision) -> str:
    buf = io.StringIO()
    for line in header_lines:
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(v, precision) for v in row])
    return buf.getvalue()


def write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _scenario(cfg):
    arr = array_from_config(cfg)
    geom = DeploymentGeometry(cfg["geometry"]["h_m"])
    err = PositioningErrorModel(cfg["error"]["sigma_m"])
    return arr, geom, err


def run_tradeoff(cfg) -> dict[str, str]:
    arr = array_from_config(cfg)
    s = cfg["sweep"]
    grid = np.linspace(s["theta_h_min_rad"], s["theta_h_max_rad"], s["theta_h_points"])
    rows = tradeoff_curve(arr, grid)
    return {"tradeoff.csv": _table(_header("tradeoff", cfg),
                                   ["half_power_beamwidth_rad", "directivity", "product"],
                                   rows, cfg["output"]["precision"])}


def optimize_result(cfg):
    arr, geom, err = _scenario(cfg)
    o = cfg["optimizer"]
    return search_beam_count(arr, geom, o["theta_b_rad"], err, o["p_th"], o["n_max"],
                             o["probability_model"])


def run_optimize(cfg) -> dict[str, str]:
    res = optimize_result(cfg)
    o = cfg["optimizer"]
    row = [o["theta_b_rad"], cfg["error"]["sigma_m"], res.constraint_threshold, res.feasible,
           res.optimal_beam_count, res.directivity, res.half_power_beamwidth,
           res.achieved_probability]
    cols = ["theta_b_rad", "sigma_m", "p_th", "feasible", "optimal_beam_count", "directivity",
            "half_power_beamwidth_rad", "achieved_probability"]
    # repr precision so the file reproduces the library values exactly
    return {"optimize.csv": _table(_header("optimize", cfg), cols, [row], 17)}


def _sector_grid(cfg, arr):
    alpha = make_grid(arr, 1).sector_width
    lo, hi = math.pi / 2 - alpha / 2, math.pi / 2 + alpha / 2
    return interior_grid(max(lo, 0.0), min(hi, math.pi), cfg["sweep"]["theta_points"])


def run_sweep_theta(cfg) -> dict[str, str]:
    arr, geom, err = _scenario(cfg)
    o = cfg["optimizer"]
    rows = sweep_directivity_vs_theta(arr, geom, err, o["p_th"], _sector_grid(cfg, arr),
                                      o["n_max"], o["probability_model"])
    out = [[r.theta_b, math.degrees(r.theta_b), r.status, r.optimal_beam_count,
            r.directivity, r.achieved_probability] for r in rows]
    cols = ["theta_b_rad", "theta_b_deg", "status", "optimal_beam_count", "directivity",
            "achieved_probability"]
    return {"sweep_theta.csv": _table(_header("sweep-theta", cfg), cols, out,
                                      cfg["output"]["precision"])}


def run_sweep_spacing(cfg) -> dict[str, str]:
    arr, geom, err = _scenario(cfg)
    o = cfg["optimizer"]
    rows = sweep_spacing_vs_theta(arr, geom, err, o["p_th"], cfg["sweep"]["target_directivity"],
                                  _sector_grid(cfg, arr), o["n_max"], o["probability_model"])
    out = [[r.theta_b, r.status, r.optimal_beam_count, r.spacing,
            None if r.spacing is None else r.spacing / arr.wavelength, r.base_beam_count]
           for r in rows]
    cols = ["theta_b_rad", "status", "optimal_beam_count", "spacing_m", "spacing_over_lambda",
            "base_beam_count"]
    return {"sweep_spacing.csv": _table(_header("sweep-spacing", cfg), cols, out,
                                        cfg["output"]["precision"])}


def run_sweep_sigma(cfg) -> dict[str, str]:
    arr, geom, _ = _scenario(cfg)
    o, s = cfg["optimizer"], cfg["sweep"]
    sigmas = np.linspace(s["sigma_min_m"], s["sigma_max_m"], s["sigma_points"])
    rows = sweep_directivity_vs_sigma(arr, geom, o["theta_b_rad"], s["p_th_list"], sigmas,
                                      o["n_max"], o["probability_model"])
    cols = ["sigma_m", "p_th", "status", "optimal_beam_count", "directivity",
            "achieved_probability"]
    return {"sweep_sigma.csv": _table(_header("sweep-sigma", cfg), cols, rows,
                                      cfg["output"]["precision"])}


def run_codebook(cfg) -> dict[str, str]:
    arr = array_from_config(cfg)
    n = cfg["codebook"]["beam_count"]
    grid = make_grid(arr, n)
    mapper = build_phase_mapper(arr, grid)
    m = mapper.element_count
    res = cfg["codebook"]["angular_resolution_rad"] or half_power_beamwidth(arr, m) / 40.0
    rows = []
    for i in range(n):
        pat = measure_pattern(mapper.column(i), arr, res)
        rows.append([i, grid.center_angles[i], pat.peak_angle, pat.measured_hpbw,
                     half_power_beamwidth(arr, m), pat.measured_directivity, directivity(arr, m)])
    cols = ["beam_index", "center_angle_rad", "peak_angle_rad", "measured_hpbw_rad",
            "closed_form_hpbw_rad", "measured_directivity", "closed_form_directivity"]
    header = _header("codebook", cfg)
    return {
        "codebook_mapper.csv": mapper_to_csv(mapper, header_lines=header),
        "codebook_patterns.csv": _table(header, cols, rows, cfg["output"]["precision"]),
    }


def traversal_inputs(cfg):
    arr, geom, err = _scenario(cfg)
    t = cfg["traversal"]
    grid = make_grid(arr, t["beam_count"])
    start, end = sector_rail_span(grid, geom)
    tc = TraversalConfig(
        speed=t["speed_mps"], time_step=t["time_step_s"],
        start_position=start if t["start_m"] is None else t["start_m"],
        end_position=end if t["end_m"] is None else t["end_m"],
        error=err, seed=t["seed"])
    return tc, arr, grid, geom


def run_simulate(cfg) -> dict[str, str]:
    tc, arr, grid, geom = traversal_inputs(cfg)
    mapper = build_phase_mapper(arr, grid)
    events = simulate_traversal(tc, grid, mapper, geom)
    summary = summarize(events, grid.beam_count, tc.time_step)
    prec = cfg["output"]["precision"]
    header = _header("simulate", cfg)
    rows = [["effectiveness_rate", "", summary.effectiveness_rate],
            ["switch_count", "", summary.switch_count],
            ["total_time_s", "", len(events) * tc.time_step]]
    rows += [["dwell_s", i, d] for i, d in enumerate(summary.per_beam_dwell)]
    return {
        "simulate_events.csv": events_to_csv(events, prec, header),
        "simulate_summary.csv": _table(header, ["metric", "beam_index", "value"], rows, prec),
    }


RUNNERS = {
    "tradeoff": run_tradeoff,
    "optimize": run_optimize,
    "sweep-theta": run_sweep_theta,
    "sweep-spacing": run_sweep_spacing,
    "sweep-sigma": run_sweep_sigma,
    "codebook": run_codebook,
    "simulate": run_simulate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hstbeam",
        description="Location-aware ULA beam-forming sweeps and simulations.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("--config", help="JSON run configuration")
    parser.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY=VALUE", help="override a config value (repeatable)")
    parser.add_argument("--out", help="output directory (overrides output.directory)")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    overrides = list(args.overrides)
    if args.out is not None:
        overrides.append("output.directory=" + json.dumps(args.out))
    try:
        cfg = load_config(args.config, overrides)
        files = RUNNERS[args.subcommand](cfg)
    except HSTBeamError as exc:
        print(f"hstbeam {args.subcommand}: {exc}", file=sys.stderr)
        return 2
    out_dir = Path(cfg["output"]["directory"])
    for name, text in files.items():
        write_atomic(out_dir / name, text)
        logger.info("wrote %s", out_dir / name)
    if args.subcommand == "optimize":
        res = optimize_result(cfg)
        print(json.dumps({
            "feasible": res.feasible,
            "optimal_beam_count": res.optimal_beam_count,
            "directivity": res.directivity,
            "half_power_beamwidth": res.half_power_beamwidth,
            "achieved_probability": res.achieved_probability,
            "constraint_threshold": res.constraint_threshold,
        }))
    return 0


if __name__ == "__main__":
    sys.exit(main())
