"""Command-line front end for the three experiment campaigns.

Every command computes all of its outputs first and only then touches the
filesystem, so a failed run never leaves partial files. Existing outputs
are refused unless --force is given. All randomness derives from --seed,
and floats are written with fixed formatting, so reruns with the same
arguments are byte-identical.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .config import SimConfig, config_text, load_config
from .errors import ConfigError, SimulationError
from .mapping import (
    ScanPlan,
    bin_average,
    grid_csv_text,
    outlier_attenuation_report,
    ply_text,
    points_csv_text,
    run_scan,
    summary_csv_text,
)
from .mechanics import PullTestResult, baseline_pull_test, pull_test, wedge_spec_for
from .sensing import calibrate_bank, recognize_shape
from .terrain import make_mapping_terrain, make_recognition_block, make_wedge

DEFAULT_PHIS = (-90.0, -60.0, -30.0, 0.0, 30.0, 60.0, 90.0)
FMT = "{:.6f}"

# sub-stream labels, so campaigns never share generator state
PROPOSED_STREAM = 1
BASELINE_STREAM = 2
RECOGNITION_BANK_STREAM = 101
RECOGNITION_READ_STREAM = 102
CONCAVE_READ_STREAM = 202
SCAN_BANK_STREAM = 301
SCAN_READ_STREAM = 302


def _phi_stream_key(phi_deg: float) -> int:
    # distinct non-negative integer per 0.001 deg inclination
    return int(round((phi_deg + 360.0) * 1000.0))


def _write_outputs(out_dir: Path, files: dict[str, str], force: bool) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    existing = [name for name in files if (out_dir / name).exists()]
    if existing and not force:
        raise ConfigError(
            f"refusing to overwrite existing outputs in {out_dir}: "
            f"{', '.join(sorted(existing))} (pass --force to overwrite)"
        )
    for name, text in files.items():
        (out_dir / name).write_text(text)


def _parse_phis(raw: str) -> list[float]:
    try:
        phis = [float(tok) for tok in raw.replace(",", " ").split()]
    except ValueError as exc:
        raise ConfigError(f"cannot parse --phi list {raw!r}") from exc
    if not phis:
        raise ConfigError("--phi list is empty")
    for phi in phis:
        if not -90.0 <= phi <= 90.0:
            raise ConfigError(f"inclination {phi} outside [-90, 90] deg")
    return phis


def _trials_csv(results: list[PullTestResult]) -> str:
    lines = ["phi_deg,trial,F_N,n_contacts"]
    for res in results:
        for t, (force, n) in enumerate(zip(res.holding_forces_n, res.contact_counts)):
            lines.append(f"{FMT.format(res.inclination_deg)},{t},{FMT.format(force)},{n}")
    return "\n".join(lines) + "\n"


def _summary_csv(results: list[PullTestResult]) -> str:
    lines = ["phi_deg,mean_F,std_F"]
    for res in results:
        lines.append(
            f"{FMT.format(res.inclination_deg)},{FMT.format(res.mean_force_n)},"
            f"{FMT.format(res.std_force_n)}"
        )
    return "\n".join(lines) + "\n"


def _comparison_csv(proposed: list[PullTestResult], baseline: list[PullTestResult]) -> str:
    lines = ["phi_deg,mean_F_proposed,std_F_proposed,mean_F_baseline,std_F_baseline"]
    for pro, base in zip(proposed, baseline):
        lines.append(
            f"{FMT.format(pro.inclination_deg)},{FMT.format(pro.mean_force_n)},"
            f"{FMT.format(pro.std_force_n)},{FMT.format(base.mean_force_n)},"
            f"{FMT.format(base.std_force_n)}"
        )
    return "\n".join(lines) + "\n"


def _cmd_pull_test(args, sim: SimConfig) -> int:
    phis = _parse_phis(args.phi) if args.phi else list(DEFAULT_PHIS)
    trials = args.trials if args.trials is not None else sim.pull_trials
    proposed, baseline = [], []
    for phi in phis:
        spec = wedge_spec_for(sim, phi)
        key = _phi_stream_key(phi)
        proposed.append(pull_test(sim, spec, trials, [args.seed, key, PROPOSED_STREAM]))
        baseline.append(baseline_pull_test(sim, spec, trials, [args.seed, key, BASELINE_STREAM]))
    files = {
        "trials_proposed.csv": _trials_csv(proposed),
        "trials_baseline.csv": _trials_csv(baseline),
        "summary_proposed.csv": _summary_csv(proposed),
        "summary_baseline.csv": _summary_csv(baseline),
        "comparison.csv": _comparison_csv(proposed, baseline),
    }
    _write_outputs(Path(args.out), files, args.force)
    for pro, base in zip(proposed, baseline):
        print(
            f"phi={FMT.format(pro.inclination_deg)} "
            f"proposed mean_F={FMT.format(pro.mean_force_n)} std={FMT.format(pro.std_force_n)} | "
            f"baseline mean_F={FMT.format(base.mean_force_n)} std={FMT.format(base.std_force_n)}"
        )
    return 0


def _calibration_csv(calibration, config) -> str:
    lines = ["pin_j,pin_k,R_max_ohm,R_min_ohm,sigma_mm"]
    idx = 0
    for k in range(1, config.blocks + 1):
        for j in range(1, config.pins_per_block + 1):
            lines.append(
                f"{j},{k},{FMT.format(calibration.r_max_ohm[idx])},"
                f"{FMT.format(calibration.r_min_ohm[idx])},{FMT.format(calibration.sigma_mm[idx])}"
            )
            idx += 1
    return "\n".join(lines) + "\n"


def _recognition_csv(result, config) -> str:
    lines = ["pin_j,pin_k,mean_h_mm,std_h_mm"]
    idx = 0
    for k in range(1, config.blocks + 1):
        for j in range(1, config.pins_per_block + 1):
            lines.append(
                f"{j},{k},{FMT.format(result.mean_heights_mm[idx])},"
                f"{FMT.format(result.std_heights_mm[idx])}"
            )
            idx += 1
    return "\n".join(lines) + "\n"


def _cmd_recognize(args, sim: SimConfig) -> int:
    kinds = ["convex", "concave"] if args.kind == "both" else [args.kind]
    presses = args.presses if args.presses is not None else sim.presses
    cfg = sim.gripper()
    calibration = calibrate_bank(
        cfg.total_pins,
        np.random.default_rng([args.seed, RECOGNITION_BANK_STREAM]),
        nominal_r_max_ohm=sim.nominal_r_max_ohm,
        nominal_r_min_ohm=sim.nominal_r_min_ohm,
        endpoint_spread=sim.endpoint_spread,
        sigma_floor_mm=sim.sigma_floor_mm,
        sigma_span_mm=sim.sigma_span_mm,
        sigma_beta_a=sim.sigma_beta_a,
        sigma_beta_b=sim.sigma_beta_b,
        stroke_mm=sim.stroke_mm,
        height_offset_mm=sim.height_offset_mm,
    )
    files = {"sensor_calibration.csv": _calibration_csv(calibration, cfg)}
    result_lines = []
    for kind in kinds:
        terrain = make_recognition_block(
            kind,
            height_mm=sim.recognition_block_height_mm,
            resolution_mm=sim.terrain_resolution_mm,
        )
        stream = RECOGNITION_READ_STREAM if kind == "convex" else CONCAVE_READ_STREAM
        rng = None if args.no_noise else np.random.default_rng([args.seed, stream])
        result = recognize_shape(cfg, calibration, terrain, presses=presses, rng=rng)
        files[f"recognition_pins_{kind}.csv"] = _recognition_csv(result, cfg)
        result_lines.append(
            f"terrain={kind} label={result.label} score_mm={FMT.format(result.score_mm)} "
            f"sigma_bar_mm={FMT.format(result.sigma_bar_mm)} presses={result.presses}"
        )
    files["recognition_result.txt"] = "\n".join(result_lines) + "\n"
    _write_outputs(Path(args.out), files, args.force)
    for line in result_lines:
        print(line)
    return 0


def _cmd_map(args, sim: SimConfig) -> int:
    cfg = sim.gripper()
    plan = sim.scan_plan()
    overrides = {}
    if args.steps is not None:
        overrides["steps"] = args.steps
    if args.dx_mm is not None:
        overrides["dx_mm"] = args.dx_mm
    if args.exclude_clamped:
        overrides["include_clamped"] = False
    if overrides:
        plan = ScanPlan(
            **{
                **{f: getattr(plan, f) for f in plan.__dataclass_fields__},
                **overrides,
            }
        )
    terrain = make_mapping_terrain()
    calibration = calibrate_bank(
        cfg.total_pins,
        np.random.default_rng([args.seed, SCAN_BANK_STREAM]),
        nominal_r_max_ohm=sim.nominal_r_max_ohm,
        nominal_r_min_ohm=sim.nominal_r_min_ohm,
        endpoint_spread=sim.endpoint_spread,
        sigma_floor_mm=sim.sigma_floor_mm,
        sigma_span_mm=sim.sigma_span_mm,
        sigma_beta_a=sim.sigma_beta_a,
        sigma_beta_b=sim.sigma_beta_b,
        stroke_mm=sim.stroke_mm,
        height_offset_mm=sim.height_offset_mm,
    )
    rng = None if args.no_noise else np.random.default_rng([args.seed, SCAN_READ_STREAM])
    cloud = run_scan(cfg, calibration, terrain, plan, rng)
    grid = bin_average(cloud, terrain, bin_w_mm=plan.bin_w_mm, bin_d_mm=plan.bin_d_mm)
    report = outlier_attenuation_report(cloud, grid)
    files = {
        "scan_points.ply": ply_text(cloud),
        "scan_points.csv": points_csv_text(cloud),
        "grid_map.csv": grid_csv_text(grid),
        "map_summary.csv": summary_csv_text(grid),
    }
    _write_outputs(Path(args.out), files, args.force)
    print(f"e_bar_mm={FMT.format(grid.e_bar_mm)}")
    print(
        f"far_points={report.n_far_points}/{report.n_points} "
        f"far_columns={report.n_far_columns}/{report.n_columns} "
        f"attenuation_ratio={FMT.format(report.attenuation_ratio)}"
    )
    return 0


def _cmd_gen_terrain(args, sim: SimConfig) -> int:
    if args.kind == "wedge":
        spec = wedge_spec_for(sim, args.phi)
        terrain = make_wedge(
            spec,
            resolution_mm=sim.terrain_resolution_mm,
            vertical_face_width_mm=sim.wedge_vertical_width_mm,
        )
        name = f"terrain_wedge_{args.phi:+g}deg.txt"
    elif args.kind in ("convex-block", "concave-block"):
        terrain = make_recognition_block(
            args.kind.split("-")[0],
            height_mm=sim.recognition_block_height_mm,
            resolution_mm=sim.terrain_resolution_mm,
        )
        name = f"terrain_{args.kind.replace('-', '_')}.txt"
    else:
        terrain = make_mapping_terrain()
        name = "terrain_mapping.txt"
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    target = out_dir / name
    if target.exists() and not args.force:
        raise ConfigError(f"refusing to overwrite {target} (pass --force to overwrite)")
    terrain.save_text(target)
    print(f"wrote {target}")
    return 0


def _cmd_dump_config(args, sim: SimConfig) -> int:
    text = config_text(sim)
    if args.out is not None:
        out_dir = Path(args.out)
        _write_outputs(out_dir, {"config.txt": text}, args.force)
        print(f"wrote {out_dir / 'config.txt'}")
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pingrip",
        description="Pin-array terrain gripper simulator: pull tests, shape recognition, 3D mapping.",
        epilog=(
            "units: lengths in mm, forces in N, angles in deg; "
            "the config file stores the beam modulus in Pa and the section moment in m^4"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, default_out):
        p.add_argument("--config", type=str, default=None, help="key = value config file")
        p.add_argument("--seed", type=int, default=0, help="campaign seed (default 0)")
        p.add_argument("--out", type=str, default=default_out, help="output directory")
        p.add_argument("--force", action="store_true", help="overwrite existing outputs")

    p_pull = sub.add_parser("pull-test", help="grip-and-pull campaign over terrain inclinations")
    common(p_pull, "out/pull_test")
    p_pull.add_argument("--phi", type=str, default=None, help="comma-separated inclinations, deg")
    p_pull.add_argument("--trials", type=int, default=None, help="trials per inclination")
    p_pull.set_defaults(func=_cmd_pull_test)

    p_rec = sub.add_parser("recognize", help="tactile convex/concave classification")
    common(p_rec, "out/recognize")
    p_rec.add_argument(
        "--kind", choices=["convex", "concave", "both"], default="both", help="block shape"
    )
    p_rec.add_argument("--presses", type=int, default=None, help="press count per block")
    p_rec.add_argument("--no-noise", action="store_true", help="noiseless sensor reads")
    p_rec.set_defaults(func=_cmd_recognize)

    p_map = sub.add_parser("map", help="translate-press-read terrain scan and grid fusion")
    common(p_map, "out/map")
    p_map.add_argument("--steps", type=int, default=None, help="scan stations")
    p_map.add_argument("--dx-mm", type=float, default=None, help="station spacing, mm")
    p_map.add_argument("--no-noise", action="store_true", help="noiseless sensor reads")
    p_map.add_argument(
        "--exclude-clamped", action="store_true", help="drop window-clamped readings"
    )
    p_map.set_defaults(func=_cmd_map)

    p_gen = sub.add_parser("gen-terrain", help="write a terrain heightfield to a text file")
    common(p_gen, "out/terrain")
    p_gen.add_argument(
        "--kind",
        choices=["wedge", "convex-block", "concave-block", "mapping"],
        default="wedge",
        help="terrain family",
    )
    p_gen.add_argument("--phi", type=float, default=30.0, help="wedge inclination, deg")
    p_gen.set_defaults(func=_cmd_gen_terrain)

    p_dump = sub.add_parser("dump-config", help="print or write the effective configuration")
    p_dump.add_argument("--config", type=str, default=None, help="key = value config file")
    p_dump.add_argument("--seed", type=int, default=0, help=argparse.SUPPRESS)
    p_dump.add_argument("--out", type=str, default=None, help="optional output directory")
    p_dump.add_argument("--force", action="store_true", help="overwrite existing outputs")
    p_dump.set_defaults(func=_cmd_dump_config)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        sim = load_config(args.config) if args.config else SimConfig()
        return args.func(args, sim)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SimulationError as exc:
        print(f"simulation error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
