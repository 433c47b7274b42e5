"""Sweep the free model knobs and report where the target bands hold.

Dev tool: run from the repo root to pick production defaults. The bands
checked here mirror the acceptance checks (holding force levels and
ordering, variance inversion at vertical faces, baseline contrast,
recognition noise level, mapping error).
"""

from __future__ import annotations

import argparse
import dataclasses
import time

import numpy as np

from pingrip.config import SimConfig
from pingrip.mapping import bin_average, run_scan
from pingrip.mechanics import baseline_pull_test, pull_test, wedge_spec_for
from pingrip.sensing import calibrate_bank, recognize_shape
from pingrip.terrain import make_mapping_terrain, make_recognition_block

PHIS = (-90.0, -60.0, -30.0, 0.0, 30.0, 60.0, 90.0)


def pull_report(sim: SimConfig, trials: int, seed: int) -> dict:
    rows = {}
    for phi in PHIS:
        spec = wedge_spec_for(sim, phi)
        key = int(round((phi + 360.0) * 1000.0))
        pro = pull_test(sim, spec, trials, [seed, key, 1])
        base = baseline_pull_test(sim, spec, trials, [seed, key, 2])
        rows[phi] = (pro.mean_force_n, pro.std_force_n, base.mean_force_n, base.std_force_n)
    return rows


def check_pull(rows: dict) -> list[str]:
    fails = []
    for phi in (60.0, -60.0):
        m = rows[phi][0]
        if not 5.0 <= m <= 10.0:
            fails.append(f"F({phi:+.0f})={m:.2f} outside [5,10]")
    for sign in (1.0, -1.0):
        f60, f30, f0 = rows[60.0 * sign][0], rows[30.0 * sign][0], rows[0.0][0]
        if not (f60 > f30 > f0):
            fails.append(f"ordering {sign:+.0f}: {f60:.2f} > {f30:.2f} > {f0:.2f} broken")
    for sign in (1.0, -1.0):
        s90, s60 = rows[90.0 * sign][1], rows[60.0 * sign][1]
        if not s90 > s60:
            fails.append(f"std({90 * sign:+.0f})={s90:.2f} <= std({60 * sign:+.0f})={s60:.2f}")
    n_pro = sum(1 for phi in PHIS if rows[phi][0] > 2.0)
    n_base = sum(1 for phi in PHIS if rows[phi][2] > 2.0)
    if not n_pro > n_base:
        fails.append(f"count>2N proposed={n_pro} <= baseline={n_base}")
    for phi in PHIS:
        if phi <= 0 and rows[phi][2] > 0.2:
            fails.append(f"baseline F({phi:+.0f})={rows[phi][2]:.2f} not ~0 on non-convex")
    return fails


def map_report(sim: SimConfig, seeds: int) -> tuple[float, float, float]:
    terrain = make_mapping_terrain()
    cfg = sim.gripper()
    plan = sim.scan_plan()
    ebars = []
    for seed in range(seeds):
        calib = calibrate_bank(
            cfg.total_pins,
            np.random.default_rng([seed, 301]),
            sigma_beta_a=sim.sigma_beta_a,
            sigma_beta_b=sim.sigma_beta_b,
        )
        cloud = run_scan(cfg, calib, terrain, plan, np.random.default_rng([seed, 302]))
        ebars.append(bin_average(cloud, terrain).e_bar_mm)
    arr = np.array(ebars)
    return float(arr.mean()), float(arr.min()), float(arr.max())


def recognition_report(sim: SimConfig, seeds: int) -> tuple[float, float, float]:
    cfg = sim.gripper()
    correct = 0
    sig_conv, sig_conc = [], []
    for seed in range(seeds):
        calib = calibrate_bank(
            cfg.total_pins,
            np.random.default_rng([seed, 101]),
            sigma_beta_a=sim.sigma_beta_a,
            sigma_beta_b=sim.sigma_beta_b,
        )
        for kind, bucket, stream in (("convex", sig_conv, 102), ("concave", sig_conc, 202)):
            terr = make_recognition_block(kind)
            res = recognize_shape(
                cfg, calib, terr, presses=10, rng=np.random.default_rng([seed, stream])
            )
            bucket.append(res.sigma_bar_mm)
            correct += res.label == kind
    return (
        correct / (2 * seeds),
        float(np.mean(sig_conv)),
        float(np.mean(sig_conc)),
    )


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--mode", choices=["pull", "map", "recognize", "all"], default="all")
    ap.add_argument("--second-moment", type=float, default=None)
    ap.add_argument("--spread", type=float, default=None)
    ap.add_argument("--apex-cap", type=float, default=None)
    ap.add_argument("--max-descent", type=float, default=None)
    args = ap.parse_args()

    overrides = {}
    if args.second_moment is not None:
        overrides["second_moment_m4"] = args.second_moment
    if args.spread is not None:
        overrides["asperity_spread_deg"] = args.spread
    if args.apex_cap is not None:
        overrides["wedge_apex_cap_mm"] = args.apex_cap
    if args.max_descent is not None:
        overrides["max_descent_mm"] = args.max_descent
    sim = dataclasses.replace(SimConfig(), **overrides)

    if args.mode in ("pull", "all"):
        t0 = time.perf_counter()
        rows = pull_report(sim, args.trials, seed=0)
        dt = time.perf_counter() - t0
        for phi in PHIS:
            m, s, bm, bs = rows[phi]
            print(
                f"phi={phi:+6.1f}  proposed {m:6.2f} +- {s:5.2f}   baseline {bm:6.2f} +- {bs:5.2f}"
            )
        fails = check_pull(rows)
        print(f"pull time: {dt:.2f}s for {args.trials} trials x {len(PHIS)} phis x 2 grippers")
        print("PULL OK" if not fails else "PULL FAILS:\n  " + "\n  ".join(fails))

    if args.mode in ("map", "all"):
        mean_e, lo, hi = map_report(sim, args.seeds)
        ok = 4.0 <= lo and hi <= 11.0
        print(f"e_bar over {args.seeds} seeds: mean={mean_e:.2f} min={lo:.2f} max={hi:.2f} "
              f"{'MAP OK' if ok else 'MAP FAIL'}")

    if args.mode in ("recognize", "all"):
        acc, sc, sk = recognition_report(sim, args.seeds)
        ok = acc >= 0.95 and 1.897 <= sc <= 3.523 and 1.414 <= sk <= 2.626
        print(f"recognition: acc={acc:.3f} sigma_conv={sc:.3f} sigma_conc={sk:.3f} "
              f"{'REC OK' if ok else 'REC FAIL'}")


if __name__ == "__main__":
    main()
