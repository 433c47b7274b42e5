"""Regenerate the full experiment result set with one command.

Runs every campaign the CLI exposes, at a fixed seed, into an output
directory tree:

    results/
      terrains/     generated heightfield text files
      pull/         grip-and-pull force sweep, proposed vs baseline
      recognition/  calibrated-noise block classification
      map/          translate-press-read scan, grid fusion, error summary
      config/       the effective configuration the runs used

Everything is seeded, so reruns into a fresh directory are byte-identical.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from pingrip.cli import main as cli


def run(label: str, argv: list[str]) -> None:
    print(f"== {label}: pingrip {' '.join(argv)}")
    rc = cli(argv)
    if rc != 0:
        sys.exit(f"{label} failed with exit code {rc}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=str, default="results", help="output root (default results/)")
    ap.add_argument("--seed", type=int, default=0, help="campaign seed (default 0)")
    ap.add_argument("--force", action="store_true", help="overwrite existing outputs")
    args = ap.parse_args()

    root = Path(args.out)
    seed = ["--seed", str(args.seed)]
    force = ["--force"] if args.force else []

    for kind in ("wedge", "convex-block", "concave-block", "mapping"):
        run(
            f"terrain {kind}",
            ["gen-terrain", "--kind", kind, "--out", str(root / "terrains"), *force],
        )

    run("pull sweep", ["pull-test", "--out", str(root / "pull"), *seed, *force])
    run(
        "recognition",
        ["recognize", "--kind", "both", "--out", str(root / "recognition"), *seed, *force],
    )
    run("mapping", ["map", "--out", str(root / "map"), *seed, *force])
    run(
        "mapping noiseless",
        ["map", "--no-noise", "--out", str(root / "map_noiseless"), *seed, *force],
    )
    run("config", ["dump-config", "--out", str(root / "config"), *force])

    print(f"done; results under {root}/")


if __name__ == "__main__":
    main()
