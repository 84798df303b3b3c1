#!/usr/bin/env python3
"""Generate plot-ready CSV and JSON reports for the five demo profiles.

Writes, per profile: the synthesized trajectory, both mates (analytic +
geometric comparison), and the classification report.  Point a plotting
tool at the CSVs; columns are documented in the README.
"""

import argparse
import sys
from pathlib import Path

from curvemates.catalog import PROFILES
from curvemates.cli import main as cli_main


def run(argv):
    code = cli_main(argv)
    if code != 0:
        print(f"command failed ({code}): {' '.join(argv)}", file=sys.stderr)
    return code


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="demo_out")
    ap.add_argument("--step", type=float, default=1e-3)
    args = ap.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    worst = 0
    for name, entry in PROFILES.items():
        base = ["--group", "r3", "--kappa", entry.kappa, "--tau", entry.tau,
                f"--domain={entry.domain[0]}:{entry.domain[1]}",
                "--step", str(args.step)]
        worst |= run(["synthesize", *base, "--out", str(out / f"{name}.csv")])
        worst |= run(["mate", *base, "--kind", "natural", "--mode", "both",
                      "--out", str(out / f"{name}_natural_mate.csv")])
        code = run(["mate", *base, "--kind", "conjugate", "--mode", "analytic",
                    "--out", str(out / f"{name}_conjugate_mate.csv")])
        if code not in (0, 4):   # 4: conjugate degenerate for this profile
            worst |= code
        worst |= run(["classify", *base, "--out", str(out / f"{name}_classify.json")])
    print(f"wrote outputs to {out}/")
    return worst


if __name__ == "__main__":
    sys.exit(main())
