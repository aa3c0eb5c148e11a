"""Run every experiment config in configs/ and summarise exit codes and row counts.

    python scripts/run_all.py [--out results] [--only cos_flow_track kolmogorov_sweep_tau]
"""

import argparse
import sys
import time
from pathlib import Path

import yaml

from hydrospec.cli import main as cli_main
from hydrospec.cli import read_csv

ROOT = Path(__file__).resolve().parents[1]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=str(ROOT / "results"))
    ap.add_argument("--only", nargs="*", help="config stems to run")
    args = ap.parse_args(argv)

    paths = sorted((ROOT / "configs").glob("*.yaml"))
    if args.only:
        paths = [p for p in paths if p.stem in args.only]
    status = 0
    for path in paths:
        command = yaml.safe_load(path.read_text())["command"]
        out = Path(args.out) / path.stem
        t0 = time.perf_counter()
        code = cli_main([command, "--config", str(path), "--out", str(out)])
        dt = time.perf_counter() - t0
        csv_path = out / f"{command}.csv"
        rows = len(read_csv(csv_path)) if csv_path.exists() else 0
        print(f"{path.stem:24s} {command:12s} exit {code}  rows {rows:4d}  {dt:6.2f} s")
        # steep_poiseuille is expected to be rejected: its contour violates C1
        expected = 3 if path.stem == "steep_poiseuille_validate" else 0
        status |= code != expected
    return int(status)


if __name__ == "__main__":
    sys.exit(main())
