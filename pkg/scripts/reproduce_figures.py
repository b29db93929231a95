"""Write the ratio curves for every figure preset (2, 3a-3d) as tables.

    python scripts/reproduce_figures.py [--out-dir results] [--points 400]
"""
import argparse
import sys
from pathlib import Path

from twistbeam import cli


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default="results")
    ap.add_argument("--points", type=int, default=400)
    ap.add_argument("--format", choices=["csv", "json"], default="csv")
    args = ap.parse_args(argv)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    worst = 0
    for fig in sorted(cli.FIGURES):
        path = out_dir / f"figure_{fig}.{args.format}"
        code = cli.main(["ratio", "--figure", fig, "--b-points", str(args.points),
                         "--format", args.format, "--out", str(path)])
        print(f"figure {fig}: {path} (exit {code})")
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
