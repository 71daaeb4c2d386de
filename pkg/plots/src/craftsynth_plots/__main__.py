"""CLI: python -m craftsynth_plots --kind fig1 --in results/fig1.csv --out fig1.png"""

import argparse
import sys

from .render import KINDS, PlotSpec, render


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="craftsynth_plots")
    ap.add_argument("--kind", required=True, choices=KINDS)
    ap.add_argument("--in", dest="inputs", required=True, nargs="+",
                    help="input CSV file(s)")
    ap.add_argument("--out", required=True, help="output image path")
    ap.add_argument("--dpi", type=int, default=130)
    args = ap.parse_args(argv)
    spec = PlotSpec(kind=args.kind, inputs=args.inputs, output=args.out,
                    style={"dpi": args.dpi})
    for path in render(spec):
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
