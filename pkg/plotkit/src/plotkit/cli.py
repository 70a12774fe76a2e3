"""Command line front end: ``nsg-plot <figure-kind> --in table.csv --out fig.svg``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .figures import FIGURE_KINDS, FigureSpec, RenderError, render

EXIT_OK = 0
EXIT_BAD_INPUT = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nsg-plot",
        description="render a vector figure from an nsg CSV table",
    )
    parser.add_argument("kind", choices=FIGURE_KINDS, help="which figure to draw")
    parser.add_argument("--in", dest="csv", required=True, metavar="CSV",
                        help="input CSV table")
    parser.add_argument("--out", dest="out", required=True, metavar="PATH",
                        help="output image path (.svg or .pdf)")
    parser.add_argument("--xscale", choices=("log", "linear"), default=None,
                        help="override the kind's default x-axis scale")
    parser.add_argument("--yscale", choices=("log", "linear"), default=None,
                        help="override the kind's default y-axis scale")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(
        kind=args.kind,
        csv_path=Path(args.csv),
        out_path=Path(args.out),
        xscale=args.xscale,
        yscale=args.yscale,
    )
    try:
        written = render(spec)
    except RenderError as exc:
        print(f"nsg-plot: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    print(f"wrote {written}")
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
