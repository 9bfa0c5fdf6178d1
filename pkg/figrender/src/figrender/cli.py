"""Command line for rendering figure images from simulator CSV directories.

    figrender render --figure 2 --in results --out fig2.png
    figrender render --figure 4 --in results --out fig4.svg --format svg

Exit codes: 0 on success, 2 on usage, manifest, or schema errors.
"""

import argparse
import sys

from .errors import RenderError
from .figures import FORMATS, FigureSpec, render


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="figrender",
        description="Render figure images from simulator CSV outputs")
    sub = parser.add_subparsers(dest="command")
    r = sub.add_parser("render", help="render one figure")
    r.add_argument("--figure", type=int, required=True, metavar="N",
                   help="figure id, 1..4")
    r.add_argument("--in", dest="in_dir", required=True, metavar="DIR",
                   help="directory with the CSVs and their manifest")
    r.add_argument("--out", required=True, metavar="PATH",
                   help="output image path")
    r.add_argument("--format", choices=FORMATS, default=None,
                   help="image format (default: from the output suffix)")
    r.add_argument("--contour-levels", type=int, default=7)
    r.add_argument("--no-log-insets", action="store_true")
    return parser


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command != "render":
        parser.print_usage(sys.stderr)
        return 2
    fmt = args.format or ("svg" if args.out.lower().endswith(".svg")
                          else "png")
    spec = FigureSpec(figure=args.figure, in_dir=args.in_dir,
                      out_path=args.out, fmt=fmt,
                      contour_levels=args.contour_levels,
                      log_insets=not args.no_log_insets)
    try:
        path = render(spec)
    except RenderError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except OSError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    print("wrote %s" % path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
