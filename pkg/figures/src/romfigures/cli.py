"""figures <kind> <source> -o out.png [--variable e_rho|rho|...]

kind is one of convergence, summary_bars (source = report directory) or
field_1d, field_2d (source = an ERSN snapshot file).  Every image gets a
plain-text sidecar of the plotted arrays next to it.  Exit codes: 0 on
success, 1 on schema or configuration errors.
"""

import argparse
import sys

from .readers import SchemaError
from .render import KINDS, render


def build_parser():
    parser = argparse.ArgumentParser(prog="figures", description=__doc__)
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("source", help="report directory or snapshot file")
    parser.add_argument("-o", "--output", required=True, help="output image path")
    parser.add_argument("--variable", help="variable selector")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        render(args.kind, args.source, args.output, args.variable)
    except (SchemaError, FileNotFoundError, NotADirectoryError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    print(f"wrote {args.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
