"""Command line entry: qbplot <kind> --in file.csv --out fig.svg."""
import argparse
import sys

from .readers import SchemaError
from .render import KINDS, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="qbplot", description="render simulator CSV artifacts as SVG figures"
    )
    parser.add_argument("kind", choices=sorted(KINDS), help="which artifact the CSV holds")
    parser.add_argument("--in", dest="in_path", required=True, help="input CSV")
    parser.add_argument("--out", dest="out_path", required=True, help="output SVG")
    args = parser.parse_args(argv)

    try:
        render(args.kind, args.in_path, args.out_path)
    except SchemaError as exc:
        print(f"qbplot: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"qbplot: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
