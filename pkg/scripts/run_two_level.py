#!/usr/bin/env python3
"""Run the closed-loop two-level scenarios at one or more durations."""

from __future__ import annotations

import argparse
import sys

from epdyn import cli


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--multiple",
        type=int,
        nargs="+",
        default=[1, 2, 5, 10],
        choices=[1, 2, 5, 10],
        help="loop durations as multiples of the base period",
    )
    parser.add_argument("--steps", type=int, help="override the step count")
    parser.add_argument("--out", default="results", help="output directory")
    args = parser.parse_args()

    names = ["two-level-T0" if m == 1 else "two-level-%dT0" % m for m in args.multiple]
    argv = ["run", *names, "--out", args.out]
    if args.steps is not None:
        argv += ["--steps", str(args.steps)]
    return cli.main(argv)


if __name__ == "__main__":
    sys.exit(main())
