#!/usr/bin/env python3
"""Run the two-channel grid demonstration with the absorbing boundary."""

from __future__ import annotations

import argparse
import sys

from epdyn import cli


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--steps", type=int, help="override the step count (default 1000)"
    )
    parser.add_argument("--out", default="results", help="output directory")
    args = parser.parse_args()

    argv = ["run", "dvr-demo", "--out", args.out]
    if args.steps is not None:
        argv += ["--steps", str(args.steps)]
    return cli.main(argv)


if __name__ == "__main__":
    sys.exit(main())
