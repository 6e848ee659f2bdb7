#!/usr/bin/env python3
"""Run the step-count convergence study for the differencing schemes."""

from __future__ import annotations

import argparse
import sys

from epdyn import cli


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--reference-steps", type=int, help="step count of the reference run"
    )
    parser.add_argument("--out", default="results", help="output directory")
    args = parser.parse_args()

    argv = ["run", "two-level-convergence", "--out", args.out]
    if args.reference_steps is not None:
        argv += ["--steps", str(args.reference_steps)]
    return cli.main(argv)


if __name__ == "__main__":
    sys.exit(main())
