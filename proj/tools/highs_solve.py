#!/usr/bin/env python3
"""Solve an MPS model with HiGHS and write its raw solution file."""
import argparse
import sys

import highspy


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("model")
    ap.add_argument("solution")
    ap.add_argument("time_limit", nargs="?", type=float)
    ap.add_argument("--gap", type=float, default=1e-9, help="relative and absolute MIP gap")
    args = ap.parse_args()
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("mip_rel_gap", args.gap)
    h.setOptionValue("mip_abs_gap", args.gap)
    h.setOptionValue("threads", 1)
    h.setOptionValue("random_seed", 0)
    if args.time_limit is not None:
        h.setOptionValue("time_limit", args.time_limit)
    if h.readModel(args.model) != highspy.HighsStatus.kOk:
        sys.stderr.write("cannot read %s\n" % args.model)
        return 1
    h.run()
    h.writeSolution(args.solution, 0)
    return 0


if __name__ == "__main__":
    sys.exit(main())
