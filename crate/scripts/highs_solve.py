#!/usr/bin/env python3
"""Solve an LP-format model with HiGHS and write `name = value` lines.

usage: highs_solve.py MODEL.lp OUT.sol [TIME_LIMIT_SECONDS]
"""
import sys

import highspy


def main():
    model, out = sys.argv[1], sys.argv[2]
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("mip_rel_gap", 1e-9)
    h.setOptionValue("mip_abs_gap", 1e-9)
    if len(sys.argv) > 3:
        h.setOptionValue("time_limit", float(sys.argv[3]))
    if h.readModel(model) != highspy.HighsStatus.kOk:
        sys.exit("could not read " + model)
    h.run()
    status = h.modelStatusToString(h.getModelStatus())
    if status != "Optimal":
        sys.exit("status: " + status)
    lp = h.getLp()
    values = h.getSolution().col_value
    with open(out, "w") as f:
        f.write("# highs objective = %r\n" % h.getInfo().objective_function_value)
        for name, v in zip(lp.col_names_, values):
            f.write("%s = %r\n" % (name, v))


if __name__ == "__main__":
    main()
