#!/usr/bin/env python3
"""Solve an MPS model with HiGHS and write a plain-text solution file.

Usage: highs_solve.py model.mps out.sol [--gap G] [--time-limit T]
                      [--mip-start start.txt]

The solution file format is line oriented:
    =status optimal|feasible|infeasible|unbounded|timelimit|error
    =objective <value>
    <variable-name> <value>        (one line per variable)
"""

import argparse
import sys


def load_highs():
    try:
        import highspy
        return highspy.Highs, highspy
    except ImportError:
        pass
    # SciPy bundles the HiGHS bindings it uses for linprog/milp; reuse them
    # when the standalone highspy wheel is not installed.
    from scipy.optimize import _highspy  # noqa: F401
    from scipy.optimize._highspy import _core
    return _core._Highs, _core


def status_word(model_status, enum_mod):
    names = {
        enum_mod.HighsModelStatus.kOptimal: "optimal",
        enum_mod.HighsModelStatus.kInfeasible: "infeasible",
        enum_mod.HighsModelStatus.kUnbounded: "unbounded",
        enum_mod.HighsModelStatus.kUnboundedOrInfeasible: "infeasible",
        enum_mod.HighsModelStatus.kTimeLimit: "timelimit",
        enum_mod.HighsModelStatus.kIterationLimit: "timelimit",
    }
    return names.get(model_status, "error")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("mps")
    ap.add_argument("sol")
    ap.add_argument("--gap", type=float, default=1e-3)
    ap.add_argument("--time-limit", type=float, default=120.0)
    ap.add_argument("--mip-start", help="file of 'name value' lines used as a starting point")
    args = ap.parse_args()

    highs_cls, enum_mod = load_highs()
    h = highs_cls()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("mip_rel_gap", args.gap)
    h.setOptionValue("time_limit", args.time_limit)
    h.setOptionValue("threads", 1)

    status = h.readModel(args.mps)
    if status != enum_mod.HighsStatus.kOk:
        print("failed to read model: %s" % args.mps, file=sys.stderr)
        return 2

    if args.mip_start:
        given = {}
        with open(args.mip_start) as f:
            for line in f:
                parts = line.split()
                if len(parts) == 2:
                    given[parts[0]] = float(parts[1])
        lp = h.getLp()
        point = enum_mod.HighsSolution()
        point.col_value = [given.get(name, 0.0) for name in lp.col_names_]
        h.setSolution(point)

    h.run()
    model_status = h.getModelStatus()
    word = status_word(model_status, enum_mod)
    sol = h.getSolution()
    info = h.getInfo()
    # primal_solution_status: 0 = none, 1 = infeasible point, 2 = feasible
    have_solution = getattr(info, "primal_solution_status", 0) == 2

    if word == "timelimit" and have_solution:
        word = "feasible"

    lp = h.getLp()
    names = list(lp.col_names_)
    values = list(sol.col_value) if have_solution else []

    with open(args.sol, "w") as f:
        f.write("# highs solution\n")
        f.write("=status %s\n" % word)
        if have_solution:
            f.write("=objective %.17g\n" % h.getObjectiveValue())
            for name, val in zip(names, values):
                f.write("%s %.17g\n" % (name, val))

    if word in ("optimal", "feasible"):
        return 0
    print("solver finished without a usable solution: %s" % word, file=sys.stderr)
    return 3


if __name__ == "__main__":
    sys.exit(main())
