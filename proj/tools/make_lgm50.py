#!/usr/bin/env python3
"""Generate data/lgm50.json, the LG M50 cell parameter set.

Geometry, transport, kinetics, and the open-circuit potential fits are taken
from Chen et al., "Development of Experimental Techniques for Parameterization
of Multi-scale Lithium-ion Battery Models", J. Electrochem. Soc. 167 (2020)
080534.  Stoichiometry windows are balanced so the cell delivers its 5.000 Ah
nominal capacity between the voltage limits.

Usage: make_lgm50.py [out.json]
"""

import json
import math
import sys

F = 96485.33212
R_GAS = 8.314462618
T = 298.15


def ocp_neg(x):
    return (1.9793 * math.exp(-39.3631 * x) + 0.2482
            - 0.0909 * math.tanh(29.8538 * (x - 0.1234))
            - 0.04478 * math.tanh(14.9159 * (x - 0.2769))
            - 0.0205 * math.tanh(30.4444 * (x - 0.6103)))


def ocp_pos(y):
    return (-0.8090 * y + 4.4875
            - 0.0428 * math.tanh(18.5138 * (y - 0.5542))
            - 17.7326 * math.tanh(15.7890 * (y - 0.3117))
            + 17.5842 * math.tanh(15.9308 * (y - 0.3120)))


def grid(lo, hi, step):
    n = int(round((hi - lo) / step))
    return [lo + i * step for i in range(n + 1)]


def tabulate(fn, xs):
    # Full float precision: the graphite curve is nearly flat above x ~ 0.88
    # and rounding would collapse neighbouring samples to equal values.
    return [[round(x, 6), fn(x)] for x in xs]


def main():
    out_path = sys.argv[1] if len(sys.argv) > 1 else "data/lgm50.json"

    # Dense sampling at low stoichiometry where the exponential term of the
    # graphite potential is steep, coarser across the plateaus.
    xs_neg = grid(0.005, 0.119, 0.001) + grid(0.12, 0.96, 0.005)
    ys_pos = grid(0.15, 0.97, 0.0025)

    # Stoichiometry windows balanced to 5.000 Ah between 2.5 V and 4.2 V.
    x_empty, x_full = 0.0436, 0.9014
    y_empty, y_full = 0.8426, 0.2700

    c_max_n = 33133.0
    c_max_p = 63104.0
    soc_floor = 0.14
    # Keep both floors at or below their exact stoichiometry products so the
    # fully charged initial state stays inside the acceptable band.
    c_min_n = math.floor((x_empty + soc_floor * (x_full - x_empty)) * c_max_n * 10) / 10
    c_min_p = math.floor(y_full * c_max_p * 10) / 10

    params = {
        "cell": {
            "_source": "LG M50 21700 cylindrical cell, Chen et al. 2020",
            "n_cells": 10000,
            "temperature_K": T,
            "faraday_C_per_mol": F,
            "gas_constant_J_per_mol_K": R_GAS,
            "electrolyte_mol_per_m3": 1000.0,
            "i_max_A": 5.0,
            "v_min_V": 2.5,
            "v_max_V": 4.2,
            "q_max_MWh": 0.182,
            "p_max_charge_MW": 0.182,
            "p_max_discharge_MW": 0.182,
            "soc_floor": soc_floor,
        },
        "economics": {
            "_source": "storage capital cost and rated cycle life",
            "capital_cost_per_MWh": 567000.0,
            "cycle_life_cycles": 10000.0,
        },
        "negative_electrode": {
            "_source": "graphite-SiOx, Chen et al. 2020 Table A-1",
            "particle_radius_m": 5.86e-6,
            "diffusivity_m2_per_s": 3.3e-14,
            "rate_const": 6.48e-7,
            "active_volume_fraction": 0.75,
            "volume_m3": 8.752e-6,
            "c_max_mol_per_m3": c_max_n,
            "c_min_mol_per_m3": c_min_n,
            "stoich_empty": x_empty,
            "stoich_full": x_full,
            "ocp_V": tabulate(ocp_neg, xs_neg),
        },
        "positive_electrode": {
            "_source": "NMC-811, Chen et al. 2020 Table A-1",
            "particle_radius_m": 5.22e-6,
            "diffusivity_m2_per_s": 4.0e-15,
            "rate_const": 3.42e-6,
            "active_volume_fraction": 0.665,
            "volume_m3": 7.764e-6,
            "c_max_mol_per_m3": c_max_p,
            "c_min_mol_per_m3": c_min_p,
            "stoich_empty": y_empty,
            "stoich_full": y_full,
            "ocp_V": tabulate(ocp_pos, ys_pos),
        },
    }

    with open(out_path, "w") as f:
        json.dump(params, f, indent=2)
        f.write("\n")
    print("wrote %s (%d neg / %d pos OCP points)" %
          (out_path, len(xs_neg), len(ys_pos)))


if __name__ == "__main__":
    main()
