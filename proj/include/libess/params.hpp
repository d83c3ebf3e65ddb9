#pragma once

#include <string>
#include <vector>

#include "libess/errors.hpp"

namespace ess {

// Everything is SI (m, s, mol, A, V, K) except the pack-level ratings
// (MWh, MW) and the capital cost ($/MWh), which stay in the units used
// by market models.

enum class Electrode { Negative, Positive };

const char* electrode_name(Electrode e);

// Open-circuit potential against Li/Li+ as a function of surface
// stoichiometry, tabulated and linearly interpolated.  Tables must be
// strictly increasing in stoichiometry and dense enough that interpolation
// error is negligible next to model error.
struct OcpCurve {
  std::vector<double> stoich;
  std::vector<double> volts;

  double min_stoich() const { return stoich.front(); }
  double max_stoich() const { return stoich.back(); }
  bool covers(double x) const { return x >= min_stoich() && x <= max_stoich(); }

  // Interpolates inside the table, clamps outside.  Callers that care about
  // leaving the tabulated window check covers() separately.
  double value(double x) const;

  // Slope of the interpolant on the segment containing x.
  double slope(double x) const;

  void validate(const std::string& where) const;
};

struct ElectrodeParams {
  std::string label;            // "negative" or "positive", for messages
  double radius_m = 0;          // particle radius
  double diffusivity_m2_s = 0;  // solid-phase diffusivity
  double rate_const = 0;        // reaction rate constant, (A/m^2)(m^3/mol)^1.5
  double active_frac = 0;       // active-material volume fraction
  double volume_m3 = 0;         // electrode volume
  double c_max = 0;             // saturation concentration, mol/m^3
  double c_min = 0;             // lowest admissible concentration, mol/m^3
  double stoich_empty = 0;      // surface stoichiometry when the cell is empty
  double stoich_full = 0;       // ... and when it is full
  // Linearization constant for the overpotential.  Zero or negative means
  // "use the exchange current density at 50% stoichiometry".
  double bv_linear_const = 0;
  OcpCurve ocp;

  // Moles of lithium moved per coulomb map: charge a full stoichiometry unit
  // takes active_frac * volume_m3 * c_max * F coulombs.
  double window_width() const { return stoich_full - stoich_empty; }
};

struct Economics {
  double capital_cost_per_mwh = 0;  // $ per MWh of installed capacity
  double cycle_life = 0;            // full cycles to end of life
};

struct CellParams {
  double n_cells = 0;
  double temperature_k = 0;
  double faraday = 0;        // C/mol
  double gas_constant = 0;   // J/(mol K)
  double c_electrolyte = 0;  // mol/m^3
  double i_max_a = 0;        // per-cell current limit (both directions)
  double v_min = 0;
  double v_max = 0;
  double q_max_mwh = 0;
  double p_max_charge_mw = 0;
  double p_max_discharge_mw = 0;
  double soc_floor = 0;  // fraction of capacity kept in reserve
  Economics econ;
  ElectrodeParams neg;
  ElectrodeParams pos;

  const ElectrodeParams& electrode(Electrode e) const {
    return e == Electrode::Negative ? neg : pos;
  }

  // Per-cell power rating in W implied by the pack rating.
  double p_cell_max_w(bool discharge) const {
    return (discharge ? p_max_discharge_mw : p_max_charge_mw) * 1e6 / n_cells;
  }

  void validate() const;
};

// Surface stoichiometry from a surface concentration.  Throws when the
// concentration is outside [0, c_max].
double stoichiometry(double c_surf, const ElectrodeParams& e);

// Default linearization constant: exchange current density at 50%
// stoichiometry, a mid-window operating point.
double default_bv_constant(const ElectrodeParams& e, double c_electrolyte);

CellParams load_params(const std::string& path);
void save_params(const CellParams& p, const std::string& path);

}  // namespace ess
