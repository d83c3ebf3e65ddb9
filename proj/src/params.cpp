#include "libess/params.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

namespace ess {

using nlohmann::json;

const char* electrode_name(Electrode e) {
  return e == Electrode::Negative ? "negative" : "positive";
}

double OcpCurve::value(double x) const {
  if (x <= stoich.front()) return volts.front();
  if (x >= stoich.back()) return volts.back();
  auto it = std::upper_bound(stoich.begin(), stoich.end(), x);
  size_t i = static_cast<size_t>(it - stoich.begin());
  double w = (x - stoich[i - 1]) / (stoich[i] - stoich[i - 1]);
  return volts[i - 1] + w * (volts[i] - volts[i - 1]);
}

double OcpCurve::slope(double x) const {
  size_t i = 1;
  if (x > stoich.front()) {
    auto it = std::upper_bound(stoich.begin(), stoich.end(), x);
    i = std::min(static_cast<size_t>(it - stoich.begin()), stoich.size() - 1);
  }
  return (volts[i] - volts[i - 1]) / (stoich[i] - stoich[i - 1]);
}

void OcpCurve::validate(const std::string& where) const {
  if (stoich.size() < 2 || stoich.size() != volts.size())
    throw config_error(where + ": needs at least two (stoichiometry, volts) points");
  for (size_t i = 1; i < stoich.size(); ++i) {
    if (stoich[i] <= stoich[i - 1])
      throw config_error(where + ": stoichiometry values must be strictly increasing");
  }
  for (double x : stoich) {
    if (x < 0.0 || x > 1.0)
      throw config_error(where + ": stoichiometry values must lie in [0, 1]");
  }
}

double stoichiometry(double c_surf, const ElectrodeParams& e) {
  if (!(c_surf >= 0.0) || c_surf > e.c_max)
    throw config_error("surface concentration " + std::to_string(c_surf) +
                       " outside [0, c_max=" + std::to_string(e.c_max) + "]");
  return c_surf / e.c_max;
}

double default_bv_constant(const ElectrodeParams& e, double c_electrolyte) {
  double c = 0.5 * e.c_max;
  return e.rate_const * std::sqrt((e.c_max - c) * c * c_electrolyte);
}

namespace {

void check_positive(double v, const std::string& field) {
  if (!(v > 0.0)) throw config_error(field + ": must be positive, got " + std::to_string(v));
}

void validate_electrode(const ElectrodeParams& e, const std::string& where) {
  check_positive(e.radius_m, where + ".particle_radius_m");
  check_positive(e.diffusivity_m2_s, where + ".diffusivity_m2_per_s");
  check_positive(e.rate_const, where + ".rate_const");
  check_positive(e.volume_m3, where + ".volume_m3");
  check_positive(e.c_max, where + ".c_max_mol_per_m3");
  if (!(e.active_frac > 0.0 && e.active_frac <= 1.0))
    throw config_error(where + ".active_volume_fraction: must be in (0, 1]");
  if (!(e.c_min >= 0.0 && e.c_min < e.c_max))
    throw config_error(where + ".c_min_mol_per_m3: must satisfy 0 <= c_min < c_max");
  if (!(e.stoich_empty >= 0.0 && e.stoich_empty <= 1.0) ||
      !(e.stoich_full >= 0.0 && e.stoich_full <= 1.0))
    throw config_error(where + ": stoich_empty/stoich_full must be in [0, 1]");
  if (e.stoich_empty == e.stoich_full)
    throw config_error(where + ": stoich_empty and stoich_full must differ");
  e.ocp.validate(where + ".ocp_V");
  double lo = std::min(e.stoich_empty, e.stoich_full);
  double hi = std::max(e.stoich_empty, e.stoich_full);
  if (!e.ocp.covers(lo) || !e.ocp.covers(hi))
    throw config_error(where + ".ocp_V: table does not cover the operating window [" +
                       std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

// The negative electrode potential must be invertible over the operating
// window, otherwise the state-of-charge map is ill-defined.
void validate_monotone_ocp(const ElectrodeParams& e, const std::string& where) {
  double lo = std::min(e.stoich_empty, e.stoich_full);
  double hi = std::max(e.stoich_empty, e.stoich_full);
  int dir = 0;
  for (size_t i = 1; i < e.ocp.stoich.size(); ++i) {
    if (e.ocp.stoich[i] <= lo || e.ocp.stoich[i - 1] >= hi) continue;
    double d = e.ocp.volts[i] - e.ocp.volts[i - 1];
    int s = d > 0 ? 1 : (d < 0 ? -1 : 0);
    if (s == 0 || (dir != 0 && s != dir))
      throw config_error(where + ".ocp_V: not strictly monotone over the operating window");
    dir = s;
  }
}

double need(const json& j, const std::string& section, const std::string& key) {
  if (!j.contains(key))
    throw config_error(section + "." + key + ": missing");
  if (!j[key].is_number())
    throw config_error(section + "." + key + ": must be a number");
  return j[key].get<double>();
}

ElectrodeParams parse_electrode(const json& j, const std::string& section) {
  ElectrodeParams e;
  e.label = section.substr(0, section.find('_'));
  e.radius_m = need(j, section, "particle_radius_m");
  e.diffusivity_m2_s = need(j, section, "diffusivity_m2_per_s");
  e.rate_const = need(j, section, "rate_const");
  e.active_frac = need(j, section, "active_volume_fraction");
  e.volume_m3 = need(j, section, "volume_m3");
  e.c_max = need(j, section, "c_max_mol_per_m3");
  e.c_min = need(j, section, "c_min_mol_per_m3");
  e.stoich_empty = need(j, section, "stoich_empty");
  e.stoich_full = need(j, section, "stoich_full");
  if (j.contains("bv_linear_const")) e.bv_linear_const = j["bv_linear_const"].get<double>();
  if (!j.contains("ocp_V") || !j["ocp_V"].is_array())
    throw config_error(section + ".ocp_V: missing or not an array");
  for (const auto& row : j["ocp_V"]) {
    if (!row.is_array() || row.size() != 2)
      throw config_error(section + ".ocp_V: rows must be [stoichiometry, volts] pairs");
    e.ocp.stoich.push_back(row[0].get<double>());
    e.ocp.volts.push_back(row[1].get<double>());
  }
  return e;
}

json electrode_to_json(const ElectrodeParams& e) {
  json j;
  j["particle_radius_m"] = e.radius_m;
  j["diffusivity_m2_per_s"] = e.diffusivity_m2_s;
  j["rate_const"] = e.rate_const;
  j["active_volume_fraction"] = e.active_frac;
  j["volume_m3"] = e.volume_m3;
  j["c_max_mol_per_m3"] = e.c_max;
  j["c_min_mol_per_m3"] = e.c_min;
  j["stoich_empty"] = e.stoich_empty;
  j["stoich_full"] = e.stoich_full;
  if (e.bv_linear_const > 0.0) j["bv_linear_const"] = e.bv_linear_const;
  json ocp = json::array();
  for (size_t i = 0; i < e.ocp.stoich.size(); ++i)
    ocp.push_back({e.ocp.stoich[i], e.ocp.volts[i]});
  j["ocp_V"] = ocp;
  return j;
}

}  // namespace

void CellParams::validate() const {
  if (!(n_cells >= 1.0)) throw config_error("cell.n_cells: must be at least 1");
  check_positive(temperature_k, "cell.temperature_K");
  check_positive(faraday, "cell.faraday_C_per_mol");
  check_positive(gas_constant, "cell.gas_constant_J_per_mol_K");
  check_positive(c_electrolyte, "cell.electrolyte_mol_per_m3");
  check_positive(i_max_a, "cell.i_max_A");
  if (!(v_min < v_max))
    throw config_error("cell.v_min_V/v_max_V: need v_min < v_max");
  check_positive(q_max_mwh, "cell.q_max_MWh");
  check_positive(p_max_charge_mw, "cell.p_max_charge_MW");
  check_positive(p_max_discharge_mw, "cell.p_max_discharge_MW");
  if (!(soc_floor >= 0.0 && soc_floor < 1.0))
    throw config_error("cell.soc_floor: must be in [0, 1)");
  if (!(econ.capital_cost_per_mwh >= 0.0))
    throw config_error("economics.capital_cost_per_MWh: must be nonnegative");
  check_positive(econ.cycle_life, "economics.cycle_life_cycles");
  validate_electrode(neg, "negative_electrode");
  validate_electrode(pos, "positive_electrode");
  validate_monotone_ocp(neg, "negative_electrode");
}

CellParams load_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open parameter file " + path);
  json j;
  try {
    j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::exception& e) {
    throw config_error(path + ": " + e.what());
  }

  CellParams p;
  try {
    if (!j.contains("cell")) throw config_error("cell: section missing");
    const json& c = j["cell"];
    p.n_cells = need(c, "cell", "n_cells");
    p.temperature_k = need(c, "cell", "temperature_K");
    p.faraday = need(c, "cell", "faraday_C_per_mol");
    p.gas_constant = need(c, "cell", "gas_constant_J_per_mol_K");
    p.c_electrolyte = need(c, "cell", "electrolyte_mol_per_m3");
    p.i_max_a = need(c, "cell", "i_max_A");
    p.v_min = need(c, "cell", "v_min_V");
    p.v_max = need(c, "cell", "v_max_V");
    p.q_max_mwh = need(c, "cell", "q_max_MWh");
    p.p_max_charge_mw = need(c, "cell", "p_max_charge_MW");
    p.p_max_discharge_mw = need(c, "cell", "p_max_discharge_MW");
    p.soc_floor = need(c, "cell", "soc_floor");
    if (!j.contains("economics")) throw config_error("economics: section missing");
    p.econ.capital_cost_per_mwh = need(j["economics"], "economics", "capital_cost_per_MWh");
    p.econ.cycle_life = need(j["economics"], "economics", "cycle_life_cycles");
    if (!j.contains("negative_electrode"))
      throw config_error("negative_electrode: section missing");
    if (!j.contains("positive_electrode"))
      throw config_error("positive_electrode: section missing");
    p.neg = parse_electrode(j["negative_electrode"], "negative_electrode");
    p.pos = parse_electrode(j["positive_electrode"], "positive_electrode");
  } catch (const json::exception& e) {
    throw config_error(path + ": " + e.what());
  }

  p.validate();
  return p;
}

void save_params(const CellParams& p, const std::string& path) {
  json j;
  json& c = j["cell"];
  c["n_cells"] = p.n_cells;
  c["temperature_K"] = p.temperature_k;
  c["faraday_C_per_mol"] = p.faraday;
  c["gas_constant_J_per_mol_K"] = p.gas_constant;
  c["electrolyte_mol_per_m3"] = p.c_electrolyte;
  c["i_max_A"] = p.i_max_a;
  c["v_min_V"] = p.v_min;
  c["v_max_V"] = p.v_max;
  c["q_max_MWh"] = p.q_max_mwh;
  c["p_max_charge_MW"] = p.p_max_charge_mw;
  c["p_max_discharge_MW"] = p.p_max_discharge_mw;
  c["soc_floor"] = p.soc_floor;
  j["economics"]["capital_cost_per_MWh"] = p.econ.capital_cost_per_mwh;
  j["economics"]["cycle_life_cycles"] = p.econ.cycle_life;
  j["negative_electrode"] = electrode_to_json(p.neg);
  j["positive_electrode"] = electrode_to_json(p.pos);

  std::ofstream out(path);
  if (!out) throw io_error("cannot write parameter file " + path);
  out << j.dump(2) << "\n";
}

}  // namespace ess
