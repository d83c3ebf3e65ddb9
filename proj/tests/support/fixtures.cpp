#include "support/fixtures.hpp"

#include "libess/io.hpp"

namespace esstest {

std::string data_dir() { return ESS_DATA_DIR; }

const ess::CellParams& lgm50() {
  static ess::CellParams p = ess::load_params(data_dir() + "/lgm50.json");
  return p;
}

const std::vector<double>& day_prices() {
  static std::vector<double> prices =
      ess::ingest_prices(data_dir() + "/prices_alberta_24h.csv").hourly;
  return prices;
}

ess::CellParams flat_ocv_cell() {
  ess::CellParams p = lgm50();
  p.neg.ocp.stoich = {0.0, 1.0};
  p.neg.ocp.volts = {0.1010, 0.1000};
  p.pos.ocp.stoich = {0.0, 1.0};
  p.pos.ocp.volts = {3.7010, 3.7000};
  p.validate();
  return p;
}

ess::CellParams cell_for_toy(const ToySpec& spec) {
  ess::CellParams p = lgm50();
  p.q_max_mwh = spec.q_mwh;
  p.soc_floor = spec.q_mwh > 0 ? spec.floor_mwh / spec.q_mwh : 0.0;
  p.p_max_charge_mw = spec.p_ch_mw;
  p.p_max_discharge_mw = spec.p_dis_mw;
  // degradation rate is capital / cycle_life
  p.econ.capital_cost_per_mwh = spec.deg_per_mwh * 1000.0;
  p.econ.cycle_life = 1000.0;
  return p;
}

ess::ArbitrageConfig config_for_toy(const ToySpec& spec) {
  ess::ArbitrageConfig cfg;
  cfg.subintervals = 1;
  cfg.eta_roundtrip = spec.eta;
  cfg.soe0_frac = spec.q_mwh > 0 ? spec.soe0_mwh / spec.q_mwh : 1.0;
  return cfg;
}

}  // namespace esstest
