#include "libess/linearize.hpp"

#include <algorithm>

namespace ess {

double linear_eta_coef(const ElectrodeParams& e, const CellParams& p) {
  double a = e.bv_linear_const > 0.0 ? e.bv_linear_const
                                     : default_bv_constant(e, p.c_electrolyte);
  return p.gas_constant * p.temperature_k / a;
}

double linear_eta(double flux, const ElectrodeParams& e, const CellParams& p) {
  return linear_eta_coef(e, p) * flux;
}

Linearization build_linearization(const CellParams& p, int ocp_segments) {
  Linearization lin;

  lin.x_lo_n = p.neg.c_min / p.neg.c_max;
  lin.x_hi_n = p.neg.stoich_full;
  if (!(lin.x_lo_n < lin.x_hi_n))
    throw config_error("negative electrode: c_min does not leave room below stoich_full");

  // State of charge at which the negative surface sits on its floor; the
  // positive window spans the image of the same interval.
  double floor_soc =
      (lin.x_lo_n - p.neg.stoich_empty) / (p.neg.stoich_full - p.neg.stoich_empty);
  double y_floor =
      p.pos.stoich_empty + floor_soc * (p.pos.stoich_full - p.pos.stoich_empty);
  lin.x_lo_p = std::max(p.pos.stoich_full, p.pos.c_min / p.pos.c_max);
  lin.x_hi_p = y_floor;
  if (!(lin.x_lo_p < lin.x_hi_p))
    throw config_error("positive electrode: empty surface stoichiometry window");

  auto f_n = [&p](double x) { return p.neg.ocp.value(x); };
  auto f_p = [&p](double x) { return p.pos.ocp.value(x); };
  lin.ocp_n = fit_pwl(f_n, lin.x_lo_n, lin.x_hi_n, ocp_segments);
  lin.ocp_p = fit_pwl(f_p, lin.x_lo_p, lin.x_hi_p, ocp_segments);

  lin.eta_coef_n = linear_eta_coef(p.neg, p);
  lin.eta_coef_p = linear_eta_coef(p.pos, p);
  return lin;
}

}  // namespace ess
