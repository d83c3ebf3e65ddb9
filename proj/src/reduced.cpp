#include "libess/reduced.hpp"

#include "libess/spm.hpp"

namespace ess {

double reduced_step_average(double c_avg, double flux, const ElectrodeParams& e,
                            double dt) {
  return c_avg - 3.0 * flux * dt / e.radius_m;
}

double reduced_surface_offset(double flux, const ElectrodeParams& e) {
  return flux * e.radius_m / (5.0 * e.diffusivity_m2_s);
}

double reduced_surface(double c_avg, double flux, const ElectrodeParams& e) {
  return c_avg - reduced_surface_offset(flux, e);
}

ReducedState reduced_init(const CellParams& p, double soc) {
  ReducedState s;
  s.c_avg_n = (p.neg.stoich_empty + soc * (p.neg.stoich_full - p.neg.stoich_empty)) *
              p.neg.c_max;
  s.c_avg_p = (p.pos.stoich_empty + soc * (p.pos.stoich_full - p.pos.stoich_empty)) *
              p.pos.c_max;
  return s;
}

ReducedState reduced_step(const ReducedState& s, double i_app, const CellParams& p,
                          double dt) {
  ReducedState out;
  out.c_avg_n = reduced_step_average(s.c_avg_n, molar_flux(i_app, p, Electrode::Negative),
                                     p.neg, dt);
  out.c_avg_p = reduced_step_average(s.c_avg_p, molar_flux(i_app, p, Electrode::Positive),
                                     p.pos, dt);
  return out;
}

}  // namespace ess
