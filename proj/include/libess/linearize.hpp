#pragma once

#include <utility>

#include "libess/params.hpp"
#include "libess/pwl.hpp"

namespace ess {

// First-order overpotential: eta = coef * flux, the tangent of the
// Butler-Volmer sinh at zero flux evaluated with a fixed exchange current
// density.  Uses the electrode's stored linearization constant, or the
// exchange current density at 50% stoichiometry when none is stored.
double linear_eta_coef(const ElectrodeParams& e, const CellParams& p);

double linear_eta(double flux, const ElectrodeParams& e, const CellParams& p);

// Rotation of the bilinear power term: with y1 = (v+i)/2 and y2 = (v-i)/2,
// v*i equals y1^2 - y2^2, each square then approximated piecewise-linearly.
inline std::pair<double, double> power_split(double v, double i) {
  return {0.5 * (v + i), 0.5 * (v - i)};
}

inline double power_from_split(double y1_sq, double y2_sq) { return y1_sq - y2_sq; }

// Everything the physics MILP builder needs from the continuous model:
// open-circuit potential chords over the admissible surface windows and the
// linear overpotential coefficients.
struct Linearization {
  PiecewiseLinearFn ocp_n;  // over surface stoichiometry of the negative electrode
  PiecewiseLinearFn ocp_p;
  double eta_coef_n = 0;  // V per unit molar flux
  double eta_coef_p = 0;
  double x_lo_n = 0, x_hi_n = 0;  // admissible surface stoichiometry windows
  double x_lo_p = 0, x_hi_p = 0;
};

// Surface windows span the state-of-charge interval [floor, 1]: on the
// negative electrode the floor is the stored c_min, on the positive side it
// is the image of the same state of charge.
Linearization build_linearization(const CellParams& p, int ocp_segments);

}  // namespace ess
