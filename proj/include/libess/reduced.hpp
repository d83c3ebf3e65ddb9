#pragma once

#include "libess/params.hpp"

namespace ess {

// Two-parameter reduction of the particle diffusion problem: each electrode
// keeps only its average concentration, advanced by the surface flux, and the
// surface concentration is reconstructed from the quasi-steady parabolic
// profile.  Valid on timescales longer than the diffusion transient.

struct ReducedState {
  double c_avg_n = 0;
  double c_avg_p = 0;
};

// Average concentration after holding a constant outward flux for dt.
double reduced_step_average(double c_avg, double flux, const ElectrodeParams& e,
                            double dt);

// Quasi-steady surface depression below the average for a given flux.
double reduced_surface_offset(double flux, const ElectrodeParams& e);

double reduced_surface(double c_avg, double flux, const ElectrodeParams& e);

ReducedState reduced_init(const CellParams& p, double soc);

// Advance both electrodes one step at constant applied current.
ReducedState reduced_step(const ReducedState& s, double i_app, const CellParams& p,
                          double dt);

}  // namespace ess
