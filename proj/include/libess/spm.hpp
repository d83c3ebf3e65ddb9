#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "libess/params.hpp"

namespace ess {

// Sign conventions follow the usual single-particle setup: applied current
// i > 0 discharges the cell.  The molar flux J at a particle surface counts
// lithium leaving the particle, so discharge gives J > 0 on the negative
// electrode and J < 0 on the positive one.

// Surface molar flux (mol m^-2 s^-1) produced by an applied current.
double molar_flux(double i_app, const CellParams& p, Electrode which);

// Exchange current density (A/m^2).  Requires 0 < c_surf < c_max.
double exchange_current(double c_surf, const ElectrodeParams& e, double c_electrolyte);

// Butler-Volmer overpotential (V) for a given surface flux.
double bv_overpotential(double flux, double c_surf, const ElectrodeParams& e,
                        const CellParams& p);

// Finite-volume discretization of a spherical particle: n equal-width
// shells, concentrations stored at shell centers.
struct ParticleGrid {
  ParticleGrid(double radius, int n_shells);

  double radius;
  double dr;
  std::vector<double> volume;    // shell volumes
  std::vector<double> area_out;  // outer face area of each shell
  double total_volume;

  // Largest explicit-Euler step that keeps the scheme stable for a given
  // diffusivity.
  double dt_stable(double diffusivity) const;
};

// One explicit step of radial diffusion with a prescribed outward surface
// flux.  Conserves lithium exactly up to rounding: the only source term is
// the boundary flux.  Throws if dt violates the stability bound.
void diffusion_step(std::vector<double>& c, const ParticleGrid& g, double diffusivity,
                    double outward_flux, double dt);

double profile_average(const std::vector<double>& c, const ParticleGrid& g);

// Violation categories recorded while replaying a schedule.
enum ViolationFlag : uint8_t {
  kViolationVoltage = 1 << 0,        // v outside [v_min, v_max]
  kViolationCurrent = 1 << 1,        // |i| above i_max
  kViolationStoich = 1 << 2,         // surface stoichiometry left the tabulated window
  kViolationPowerUnreachable = 1 << 3,  // requested power not achievable
};

std::string violation_names(uint8_t flags);

struct TracePoint {
  double t_s = 0;
  double dt_s = 0;  // length of the step this point closes (0 for the initial row)
  double i_a = 0;   // per-cell current
  double v_v = 0;   // terminal voltage
  double p_w = 0;   // pack power, W
  double soc = 0;
  double c_surf_n = 0;
  double c_surf_p = 0;
  uint8_t flags = 0;
};

struct SimTrace {
  std::vector<TracePoint> points;

  size_t count_flagged() const;
  double charge_energy_wh() const;     // pack energy absorbed while p < 0
  double discharge_energy_wh() const;  // pack energy delivered while p > 0
};

struct ProtocolSegment {
  enum class Kind { Current, Power } kind = Kind::Current;
  double duration_s = 0;
  double value = 0;  // A per cell, or W for the whole pack
};

// Full nonlinear single-particle cell.  Holds one concentration profile per
// electrode and steps them explicitly, subdividing caller steps to stay
// inside the diffusion stability bound.
class SpmCell {
 public:
  explicit SpmCell(const CellParams& p, int n_shells = 30);

  void reset_to_soc(double soc);
  void set_profile(Electrode which, const std::vector<double>& c);

  const std::vector<double>& profile(Electrode which) const;
  const ParticleGrid& grid(Electrode which) const;
  const CellParams& params() const { return p_; }

  double c_avg(Electrode which) const;
  // Surface concentration extrapolated from the outermost shell with the
  // boundary gradient implied by the present current.
  double c_surf(Electrode which, double i_app) const;
  double total_moles(Electrode which) const;

  // State of charge from the negative electrode average stoichiometry.
  double soc() const;

  double open_circuit_voltage() const { return terminal_voltage(0.0); }
  double terminal_voltage(double i_app) const;
  double pack_power(double i_app) const;

  // Current that makes pack power equal target_w, by bisection over
  // [-i_max, i_max].  Sets ok=false when the target is out of reach at the
  // present state; the returned current is then the saturating bound.
  double current_for_power(double target_w, bool& ok) const;

  // Advance the state by dt at constant applied current.
  void advance(double i_app, double dt);

  // One explicit step with prescribed electrode surface fluxes.  Exposed for
  // tests; advance() is the usual entry point.
  void step_fluxes(double flux_n, double flux_p, double dt);

  uint8_t violation_flags(double i_app) const;

 private:
  CellParams p_;
  ParticleGrid grid_n_;
  ParticleGrid grid_p_;
  std::vector<double> c_n_;
  std::vector<double> c_p_;
  double dt_sub_;  // largest stable step for either electrode
};

// Piecewise-constant protocol replay, recording every record_dt seconds.
SimTrace simulate(SpmCell& cell, const std::vector<ProtocolSegment>& protocol,
                  double record_dt);

void write_trace_csv(const SimTrace& trace, const std::string& path);

}  // namespace ess
