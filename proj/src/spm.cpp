#include "libess/spm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>

namespace ess {

double molar_flux(double i_app, const CellParams& p, Electrode which) {
  const ElectrodeParams& e = p.electrode(which);
  double j = i_app * e.radius_m / (3.0 * e.volume_m3 * e.active_frac * p.faraday);
  return which == Electrode::Negative ? j : -j;
}

double exchange_current(double c_surf, const ElectrodeParams& e, double c_electrolyte) {
  if (!(c_surf > 0.0) || !(c_surf < e.c_max))
    throw solve_error("surface concentration out of (0, c_max) on the " + e.label +
                      " electrode: " + std::to_string(c_surf));
  return e.rate_const * std::sqrt((e.c_max - c_surf) * c_surf * c_electrolyte);
}

double bv_overpotential(double flux, double c_surf, const ElectrodeParams& e,
                        const CellParams& p) {
  double j0 = exchange_current(c_surf, e, p.c_electrolyte);
  double arg = p.faraday * flux / (2.0 * j0);
  return 2.0 * p.gas_constant * p.temperature_k / p.faraday * std::asinh(arg);
}

ParticleGrid::ParticleGrid(double r, int n_shells) : radius(r) {
  dr = radius / n_shells;
  volume.resize(n_shells);
  area_out.resize(n_shells);
  const double four_pi = 4.0 * std::numbers::pi;
  double r_in = 0.0;
  for (int i = 0; i < n_shells; ++i) {
    double r_out = dr * (i + 1);
    volume[i] = four_pi / 3.0 * (r_out * r_out * r_out - r_in * r_in * r_in);
    area_out[i] = four_pi * r_out * r_out;
    r_in = r_out;
  }
  total_volume = four_pi / 3.0 * radius * radius * radius;
}

double ParticleGrid::dt_stable(double diffusivity) const {
  // Gershgorin bound on the explicit update: the innermost shell is the
  // binding one for this geometry.
  double max_rate = 0.0;
  for (size_t i = 0; i < volume.size(); ++i) {
    double a_in = i == 0 ? 0.0 : area_out[i - 1];
    double rate = diffusivity * (a_in + area_out[i]) / (dr * volume[i]);
    max_rate = std::max(max_rate, rate);
  }
  return 1.0 / max_rate;
}

void diffusion_step(std::vector<double>& c, const ParticleGrid& g, double diffusivity,
                    double outward_flux, double dt) {
  double bound = g.dt_stable(diffusivity);
  if (dt > bound * (1.0 + 1e-9))
    throw config_error("diffusion step dt=" + std::to_string(dt) +
                       " s exceeds the stability bound " + std::to_string(bound) + " s");
  size_t n = c.size();
  // Diffusive flow into shell i through its outer face.
  static thread_local std::vector<double> flow;
  flow.resize(n);
  for (size_t i = 0; i + 1 < n; ++i)
    flow[i] = diffusivity * g.area_out[i] * (c[i + 1] - c[i]) / g.dr;
  flow[n - 1] = -g.area_out[n - 1] * outward_flux;
  double prev = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double d = (flow[i] - prev) * dt / g.volume[i];
    prev = flow[i];
    c[i] += d;
  }
}

double profile_average(const std::vector<double>& c, const ParticleGrid& g) {
  double m = 0.0;
  for (size_t i = 0; i < c.size(); ++i) m += c[i] * g.volume[i];
  return m / g.total_volume;
}

std::string violation_names(uint8_t flags) {
  std::string out;
  auto add = [&out](const char* name) {
    if (!out.empty()) out += ';';
    out += name;
  };
  if (flags & kViolationVoltage) add("voltage");
  if (flags & kViolationCurrent) add("current");
  if (flags & kViolationStoich) add("stoich");
  if (flags & kViolationPowerUnreachable) add("power");
  return out;
}

size_t SimTrace::count_flagged() const {
  size_t n = 0;
  for (const auto& pt : points)
    if (pt.flags) ++n;
  return n;
}

double SimTrace::charge_energy_wh() const {
  double e = 0.0;
  for (const auto& pt : points)
    if (pt.p_w < 0.0) e -= pt.p_w * pt.dt_s;
  return e / 3600.0;
}

double SimTrace::discharge_energy_wh() const {
  double e = 0.0;
  for (const auto& pt : points)
    if (pt.p_w > 0.0) e += pt.p_w * pt.dt_s;
  return e / 3600.0;
}

SpmCell::SpmCell(const CellParams& p, int n_shells)
    : p_(p),
      grid_n_(p.neg.radius_m, n_shells),
      grid_p_(p.pos.radius_m, n_shells),
      c_n_(n_shells),
      c_p_(n_shells) {
  dt_sub_ = std::min(grid_n_.dt_stable(p_.neg.diffusivity_m2_s),
                     grid_p_.dt_stable(p_.pos.diffusivity_m2_s));
  reset_to_soc(1.0);
}

void SpmCell::reset_to_soc(double soc) {
  if (!(soc >= 0.0 && soc <= 1.0))
    throw config_error("initial state of charge must be in [0, 1], got " +
                       std::to_string(soc));
  for (Electrode which : {Electrode::Negative, Electrode::Positive}) {
    const ElectrodeParams& e = p_.electrode(which);
    double x = e.stoich_empty + soc * (e.stoich_full - e.stoich_empty);
    auto& c = which == Electrode::Negative ? c_n_ : c_p_;
    std::fill(c.begin(), c.end(), x * e.c_max);
  }
}

void SpmCell::set_profile(Electrode which, const std::vector<double>& c) {
  auto& dst = which == Electrode::Negative ? c_n_ : c_p_;
  if (c.size() != dst.size())
    throw config_error("profile size mismatch: expected " + std::to_string(dst.size()));
  dst = c;
}

const std::vector<double>& SpmCell::profile(Electrode which) const {
  return which == Electrode::Negative ? c_n_ : c_p_;
}

const ParticleGrid& SpmCell::grid(Electrode which) const {
  return which == Electrode::Negative ? grid_n_ : grid_p_;
}

double SpmCell::c_avg(Electrode which) const {
  return profile_average(profile(which), grid(which));
}

double SpmCell::c_surf(Electrode which, double i_app) const {
  const ElectrodeParams& e = p_.electrode(which);
  const ParticleGrid& g = grid(which);
  double j = molar_flux(i_app, p_, which);
  // Linear extrapolation from the outermost shell center with the gradient
  // set by the surface flux boundary condition.
  return profile(which).back() - j * g.dr / (2.0 * e.diffusivity_m2_s);
}

double SpmCell::total_moles(Electrode which) const {
  const auto& c = profile(which);
  const ParticleGrid& g = grid(which);
  double m = 0.0;
  for (size_t i = 0; i < c.size(); ++i) m += c[i] * g.volume[i];
  return m;
}

double SpmCell::soc() const {
  const ElectrodeParams& e = p_.neg;
  double x = c_avg(Electrode::Negative) / e.c_max;
  return (x - e.stoich_empty) / (e.stoich_full - e.stoich_empty);
}

double SpmCell::terminal_voltage(double i_app) const {
  double phi[2];
  for (Electrode which : {Electrode::Negative, Electrode::Positive}) {
    const ElectrodeParams& e = p_.electrode(which);
    double cs = c_surf(which, i_app);
    double j = molar_flux(i_app, p_, which);
    double eta = bv_overpotential(j, cs, e, p_);
    double u = e.ocp.value(cs / e.c_max);
    phi[which == Electrode::Negative ? 0 : 1] = eta + u;
  }
  return phi[1] - phi[0];
}

double SpmCell::pack_power(double i_app) const {
  return p_.n_cells * i_app * terminal_voltage(i_app);
}

double SpmCell::current_for_power(double target_w, bool& ok) const {
  ok = true;
  if (target_w == 0.0) return 0.0;
  double sign = target_w > 0.0 ? 1.0 : -1.0;

  auto power_at = [this](double i) -> std::optional<double> {
    try {
      return pack_power(i);
    } catch (const Error&) {
      return std::nullopt;  // surface concentration breakdown at this current
    }
  };

  // Pull the far end of the bracket inside the evaluable region if the full
  // current bound already breaks the surface concentration.
  double hi = sign * p_.i_max_a;
  std::optional<double> p_hi = power_at(hi);
  int shrink = 0;
  while (!p_hi && shrink++ < 60) {
    hi *= 0.9;
    p_hi = power_at(hi);
  }
  if (!p_hi) {
    ok = false;
    return 0.0;
  }

  // Keep the loaded voltage inside the window: discharge may not pull the
  // terminal below v_min, charge may not push it above v_max.  When the
  // bracket end lands outside, bisect on voltage to the boundary current, so
  // an unreachable setpoint degrades to constant-voltage operation.
  auto volts_at = [this](double i) -> std::optional<double> {
    try {
      return terminal_voltage(i);
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  auto outside = [this, sign](const std::optional<double>& v) {
    return !v || (sign > 0 ? *v < p_.v_min : *v > p_.v_max);
  };
  if (outside(volts_at(0.0))) {
    ok = false;  // already beyond the limit at rest; nothing deliverable
    return 0.0;
  }
  if (outside(volts_at(hi))) {
    double lo_v = 0.0, hi_v = hi;
    for (int it = 0; it < 80; ++it) {
      double mid = 0.5 * (lo_v + hi_v);
      if (outside(volts_at(mid)))
        hi_v = mid;
      else
        lo_v = mid;
    }
    hi = lo_v;
    p_hi = power_at(hi);
    if (!p_hi) {
      ok = false;
      return 0.0;
    }
  }

  if (sign * *p_hi < sign * target_w) {
    ok = false;
    return hi;
  }

  double lo = 0.0;
  for (int it = 0; it < 80; ++it) {
    double mid = 0.5 * (lo + hi);
    std::optional<double> pm = power_at(mid);
    if (!pm || sign * *pm > sign * target_w)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

void SpmCell::advance(double i_app, double dt) {
  if (dt <= 0.0) return;
  double flux_n = molar_flux(i_app, p_, Electrode::Negative);
  double flux_p = molar_flux(i_app, p_, Electrode::Positive);
  int m = std::max(1, static_cast<int>(std::ceil(dt / dt_sub_)));
  double h = dt / m;
  for (int k = 0; k < m; ++k) step_fluxes(flux_n, flux_p, h);
}

void SpmCell::step_fluxes(double flux_n, double flux_p, double dt) {
  diffusion_step(c_n_, grid_n_, p_.neg.diffusivity_m2_s, flux_n, dt);
  diffusion_step(c_p_, grid_p_, p_.pos.diffusivity_m2_s, flux_p, dt);
}

uint8_t SpmCell::violation_flags(double i_app) const {
  uint8_t flags = 0;
  if (std::abs(i_app) > p_.i_max_a * (1.0 + 1e-9)) flags |= kViolationCurrent;
  for (Electrode which : {Electrode::Negative, Electrode::Positive}) {
    const ElectrodeParams& e = p_.electrode(which);
    double c = c_surf(which, i_app);
    // Surface concentration outside the electrode's acceptable band.
    if (c < e.c_min - 1e-9 || c > e.c_max + 1e-9) flags |= kViolationStoich;
  }
  try {
    double v = terminal_voltage(i_app);
    if (v < p_.v_min - 1e-9 || v > p_.v_max + 1e-9) flags |= kViolationVoltage;
  } catch (const Error&) {
    flags |= kViolationStoich;
  }
  return flags;
}

SimTrace simulate(SpmCell& cell, const std::vector<ProtocolSegment>& protocol,
                  double record_dt) {
  SimTrace trace;
  double t = 0.0;

  TracePoint first;
  first.soc = cell.soc();
  first.v_v = cell.open_circuit_voltage();
  first.c_surf_n = cell.c_surf(Electrode::Negative, 0.0);
  first.c_surf_p = cell.c_surf(Electrode::Positive, 0.0);
  first.flags = cell.violation_flags(0.0);
  trace.points.push_back(first);

  for (const auto& seg : protocol) {
    double remaining = seg.duration_s;
    while (remaining > 1e-12) {
      double h = std::min(record_dt, remaining);
      remaining -= h;
      double i = seg.value;
      uint8_t flags = 0;
      if (seg.kind == ProtocolSegment::Kind::Power) {
        bool ok = true;
        i = cell.current_for_power(seg.value, ok);
        if (!ok) flags |= kViolationPowerUnreachable;
      }
      cell.advance(i, h);
      t += h;

      TracePoint pt;
      pt.t_s = t;
      pt.dt_s = h;
      pt.i_a = i;
      pt.soc = cell.soc();
      pt.c_surf_n = cell.c_surf(Electrode::Negative, i);
      pt.c_surf_p = cell.c_surf(Electrode::Positive, i);
      try {
        pt.v_v = cell.terminal_voltage(i);
        pt.p_w = cell.params().n_cells * i * pt.v_v;
      } catch (const Error&) {
        pt.v_v = std::numeric_limits<double>::quiet_NaN();
        pt.p_w = std::numeric_limits<double>::quiet_NaN();
      }
      pt.flags = flags | cell.violation_flags(i);
      trace.points.push_back(pt);
    }
  }
  return trace;
}

void write_trace_csv(const SimTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write trace file " + path);
  out << "t_s,i_A,v_V,p_W,soc,c_surf_n,c_surf_p,violation_flags\n";
  out.precision(10);
  for (const auto& pt : trace.points) {
    out << pt.t_s << ',' << pt.i_a << ',' << pt.v_v << ',' << pt.p_w << ',' << pt.soc
        << ',' << pt.c_surf_n << ',' << pt.c_surf_p << ',' << violation_names(pt.flags)
        << '\n';
  }
}

}  // namespace ess
