#include "libess/milp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

#include "libess/solver.hpp"
#include "libess/spm.hpp"

namespace ess {

int MilpModel::add_var(const std::string& vname, double lb, double ub, double obj,
                       VarKind kind) {
  Variable v;
  v.name = vname;
  v.kind = kind;
  v.lb = lb;
  v.ub = ub;
  v.obj = obj;
  int idx = static_cast<int>(vars.size());
  vars.push_back(std::move(v));
  if (!var_lookup_.emplace(vname, idx).second)
    throw config_error("duplicate variable name " + vname);
  return idx;
}

int MilpModel::add_binary(const std::string& vname, double obj) {
  return add_var(vname, 0.0, 1.0, obj, VarKind::Binary);
}

void MilpModel::add_row(const std::string& rname, RowSense sense, double rhs,
                        std::vector<std::pair<int, double>> terms) {
  Row r;
  r.name = rname;
  r.sense = sense;
  r.rhs = rhs;
  r.terms = std::move(terms);
  rows.push_back(std::move(r));
}

int MilpModel::var_index(const std::string& vname) const {
  auto it = var_lookup_.find(vname);
  return it == var_lookup_.end() ? -1 : it->second;
}

ModelStats MilpModel::stats() const {
  ModelStats s;
  s.rows = static_cast<int>(rows.size());
  for (const auto& v : vars)
    (v.kind == VarKind::Binary ? s.binary : s.continuous) += 1;
  return s;
}

double MilpModel::objective_value(const std::vector<double>& x) const {
  double obj = 0.0;
  for (size_t i = 0; i < vars.size(); ++i) obj += vars[i].obj * x[i];
  return obj;
}

double MilpModel::row_activity(const Row& r, const std::vector<double>& x) const {
  double a = 0.0;
  for (const auto& [idx, coef] : r.terms) a += coef * x[idx];
  return a;
}

double MilpModel::max_violation(const std::vector<double>& x) const {
  double worst = 0.0;
  for (const auto& r : rows) {
    double a = row_activity(r, x);
    double v = 0.0;
    switch (r.sense) {
      case RowSense::LE: v = a - r.rhs; break;
      case RowSense::GE: v = r.rhs - a; break;
      case RowSense::EQ: v = std::abs(a - r.rhs); break;
    }
    worst = std::max(worst, v);
  }
  for (size_t i = 0; i < vars.size(); ++i) {
    worst = std::max(worst, vars[i].lb - x[i]);
    worst = std::max(worst, x[i] - vars[i].ub);
    if (vars[i].kind == VarKind::Binary)
      worst = std::max(worst, std::abs(x[i] - std::round(x[i])));
  }
  return worst;
}

void MilpModel::validate() const {
  for (const auto& v : vars) {
    if (v.name.empty() || v.name.size() > 8)
      throw config_error("variable name not exportable: '" + v.name + "'");
    if (!std::isfinite(v.lb) || !std::isfinite(v.ub) || v.lb > v.ub)
      throw config_error("variable " + v.name + ": bad bounds");
    if (!std::isfinite(v.obj))
      throw config_error("variable " + v.name + ": bad objective coefficient");
  }
  std::unordered_map<std::string, int> row_names;
  for (const auto& r : rows) {
    if (r.name.empty() || r.name.size() > 8)
      throw config_error("row name not exportable: '" + r.name + "'");
    if (!row_names.emplace(r.name, 1).second)
      throw config_error("duplicate row name " + r.name);
    if (!std::isfinite(r.rhs)) throw config_error("row " + r.name + ": bad rhs");
    for (const auto& [idx, coef] : r.terms) {
      if (idx < 0 || idx >= static_cast<int>(vars.size()))
        throw config_error("row " + r.name + ": bad variable index");
      if (!std::isfinite(coef))
        throw config_error("row " + r.name + ": bad coefficient");
    }
  }
}

namespace {

std::string tag(const char* prefix, int idx) {
  return std::string(prefix) + "." + std::to_string(idx);
}

std::string seg_tag(const char* prefix, int seg, int idx) {
  return std::string(prefix) + static_cast<char>('a' + seg) + "." + std::to_string(idx);
}

void check_common(const CellParams& p, const std::vector<double>& prices,
                  const ArbitrageConfig& cfg) {
  if (prices.empty()) throw config_error("price series is empty");
  for (double v : prices)
    if (!std::isfinite(v)) throw config_error("price series has a non-finite entry");
  if (cfg.subintervals < 1) throw config_error("subintervals must be at least 1");
  if (static_cast<long>(prices.size()) * cfg.subintervals > 1000)
    throw config_error("horizon too long: at most 1000 subintervals supported");
  if (!(cfg.soe0_frac >= p.soc_floor && cfg.soe0_frac <= 1.0))
    throw config_error("initial state of charge must lie in [soc_floor, 1]");
}

double degradation_rate(const CellParams& p) {
  // $ per MWh discharged: amortizes the install cost over the cycle life.
  return p.econ.capital_cost_per_mwh / p.econ.cycle_life;
}

// Incremental (delta) formulation of f = pwl(x): consecutive fill variables,
// one binary between segments forcing fill order.  Returns the delta and
// binary variable indices; the caller ties x and f to the deltas.
struct PwlVars {
  std::vector<int> delta;
  std::vector<int> z;
};

PwlVars add_pwl_deltas(MilpModel& m, const PiecewiseLinearFn& pwl, const char* dprefix,
                       const char* zprefix, const char* fill_lo, const char* fill_hi,
                       int s) {
  PwlVars out;
  size_t k = pwl.segments();
  for (size_t i = 0; i < k; ++i) {
    double width = pwl.x[i + 1] - pwl.x[i];
    out.delta.push_back(m.add_var(seg_tag(dprefix, i, s), 0.0, width, 0.0));
  }
  for (size_t i = 0; i + 1 < k; ++i)
    out.z.push_back(m.add_binary(seg_tag(zprefix, i, s)));
  for (size_t i = 0; i + 1 < k; ++i) {
    double w_i = pwl.x[i + 1] - pwl.x[i];
    double w_n = pwl.x[i + 2] - pwl.x[i + 1];
    // delta_i >= width_i * z_i  (segment i full before i+1 opens)
    m.add_row(seg_tag(fill_lo, i, s), RowSense::GE, 0.0,
              {{out.delta[i], 1.0}, {out.z[i], -w_i}});
    // delta_{i+1} <= width_{i+1} * z_i
    m.add_row(seg_tag(fill_hi, i, s), RowSense::LE, 0.0,
              {{out.delta[i + 1], 1.0}, {out.z[i], -w_n}});
  }
  return out;
}

}  // namespace

MilpModel build_power_energy(const CellParams& p, const std::vector<double>& prices,
                             const ArbitrageConfig& cfg) {
  check_common(p, prices, cfg);
  if (!(cfg.eta_roundtrip > 0.0 && cfg.eta_roundtrip <= 1.0))
    throw config_error("round-trip efficiency must lie in (0, 1]");

  const int hours = static_cast<int>(prices.size());
  const int M = cfg.subintervals;
  const int S = hours * M;
  const double tau_h = 1.0 / M;
  const double q = p.q_max_mwh;
  const double floor_mwh = p.soc_floor * q;
  const double soe0 = cfg.soe0_frac * q;
  const double p_ch = p.p_max_charge_mw;
  const double p_dis = p.p_max_discharge_mw;
  const double deg = degradation_rate(p);

  MilpModel m;
  m.name = "ARBPE";
  m.maximize = true;

  std::vector<int> ch(S), dis(S), soe(S + 1), u(hours), e(hours), cd(hours);
  for (int s = 0; s < S; ++s) {
    ch[s] = m.add_var(tag("CH", s), 0.0, p_ch, 0.0);
    dis[s] = m.add_var(tag("DI", s), 0.0, p_dis, 0.0);
  }
  soe[0] = m.add_var(tag("SO", 0), soe0, soe0, 0.0);
  for (int s = 1; s <= S; ++s) soe[s] = m.add_var(tag("SO", s), floor_mwh, q, 0.0);
  for (int t = 0; t < hours; ++t) {
    u[t] = m.add_binary(tag("U", t));
    e[t] = m.add_var(tag("E", t), -p_ch, p_dis, prices[t]);
    cd[t] = m.add_var(tag("CD", t), 0.0, deg * p_dis, -1.0);
  }

  for (int t = 0; t < hours; ++t) {
    // Hourly settled energy.
    std::vector<std::pair<int, double>> terms{{e[t], 1.0}};
    for (int r = 0; r < M; ++r) {
      terms.push_back({dis[t * M + r], -tau_h});
      terms.push_back({ch[t * M + r], tau_h});
    }
    m.add_row(tag("rE", t), RowSense::EQ, 0.0, std::move(terms));

    // Degradation charged on discharged energy only.
    std::vector<std::pair<int, double>> dterms{{cd[t], 1.0}};
    for (int r = 0; r < M; ++r) dterms.push_back({dis[t * M + r], -deg * tau_h});
    m.add_row(tag("rG", t), RowSense::EQ, 0.0, std::move(dterms));
  }

  for (int s = 0; s < S; ++s) {
    int t = s / M;
    // State of energy recursion, efficiency losses booked on charge.
    m.add_row(tag("rS", s + 1), RowSense::EQ, 0.0,
              {{soe[s + 1], 1.0},
               {soe[s], -1.0},
               {ch[s], -cfg.eta_roundtrip * tau_h},
               {dis[s], tau_h}});
    // One binary per hour: u=1 lets the pack charge, u=0 lets it discharge.
    m.add_row(tag("rC", s), RowSense::LE, 0.0, {{ch[s], 1.0}, {u[t], -p_ch}});
    m.add_row(tag("rD", s), RowSense::LE, p_dis, {{dis[s], 1.0}, {u[t], p_dis}});
  }

  m.groups["ch"] = ch;
  m.groups["dis"] = dis;
  m.groups["soe"] = soe;
  m.groups["u"] = u;
  m.groups["energy"] = e;
  m.groups["deg"] = cd;
  m.info["hours"] = hours;
  m.info["subintervals"] = M;
  m.info["q_max_mwh"] = q;
  m.info["eta"] = cfg.eta_roundtrip;
  m.info["uniform_hourly"] = 1;
  m.validate();
  return m;
}

// Everything the physics-based builder and its warm-start heuristic share:
// reduced-model couplings in stoichiometry units, the linearization tables,
// and the derived boxes.
struct PhysCoefs {
  Linearization lin;
  PiecewiseLinearFn sq;
  int hours = 0, M = 0, S = 0;
  double tau_h = 0, p_ch = 0, p_dis = 0, i_max = 0, deg = 0, mw_per_cell_w = 0;
  double a_n = 0, a_p = 0, b_n = 0, b_p = 0, h_n = 0, h_p = 0;
  double x0_n = 0, x0_p = 0;
  double y_lo = 0, y_hi = 0, sq_min = 0, sq_max = 0, sq_err = 0;
  double ocpn_min = 0, ocpn_max = 0, ocpp_min = 0, ocpp_max = 0;
  double w_cell = 0, band = 0, vt_lo = 0, vt_hi = 0;
};

PhysCoefs phys_coefs(const CellParams& p, const std::vector<double>& prices,
                     const ArbitrageConfig& cfg) {
  check_common(p, prices, cfg);
  if (cfg.ocp_segments < 1 || cfg.square_segments < 1)
    throw config_error("piecewise-linear segment counts must be at least 1");
  if (cfg.ocp_segments > 26 || cfg.square_segments > 26)
    throw config_error("piecewise-linear segment counts above 26 are not supported");
  if (!(cfg.power_band_frac > 0.0))
    throw config_error("power band fraction must be positive");

  PhysCoefs c;
  c.hours = static_cast<int>(prices.size());
  c.M = cfg.subintervals;
  c.S = c.hours * c.M;
  c.tau_h = 1.0 / c.M;
  const double tau_s = 3600.0 / c.M;
  c.p_ch = p.p_max_charge_mw;
  c.p_dis = p.p_max_discharge_mw;
  c.i_max = p.i_max_a;
  c.deg = degradation_rate(p);
  c.mw_per_cell_w = p.n_cells / 1e6;  // pack MW per cell W

  c.lin = build_linearization(p, cfg.ocp_segments);

  // Stoichiometry-scaled couplings.  Per subinterval the average
  // stoichiometry drops by j = a*i; the quasi-steady surface offset is b*j;
  // the linear overpotential is h*j.  All three come from the reduced model
  // with the molar flux rescaled to stoichiometry units.
  auto stoich_per_amp = [&p, tau_s](const ElectrodeParams& e) {
    return tau_s / (e.volume_m3 * e.active_frac * p.faraday * e.c_max);
  };
  auto surf_coef = [tau_s](const ElectrodeParams& e) {
    return e.radius_m * e.radius_m / (15.0 * e.diffusivity_m2_s * tau_s);
  };
  auto eta_coef = [&p, tau_s](const ElectrodeParams& e) {
    return linear_eta_coef(e, p) * e.radius_m * e.c_max / (3.0 * tau_s);
  };
  c.a_n = stoich_per_amp(p.neg);
  c.a_p = stoich_per_amp(p.pos);
  c.b_n = surf_coef(p.neg);
  c.b_p = surf_coef(p.pos);
  c.h_n = eta_coef(p.neg);
  c.h_p = eta_coef(p.pos);

  c.x0_n = p.neg.stoich_empty + cfg.soe0_frac * (p.neg.stoich_full - p.neg.stoich_empty);
  c.x0_p = p.pos.stoich_empty + cfg.soe0_frac * (p.pos.stoich_full - p.pos.stoich_empty);
  if (c.x0_n < c.lin.x_lo_n - 1e-12 || c.x0_n > c.lin.x_hi_n + 1e-12)
    throw config_error("initial negative surface stoichiometry outside the window");
  if (c.x0_p < c.lin.x_lo_p - 1e-12 || c.x0_p > c.lin.x_hi_p + 1e-12)
    throw config_error("initial positive surface stoichiometry outside the window");

  c.y_lo = 0.5 * (p.v_min - c.i_max);
  c.y_hi = 0.5 * (p.v_max + c.i_max);
  c.sq = pwl_square(c.y_lo, c.y_hi, cfg.square_segments);
  c.sq_min = *std::min_element(c.sq.y.begin(), c.sq.y.end());
  c.sq_max = *std::max_element(c.sq.y.begin(), c.sq.y.end());
  double sq_seg = 0.0;  // widest chord of the square approximation
  for (std::size_t k = 1; k < c.sq.x.size(); ++k)
    sq_seg = std::max(sq_seg, c.sq.x[k] - c.sq.x[k - 1]);
  c.sq_err = 0.25 * sq_seg * sq_seg;
  c.ocpn_min = *std::min_element(c.lin.ocp_n.y.begin(), c.lin.ocp_n.y.end());
  c.ocpn_max = *std::max_element(c.lin.ocp_n.y.begin(), c.lin.ocp_n.y.end());
  c.ocpp_min = *std::min_element(c.lin.ocp_p.y.begin(), c.lin.ocp_p.y.end());
  c.ocpp_max = *std::max_element(c.lin.ocp_p.y.begin(), c.lin.ocp_p.y.end());

  c.w_cell = std::max(c.p_ch, c.p_dis) / c.mw_per_cell_w;  // per-cell W bound
  c.band = 0.5 * cfg.power_band_frac * std::max(c.p_ch, c.p_dis);

  // Voltage range the open-circuit tables and overpotential bounds actually
  // allow; tighter than the terminal limits and valid to impose on v.
  c.vt_lo = std::max(p.v_min, (c.ocpp_min - c.h_p * c.a_p * c.i_max) -
                                  (c.ocpn_max + c.h_n * c.a_n * c.i_max));
  c.vt_hi = std::min(p.v_max, (c.ocpp_max + c.h_p * c.a_p * c.i_max) -
                                  (c.ocpn_min - c.h_n * c.a_n * c.i_max));
  return c;
}

MilpModel build_physics(const CellParams& p, const std::vector<double>& prices,
                        const ArbitrageConfig& cfg) {
  const PhysCoefs pc = phys_coefs(p, prices, cfg);
  const Linearization& lin = pc.lin;
  const PiecewiseLinearFn& sq = pc.sq;
  const int hours = pc.hours, M = pc.M, S = pc.S;
  const double tau_h = pc.tau_h, p_ch = pc.p_ch, p_dis = pc.p_dis;
  const double i_max = pc.i_max, deg = pc.deg, mw_per_cell_w = pc.mw_per_cell_w;
  const double a_n = pc.a_n, a_p = pc.a_p, b_n = pc.b_n, b_p = pc.b_p;
  const double h_n = pc.h_n, h_p = pc.h_p, x0_n = pc.x0_n, x0_p = pc.x0_p;
  const double y_lo = pc.y_lo, y_hi = pc.y_hi;
  const double sq_min = pc.sq_min, sq_max = pc.sq_max, sq_err = pc.sq_err;
  const double ocpn_min = pc.ocpn_min, ocpn_max = pc.ocpn_max;
  const double ocpp_min = pc.ocpp_min, ocpp_max = pc.ocpp_max;
  const double w_cell = pc.w_cell, band = pc.band;
  const double vt_lo = pc.vt_lo, vt_hi = pc.vt_hi;

  MilpModel m;
  m.name = "ARBPHYS";
  m.maximize = true;

  std::vector<int> vi(S), vv(S), vw(S), vp(S);
  std::vector<int> jn(S), jp(S), an(S), ap(S), sn(S), sp(S);
  std::vector<int> hn(S), hp(S), fn(S), fp(S), gn(S), gp(S);
  std::vector<int> y1(S), y2(S), q1(S), q2(S);
  std::vector<int> ip(S), im(S), wp(S), wm(S);
  std::vector<int> u(hours), e(hours), cd(hours), pb(hours);

  for (int t = 0; t < hours; ++t) {
    u[t] = m.add_binary(tag("U", t));
    e[t] = m.add_var(tag("E", t), -p_ch, p_dis, prices[t]);
    cd[t] = m.add_var(tag("CD", t), 0.0, deg * std::max(p_ch, p_dis), -1.0);
    pb[t] = m.add_var(tag("PB", t), -p_ch, p_dis, 0.0);
  }

  for (int s = 0; s < S; ++s) {
    int t = s / M;
    vi[s] = m.add_var(tag("I", s), -i_max, i_max, 0.0);
    vv[s] = m.add_var(tag("V", s), vt_lo, vt_hi, 0.0);
    vw[s] = m.add_var(tag("W", s), -w_cell, w_cell, 0.0);
    vp[s] = m.add_var(tag("P", s), -p_ch, p_dis, 0.0);
    ip[s] = m.add_var(tag("IP", s), 0.0, i_max, 0.0);
    im[s] = m.add_var(tag("IM", s), 0.0, i_max, 0.0);
    wp[s] = m.add_var(tag("WP", s), 0.0, vt_hi * i_max, 0.0);
    wm[s] = m.add_var(tag("WM", s), 0.0, vt_hi * i_max, 0.0);
    jn[s] = m.add_var(tag("JN", s), -a_n * i_max, a_n * i_max, 0.0);
    jp[s] = m.add_var(tag("JP", s), -a_p * i_max, a_p * i_max, 0.0);
    an[s] = m.add_var(tag("AN", s), std::max(0.0, lin.x_lo_n - b_n * a_n * i_max),
                      std::min(1.0, lin.x_hi_n + b_n * a_n * i_max), 0.0);
    ap[s] = m.add_var(tag("AP", s), std::max(0.0, lin.x_lo_p - b_p * a_p * i_max),
                      std::min(1.0, lin.x_hi_p + b_p * a_p * i_max), 0.0);
    sn[s] = m.add_var(tag("SN", s), lin.x_lo_n, lin.x_hi_n, 0.0);
    sp[s] = m.add_var(tag("SP", s), lin.x_lo_p, lin.x_hi_p, 0.0);
    hn[s] = m.add_var(tag("HN", s), -h_n * a_n * i_max, h_n * a_n * i_max, 0.0);
    hp[s] = m.add_var(tag("HP", s), -h_p * a_p * i_max, h_p * a_p * i_max, 0.0);
    fn[s] = m.add_var(tag("FN", s), ocpn_min, ocpn_max, 0.0);
    fp[s] = m.add_var(tag("FP", s), ocpp_min, ocpp_max, 0.0);
    gn[s] = m.add_var(tag("GN", s), ocpn_min - h_n * a_n * i_max,
                      ocpn_max + h_n * a_n * i_max, 0.0);
    gp[s] = m.add_var(tag("GP", s), ocpp_min - h_p * a_p * i_max,
                      ocpp_max + h_p * a_p * i_max, 0.0);
    y1[s] = m.add_var(tag("Y1", s), y_lo, y_hi, 0.0);
    y2[s] = m.add_var(tag("Y2", s), y_lo, y_hi, 0.0);
    q1[s] = m.add_var(tag("Q1", s), sq_min, sq_max, 0.0);
    q2[s] = m.add_var(tag("Q2", s), sq_min, sq_max, 0.0);

    // Current to surface flux, in stoichiometry units per subinterval.
    m.add_row(tag("rJN", s), RowSense::EQ, 0.0, {{jn[s], 1.0}, {vi[s], -a_n}});
    m.add_row(tag("rJP", s), RowSense::EQ, 0.0, {{jp[s], 1.0}, {vi[s], a_p}});

    // Average stoichiometry recursion.
    if (s == 0) {
      m.add_row(tag("rAN", s), RowSense::EQ, x0_n, {{an[s], 1.0}, {jn[s], 1.0}});
      m.add_row(tag("rAP", s), RowSense::EQ, x0_p, {{ap[s], 1.0}, {jp[s], 1.0}});
    } else {
      m.add_row(tag("rAN", s), RowSense::EQ, 0.0,
                {{an[s], 1.0}, {an[s - 1], -1.0}, {jn[s], 1.0}});
      m.add_row(tag("rAP", s), RowSense::EQ, 0.0,
                {{ap[s], 1.0}, {ap[s - 1], -1.0}, {jp[s], 1.0}});
    }

    // Quasi-steady surface offset.
    m.add_row(tag("rSN", s), RowSense::EQ, 0.0,
              {{sn[s], 1.0}, {an[s], -1.0}, {jn[s], b_n}});
    m.add_row(tag("rSP", s), RowSense::EQ, 0.0,
              {{sp[s], 1.0}, {ap[s], -1.0}, {jp[s], b_p}});

    // Linear overpotential.
    m.add_row(tag("rHN", s), RowSense::EQ, 0.0, {{hn[s], 1.0}, {jn[s], -h_n}});
    m.add_row(tag("rHP", s), RowSense::EQ, 0.0, {{hp[s], 1.0}, {jp[s], -h_p}});

    // Open-circuit potential chords over the surface stoichiometry.
    PwlVars on = add_pwl_deltas(m, lin.ocp_n, "dN", "zN", "rfN", "rgN", s);
    {
      std::vector<std::pair<int, double>> xt{{sn[s], 1.0}};
      for (int kseg = 0; kseg < static_cast<int>(on.delta.size()); ++kseg)
        xt.push_back({on.delta[kseg], -1.0});
      m.add_row(tag("rON", s), RowSense::EQ, lin.ocp_n.x.front(), std::move(xt));
      std::vector<std::pair<int, double>> ft{{fn[s], 1.0}};
      for (int kseg = 0; kseg < static_cast<int>(on.delta.size()); ++kseg)
        ft.push_back({on.delta[kseg], -lin.ocp_n.slope(kseg)});
      m.add_row(tag("rFN", s), RowSense::EQ, lin.ocp_n.y.front(), std::move(ft));
    }
    PwlVars op = add_pwl_deltas(m, lin.ocp_p, "dP", "zP", "rfP", "rgP", s);
    {
      std::vector<std::pair<int, double>> xt{{sp[s], 1.0}};
      for (int kseg = 0; kseg < static_cast<int>(op.delta.size()); ++kseg)
        xt.push_back({op.delta[kseg], -1.0});
      m.add_row(tag("rOP", s), RowSense::EQ, lin.ocp_p.x.front(), std::move(xt));
      std::vector<std::pair<int, double>> ft{{fp[s], 1.0}};
      for (int kseg = 0; kseg < static_cast<int>(op.delta.size()); ++kseg)
        ft.push_back({op.delta[kseg], -lin.ocp_p.slope(kseg)});
      m.add_row(tag("rFP", s), RowSense::EQ, lin.ocp_p.y.front(), std::move(ft));
    }

    // Electrode potentials and terminal voltage.
    m.add_row(tag("rGN", s), RowSense::EQ, 0.0,
              {{gn[s], 1.0}, {hn[s], -1.0}, {fn[s], -1.0}});
    m.add_row(tag("rGP", s), RowSense::EQ, 0.0,
              {{gp[s], 1.0}, {hp[s], -1.0}, {fp[s], -1.0}});
    m.add_row(tag("rV", s), RowSense::EQ, 0.0,
              {{vv[s], 1.0}, {gp[s], -1.0}, {gn[s], 1.0}});

    // Rotated bilinear power: y1 = (v+i)/2, y2 = (v-i)/2.
    m.add_row(tag("rY1", s), RowSense::EQ, 0.0,
              {{y1[s], 2.0}, {vv[s], -1.0}, {vi[s], -1.0}});
    m.add_row(tag("rY2", s), RowSense::EQ, 0.0,
              {{y2[s], 2.0}, {vv[s], -1.0}, {vi[s], 1.0}});

    PwlVars sq1 = add_pwl_deltas(m, sq, "d1", "z1", "rf1", "rg1", s);
    {
      std::vector<std::pair<int, double>> xt{{y1[s], 1.0}};
      for (int kseg = 0; kseg < static_cast<int>(sq1.delta.size()); ++kseg)
        xt.push_back({sq1.delta[kseg], -1.0});
      m.add_row(tag("rX1", s), RowSense::EQ, sq.x.front(), std::move(xt));
      std::vector<std::pair<int, double>> ft{{q1[s], 1.0}};
      for (int kseg = 0; kseg < static_cast<int>(sq1.delta.size()); ++kseg)
        ft.push_back({sq1.delta[kseg], -sq.slope(kseg)});
      m.add_row(tag("rQ1", s), RowSense::EQ, sq.y.front(), std::move(ft));
    }
    PwlVars sq2 = add_pwl_deltas(m, sq, "d2", "z2", "rf2", "rg2", s);
    {
      std::vector<std::pair<int, double>> xt{{y2[s], 1.0}};
      for (int kseg = 0; kseg < static_cast<int>(sq2.delta.size()); ++kseg)
        xt.push_back({sq2.delta[kseg], -1.0});
      m.add_row(tag("rX2", s), RowSense::EQ, sq.x.front(), std::move(xt));
      std::vector<std::pair<int, double>> ft{{q2[s], 1.0}};
      for (int kseg = 0; kseg < static_cast<int>(sq2.delta.size()); ++kseg)
        ft.push_back({sq2.delta[kseg], -sq.slope(kseg)});
      m.add_row(tag("rQ2", s), RowSense::EQ, sq.y.front(), std::move(ft));
    }

    // Cell power and pack power.
    m.add_row(tag("rW", s), RowSense::EQ, 0.0,
              {{vw[s], 1.0}, {q1[s], -1.0}, {q2[s], 1.0}});
    m.add_row(tag("rP", s), RowSense::EQ, 0.0, {{vp[s], 1.0}, {vw[s], -mw_per_cell_w}});

    // Envelope cuts tying w to v*i.  Without them the relaxation can fill the
    // square chords out of order and sell power no current supports.  The
    // current is split by sign against the hourly mode binary and each
    // one-signed product gets its convex envelope, which is exact at zero and
    // at full current.  The w link is slack by the worst chord overestimate
    // so no point the binaries admit is cut off.
    {
      m.add_row(tag("rIS", s), RowSense::EQ, 0.0,
                {{vi[s], 1.0}, {ip[s], -1.0}, {im[s], 1.0}});
      m.add_row(tag("rIP", s), RowSense::LE, i_max, {{ip[s], 1.0}, {u[t], i_max}});
      m.add_row(tag("rIM", s), RowSense::LE, 0.0, {{im[s], 1.0}, {u[t], -i_max}});
      m.add_row(tag("rWPA", s), RowSense::GE, 0.0, {{wp[s], 1.0}, {ip[s], -vt_lo}});
      m.add_row(tag("rWPB", s), RowSense::GE, -vt_hi * i_max,
                {{wp[s], 1.0}, {ip[s], -vt_hi}, {vv[s], -i_max}});
      m.add_row(tag("rWPC", s), RowSense::LE, 0.0, {{wp[s], 1.0}, {ip[s], -vt_hi}});
      m.add_row(tag("rWPD", s), RowSense::LE, -vt_lo * i_max,
                {{wp[s], 1.0}, {ip[s], -vt_lo}, {vv[s], -i_max}});
      m.add_row(tag("rWMA", s), RowSense::GE, 0.0, {{wm[s], 1.0}, {im[s], -vt_lo}});
      m.add_row(tag("rWMB", s), RowSense::GE, -vt_hi * i_max,
                {{wm[s], 1.0}, {im[s], -vt_hi}, {vv[s], -i_max}});
      m.add_row(tag("rWMC", s), RowSense::LE, 0.0, {{wm[s], 1.0}, {im[s], -vt_hi}});
      m.add_row(tag("rWMD", s), RowSense::LE, -vt_lo * i_max,
                {{wm[s], 1.0}, {im[s], -vt_lo}, {vv[s], -i_max}});
      m.add_row(tag("rWLA", s), RowSense::LE, sq_err,
                {{vw[s], 1.0}, {wp[s], -1.0}, {wm[s], 1.0}});
      m.add_row(tag("rWLB", s), RowSense::GE, -sq_err,
                {{vw[s], 1.0}, {wp[s], -1.0}, {wm[s], 1.0}});
    }

    // Near-constant power inside the hour.
    m.add_row(tag("rBU", s), RowSense::LE, band, {{vp[s], 1.0}, {pb[t], -1.0}});
    m.add_row(tag("rBL", s), RowSense::LE, band, {{pb[t], 1.0}, {vp[s], -1.0}});

    // Hourly charge/discharge exclusivity.
    m.add_row(tag("rXD", s), RowSense::LE, p_dis, {{vp[s], 1.0}, {u[t], p_dis}});
    m.add_row(tag("rXC", s), RowSense::LE, 0.0, {{vp[s], -1.0}, {u[t], -p_ch}});
  }

  for (int t = 0; t < hours; ++t) {
    std::vector<std::pair<int, double>> terms{{e[t], 1.0}};
    for (int r = 0; r < M; ++r) terms.push_back({vp[t * M + r], -tau_h});
    m.add_row(tag("rE", t), RowSense::EQ, 0.0, std::move(terms));

    // Degradation on discharged energy; the u term releases charge hours.
    double big = deg * p_dis;
    m.add_row(tag("rG", t), RowSense::GE, 0.0,
              {{cd[t], 1.0}, {e[t], -deg}, {u[t], big}});

    // Same charge levied on the split discharge work, which is immune to a
    // fractional mode binary eating the big-M release above.
    const double kappa = deg * mw_per_cell_w * tau_h;
    std::vector<std::pair<int, double>> gterms{{cd[t], 1.0}};
    for (int r = 0; r < M; ++r) gterms.push_back({wp[t * M + r], -kappa});
    m.add_row(tag("rG2", t), RowSense::GE, -kappa * M * sq_err, std::move(gterms));
  }

  // Free-energy bound on cumulative work.  Summing v*i over a prefix
  // telescopes through the chord potentials into a concave quadratic of the
  // closing average stoichiometries minus a quadratic ohmic-style loss in the
  // current, so tangents of the quadratic bound cumulative work from above
  // once the loss is replaced by a linear underestimate.  They stop the
  // relaxation from minting energy by cycling stock between a high claimed
  // discharge voltage and a low claimed charge voltage at no loss.  Only
  // stated for single-chord decreasing open circuit potentials, which covers
  // the reference chemistry.
  if (cfg.ocp_segments == 1 && lin.ocp_n.slope(0) < 0.0 && lin.ocp_p.slope(0) < 0.0) {
    const double cn1 = lin.ocp_n.slope(0);
    const double cp1 = lin.ocp_p.slope(0);
    const double cn0 = lin.ocp_n.y.front() - cn1 * lin.ocp_n.x.front();
    const double cp0 = lin.ocp_p.y.front() - cp1 * lin.ocp_p.x.front();
    const double dv0 = cp0 - cn0;
    const double c_loss = (h_p * a_p + h_n * a_n) - 0.5 * cp1 * a_p - 0.5 * cn1 * a_n;
    auto fval = [&](double av, double bv) {
      return dv0 * (x0_n - av) / a_n +
             (-cn1) / (2.0 * a_n) * (x0_n * x0_n - av * av) +
             cp1 / (2.0 * a_p) * (bv * bv - x0_p * x0_p);
    };
    auto fga = [&](double av) { return -dv0 / a_n + (cn1 / a_n) * av; };
    auto fgb = [&](double bv) { return (cp1 / a_p) * bv; };

    // Claimed squared current, kept honest from below by tangents of |i|^2
    // evaluated on the sign-split current so integral points pay their true
    // cycling loss inside the work budget.
    std::vector<int> kq(S);
    for (int s = 0; s < S; ++s) {
      kq[s] = m.add_var(tag("KQ", s), 0.0, i_max * i_max, 0.0);
      for (int j = 0; j < 4; ++j) {
        const double ibar = i_max * (j + 1) / 4.0;
        m.add_row(seg_tag("rK", j, s), RowSense::GE, -ibar * ibar,
                  {{kq[s], 1.0}, {ip[s], -2.0 * ibar}, {im[s], -2.0 * ibar}});
      }
    }

    std::vector<int> cw(hours), kc(hours), ki(hours);
    const double cw_big = S * w_cell;
    for (int t = 0; t < hours; ++t) {
      cw[t] = m.add_var(tag("CW", t), -cw_big, cw_big, 0.0);
      kc[t] = m.add_var(tag("KC", t), 0.0, S * i_max * i_max, 0.0);
      ki[t] = m.add_var(tag("KI", t), 0.0, S * i_max, 0.0);
      std::vector<std::pair<int, double>> terms{{cw[t], 1.0}};
      std::vector<std::pair<int, double>> kterms{{kc[t], 1.0}};
      std::vector<std::pair<int, double>> iterms{{ki[t], 1.0}};
      if (t > 0) {
        terms.push_back({cw[t - 1], -1.0});
        kterms.push_back({kc[t - 1], -1.0});
        iterms.push_back({ki[t - 1], -1.0});
      }
      for (int r = 0; r < M; ++r) {
        terms.push_back({vw[t * M + r], -1.0});
        kterms.push_back({kq[t * M + r], -1.0});
        iterms.push_back({ip[t * M + r], -1.0});
        iterms.push_back({im[t * M + r], -1.0});
      }
      m.add_row(tag("rCW", t), RowSense::EQ, 0.0, std::move(terms));
      m.add_row(tag("rKC", t), RowSense::EQ, 0.0, std::move(kterms));
      m.add_row(tag("rKI", t), RowSense::EQ, 0.0, std::move(iterms));
    }

    const double an_lo = std::max(0.0, lin.x_lo_n - b_n * a_n * i_max);
    const double an_hi = std::min(1.0, lin.x_hi_n + b_n * a_n * i_max);
    const int tangents = 9;
    for (int t = 0; t < hours; ++t) {
      const int se = (t + 1) * M - 1;
      const double slack = (t + 1) * M * sq_err;
      for (int j = 0; j < tangents; ++j) {
        double av = an_lo + (an_hi - an_lo) * j / (tangents - 1.0);
        double bv = x0_p + (a_p / a_n) * (x0_n - av);
        double rhs = fval(av, bv) - fga(av) * av - fgb(bv) * bv + slack;
        m.add_row(seg_tag("rT", j, t), RowSense::LE, rhs,
                  {{cw[t], 1.0},
                   {kc[t], c_loss},
                   {an[se], -fga(av)},
                   {ap[se], -fgb(bv)}});
      }
    }

    // Matching lower bound on the same prefix work, with the squared-current
    // loss bounded by its chord this time and the concave budget by its
    // secant.  It stops the relaxation from parking claimed work below the
    // physical floor while charging cheap, to resell inside the upper slack
    // at a better price later.
    {
      auto bline = [&](double av) { return x0_p + (a_p / a_n) * (x0_n - av); };
      const double q_lo = fval(an_lo, bline(an_lo));
      const double q_hi = fval(an_hi, bline(an_hi));
      const double g_sec = (q_hi - q_lo) / (an_hi - an_lo);
      for (int t = 0; t < hours; ++t) {
        const int se = (t + 1) * M - 1;
        const double slack = (t + 1) * M * sq_err;
        m.add_row(tag("rL", t), RowSense::GE, q_lo - g_sec * an_lo - slack,
                  {{cw[t], 1.0}, {ki[t], c_loss * i_max}, {an[se], -g_sec}});
      }
    }
  }

  m.groups["power"] = vp;
  m.groups["current"] = vi;
  m.groups["voltage"] = vv;
  m.groups["avg_n"] = an;
  m.groups["surf_n"] = sn;
  m.groups["u"] = u;
  m.groups["energy"] = e;
  m.groups["deg"] = cd;
  m.info["hours"] = hours;
  m.info["subintervals"] = M;
  m.info["q_max_mwh"] = p.q_max_mwh;
  m.info["stoich_empty_n"] = p.neg.stoich_empty;
  m.info["stoich_full_n"] = p.neg.stoich_full;
  m.validate();
  return m;
}

namespace {

// One subinterval of the chord physics at a given current.
struct ChordStep {
  double i = 0, v = 0, w = 0;
  double an = 0, ap = 0, sn = 0, sp = 0, fn = 0, fp = 0;
  double y1 = 0, y2 = 0, q1 = 0, q2 = 0;
  bool ok = false;
};

ChordStep chord_step(const PhysCoefs& pc, double an0, double ap0, double i) {
  ChordStep st;
  st.i = i;
  const double jn = pc.a_n * i, jp = -pc.a_p * i;
  st.an = an0 - jn;
  st.ap = ap0 - jp;
  st.sn = st.an - pc.b_n * jn;
  st.sp = st.ap - pc.b_p * jp;
  const Linearization& lin = pc.lin;
  const bool inside = st.sn >= lin.x_lo_n - 1e-12 && st.sn <= lin.x_hi_n + 1e-12 &&
                      st.sp >= lin.x_lo_p - 1e-12 && st.sp <= lin.x_hi_p + 1e-12;
  st.sn = std::clamp(st.sn, lin.x_lo_n, lin.x_hi_n);
  st.sp = std::clamp(st.sp, lin.x_lo_p, lin.x_hi_p);
  st.fn = lin.ocp_n.eval(st.sn);
  st.fp = lin.ocp_p.eval(st.sp);
  st.v = (st.fp + pc.h_p * jp) - (st.fn + pc.h_n * jn);
  st.y1 = 0.5 * (st.v + i);
  st.y2 = 0.5 * (st.v - i);
  st.q1 = pc.sq.eval(std::clamp(st.y1, pc.sq.lo(), pc.sq.hi()));
  st.q2 = pc.sq.eval(std::clamp(st.y2, pc.sq.lo(), pc.sq.hi()));
  st.w = st.q1 - st.q2;
  st.ok = inside && st.v >= pc.vt_lo - 1e-12 && st.v <= pc.vt_hi + 1e-12;
  return st;
}

// Current that hits a per-cell power target from a given state; w is strictly
// increasing in i, so bisection.  reached reports whether the target was
// attainable inside the current limits.
ChordStep chord_step_for_w(const PhysCoefs& pc, double an0, double ap0, double wt,
                           bool& reached) {
  ChordStep lo = chord_step(pc, an0, ap0, -pc.i_max);
  ChordStep hi = chord_step(pc, an0, ap0, pc.i_max);
  if (wt <= lo.w) {
    reached = wt >= lo.w - 1e-9;
    return lo;
  }
  if (wt >= hi.w) {
    reached = wt <= hi.w + 1e-9;
    return hi;
  }
  double a = -pc.i_max, b = pc.i_max;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (a + b);
    if (chord_step(pc, an0, ap0, mid).w < wt)
      a = mid;
    else
      b = mid;
  }
  ChordStep out = chord_step(pc, an0, ap0, 0.5 * (a + b));
  reached = std::abs(out.w - wt) <= 1e-7;
  return out;
}

// Holds a uniform power target for a whole hour.  Sustainable targets form
// an interval around zero (larger currents only push the state and voltage
// further toward their limits), so when the request is not sustainable the
// largest sustainable fraction is found by bisection.  Returns the achieved
// target, or NaN if even idling fails (which a reachable state never does).
double chord_hour(const PhysCoefs& pc, double an0, double ap0, double wt,
                  std::vector<ChordStep>* steps_out) {
  std::vector<ChordStep> local(pc.M);
  auto attempt = [&](double w) {
    double a = an0, b = ap0;
    for (int r = 0; r < pc.M; ++r) {
      bool reached = false;
      ChordStep st = chord_step_for_w(pc, a, b, w, reached);
      if (!st.ok || !reached) return false;
      local[r] = st;
      a = st.an;
      b = st.ap;
    }
    return true;
  };
  if (attempt(wt)) {
    if (steps_out) *steps_out = std::move(local);
    return wt;
  }
  if (!attempt(0.0)) return std::numeric_limits<double>::quiet_NaN();
  std::vector<ChordStep> best = local;
  double lo = 0.0, hi = wt;
  for (int it = 0; it < 40; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (attempt(mid)) {
      lo = mid;
      best.swap(local);
    } else {
      hi = mid;
    }
  }
  if (steps_out) *steps_out = std::move(best);
  return lo;
}

}  // namespace

WarmStart physics_warm_start(const CellParams& p, const std::vector<double>& prices,
                             const ArbitrageConfig& cfg) {
  const PhysCoefs pc = phys_coefs(p, prices, cfg);
  const int hours = pc.hours, M = pc.M;
  const double kappa = pc.deg * pc.mw_per_cell_w * pc.tau_h;

  // Hour profit for a uniform per-cell power target; degradation keeps the
  // larger of its two model definitions so the reported objective is exact.
  auto hour_profit = [&](double price, const std::vector<ChordStep>& steps) {
    double sw = 0, swp = 0;
    for (const ChordStep& st : steps) {
      sw += st.w;
      swp += st.v * std::max(st.i, 0.0);
    }
    const double e_t = pc.tau_h * pc.mw_per_cell_w * sw;
    const double cd = std::max({0.0, pc.deg * e_t, kappa * swp - kappa * M * pc.sq_err});
    return price * e_t - cd;
  };

  // Dynamic program over hour boundaries on an average-stoichiometry grid;
  // the positive electrode follows by conservation.
  const double gl = pc.lin.x_lo_n, gh = pc.lin.x_hi_n;
  const int GN = 121, LV = 81;
  auto an_of = [&](int g) { return gl + (gh - gl) * g / (GN - 1.0); };
  auto ap_of = [&](double a) { return pc.x0_p + (pc.a_p / pc.a_n) * (pc.x0_n - a); };
  auto snap = [&](double a) {
    int g = static_cast<int>(std::lround((a - gl) / (gh - gl) * (GN - 1)));
    return std::clamp(g, 0, GN - 1);
  };
  const double w_dis_cap = pc.p_dis / pc.mw_per_cell_w;
  const double w_ch_cap = pc.p_ch / pc.mw_per_cell_w;
  auto level_w = [&](int k) {
    double wt = -w_ch_cap + (w_dis_cap + w_ch_cap) * k / (LV - 1.0);
    return std::abs(wt) < (w_dis_cap + w_ch_cap) / (2.0 * (LV - 1)) ? 0.0 : wt;
  };

  std::vector<std::vector<double>> val(hours + 1, std::vector<double>(GN, -1e300));
  std::vector<std::vector<int>> prev(hours + 1, std::vector<int>(GN, -1));
  std::vector<std::vector<double>> act(hours + 1, std::vector<double>(GN, 0.0));

  // Scans levels outward from idle; once a level comes back clamped to the
  // sustainable boundary every farther level would repeat it, so stop.
  auto expand = [&](int t, double base, int g_from, double a0, double b0) {
    auto try_level = [&](double req) {
      std::vector<ChordStep> steps;
      const double wt = chord_hour(pc, a0, b0, req, &steps);
      if (!std::isfinite(wt)) return true;
      const double value = base + hour_profit(prices[t], steps);
      const int g = snap(steps.back().an);
      if (value > val[t + 1][g]) {
        val[t + 1][g] = value;
        prev[t + 1][g] = g_from;
        act[t + 1][g] = wt;
      }
      return std::abs(wt - req) > 1e-9;
    };
    const int k0 = (LV - 1) / 2;
    for (int k = k0; k < LV; ++k)
      if (try_level(level_w(k))) break;
    for (int k = k0 - 1; k >= 0; --k)
      if (try_level(level_w(k))) break;
  };

  expand(0, 0.0, -1, pc.x0_n, pc.x0_p);
  for (int t = 1; t < hours; ++t)
    for (int g = 0; g < GN; ++g)
      if (val[t][g] > -1e299) expand(t, val[t][g], g, an_of(g), ap_of(an_of(g)));

  int g_best = 0;
  for (int g = 1; g < GN; ++g)
    if (val[hours][g] > val[hours][g_best]) g_best = g;
  std::vector<double> targets(hours, 0.0);
  for (int t = hours, g = g_best; t >= 1; --t) {
    targets[t - 1] = act[t][g];
    g = prev[t][g];
  }
  if (std::getenv("ESS_WS_DEBUG")) {
    std::fprintf(stderr, "dp value %.4f at g=%d an=%.4f\n", val[hours][g_best], g_best,
                 an_of(g_best));
    for (int t = 0; t < hours; ++t) std::fprintf(stderr, "plan t=%d wt=%.3f\n", t, targets[t]);
  }

  // Exact replay from the true initial state, then assign every variable.
  WarmStart out;
  const bool cuts = cfg.ocp_segments == 1 && pc.lin.ocp_n.slope(0) < 0.0 &&
                    pc.lin.ocp_p.slope(0) < 0.0;
  double a0 = pc.x0_n, b0 = pc.x0_p, cw = 0.0, kcum = 0.0, kicum = 0.0;
  auto& mv = out.values;
  auto fill_deltas = [&](const PiecewiseLinearFn& f, double xq, const char* dpre,
                         const char* zpre, int s) {
    double rem = xq - f.x.front();
    const size_t K = f.segments();
    for (size_t k = 0; k < K; ++k) {
      const double width = f.x[k + 1] - f.x[k];
      const double d = std::clamp(rem, 0.0, width);
      mv[seg_tag(dpre, static_cast<int>(k), s)] = d;
      rem -= d;
      if (k + 1 < K) mv[seg_tag(zpre, static_cast<int>(k), s)] = d >= width - 1e-11 ? 1.0 : 0.0;
    }
  };

  for (int t = 0; t < hours; ++t) {
    std::vector<ChordStep> steps;
    const double wt = chord_hour(pc, a0, b0, targets[t], &steps);
    if (!std::isfinite(wt)) throw solve_error("warm start replay failed to hold idle");
    double sp_sum = 0, sw = 0, swp = 0;
    for (int r = 0; r < M; ++r) {
      const ChordStep& st = steps[r];
      const int s = t * M + r;
      const double jn = pc.a_n * st.i, jp = -pc.a_p * st.i;
      mv[tag("I", s)] = st.i;
      mv[tag("V", s)] = st.v;
      mv[tag("W", s)] = st.w;
      mv[tag("P", s)] = pc.mw_per_cell_w * st.w;
      mv[tag("JN", s)] = jn;
      mv[tag("JP", s)] = jp;
      mv[tag("AN", s)] = st.an;
      mv[tag("AP", s)] = st.ap;
      mv[tag("SN", s)] = st.sn;
      mv[tag("SP", s)] = st.sp;
      mv[tag("HN", s)] = pc.h_n * jn;
      mv[tag("HP", s)] = pc.h_p * jp;
      mv[tag("FN", s)] = st.fn;
      mv[tag("FP", s)] = st.fp;
      mv[tag("GN", s)] = st.fn + pc.h_n * jn;
      mv[tag("GP", s)] = st.fp + pc.h_p * jp;
      mv[tag("Y1", s)] = st.y1;
      mv[tag("Y2", s)] = st.y2;
      mv[tag("Q1", s)] = st.q1;
      mv[tag("Q2", s)] = st.q2;
      const double ipv = std::max(st.i, 0.0), imv = std::max(-st.i, 0.0);
      mv[tag("IP", s)] = ipv;
      mv[tag("IM", s)] = imv;
      mv[tag("WP", s)] = st.v * ipv;
      mv[tag("WM", s)] = st.v * imv;
      fill_deltas(pc.lin.ocp_n, st.sn, "dN", "zN", s);
      fill_deltas(pc.lin.ocp_p, st.sp, "dP", "zP", s);
      fill_deltas(pc.sq, st.y1, "d1", "z1", s);
      fill_deltas(pc.sq, st.y2, "d2", "z2", s);
      if (cuts) {
        double kqv = 0.0;
        for (int j = 0; j < 4; ++j) {
          const double ibar = pc.i_max * (j + 1) / 4.0;
          kqv = std::max(kqv, 2.0 * ibar * std::abs(st.i) - ibar * ibar);
        }
        mv[tag("KQ", s)] = kqv;
        kcum += kqv;
        kicum += ipv + imv;
      }
      sp_sum += pc.mw_per_cell_w * st.w;
      sw += st.w;
      swp += st.v * ipv;
      cw += st.w;
    }
    const double e_t = pc.tau_h * sp_sum;
    mv[tag("U", t)] = wt < 0.0 ? 1.0 : 0.0;
    mv[tag("E", t)] = e_t;
    mv[tag("PB", t)] = sp_sum / M;
    mv[tag("CD", t)] = std::max({0.0, pc.deg * e_t, kappa * swp - kappa * M * pc.sq_err});
    if (cuts) {
      mv[tag("CW", t)] = cw;
      mv[tag("KC", t)] = kcum;
      mv[tag("KI", t)] = kicum;
    }
    out.objective += prices[t] * e_t - mv[tag("CD", t)];
    a0 = steps.back().an;
    b0 = steps.back().ap;
  }
  return out;
}

Schedule extract_schedule(const MilpModel& model, const SolveResult& result) {
  Schedule out;
  out.hours = static_cast<int>(model.info.at("hours"));
  out.subintervals = static_cast<int>(model.info.at("subintervals"));
  out.tau_h = 1.0 / out.subintervals;
  out.objective = result.objective;
  out.solve_seconds = result.seconds;
  out.solver = result.solver;
  out.status = status_name(result.status);
  out.var_values = result.values;

  const int S = out.hours * out.subintervals;
  const auto& x = result.values;
  auto group = [&model](const char* g) -> const std::vector<int>* {
    auto it = model.groups.find(g);
    return it == model.groups.end() ? nullptr : &it->second;
  };

  out.charge_mw.resize(S, 0.0);
  out.discharge_mw.resize(S, 0.0);
  out.power_mw.resize(S, 0.0);
  if (const auto* chg = group("ch")) {
    const auto* dis = group("dis");
    for (int s = 0; s < S; ++s) {
      out.charge_mw[s] = x[(*chg)[s]];
      out.discharge_mw[s] = x[(*dis)[s]];
      out.power_mw[s] = out.discharge_mw[s] - out.charge_mw[s];
    }
  } else if (const auto* pw = group("power")) {
    for (int s = 0; s < S; ++s) {
      out.power_mw[s] = x[(*pw)[s]];
      out.discharge_mw[s] = std::max(0.0, out.power_mw[s]);
      out.charge_mw[s] = std::max(0.0, -out.power_mw[s]);
    }
  }

  // The state-of-energy recursion makes the split of an hour's energy across
  // its subintervals degenerate, so the solver lands on an arbitrary vertex.
  // Spread each hour's charge and discharge evenly instead: same energy, same
  // hour-end states, and the schedule no longer depends on the backend.
  if (model.info.count("uniform_hourly")) {
    for (int t = 0; t < out.hours; ++t) {
      double ch = 0, dis = 0;
      for (int m = 0; m < out.subintervals; ++m) {
        ch += out.charge_mw[t * out.subintervals + m];
        dis += out.discharge_mw[t * out.subintervals + m];
      }
      ch /= out.subintervals;
      dis /= out.subintervals;
      for (int m = 0; m < out.subintervals; ++m) {
        int s = t * out.subintervals + m;
        out.charge_mw[s] = ch;
        out.discharge_mw[s] = dis;
        out.power_mw[s] = dis - ch;
      }
    }
  }

  if (const auto* e = group("energy")) {
    for (int idx : *e) out.energy_mwh.push_back(x[idx]);
  }
  if (const auto* cd = group("deg")) {
    for (int idx : *cd) out.deg_cost.push_back(x[idx]);
  }

  if (const auto* soe = group("soe")) {
    // Sampled at hour ends; entry 0 of the group is the fixed initial state.
    for (int t = 1; t <= out.hours; ++t)
      out.soe_mwh.push_back(x[(*soe)[t * out.subintervals]]);
  } else if (const auto* avg = group("avg_n")) {
    double empty = model.info.at("stoich_empty_n");
    double full = model.info.at("stoich_full_n");
    double q = model.info.at("q_max_mwh");
    for (int t = 1; t <= out.hours; ++t) {
      double xa = x[(*avg)[t * out.subintervals - 1]];
      out.soe_mwh.push_back((xa - empty) / (full - empty) * q);
    }
  }
  return out;
}

}  // namespace ess
