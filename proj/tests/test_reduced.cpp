#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "libess/reduced.hpp"
#include "libess/spm.hpp"

#include "support/fixtures.hpp"

using namespace ess;

namespace {

// Terminal voltage from a reduced state, assembled the same way the full
// cell does it: OCP at the surface stoichiometry plus the Butler-Volmer
// overpotential of the applied flux.
double reduced_voltage(const ReducedState& s, double i_app, const CellParams& p) {
  double phi[2];
  for (Electrode which : {Electrode::Negative, Electrode::Positive}) {
    const ElectrodeParams& e = p.electrode(which);
    double j = molar_flux(i_app, p, which);
    double c_avg = which == Electrode::Negative ? s.c_avg_n : s.c_avg_p;
    double cs = reduced_surface(c_avg, j, e);
    double eta = bv_overpotential(j, cs, e, p);
    phi[which == Electrode::Negative ? 0 : 1] = eta + e.ocp.value(cs / e.c_max);
  }
  return phi[1] - phi[0];
}

}  // namespace

TEST_CASE("average update integrates the boundary flux exactly") {
  const CellParams& p = esstest::lgm50();
  double c0 = 20000.0, j = 3e-6, dt = 720.0;
  double c1 = reduced_step_average(c0, j, p.neg, dt);
  CHECK(c1 == doctest::Approx(c0 - 3.0 * j * dt / p.neg.radius_m).epsilon(1e-12));
  // zero flux is a fixed point
  CHECK(reduced_step_average(c0, 0.0, p.neg, dt) == c0);
}

TEST_CASE("surface offset follows the quasi-steady parabola") {
  const CellParams& p = esstest::lgm50();
  double j = 2e-6;
  double off = reduced_surface_offset(j, p.neg);
  CHECK(off == doctest::Approx(-j * p.neg.radius_m / (5.0 * p.neg.diffusivity_m2_s))
                   .epsilon(1e-12));
  // outward flux depresses the surface, inward flux piles it up
  CHECK(off < 0);
  CHECK(reduced_surface_offset(-j, p.neg) == doctest::Approx(-off));
  CHECK(reduced_surface(20000.0, j, p.neg) == doctest::Approx(20000.0 + off));
}

TEST_CASE("reduced_init matches the full cell at the same state of charge") {
  const CellParams& p = esstest::lgm50();
  for (double soc : {0.2, 0.5, 0.9}) {
    ReducedState s = reduced_init(p, soc);
    SpmCell cell(p);
    cell.reset_to_soc(soc);
    CHECK(s.c_avg_n == doctest::Approx(cell.c_avg(Electrode::Negative)).epsilon(1e-12));
    CHECK(s.c_avg_p == doctest::Approx(cell.c_avg(Electrode::Positive)).epsilon(1e-12));
  }
}

TEST_CASE("reduced_step moves both electrodes consistently with the current") {
  const CellParams& p = esstest::lgm50();
  ReducedState s = reduced_init(p, 0.8);
  ReducedState t = reduced_step(s, 2.0, p, 720.0);
  // discharge drains the negative electrode and fills the positive one
  CHECK(t.c_avg_n < s.c_avg_n);
  CHECK(t.c_avg_p > s.c_avg_p);
  double dn = -3.0 * molar_flux(2.0, p, Electrode::Negative) * 720.0 / p.neg.radius_m;
  CHECK(t.c_avg_n - s.c_avg_n == doctest::Approx(dn).epsilon(1e-12));
}

TEST_CASE("reduced model tracks the full cell on a 720 s grid within 2 percent") {
  const CellParams& p = esstest::lgm50();
  const double dt = 720.0;

  for (double i_app : {1.5, -1.5, 3.0}) {
    SpmCell cell(p);
    double soc0 = i_app > 0 ? 0.9 : 0.3;
    cell.reset_to_soc(soc0);
    ReducedState s = reduced_init(p, soc0);

    for (int step = 0; step < 4; ++step) {
      cell.advance(i_app, dt);
      s = reduced_step(s, i_app, p, dt);

      // averages agree to rounding: both integrate the same flux exactly
      CHECK(s.c_avg_n ==
            doctest::Approx(cell.c_avg(Electrode::Negative)).epsilon(1e-10));
      CHECK(s.c_avg_p ==
            doctest::Approx(cell.c_avg(Electrode::Positive)).epsilon(1e-10));

      // quasi-steady surface reconstruction against the resolved profile
      double cs_full = cell.c_surf(Electrode::Negative, i_app);
      double cs_red = reduced_surface(s.c_avg_n,
                                      molar_flux(i_app, p, Electrode::Negative),
                                      p.neg);
      CHECK(std::abs(cs_red - cs_full) / cs_full < 0.02);

      double v_full = cell.terminal_voltage(i_app);
      double v_red = reduced_voltage(s, i_app, p);
      CHECK(std::abs(v_red - v_full) / std::abs(v_full) < 0.02);
    }
  }
}

TEST_CASE("reduced surface lags the average less at lower current") {
  const CellParams& p = esstest::lgm50();
  double j_small = molar_flux(0.5, p, Electrode::Negative);
  double j_large = molar_flux(5.0, p, Electrode::Negative);
  CHECK(std::abs(reduced_surface_offset(j_small, p.neg)) <
        std::abs(reduced_surface_offset(j_large, p.neg)));
}
