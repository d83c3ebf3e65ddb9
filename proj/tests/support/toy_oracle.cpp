#include "support/toy_oracle.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace esstest {

double evaluate_profile(const ToySpec& spec, const std::vector<double>& power_mw) {
  const double kTol = 1e-9;
  double soe = spec.soe0_mwh;
  double profit = 0;
  for (size_t t = 0; t < power_mw.size(); ++t) {
    double p = power_mw[t];
    double dis = p > 0 ? p : 0;
    double ch = p < 0 ? -p : 0;
    soe += spec.eta * ch - dis;
    if (soe < spec.floor_mwh - kTol || soe > spec.q_mwh + kTol)
      return -std::numeric_limits<double>::infinity();
    profit += spec.prices[t] * (dis - ch) - spec.deg_per_mwh * dis;
  }
  return profit;
}

ToyResult brute_force_arbitrage(const ToySpec& spec) {
  const int T = static_cast<int>(spec.prices.size());
  if (T > 14) throw std::runtime_error("toy oracle: horizon too long for 3^T search");

  long total = 1;
  for (int t = 0; t < T; ++t) total *= 3;

  ToyResult best;
  best.objective = -std::numeric_limits<double>::infinity();
  std::vector<double> power(T, 0.0);
  for (long code = 0; code < total; ++code) {
    long c = code;
    for (int t = 0; t < T; ++t) {
      int digit = c % 3;
      c /= 3;
      power[t] = digit == 0 ? 0.0 : (digit == 1 ? spec.p_dis_mw : -spec.p_ch_mw);
    }
    double obj = evaluate_profile(spec, power);
    if (obj > best.objective) {
      best.objective = obj;
      best.power_mw = power;
      best.feasible = true;
    }
  }
  return best;
}

}  // namespace esstest
