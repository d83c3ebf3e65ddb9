#include "libess/pwl.hpp"

#include <algorithm>
#include <cmath>

#include "libess/errors.hpp"

namespace ess {

double PiecewiseLinearFn::eval(double xq) const {
  double span = x.back() - x.front();
  double tol = 1e-12 * std::max(1.0, std::abs(span));
  if (xq < x.front() - tol || xq > x.back() + tol)
    throw config_error("piecewise-linear evaluation outside [" + std::to_string(x.front()) +
                       ", " + std::to_string(x.back()) + "]: " + std::to_string(xq));
  if (xq <= x.front()) return y.front();
  if (xq >= x.back()) return y.back();
  auto it = std::upper_bound(x.begin(), x.end(), xq);
  size_t i = static_cast<size_t>(it - x.begin());
  if (xq == x[i - 1]) return y[i - 1];
  double w = (xq - x[i - 1]) / (x[i] - x[i - 1]);
  return y[i - 1] + w * (y[i] - y[i - 1]);
}

void PiecewiseLinearFn::validate() const {
  if (x.size() < 2 || x.size() != y.size())
    throw config_error("piecewise-linear function needs at least two breakpoints");
  for (size_t i = 1; i < x.size(); ++i)
    if (!(x[i] > x[i - 1]))
      throw config_error("piecewise-linear breakpoints must be strictly increasing");
}

PiecewiseLinearFn fit_pwl(const std::function<double(double)>& f, double lo, double hi,
                          int n_seg) {
  if (!(lo < hi)) throw config_error("fit_pwl: need lo < hi");
  if (n_seg < 1) throw config_error("fit_pwl: need at least one segment");

  int grid_n = std::max(1024, 128 * n_seg);
  std::vector<double> gx(grid_n + 1), gf(grid_n + 1);
  for (int i = 0; i <= grid_n; ++i) {
    gx[i] = lo + (hi - lo) * i / grid_n;
    gf[i] = f(gx[i]);
  }

  PiecewiseLinearFn pwl;
  pwl.x = {lo, hi};
  pwl.y = {gf.front(), gf.back()};

  while (static_cast<int>(pwl.segments()) < n_seg) {
    double worst = -1.0;
    int worst_i = -1;
    for (int i = 1; i < grid_n; ++i) {
      double err = std::abs(gf[i] - pwl.eval(gx[i]));
      if (err > worst &&
          std::find(pwl.x.begin(), pwl.x.end(), gx[i]) == pwl.x.end()) {
        worst = err;
        worst_i = i;
      }
    }
    double xb, yb;
    if (worst_i < 0 || worst < 1e-15) {
      // Curve already matched (affine case): split the widest segment.
      size_t wide = 0;
      for (size_t s = 1; s < pwl.segments(); ++s)
        if (pwl.x[s + 1] - pwl.x[s] > pwl.x[wide + 1] - pwl.x[wide]) wide = s;
      xb = 0.5 * (pwl.x[wide] + pwl.x[wide + 1]);
      yb = f(xb);
    } else {
      xb = gx[worst_i];
      yb = gf[worst_i];
    }
    auto pos = std::upper_bound(pwl.x.begin(), pwl.x.end(), xb);
    size_t idx = static_cast<size_t>(pos - pwl.x.begin());
    pwl.x.insert(pwl.x.begin() + idx, xb);
    pwl.y.insert(pwl.y.begin() + idx, yb);
  }
  pwl.validate();
  return pwl;
}

PiecewiseLinearFn pwl_square(double lo, double hi, int n_seg) {
  if (!(lo < hi)) throw config_error("pwl_square: need lo < hi");
  if (n_seg < 1) throw config_error("pwl_square: need at least one segment");
  PiecewiseLinearFn pwl;
  pwl.x.resize(n_seg + 1);
  pwl.y.resize(n_seg + 1);
  for (int i = 0; i <= n_seg; ++i) {
    double xb = lo + (hi - lo) * i / n_seg;
    pwl.x[i] = xb;
    pwl.y[i] = xb * xb;
  }
  pwl.validate();
  return pwl;
}

double pwl_max_error(const std::function<double(double)>& f,
                     const PiecewiseLinearFn& pwl, int samples) {
  double worst = 0.0;
  for (int i = 0; i <= samples; ++i) {
    double xq = pwl.lo() + (pwl.hi() - pwl.lo()) * i / samples;
    worst = std::max(worst, std::abs(f(xq) - pwl.eval(xq)));
  }
  return worst;
}

}  // namespace ess
