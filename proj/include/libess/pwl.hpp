#pragma once

#include <functional>
#include <vector>

namespace ess {

// Piecewise-linear interpolant on strictly increasing breakpoints.
struct PiecewiseLinearFn {
  std::vector<double> x;
  std::vector<double> y;

  size_t segments() const { return x.empty() ? 0 : x.size() - 1; }
  double lo() const { return x.front(); }
  double hi() const { return x.back(); }
  double slope(size_t seg) const {
    return (y[seg + 1] - y[seg]) / (x[seg + 1] - x[seg]);
  }

  // Exact stored value at breakpoints, linear in between.  Throws outside
  // [lo, hi] beyond a small tolerance.
  double eval(double xq) const;

  void validate() const;
};

// Fits n_seg segments to f over [lo, hi] by greedy insertion of the point
// with the largest interpolation error on a dense sample grid.
PiecewiseLinearFn fit_pwl(const std::function<double(double)>& f, double lo, double hi,
                          int n_seg);

// Uniform-breakpoint chords of x^2, used to linearize the bilinear power
// term.  The chord over-estimates the square by at most (dx)^2/4 mid-segment.
PiecewiseLinearFn pwl_square(double lo, double hi, int n_seg);

// Largest |f - pwl| over a dense sample of the breakpoint range.
double pwl_max_error(const std::function<double(double)>& f,
                     const PiecewiseLinearFn& pwl, int samples = 4096);

}  // namespace ess
