#pragma once

#include <cmath>
#include <functional>

namespace qinc {

struct GoldenResult {
  double x;
  double fx;
  int evaluations;
};

/// Golden-section search for the maximum of a unimodal function on [a, b].
/// Stops when the bracket is narrower than `tol` (absolute in x).
inline GoldenResult golden_section_maximize(const std::function<double(double)>& f, double a, double b,
                                            double tol, int max_iter = 200) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  int evals = 2;
  for (int i = 0; i < max_iter && std::abs(b - a) > tol; ++i) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    ++evals;
  }
  const double x = 0.5 * (a + b);
  const double fx = f(x);
  ++evals;
  // Keep the best of the midpoint and the two interior probes.
  if (fc > fx && fc >= fd) return {c, fc, evals};
  if (fd > fx && fd > fc) return {d, fd, evals};
  return {x, fx, evals};
}

}  // namespace qinc
