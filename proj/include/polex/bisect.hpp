#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

namespace polex {

struct BisectOptions {
  double x_tol = 1e-13;       // stop when the bracket is this narrow
  double f_tol = 0.0;         // optionally also require |f(mid) - target| <= f_tol
  int max_iterations = 200;
};

/// Bisection for f(x) = target with f non-increasing on [lo, hi].
/// Runs until the bracket width drops below x_tol (and, when f_tol > 0,
/// the residual below f_tol), capped at max_iterations.
template <typename F>
double bisect_decreasing(F&& f, double lo, double hi, double target,
                         const BisectOptions& opt = {}) {
  if (!(lo < hi)) throw std::invalid_argument("bisect: empty bracket");
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < opt.max_iterations; ++it) {
    mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    const bool narrow = (hi - lo) <= opt.x_tol;
    if (narrow && (opt.f_tol <= 0.0 || std::abs(fm - target) <= opt.f_tol)) break;
    if (narrow && mid == lo) break;  // bracket exhausted at double resolution
    if (fm >= target)
      lo = mid;
    else
      hi = mid;
  }
  return mid;
}

}  // namespace polex
