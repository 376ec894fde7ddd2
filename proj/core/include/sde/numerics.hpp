#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "sde/error.hpp"

namespace sde::numerics {

/// Gauss-Legendre rule on [-1, 1]; `integrate` maps it affinely onto [a, b].
class GaussLegendre {
 public:
  explicit GaussLegendre(std::size_t order);

  std::size_t order() const noexcept { return nodes_.size(); }
  std::span<const double> nodes() const noexcept { return nodes_; }
  std::span<const double> weights() const noexcept { return weights_; }

  template <class F>
  double integrate(F&& f, double a, double b) const {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (b + a);
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      acc += weights_[i] * f(mid + half * nodes_[i]);
    }
    return acc * half;
  }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

struct Bracket {
  double lo;
  double hi;
};

/// Bisection for a sign change of `f` on [lo, hi]. `f_lo` is f(lo); signs are
/// classified as negative vs. non-negative. Stops once the bracket is narrower
/// than `x_tol` or after `max_iter` halvings, returning the bracket.
template <class F>
Bracket bisect(F&& f, double lo, double hi, double x_tol, int max_iter = 200) {
  const bool lo_negative = f(lo) < 0.0;
  if ((f(hi) < 0.0) == lo_negative) {
    throw NumericalError("bisect: no sign change on bracket");
  }
  for (int it = 0; it < max_iter && (hi - lo) > x_tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if ((f(mid) < 0.0) == lo_negative) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {lo, hi};
}

/// Golden-section search for the maximizer of a unimodal `f` on [lo, hi].
template <class F>
Bracket golden_section_max(F&& f, double lo, double hi, double x_tol, int max_iter = 300) {
  static const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < max_iter && (hi - lo) > x_tol; ++it) {
    if (fc >= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }
  return {lo, hi};
}

/// Evenly spaced points lo, ..., hi (inclusive), `count` >= 2.
std::vector<double> linspace(double lo, double hi, std::size_t count);

}  // namespace sde::numerics
