#pragma once

#include <cstddef>
#include <memory>

#include "sde/numerics.hpp"

namespace sde {

/// The closed type interval [lo, hi].
class TypeSpace {
 public:
  TypeSpace(double lo, double hi);

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  double width() const noexcept { return hi_ - lo_; }
  bool contains(double theta) const noexcept { return theta >= lo_ && theta <= hi_; }

 private:
  double lo_;
  double hi_;
};

/// Cross-sectional distribution of borrower types, with a strictly positive
/// density on the whole closed support.
///
/// `truncated_beta` is Beta(alpha, beta) restricted to the unit-interval
/// window [window_lo, window_hi] and mapped affinely onto the type space.
class TypeDistribution {
 public:
  enum class Kind { uniform, truncated_beta };

  static TypeDistribution uniform(TypeSpace support);
  static TypeDistribution truncated_beta(TypeSpace support, double alpha, double beta,
                                         double window_lo = 0.01, double window_hi = 0.99);

  Kind kind() const noexcept { return kind_; }
  const TypeSpace& support() const noexcept { return support_; }
  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }

  double cdf(double theta) const;
  double pdf(double theta) const;
  /// F(b) - F(a).
  double mass(double a, double b) const { return cdf(b) - cdf(a); }

 private:
  TypeDistribution(Kind kind, TypeSpace support, double alpha, double beta, double wlo, double whi);

  Kind kind_;
  TypeSpace support_;
  double alpha_ = 1.0;
  double beta_ = 1.0;
  double window_lo_ = 0.0;
  double window_hi_ = 1.0;
  double window_mass_ = 1.0;
  double cdf_at_window_lo_ = 0.0;
};

/// Conditional law of the project cash flow X given type theta.
///
/// exponential_scale: X ~ Exp with mean theta (theta > 0).
/// lognormal_location: log X ~ N(theta, sigma^2).
class CashFlowFamily {
 public:
  enum class Kind { exponential_scale, lognormal_location };

  static CashFlowFamily exponential();
  static CashFlowFamily lognormal(double sigma);

  Kind kind() const noexcept { return kind_; }
  double sigma() const noexcept { return sigma_; }

  /// G(d|theta) = Pr[X >= d | theta].
  double survivor(double d, double theta) const;
  /// 1 - G(d|theta), computed without cancellation.
  double default_prob(double d, double theta) const;
  /// g(d|theta) = -dG/dd.
  double density(double d, double theta) const;
  /// E[(X - d) 1{X >= d} | theta].
  double partial_expectation(double d, double theta) const;
  /// mu(theta) = E[X | theta].
  double mean(double theta) const;
  /// mu_+(d, theta) = E[X | X >= d, theta]; equals d when the upper tail is empty.
  double upper_tail_mean(double d, double theta) const;
  /// Inverse of the conditional cdf, p in (0, 1).
  double quantile(double p, double theta) const;

  /// Throws DomainError when theta is not a valid parameter for the family.
  void check_type(double theta) const;

 private:
  CashFlowFamily(Kind kind, double sigma) : kind_(kind), sigma_(sigma) {}
  void check_args(double d, double theta) const;

  Kind kind_;
  double sigma_ = 0.0;
};

/// Pointwise functions whose pool averages are needed by the pooled solvers.
enum class PoolIntegrand { survivor, density, default_prob };

struct PoolInterval {
  double lo;
  double hi;
};

/// Quadrature nodes and normalized weights of dF restricted to a pool, or a
/// single node for a point-mass pool. Built once per pool and reused for every
/// face value examined during a solve.
class PoolAverager {
 public:
  static constexpr double kMinMass = 1e-12;

  enum class Degenerate { reject, point_mass };

  /// A pool with a == b is always a point mass. A nondegenerate interval whose
  /// mass is below kMinMass throws DegeneratePool, or collapses onto its
  /// midpoint when `on_degenerate` is point_mass.
  PoolAverager(const TypeDistribution& dist, PoolInterval pool, std::size_t order = 64,
               Degenerate on_degenerate = Degenerate::reject);

  /// Single-type pool {theta}.
  static PoolAverager point(double theta);

  bool point_mass() const noexcept { return point_mass_; }
  PoolInterval pool() const noexcept { return pool_; }
  std::span<const double> thetas() const noexcept { return thetas_; }
  std::span<const double> weights() const noexcept { return weights_; }

  template <class F>
  double average(F&& h) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < thetas_.size(); ++i) acc += weights_[i] * h(thetas_[i]);
    return acc;
  }

 private:
  PoolAverager() = default;

  PoolInterval pool_{};
  bool point_mass_ = false;
  std::vector<double> thetas_;
  std::vector<double> weights_;
};

/// E_T[h(d|theta)] over pool T = [a, b] under dist, by Gauss-Legendre of the
/// given order. Throws DegeneratePool when F(b) - F(a) < 1e-12 unless a == b,
/// which is evaluated as a point mass.
double pool_moment(const CashFlowFamily& fam, const TypeDistribution& dist, PoolInterval pool,
                   double d, PoolIntegrand which, std::size_t order = 64);

}  // namespace sde
