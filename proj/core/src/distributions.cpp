#include "sde/distributions.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <numbers>
#include <string>

namespace sde {

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }
double normal_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }
double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

}  // namespace

TypeSpace::TypeSpace(double lo, double hi) : lo_(lo), hi_(hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw DomainError("TypeSpace: bounds must be finite");
  if (!(lo < hi)) throw DomainError("TypeSpace: require lo < hi");
}

TypeDistribution::TypeDistribution(Kind kind, TypeSpace support, double alpha, double beta,
                                   double wlo, double whi)
    : kind_(kind), support_(support), alpha_(alpha), beta_(beta), window_lo_(wlo), window_hi_(whi) {
  if (kind_ == Kind::truncated_beta) {
    if (!(alpha > 0.0) || !(beta > 0.0)) throw DomainError("truncated_beta: alpha, beta must be > 0");
    if (!(wlo > 0.0 && wlo < whi && whi < 1.0)) {
      throw DomainError("truncated_beta: window must satisfy 0 < lo < hi < 1");
    }
    cdf_at_window_lo_ = boost::math::ibeta(alpha_, beta_, window_lo_);
    window_mass_ = boost::math::ibeta(alpha_, beta_, window_hi_) - cdf_at_window_lo_;
  }
}

TypeDistribution TypeDistribution::uniform(TypeSpace support) {
  return {Kind::uniform, support, 1.0, 1.0, 0.0, 1.0};
}

TypeDistribution TypeDistribution::truncated_beta(TypeSpace support, double alpha, double beta,
                                                  double window_lo, double window_hi) {
  return {Kind::truncated_beta, support, alpha, beta, window_lo, window_hi};
}

double TypeDistribution::cdf(double theta) const {
  if (theta <= support_.lo()) return 0.0;
  if (theta >= support_.hi()) return 1.0;
  const double x = (theta - support_.lo()) / support_.width();
  if (kind_ == Kind::uniform) return x;
  const double u = window_lo_ + x * (window_hi_ - window_lo_);
  return (boost::math::ibeta(alpha_, beta_, u) - cdf_at_window_lo_) / window_mass_;
}

double TypeDistribution::pdf(double theta) const {
  if (!support_.contains(theta)) return 0.0;
  if (kind_ == Kind::uniform) return 1.0 / support_.width();
  const double x = (theta - support_.lo()) / support_.width();
  const double scale = (window_hi_ - window_lo_) / support_.width();
  const double u = window_lo_ + x * (window_hi_ - window_lo_);
  return boost::math::ibeta_derivative(alpha_, beta_, u) * scale / window_mass_;
}

CashFlowFamily CashFlowFamily::exponential() { return {Kind::exponential_scale, 0.0}; }

CashFlowFamily CashFlowFamily::lognormal(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("lognormal: sigma must be > 0");
  return {Kind::lognormal_location, sigma};
}

void CashFlowFamily::check_type(double theta) const {
  if (!std::isfinite(theta)) throw DomainError("type must be finite");
  if (kind_ == Kind::exponential_scale && !(theta > 0.0)) {
    throw DomainError("exponential family: type (the mean) must be > 0, got " + std::to_string(theta));
  }
}

void CashFlowFamily::check_args(double d, double theta) const {
  check_type(theta);
  if (!(d >= 0.0)) throw DomainError("face value must be >= 0, got " + std::to_string(d));
}

double CashFlowFamily::survivor(double d, double theta) const {
  check_args(d, theta);
  if (kind_ == Kind::exponential_scale) return std::exp(-d / theta);
  if (d == 0.0) return 1.0;
  return normal_sf((std::log(d) - theta) / sigma_);
}

double CashFlowFamily::default_prob(double d, double theta) const {
  check_args(d, theta);
  if (kind_ == Kind::exponential_scale) return -std::expm1(-d / theta);
  if (d == 0.0) return 0.0;
  return normal_cdf((std::log(d) - theta) / sigma_);
}

double CashFlowFamily::density(double d, double theta) const {
  check_args(d, theta);
  if (kind_ == Kind::exponential_scale) return std::exp(-d / theta) / theta;
  if (d == 0.0) return 0.0;
  return normal_pdf((std::log(d) - theta) / sigma_) / (sigma_ * d);
}

double CashFlowFamily::partial_expectation(double d, double theta) const {
  check_args(d, theta);
  if (kind_ == Kind::exponential_scale) return theta * std::exp(-d / theta);
  const double m = mean(theta);
  if (d == 0.0) return m;
  const double z = (theta - std::log(d)) / sigma_;
  const double value = m * normal_cdf(z + sigma_) - d * normal_cdf(z);
  return value > 0.0 ? value : 0.0;
}

double CashFlowFamily::mean(double theta) const {
  check_type(theta);
  if (kind_ == Kind::exponential_scale) return theta;
  return std::exp(theta + 0.5 * sigma_ * sigma_);
}

double CashFlowFamily::upper_tail_mean(double d, double theta) const {
  const double surv = survivor(d, theta);
  if (surv <= 0.0) return d;
  return partial_expectation(d, theta) / surv + d;
}

double CashFlowFamily::quantile(double p, double theta) const {
  check_type(theta);
  if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile: p must lie in (0, 1)");
  if (kind_ == Kind::exponential_scale) return -theta * std::log1p(-p);
  // Phi^{-1}(p) = -sqrt(2) erfc^{-1}(2p)
  const double z = -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
  return std::exp(theta + sigma_ * z);
}

PoolAverager::PoolAverager(const TypeDistribution& dist, PoolInterval pool, std::size_t order,
                           Degenerate on_degenerate)
    : pool_(pool) {
  const TypeSpace& s = dist.support();
  if (!(pool.lo <= pool.hi) || !s.contains(pool.lo) || !s.contains(pool.hi)) {
    throw DomainError("pool must satisfy lo <= hi inside the type support");
  }
  const double mass = pool.lo == pool.hi ? 0.0 : dist.mass(pool.lo, pool.hi);
  if (pool.lo == pool.hi || mass < kMinMass) {
    if (pool.lo != pool.hi && on_degenerate == Degenerate::reject) {
      throw DegeneratePool("pool carries probability mass below 1e-12; use a point-mass pool");
    }
    point_mass_ = true;
    thetas_.assign(1, 0.5 * (pool.lo + pool.hi));
    weights_.assign(1, 1.0);
    return;
  }
  const numerics::GaussLegendre rule(order);
  const double half = 0.5 * (pool.hi - pool.lo);
  const double mid = 0.5 * (pool.hi + pool.lo);
  thetas_.resize(order);
  weights_.resize(order);
  double total = 0.0;
  for (std::size_t i = 0; i < order; ++i) {
    thetas_[i] = mid + half * rule.nodes()[i];
    weights_[i] = rule.weights()[i] * half * dist.pdf(thetas_[i]);
    total += weights_[i];
  }
  // E_T[1] = 1 exactly, so survivor and default-probability averages are complementary.
  for (double& w : weights_) w /= total;
}

PoolAverager PoolAverager::point(double theta) {
  PoolAverager out;
  out.pool_ = {theta, theta};
  out.point_mass_ = true;
  out.thetas_.assign(1, theta);
  out.weights_.assign(1, 1.0);
  return out;
}

double pool_moment(const CashFlowFamily& fam, const TypeDistribution& dist, PoolInterval pool,
                   double d, PoolIntegrand which, std::size_t order) {
  const PoolAverager avg(dist, pool, order);
  return avg.average([&](double theta) {
    switch (which) {
      case PoolIntegrand::survivor:
        return fam.survivor(d, theta);
      case PoolIntegrand::density:
        return fam.density(d, theta);
      case PoolIntegrand::default_prob:
        return fam.default_prob(d, theta);
    }
    return 0.0;
  });
}

}  // namespace sde
