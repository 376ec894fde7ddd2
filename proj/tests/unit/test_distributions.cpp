#include <cmath>

#include <gtest/gtest.h>

#include "sde/distributions.hpp"
#include "sde/error.hpp"

using namespace sde;

namespace {

// Composite Simpson rule, independent of the library's quadrature.
template <class F>
double simpson(F f, double a, double b, int n = 200000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

const CashFlowFamily kExp = CashFlowFamily::exponential();
const CashFlowFamily kLogn = CashFlowFamily::lognormal(0.5);

}  // namespace

TEST(Survivor, ExponentialClosedForm) {
  EXPECT_DOUBLE_EQ(kExp.survivor(0.0, 2.0), 1.0);
  EXPECT_NEAR(kExp.survivor(1.0, 2.0), 0.6065307, 1e-7);
  // cross-check: 1 - integral of the density
  EXPECT_NEAR(1.0 - simpson([](double x) { return kExp.density(x, 2.0); }, 0.0, 1.0), kExp.survivor(1.0, 2.0), 1e-12);
}

TEST(Survivor, LognormalTailVanishes) { EXPECT_LT(kLogn.survivor(1e6, 0.0), 1e-12); }

TEST(Survivor, DefaultProbIsComplement) {
  for (double d : {1e-9, 0.3, 1.0, 7.0}) {
    EXPECT_NEAR(kExp.survivor(d, 1.5) + kExp.default_prob(d, 1.5), 1.0, 1e-15);
    EXPECT_NEAR(kLogn.survivor(d, 0.2) + kLogn.default_prob(d, 0.2), 1.0, 1e-15);
  }
  // no cancellation for tiny face values
  EXPECT_NEAR(kExp.default_prob(1e-12, 2.0), 5e-13, 1e-24);
}

TEST(Density, ExponentialClosedForm) {
  EXPECT_NEAR(kExp.density(1.0, 2.0), 0.3032653, 1e-7);
  EXPECT_DOUBLE_EQ(kExp.density(0.0, 1.0), 1.0);
}

TEST(Density, MatchesFiniteDifferenceOfSurvivor) {
  const double h = 1e-6;
  auto fd = [&](const CashFlowFamily& f, double d, double t) {
    return -(f.survivor(d + h, t) - f.survivor(d - h, t)) / (2 * h);
  };
  EXPECT_NEAR(kExp.density(1.0, 2.0), fd(kExp, 1.0, 2.0), 1e-8);
  EXPECT_NEAR(kLogn.density(1.0, 0.0), fd(kLogn, 1.0, 0.0), 1e-8);
}

TEST(PartialExpectation, ExponentialClosedForm) {
  EXPECT_DOUBLE_EQ(kExp.partial_expectation(0.0, 2.0), 2.0);
  EXPECT_NEAR(kExp.partial_expectation(1.0, 2.0), 1.2130613, 1e-7);
  const double q = simpson([](double x) { return (x - 1.0) * kExp.density(x, 2.0); }, 1.0, 80.0);
  EXPECT_NEAR(kExp.partial_expectation(1.0, 2.0), q, 1e-9);
}

TEST(PartialExpectation, LognormalMatchesQuadrature) {
  for (double d : {0.2, 1.0, 3.0}) {
    const double q = simpson([&](double x) { return (x - d) * kLogn.density(x, 0.0); }, d, 60.0);
    EXPECT_NEAR(kLogn.partial_expectation(d, 0.0), q, 1e-9) << d;
  }
}

TEST(PartialExpectation, EmptyUpperTail) {
  EXPECT_EQ(kExp.partial_expectation(1e9, 1.0), 0.0);
  EXPECT_EQ(kExp.upper_tail_mean(1e9, 1.0), 1e9);
}

TEST(Family, DomainErrors) {
  EXPECT_THROW(kExp.survivor(-1.0, 2.0), DomainError);
  EXPECT_THROW(kExp.survivor(1.0, 0.0), DomainError);
  EXPECT_THROW(CashFlowFamily::lognormal(0.0), DomainError);
}

TEST(Family, QuantileInvertsCdf) {
  for (double p : {1e-6, 0.3, 0.5, 0.999}) {
    EXPECT_NEAR(kExp.default_prob(kExp.quantile(p, 2.0), 2.0), p, 1e-12);
    EXPECT_NEAR(kLogn.default_prob(kLogn.quantile(p, 0.4), 0.4), p, 1e-12);
  }
}

TEST(TypeDistribution, UniformAndBetaAreProperLaws) {
  const TypeDistribution u = TypeDistribution::uniform({1.0, 3.0});
  EXPECT_DOUBLE_EQ(u.pdf(2.0), 0.5);
  EXPECT_DOUBLE_EQ(u.cdf(1.5), 0.25);
  const TypeDistribution b = TypeDistribution::truncated_beta({1.0, 3.0}, 2.0, 5.0);
  EXPECT_NEAR(simpson([&](double t) { return b.pdf(t); }, 1.0, 3.0, 20000), 1.0, 1e-10);
  EXPECT_GT(b.pdf(1.0), 0.0);
  EXPECT_GT(b.pdf(3.0), 0.0);
  EXPECT_DOUBLE_EQ(b.cdf(1.0), 0.0);
  EXPECT_NEAR(b.cdf(3.0), 1.0, 1e-14);
  EXPECT_NEAR(b.cdf(2.0), simpson([&](double t) { return b.pdf(t); }, 1.0, 2.0, 20000), 1e-10);
}

TEST(TypeDistribution, InvalidSupport) { EXPECT_THROW(TypeSpace(3.0, 1.0), DomainError); }

TEST(PoolMoment, PointMassIsExact) {
  const TypeDistribution u = TypeDistribution::uniform({1.0, 3.0});
  EXPECT_EQ(pool_moment(kExp, u, {2.0, 2.0}, 1.0, PoolIntegrand::survivor), kExp.survivor(1.0, 2.0));
  EXPECT_EQ(pool_moment(kExp, u, {2.0, 2.0}, 1.0, PoolIntegrand::density), kExp.density(1.0, 2.0));
}

TEST(PoolMoment, MatchesRiemannSum) {
  const TypeDistribution u = TypeDistribution::uniform({1.0, 3.0});
  const int n = 100000;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += kExp.survivor(1.0, 1.0 + (i + 0.5) * 2.0 / n);
  acc /= n;
  EXPECT_NEAR(pool_moment(kExp, u, {1.0, 3.0}, 1.0, PoolIntegrand::survivor), acc, 1e-6);
}

TEST(PoolMoment, MomentsComplement) {
  const TypeDistribution b = TypeDistribution::truncated_beta({1.0, 3.0}, 2.0, 2.0);
  const double g = pool_moment(kExp, b, {1.5, 2.5}, 0.7, PoolIntegrand::survivor);
  const double q = pool_moment(kExp, b, {1.5, 2.5}, 0.7, PoolIntegrand::default_prob);
  EXPECT_NEAR(g + q, 1.0, 1e-15);
}

TEST(PoolMoment, DegeneratePoolRejected) {
  const TypeDistribution u = TypeDistribution::uniform({1.0, 3.0});
  EXPECT_THROW(pool_moment(kExp, u, {2.0, 2.0 + 1e-14}, 1.0, PoolIntegrand::survivor), DegeneratePool);
  const PoolAverager collapsed(u, {2.0, 2.0 + 1e-14}, 64, PoolAverager::Degenerate::point_mass);
  EXPECT_TRUE(collapsed.point_mass());
}
