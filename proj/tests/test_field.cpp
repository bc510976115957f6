#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "heatsup/errors.hpp"
#include "heatsup/field.hpp"
#include "heatsup/green.hpp"

using namespace heatsup;

namespace {
struct Moments {
  double mean = 0, var = 0;
  std::size_t n = 0;
  void add(double v) {
    ++n;
    const double d = v - mean;
    mean += d / n;
    var += d * (v - mean);
  }
  double variance() const { return var / (n - 1); }
  // standard error of the sample variance for a Gaussian
  double variance_se() const { return variance() * std::sqrt(2.0 / (n - 1)); }
};
}  // namespace

TEST(OuTransition, ZeroRateIsBrownian) {
  EXPECT_DOUBLE_EQ(ou_transition(0.7, 0.0, 0.04, 1.5), 0.7 + 1.5 * 0.2);
}

TEST(OuTransition, Mean) {
  const double l = std::numbers::pi * std::numbers::pi;
  EXPECT_NEAR(ou_transition(1.0, l, 0.01, 0.0), std::exp(-0.0986960440108936), 1e-12);
  EXPECT_NEAR(ou_transition(1.0, l, 0.01, 0.0), 0.906018056, 1e-8);
}

TEST(OuTransition, StationaryVariance) {
  const double l = 3.0;
  EXPECT_NEAR(ou_transition(0.0, l, 1e3, 1.0), std::sqrt(1.0 / (2.0 * l)), 1e-12);
}

TEST(Spectral, StartsAtZeroAndIsDeterministic) {
  const SpaceTimeGrid g{0.1, 20, 16};
  const FieldPath a = sample_spectral(g, BoundaryCondition::Dirichlet, 5);
  const FieldPath b = sample_spectral(g, BoundaryCondition::Dirichlet, 5);
  for (std::size_t j = 0; j < a.cols(); ++j) EXPECT_EQ(a(0, j), 0.0);
  EXPECT_EQ(a.values, b.values);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    EXPECT_NEAR(a(i, 0), 0.0, 1e-12);
    EXPECT_NEAR(a(i, a.cols() - 1), 0.0, 1e-12);
  }
}

TEST(Spectral, VarianceMatchesCovariance) {
  Moments m;
  for (std::uint64_t p = 0; p < 10000; ++p) {
    const FieldPath f = sample_spectral({0.1}, {0.5}, BoundaryCondition::Dirichlet, 11, 512, p);
    m.add(f(0, 0));
  }
  const double v = covariance(0.1, 0.5, 0.1, 0.5, BoundaryCondition::Dirichlet);
  EXPECT_NEAR(m.variance(), v, 3.0 * m.variance_se());
}

TEST(FiniteDifference, ZeroNoiseGivesZeroPath) {
  const SpaceTimeGrid g{0.01, 100, 10};
  NoiseField w = draw_noise(g, 1, 0);
  std::fill(w.increments.begin(), w.increments.end(), 0.0);
  const FieldPath f = run_finite_difference(g, BoundaryCondition::Neumann, w);
  for (double v : f.values) EXPECT_EQ(v, 0.0);
}

TEST(FiniteDifference, Deterministic) {
  const SpaceTimeGrid g{0.01, 100, 10};
  const auto a = sample_finite_difference(g, BoundaryCondition::Dirichlet, 3, 2);
  const auto b = sample_finite_difference(g, BoundaryCondition::Dirichlet, 3, 2);
  EXPECT_EQ(a.first.values, b.first.values);
  EXPECT_EQ(a.second.increments, b.second.increments);
}

TEST(FiniteDifference, RejectsUnstableGrid) {
  const SpaceTimeGrid g{0.1, 10, 32};
  EXPECT_THROW(sample_finite_difference(g, BoundaryCondition::Dirichlet, 1), PreconditionError);
}

TEST(FiniteDifference, NoiseVarianceMatchesCells) {
  const SpaceTimeGrid g{0.01, 200, 16};
  const NoiseField w = draw_noise(g, 9, 0);
  Moments m;
  for (std::size_t n = 0; n < w.nt; ++n)
    for (std::size_t j = 1; j + 1 < w.cols(); ++j) m.add(w(n, j) / std::sqrt(w.dt * w.volumes[j]));
  EXPECT_NEAR(m.variance(), 1.0, 3.0 * m.variance_se());
}

TEST(FiniteDifference, AgreesWithSpectralVariance) {
  const SpaceTimeGrid g{0.05, 400, 32};
  Moments fd;
  for (std::uint64_t p = 0; p < 4000; ++p) {
    const auto r = sample_finite_difference(g, BoundaryCondition::Dirichlet, 21, p);
    fd.add(r.first(r.first.rows() - 1, 16));
  }
  const double v = covariance(0.05, 0.5, 0.05, 0.5, BoundaryCondition::Dirichlet);
  EXPECT_NEAR(fd.variance() / v, 1.0, 0.05 + 3.0 * fd.variance_se() / v);
}

TEST(WindowSampler, VarianceMatchesCovariance) {
  const GaussianWindowSampler s({0.3, 0.31}, {0.4, 0.5}, BoundaryCondition::Dirichlet, SpaceTimePoint{0.3, 0.5});
  Moments a, b;
  for (std::uint64_t p = 0; p < 20000; ++p) {
    const FieldPath f = s.sample(4, p);
    a.add(f(0, 1));
    b.add(f(1, 0) - f(0, 1));
  }
  const auto c = [](double t, double x, double s, double y) {
    return covariance(t, x, s, y, BoundaryCondition::Dirichlet);
  };
  EXPECT_NEAR(a.variance(), c(0.3, 0.5, 0.3, 0.5), 3.5 * a.variance_se());
  const double vb = c(0.31, 0.4, 0.31, 0.4) + c(0.3, 0.5, 0.3, 0.5) - 2.0 * c(0.31, 0.4, 0.3, 0.5);
  EXPECT_NEAR(b.variance(), vb, 3.5 * b.variance_se());
}

TEST(Serialization, BinaryRoundTrip) {
  const SpaceTimeGrid g{0.01, 40, 8};
  const auto [f, w] = sample_finite_difference(g, BoundaryCondition::Neumann, 6, 1);
  std::stringstream s1, s2;
  write_binary(s1, f);
  write_binary(s2, w);
  const FieldPath f2 = read_binary_field(s1);
  const NoiseField w2 = read_binary_noise(s2);
  EXPECT_EQ(f2.values, f.values);
  EXPECT_EQ(f2.times, f.times);
  EXPECT_EQ(f2.bc, f.bc);
  EXPECT_EQ(w2.increments, w.increments);
}

TEST(Coarsen, KeepsEveryKth) {
  const SpaceTimeGrid g{0.01, 40, 8};
  const FieldPath f = sample_spectral(g, BoundaryCondition::Dirichlet, 2);
  const FieldPath c = f.coarsen(4, 2);
  ASSERT_EQ(c.rows(), 11u);
  ASSERT_EQ(c.cols(), 5u);
  EXPECT_EQ(c(3, 2), f(12, 4));
}
