#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "heatsup/field.hpp"
#include "heatsup/green.hpp"
#include "heatsup/seminorm.hpp"
#include "heatsup/suprema.hpp"

using namespace heatsup;

namespace {

WindowConfig f_window(double delta1) {
  WindowConfig w;
  w.delta1 = delta1;
  return w;
}

GaussianWindowSampler f_sampler(const WindowConfig& w, int steps = 32, int refine = 16) {
  return GaussianWindowSampler(f_window_times(w, steps, refine), {w.y0}, BoundaryCondition::Dirichlet,
                               SpaceTimePoint{w.s0, w.y0});
}

}  // namespace

TEST(Property, CovarianceGramIsPositiveSemidefinite) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> t(0.0, 1.0), x(0.0, 1.0);
  for (auto bc : {BoundaryCondition::Dirichlet, BoundaryCondition::Neumann}) {
    for (int trial = 0; trial < 5; ++trial) {
      const int n = 30;
      std::vector<double> ts(n), xs(n);
      for (int i = 0; i < n; ++i) {
        ts[i] = t(gen);
        xs[i] = x(gen);
      }
      Eigen::MatrixXd K(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) K(i, j) = covariance(ts[i], xs[i], ts[j], xs[j], bc);
      EXPECT_LT((K - K.transpose()).cwiseAbs().maxCoeff(), 1e-12);
      const double lo = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(K).eigenvalues().minCoeff();
      EXPECT_GT(lo, -1e-9 * K.diagonal().maxCoeff()) << to_string(bc) << " trial " << trial;
    }
  }
}

TEST(Property, PointValuesAreGaussian) {
  const GaussianWindowSampler s({0.0, 0.3, 0.6}, {0.25, 0.5}, BoundaryCondition::Dirichlet);
  const int n = 20000;
  double m1 = 0, m2 = 0, m3 = 0, m4 = 0;
  for (int p = 0; p < n; ++p) {
    const double v = s.sample(3, p)(2, 1);
    m1 += v;
    m2 += v * v;
  }
  m1 /= n;
  const double var = m2 / n - m1 * m1;
  for (int p = 0; p < n; ++p) {
    const double z = (s.sample(3, p)(2, 1) - m1) / std::sqrt(var);
    m3 += z * z * z;
    m4 += z * z * z * z;
  }
  // se of skewness ~ sqrt(6/n), of kurtosis ~ sqrt(24/n)
  EXPECT_LT(std::abs(m3 / n), 4.0 * std::sqrt(6.0 / n));
  EXPECT_LT(std::abs(m4 / n - 3.0), 4.0 * std::sqrt(24.0 / n));
  EXPECT_NEAR(var, covariance(0.6, 0.5, 0.6, 0.5, BoundaryCondition::Dirichlet), 0.03 * var);
}

TEST(Property, SamplingIsDeterministic) {
  const WindowConfig w = f_window(0.02);
  const auto s = f_sampler(w);
  for (std::uint64_t p : {0ull, 5ull, 999ull}) {
    EXPECT_EQ(s.sample(42, p).values, s.sample(42, p).values);
    EXPECT_NE(s.sample(42, p).values, s.sample(42, p + 1).values);
    EXPECT_NE(s.sample(42, p).values, s.sample(43, p).values);
  }
  const auto a = sample_spectral(uniform_axis(0.0, 0.2, 20), uniform_axis(0.0, 1.0, 10), BoundaryCondition::Neumann, 9, 64, 4);
  const auto b = sample_spectral(uniform_axis(0.0, 0.2, 20), uniform_axis(0.0, 1.0, 10), BoundaryCondition::Neumann, 9, 64, 4);
  EXPECT_EQ(a.values, b.values);
}

TEST(Property, ArgmaxIsUnique) {
  const WindowConfig w = f_window(0.02);
  const auto s = f_sampler(w);
  for (std::uint64_t p = 0; p < 300; ++p) EXPECT_EQ(argmax_multiplicity(s.sample(1, p), w), 1u) << p;
}

TEST(Property, RefinementOnlyAddsTimesAndMakesF2Positive) {
  const WindowConfig w = f_window(0.02);
  const auto s = f_sampler(w);
  int refined = 0;
  for (std::uint64_t p = 0; p < 200; ++p) {
    FieldPath base = s.sample(7, p);
    if (p % 2 == 1) {
      // reflect so that no sampled increment is positive
      const std::size_t i0 = compute_F(base, w).s0_index;
      for (std::size_t i = i0 + 1; i < base.rows(); ++i) base(i, 0) = base(i0, 0) - std::abs(base(i, 0) - base(i0, 0));
      EXPECT_EQ(compute_F(base, w).F2, 0.0);
    }
    FieldPath f = base;
    const std::size_t added = refine_until_positive(f, w, 7, p);
    EXPECT_EQ(f.rows(), base.rows() + added);
    EXPECT_TRUE(std::is_sorted(f.times.begin(), f.times.end()));
    for (std::size_t i = 0; i < base.rows(); ++i) {
      const auto it = std::find(f.times.begin(), f.times.end(), base.times[i]);
      ASSERT_NE(it, f.times.end());
      EXPECT_EQ(f(static_cast<std::size_t>(it - f.times.begin()), 0), base(i, 0));
    }
    const double before = compute_F(base, w).F2, after = compute_F(f, w).F2;
    EXPECT_GE(after, before);
    EXPECT_GT(after, 0.0);
    if (added > 0) ++refined;
  }
  EXPECT_GE(refined, 100);
}

TEST(Property, F2IgnoresConstantShift) {
  const WindowConfig w = f_window(0.04);
  const auto s = f_sampler(w);
  std::mt19937_64 gen(5);
  std::normal_distribution<double> c;
  for (std::uint64_t p = 0; p < 50; ++p) {
    FieldPath f = s.sample(2, p);
    const FResult a = compute_F(f, w);
    const double shift = c(gen);
    for (double& v : f.values) v += shift;
    const FResult b = compute_F(f, w);
    EXPECT_NEAR(b.F2, a.F2, 1e-12);
    EXPECT_NEAR(b.F1, a.F1 + shift, 1e-12);
    EXPECT_EQ(b.argmax_index, a.argmax_index);
  }
}

TEST(Property, M0IsNonnegativeAndGrowsWithWindow) {
  WindowConfig small;
  small.delta1 = 0.0016;
  small.delta2 = 0.02;
  WindowConfig large = small;
  large.delta1 = 0.0064;
  large.delta2 = 0.04;
  const GaussianWindowSampler s(m0_window_times(large, 16, 4), m0_window_positions(large, 8), BoundaryCondition::Dirichlet);
  for (std::uint64_t p = 0; p < 100; ++p) {
    const FieldPath f = s.sample(4, p);
    const double a = compute_M0(f, small).M0, b = compute_M0(f, large).M0;
    EXPECT_GE(a, 0.0);
    EXPECT_GE(b, a);
  }
}

TEST(Property, SeminormTraceIsNondecreasing) {
  const WindowConfig w = f_window(0.02);
  const auto s = f_sampler(w, 64, 16);
  const SeminormParams sp = SeminormParams::time_defaults();
  for (std::uint64_t p = 0; p < 40; ++p) {
    const SeminormTrace tr = Y_trace(s.sample(8, p), w, sp);
    for (std::size_t k = 1; k < tr.log_value.size(); ++k) EXPECT_GE(tr.log_value[k], tr.log_value[k - 1]) << p;
  }
}

TEST(Property, CutoffIsNonincreasingAndBounded) {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(0.0, 3.0), r(0.1, 10.0);
  for (int i = 0; i < 2000; ++i) {
    const double R = r(gen);
    const double a = u(gen) * R, b = u(gen) * R;
    const double lo = std::min(a, b), hi = std::max(a, b);
    EXPECT_GE(psi(lo, R), psi(hi, R));
    EXPECT_GE(psi(a, R), 0.0);
    EXPECT_LE(psi(a, R), 1.0);
    EXPECT_LE(psi_derivative(a, R), 1e-15);
  }
}
