#include <gtest/gtest.h>

#include <cmath>

#include "heatsup/bump.hpp"
#include "heatsup/errors.hpp"
#include "heatsup/field.hpp"
#include "heatsup/seminorm.hpp"

using namespace heatsup;

namespace {
// the column y0 = 0.5 carries g(t); all other columns are zero
FieldPath column_path(const std::vector<double>& times, double (*g)(double)) {
  FieldPath p = FieldPath::zeros(times, uniform_axis(0.0, 1.0, 10), BoundaryCondition::Dirichlet);
  for (std::size_t i = 0; i < p.rows(); ++i) p(i, 5) = g(times[i]);
  return p;
}

WindowConfig window(double s0, double delta1) {
  WindowConfig w;
  w.s0 = s0;
  w.delta1 = delta1;
  return w;
}
}  // namespace

TEST(Constraints, DefaultsAdmissible) {
  for (const auto& c : check_seminorm(SeminormParams::time_defaults(), false)) EXPECT_TRUE(c.pass) << c.name;
  for (const auto& c : check_seminorm(SeminormParams::rect_defaults(), true)) EXPECT_TRUE(c.pass) << c.name;
}

TEST(Constraints, SmallP0Fails) {
  SeminormParams sp = SeminormParams::time_defaults();
  sp.p0 = 5;
  bool seen = false;
  for (const auto& c : check_seminorm(sp, false))
    if (c.name == "p0 - 2 > gamma0") {
      seen = true;
      EXPECT_FALSE(c.pass);
    }
  EXPECT_TRUE(seen);
}

TEST(HolderSeminorm, ConstantIsZero) {
  EXPECT_EQ(holder_seminorm(std::vector<double>(50, 3.0), 0.02, 2, 0.3), 0.0);
}

TEST(HolderSeminorm, IdentityOracle) {
  const int n = 2000;
  std::vector<double> f(n + 1);
  for (int i = 0; i <= n; ++i) f[i] = static_cast<double>(i) / n;
  EXPECT_NEAR(holder_seminorm(f, 1.0 / n, 1, 0.25), std::sqrt(8.0 / 15.0), 2e-4);
}

TEST(HolderSeminorm, Homogeneous) {
  std::vector<double> f(101), g(101);
  for (int i = 0; i <= 100; ++i) {
    f[i] = std::sin(0.07 * i * i);
    g[i] = -2.5 * f[i];
  }
  EXPECT_NEAR(holder_seminorm(g, 0.01, 3, 0.2), 2.5 * holder_seminorm(f, 0.01, 3, 0.2), 1e-10);
}

TEST(Y, ZeroColumnGivesZero) {
  const FieldPath p = column_path(uniform_axis(0.0, 0.5, 100), [](double) { return 0.0; });
  EXPECT_EQ(Y_r(p, window(0.2, 0.1), 0.3, SeminormParams::time_defaults()), 0.0);
}

TEST(Y, RampOracle) {
  // int int_{[0,d]^2} |t-s|^{14 - 2.25} = 2 d^{13.75} / (12.75 * 13.75)
  const double d = 0.1;
  const FieldPath p = column_path(uniform_axis(0.0, 0.5, 2000), [](double t) { return t - 0.2; });
  const double y = Y_r(p, window(0.2, d), 0.2 + d, SeminormParams::time_defaults());
  const double oracle = 2.0 * std::pow(d, 13.75) / (12.75 * 13.75);
  EXPECT_NEAR(y / oracle, 1.0, 1e-3);
}

TEST(Y, TraceIsNondecreasing) {
  const FieldPath p = sample_spectral(SpaceTimeGrid{0.5, 500, 10}, BoundaryCondition::Dirichlet, 4);
  const auto tr = Y_trace(p, window(0.2, 0.1), SeminormParams::time_defaults());
  for (std::size_t k = 1; k < tr.r.size(); ++k) EXPECT_GE(tr.log_value[k], tr.log_value[k - 1]);
}

TEST(Ybar, SeparableFieldHasNoRectanglePart) {
  WindowConfig w;
  w.delta1 = 0.0016;
  w.delta2 = 0.02;
  FieldPath p = FieldPath::zeros(uniform_axis(0.0, 0.01, 20), uniform_axis(0.5, 0.6, 10), BoundaryCondition::Dirichlet);
  for (std::size_t i = 0; i < p.rows(); ++i)
    for (std::size_t j = 0; j < p.cols(); ++j) p(i, j) = std::sin(40.0 * p.times[i]) + p.positions[j] * p.positions[j];
  const auto tr = Ybar_trace(p, w, SeminormParams::rect_defaults());
  for (double v : tr.log_y1) EXPECT_EQ(v, -std::numeric_limits<double>::infinity());
  for (std::size_t k = 1; k < tr.r.size(); ++k) EXPECT_GE(tr.log_value[k], tr.log_value[k - 1]);
}

TEST(Ybar, ZeroPathIsZero) {
  WindowConfig w;
  w.delta1 = 0.0016;
  w.delta2 = 0.02;
  const FieldPath p = FieldPath::zeros(uniform_axis(0.0, 0.0072, 20), uniform_axis(0.5, 0.8, 30), BoundaryCondition::Dirichlet);
  EXPECT_EQ(Ybar_r(p, w, 0.0036, SeminormParams::rect_defaults()), 0.0);
}

TEST(Psi, ShapeAndSlope) {
  const double R = 3.0;
  EXPECT_EQ(psi(0.25 * R, R), 1.0);
  EXPECT_EQ(psi(2.0 * R, R), 0.0);
  const double mid = psi(0.75 * R, R);
  EXPECT_GT(mid, 0.0);
  EXPECT_LT(mid, 1.0);
  double prev = 1.0, worst = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double x = 1.2 * R * i / 1000.0;
    const double v = psi(x, R);
    EXPECT_LE(v, prev + 1e-15);
    prev = v;
    worst = std::max(worst, std::abs(psi_derivative(x, R)));
    EXPECT_NEAR(psi_log(std::log(x), std::log(R)), v, 1e-12);
  }
  EXPECT_LE(worst, psi_slope_constant() / R * (1.0 + 1e-9));
  EXPECT_THROW(psi(1.0, 0.0), PreconditionError);
}

TEST(Psi, SmoothstepSlopeOracle) {
  // h'(1/2) for h = e(s)/(e(s)+e(1-s)), e(s) = exp(-1/s): equals 2 by direct differentiation
  EXPECT_NEAR(smoothstep_max_slope(), 2.0, 1e-12);
  EXPECT_NEAR(smoothstep(0.5).v, 0.5, 1e-15);
}

TEST(Cutoff, LiteralConstantChain) {
  const SeminormParams sp = SeminormParams::time_defaults();
  // K = 10 * 16^{1/p0} * 2^e / e with e = (gamma0 - 4)/(2 p0); c = K^{-2 p0}
  const double e = 0.5 / 14.0;
  const double K = 10.0 * std::pow(16.0, 1.0 / 7.0) * std::pow(2.0, e) / e;
  EXPECT_NEAR(log_c_grr_time(sp), -14.0 * std::log(K), 1e-9);
  const CutoffSpec c = cutoff_time(sp, std::pow(0.01, 0.25), 0.01);
  EXPECT_NEAR(c.log_R, c.log_c_grr + 14.0 * std::log(std::pow(0.01, 0.25)) - 0.25 * std::log(0.01), 1e-9);
}

TEST(Grr, ZeroPathPasses) {
  const FieldPath p = column_path(uniform_axis(0.0, 0.5, 100), [](double) { return 0.0; });
  const SeminormParams sp = SeminormParams::time_defaults();
  const WindowConfig w = window(0.2, 0.1);
  EXPECT_EQ(grr_implication_check(p, w, 0.3, sp, cutoff_time(sp, 0.5, 0.1), 0.5), Verdict::Pass);
}

TEST(Grr, LargeIncrementIsVacuousNotFail) {
  const FieldPath p = column_path(uniform_axis(0.0, 0.5, 100), [](double t) { return 10.0 * (t - 0.2); });
  const SeminormParams sp = SeminormParams::time_defaults();
  const WindowConfig w = window(0.2, 0.1);
  const CutoffSpec cut = cutoff_time(sp, 0.5, 0.1);
  EXPECT_EQ(grr_implication_check(p, w, 0.3, sp, cut, 0.5), Verdict::Vacuous);
  const auto tr = Y_trace(p, w, sp);
  const GrrTally t = grr_tally_time(p, w, tr, cut, 0.5);
  EXPECT_EQ(t.fail, 0u);
  EXPECT_EQ(t.contrapositive_violations, t.fail);
  EXPECT_EQ(t.pass + t.vacuous + t.fail, tr.r.size());
}

TEST(Grr, HugeCutoffExposesFailure) {
  // with an artificially large R every premise holds, so a large sup fails
  const FieldPath p = column_path(uniform_axis(0.0, 0.5, 100), [](double t) { return 10.0 * (t - 0.2); });
  const SeminormParams sp = SeminormParams::time_defaults();
  const CutoffSpec cut{0.0, 100.0};
  EXPECT_EQ(grr_implication_check(p, window(0.2, 0.1), 0.3, sp, cut, 0.5), Verdict::Fail);
}

TEST(Gamma22, SmallPathGivesFullWindow) {
  const FieldPath p = column_path(uniform_axis(0.0, 0.5, 100), [](double t) { return 1e-6 * t; });
  const SeminormParams sp = SeminormParams::time_defaults();
  const CutoffSpec cut{0.0, 0.0};
  EXPECT_NEAR(gamma22(p, window(0.2, 0.1), sp, cut), 0.1, 1e-12);
}

TEST(Gamma22, IntegrandStartsAtOne) {
  const FieldPath p = column_path(uniform_axis(0.0, 0.5, 100), [](double t) { return 10.0 * (t - 0.2); });
  const SeminormParams sp = SeminormParams::time_defaults();
  const auto tr = Y_trace(p, window(0.2, 0.1), sp);
  const CutoffSpec cut{0.0, -50.0};
  EXPECT_EQ(psi_log(tr.log_value[0], cut.log_R), 1.0);
  const double g = gamma22(tr, cut);
  EXPECT_GT(g, 0.0);
  EXPECT_LE(g, 0.1);
}

TEST(LogSum, MatchesDirectSum) {
  LogSum s;
  double direct = 0.0;
  for (int i = 1; i <= 50; ++i) {
    s.add(std::log(1.0 / i));
    direct += 1.0 / i;
  }
  EXPECT_NEAR(s.log(), std::log(direct), 1e-13);
  EXPECT_TRUE(LogSum{}.empty());
}
