#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "heatsup/density.hpp"
#include "heatsup/errors.hpp"
#include "heatsup/rng.hpp"

using namespace heatsup;

namespace {
std::vector<double> normals(std::uint64_t seed, std::size_t n, double scale = 1.0, double shift = 0.0) {
  const NormalStream z(seed, 0, StreamTag::Initial);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = shift + scale * z(i);
  return x;
}
}  // namespace

TEST(Kde, StandardNormal2DAtOrigin) {
  std::vector<double> ax(81);
  for (int i = 0; i <= 80; ++i) ax[i] = -4.0 + 0.1 * i;
  KdeOptions o;
  o.axes = {ax, ax};
  const auto d = kde({normals(1, 100000), normals(2, 100000)}, o);
  EXPECT_NEAR(d.at(40, 40), 1.0 / (2.0 * std::numbers::pi), 0.05 / (2.0 * std::numbers::pi));
}

TEST(Kde, OneDimensionalMassAndShape) {
  const auto d = kde({normals(3, 50000, 2.0, 1.0)});
  EXPECT_NEAR(d.mass(), 1.0, 0.02);
  // density of N(1, 4) at its mean
  EXPECT_NEAR(d.peak(), 1.0 / (2.0 * std::sqrt(2.0 * std::numbers::pi)), 0.01);
}

TEST(Kde, BootstrapStandardErrors) {
  KdeOptions o;
  o.bootstrap = 50;
  o.seed = 9;
  o.lattice_points = 21;
  const auto d = kde({normals(4, 5000)}, o);
  ASSERT_EQ(d.stderr_values.size(), d.values.size());
  const std::size_t mid = d.values.size() / 2;
  EXPECT_GT(d.se(mid), 0.0);
  EXPECT_LT(d.se(mid), 0.05 * d.at(mid));
}

TEST(Kde, Refusals) {
  EXPECT_THROW(kde({normals(1, 50)}), PreconditionError);
  EXPECT_THROW(kde({std::vector<double>(200, 1.0)}), DomainError);
}

TEST(Kde, SilvermanRuleOfThumb) {
  const auto x = normals(5, 20000);
  const double h = silverman_bandwidth(x, 1);
  EXPECT_NEAR(h, 1.06 * std::pow(20000.0, -0.2), 0.03 * h);
}

TEST(Tails, TrivialThresholds) {
  const auto x = normals(6, 1000);
  const auto t = tail_probability(x, {-100.0, 100.0});
  EXPECT_EQ(t[0].p, 1.0);
  EXPECT_EQ(t[1].p, 0.0);
  EXPECT_NEAR(t[1].hi, 3.0 / 1000.0, 1e-15);
  EXPECT_LE(t[0].lo, 1.0);
}

TEST(Tails, WilsonIntervalCoversTruth) {
  const auto x = normals(7, 20000);
  const auto t = tail_probability(x, {1.0});
  const double truth = 0.5 * std::erfc(1.0 / std::sqrt(2.0));
  EXPECT_LE(t[0].lo, truth);
  EXPECT_GE(t[0].hi, truth);
}

TEST(FitConstant, Bisection) {
  const double c = fit_minimal_constant([](double c) { return c >= 3.7; });
  EXPECT_NEAR(c, 3.7, 1e-9);
}

TEST(BoundReport, JsonRoundTrip) {
  BoundReport r;
  r.theorem = Theorem::ThmM0;
  r.variant = "envelope";
  r.fitted_c = 1.25;
  r.reference_delta = 0.18;
  r.verdicts.push_back({0.06, 40, 41, 0, 0.75, true});
  r.collapse_checked = true;
  r.collapse_distance = 0.01;
  r.collapse_peak = 0.5;
  const BoundReport b = bound_report_from_json(to_json(r));
  EXPECT_EQ(b.theorem, r.theorem);
  EXPECT_EQ(b.variant, r.variant);
  EXPECT_EQ(b.fitted_c, r.fitted_c);
  ASSERT_EQ(b.verdicts.size(), 1u);
  EXPECT_EQ(b.verdicts[0].checked, 40u);
  EXPECT_EQ(b.verdicts[0].worst_ratio, 0.75);
  EXPECT_TRUE(b.pass());
  EXPECT_EQ(to_json(b), to_json(r));
}

TEST(BoundCheck, RefusesSmallSamples) {
  std::vector<FSampleSet> sets{{0.01, normals(1, 10), normals(2, 10)}, {0.04, normals(3, 10), normals(4, 10)}};
  EXPECT_THROW(verify_density_bound_F(sets), PreconditionError);
}

TEST(BoundCheck, SelfSimilarGaussianFamilyPasses) {
  // M0 ~ |N(0, delta)| obeys the Gaussian envelope exactly and collapses under z / delta^{1/2}
  std::vector<MSampleSet> sets;
  const std::vector<std::pair<double, double>> cfg{{0.0016, 0.02}, {0.0064, 0.04}, {0.0144, 0.06}};
  for (std::size_t k = 0; k < cfg.size(); ++k) {
    MSampleSet s{cfg[k].first, cfg[k].second, {}};
    const double q = std::sqrt(s.delta());
    s.M0 = normals(10 + k, 20000, q);
    for (double& v : s.M0) v = std::abs(v);
    sets.push_back(std::move(s));
  }
  BoundCheckOptions o;
  o.min_samples = 20000;
  o.bootstrap = 30;
  o.seed = 1;
  const BoundReport r = verify_density_bound_M0(sets, o);
  EXPECT_TRUE(r.bound_pass());
  EXPECT_TRUE(r.collapse_pass()) << r.collapse_distance << " vs " << r.collapse_peak;
}

TEST(BoundCheck, TailEnvelopeOfGaussianFamily) {
  std::vector<std::vector<double>> s;
  const std::vector<double> scales{0.3, 0.4, 0.5};
  for (std::size_t k = 0; k < scales.size(); ++k) s.push_back(normals(20 + k, 20000, scales[k]));
  std::vector<double> zeta;
  for (int i = 0; i <= 20; ++i) zeta.push_back(1.0 + 0.1 * i);
  const BoundReport r = verify_tail_bound(Theorem::TailF2, scales, s, zeta);
  EXPECT_TRUE(r.pass());
  EXPECT_GT(r.fitted_c, 0.0);
}

TEST(Scaling, ExactPowerLaw) {
  std::vector<std::vector<double>> s;
  const std::vector<double> d{0.01, 0.02, 0.04};
  for (double x : d) s.push_back({std::pow(x, 0.25), std::pow(x, 0.25)});
  const ScalingFit f = mean_sup_scaling(d, s);
  EXPECT_NEAR(f.slope, 0.25, 1e-12);
  EXPECT_THROW(mean_sup_scaling({0.01, 0.02}, {{1.0, 2.0}, {1.0, 2.0}}), PreconditionError);
}

TEST(Scaling, BrownianAndRampIncrements) {
  const std::vector<double> lag{0.001, 0.002, 0.004, 0.008};
  std::vector<std::vector<double>> bm, ramp;
  const NormalStream z(3, 0, StreamTag::Initial);
  std::uint64_t idx = 0;
  for (double h : lag) {
    std::vector<double> b(20000);
    for (double& v : b) {
      const double inc = std::sqrt(h) * z(idx++);
      v = inc * inc;
    }
    bm.push_back(b);
    ramp.push_back({h * h, h * h});
  }
  EXPECT_NEAR(exponent_from_increments("bm", lag, bm, 1.0, 0.05).fit.slope, 1.0, 0.05);
  EXPECT_NEAR(exponent_from_increments("ramp", lag, ramp, 2.0, 0.0).fit.slope, 2.0, 1e-12);
}

TEST(Csv, DensityAndTail) {
  std::ostringstream a, b;
  write_csv(a, kde({normals(1, 1000)}));
  write_csv(b, tail_probability(normals(1, 1000), {0.0}));
  EXPECT_FALSE(a.str().empty());
  EXPECT_NE(b.str().find('\n'), std::string::npos);
}
