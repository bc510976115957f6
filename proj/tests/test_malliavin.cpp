#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "heatsup/errors.hpp"
#include "heatsup/field.hpp"
#include "heatsup/malliavin.hpp"

using namespace heatsup;

namespace {
constexpr auto kD = BoundaryCondition::Dirichlet;

SeminormTrace flat_trace(double s0, double delta1, int n) {
  SeminormTrace tr;
  tr.r = uniform_axis(s0, s0 + delta1, n);
  tr.log_value.assign(tr.r.size(), -std::numeric_limits<double>::infinity());
  return tr;
}
}  // namespace

TEST(Phi0, PlateauShape) {
  EXPECT_EQ(phi0(0.0).v, 1.0);
  EXPECT_EQ(phi0(1.0).v, 1.0);
  EXPECT_EQ(phi0(-1.0).v, 0.0);
  EXPECT_EQ(phi0(2.0).v, 0.0);
  EXPECT_GT(phi0(-0.5).v, 0.0);
  EXPECT_LT(phi0(-0.5).v, 1.0);
}

TEST(PairDF1uA1, StandardWindowGivesOne) {
  const WindowConfig w;
  EXPECT_NEAR(pair_DF1_uA1(w, AuxFieldSpec::standard(w), kD), 1.0, 1e-5);
  EXPECT_NEAR(pair_DF1_uA1(w, AuxFieldSpec::standard(w), BoundaryCondition::Neumann), 1.0, 1e-5);
}

TEST(PairDF1uA1, ScaledSpaceCutoff) {
  const WindowConfig w;
  EXPECT_NEAR(pair_DF1_uA1(w, AuxFieldSpec::standard(w, 0.5), kD), 0.5, 1e-5);
}

TEST(PairDF1uA1, TimeCutoffVanishingOnI) {
  const WindowConfig w;
  AuxFieldSpec spec = AuxFieldSpec::standard(w);
  spec.f0 = [](double t) { return plateau(t, 0.85, 0.9, 0.02, 0.02); };
  EXPECT_NEAR(pair_DF1_uA1(w, spec, kD), 0.0, 1e-8);
}

TEST(PairDF1uA1, DegenerateWindowRejected) {
  WindowConfig w;
  w.s0 = 0.0;
  EXPECT_THROW(pair_DF1_uA1(w, AuxFieldSpec::standard(w), kD), DomainError);
}

TEST(PairDuIncrement, Cases) {
  const WindowConfig w;
  const AuxFieldSpec spec = AuxFieldSpec::standard(w);
  EXPECT_EQ(pair_Duincrement_uA1(0.5, 0.5, w, spec, kD), 0.0);
  EXPECT_NEAR(pair_Duincrement_uA1(w.s0, w.s0 + w.delta1, w, spec, kD), 0.0, 1e-5);
  EXPECT_THROW(pair_Duincrement_uA1(0.5, 0.95, w, spec, kD), PreconditionError);
  const double d = pair_Duincrement_uA1(0.5, 0.95, w, spec, kD, {}, true);
  EXPECT_NEAR(d, spec.f0(0.5).v - spec.f0(0.95).v, 1e-5);
  EXPECT_GT(std::abs(d), 0.1);
}

TEST(BuildUA2, UnitPsiGivesClosedForm) {
  const WindowConfig w;
  const AuxFieldSpec spec = AuxFieldSpec::standard(w);
  const auto tr = flat_trace(w.s0, w.delta1, 20);
  const auto pos = uniform_axis(0.0, 1.0, 64);
  const GridField u = build_uA2(tr, CutoffSpec{0.0, 0.0}, spec, pos);
  for (std::size_t k = 1; k < u.rows(); ++k)
    for (std::size_t j = 0; j < u.cols(); ++j) {
      const Jet p = spec.phi_delta1(pos[j]);
      EXPECT_NEAR(u(k, j), p.v - (tr.r[k] - w.s0) * p.d2, 1e-9 * (1.0 + std::abs(p.d2)));
    }
  EXPECT_EQ(u.info_time, tr.r);
}

TEST(Walsh, IsometryForConstantIntegrand) {
  const SpaceTimeGrid g{0.5, 50, 8};
  GridField h;
  h.times = uniform_axis(0.0, 0.5, 50);
  h.positions = uniform_axis(0.0, 1.0, 8);
  h.info_time.assign(h.times.size(), 0.0);
  h.values.assign(h.times.size() * h.positions.size(), 1.0);
  const int n = 10000;
  double s = 0, s2 = 0, s4 = 0;
  for (int p = 0; p < n; ++p) {
    const double v = walsh_integral(draw_noise(g, 3, p), h);
    s += v;
    s2 += v * v;
    s4 += v * v * v * v;
  }
  const double m2 = s2 / n;
  const double se = std::sqrt((s4 / n - m2 * m2) / n);
  EXPECT_NEAR(m2, 0.5, 3.0 * se);
  EXPECT_NEAR(s / n, 0.0, 4.0 * std::sqrt(0.5 / n));
}

TEST(Walsh, RejectsAnticipatingIntegrand) {
  const SpaceTimeGrid g{0.5, 50, 8};
  GridField h;
  h.times = uniform_axis(0.0, 0.5, 50);
  h.positions = uniform_axis(0.0, 1.0, 8);
  h.info_time = h.times;
  h.info_time[3] = h.times[5];
  h.values.assign(h.times.size() * h.positions.size(), 1.0);
  EXPECT_THROW(walsh_integral(draw_noise(g, 3, 0), h), ContractError);
  h.info_time = h.times;
  h.positions[2] += 0.01;
  EXPECT_THROW(walsh_integral(draw_noise(g, 3, 0), h), PreconditionError);
}

TEST(HNorm, ControlVolumesSumToOne) {
  const auto v = control_volumes(uniform_axis(0.0, 1.0, 16));
  double s = 0;
  for (double x : v) s += x;
  EXPECT_NEAR(s, 1.0, 1e-14);
  EXPECT_NEAR(v.front(), 1.0 / 32.0, 1e-15);
}

TEST(HNorm, DisjointSupportsAreOrthogonal) {
  const auto times = uniform_axis(0.0, 0.5, 50);
  const auto pos = uniform_axis(0.0, 1.0, 16);
  const GridField k = derivative_kernel_field(0.2, 0.5, times, pos, kD);
  GridField u = k;
  std::fill(u.values.begin(), u.values.end(), 0.0);
  for (std::size_t i = 20; i < u.rows(); ++i)
    for (std::size_t j = 0; j < u.cols(); ++j) u(i, j) = 1.0 + j;
  EXPECT_EQ(h_inner_product(k, u, control_volumes(pos)), 0.0);
  EXPECT_GT(h_norm_squared(k, control_volumes(pos)), 0.0);
}

TEST(KernelInnerProduct, EqualsCovariance) {
  for (auto bc : {kD, BoundaryCondition::Neumann})
    EXPECT_NEAR(kernel_inner_product(0.3, 0.4, 0.2, 0.7, bc), covariance(0.3, 0.4, 0.2, 0.7, bc), 1e-7);
}

TEST(PairDYr, ZeroPathIsExactlyZero) {
  const WindowConfig w;
  FieldPath p = FieldPath::zeros(uniform_axis(w.s0, w.s0 + w.delta1, 10), {w.y0}, kD);
  EXPECT_EQ(pair_DYr_uA1(p, w, w.s0 + w.delta1, SeminormParams::time_defaults(), AuxFieldSpec::standard(w), kD), 0.0);
}

TEST(PairDYr, StandardSpecVanishesOnSampledPath) {
  const WindowConfig w;
  const GaussianWindowSampler s(uniform_axis(w.s0, w.s0 + w.delta1, 8), {w.y0}, kD, SpaceTimePoint{w.s0, w.y0});
  const FieldPath p = s.sample(2, 0);
  EXPECT_NEAR(pair_DYr_uA1(p, w, w.s0 + w.delta1, SeminormParams::time_defaults(), AuxFieldSpec::standard(w), kD), 0.0,
              1e-6);
}

TEST(PairDYr, NonConstantPairingMatchesDirectSum) {
  const WindowConfig w;
  const SeminormParams sp = SeminormParams::time_defaults();
  const auto t = uniform_axis(w.s0, w.s0 + w.delta1, 6);
  FieldPath p = FieldPath::zeros(t, {w.y0}, kD);
  for (std::size_t i = 0; i < t.size(); ++i) p(i, 0) = std::sin(300.0 * t[i]);
  const auto P = [](double x) { return x * x; };
  const double v = pair_DYr_uA1(p, w, w.s0 + w.delta1, sp, AuxFieldSpec::standard(w), kD, {}, P);
  // d/de of the double trapezoid sum of (u_i - u_j + e (P_i - P_j))^{14} / |t_i - t_j|^{2.25}
  const auto Y = [&](double e) {
    const double h = t[1] - t[0];
    double s = 0;
    for (std::size_t i = 0; i < t.size(); ++i)
      for (std::size_t j = 0; j < t.size(); ++j) {
        if (i == j) continue;
        const double wi = (i == 0 || i + 1 == t.size()) ? 0.5 * h : h;
        const double wj = (j == 0 || j + 1 == t.size()) ? 0.5 * h : h;
        const double d = p(i, 0) - p(j, 0) + e * (P(t[i]) - P(t[j]));
        s += wi * wj * std::pow(d, 14) / std::pow(std::abs(t[i] - t[j]), 2.25);
      }
    return s;
  };
  const double e = 1e-4;
  const double fd = (Y(e) - Y(-e)) / (2.0 * e);
  EXPECT_NEAR(v / fd, 1.0, 1e-6);
}

TEST(PairDF2uA2, EqualsIntegralOfPsi) {
  const WindowConfig w;
  const AuxFieldSpec spec = AuxFieldSpec::standard(w);
  const auto r = uniform_axis(w.s0, w.s0 + w.delta1, 8);
  std::vector<double> psi(r.size());
  for (std::size_t k = 0; k < r.size(); ++k) psi[k] = k < 3 ? 1.0 : std::max(0.0, 1.0 - 0.3 * (k - 2.0));
  double expected = 0;
  for (std::size_t k = 0; k + 1 < r.size(); ++k) expected += 0.5 * (psi[k] + psi[k + 1]) * (r[k + 1] - r[k]);
  EXPECT_NEAR(pair_DF2_uA2(r, psi, r.back(), spec, kD), expected, 1e-6 * w.delta1 + 1e-9);
}
