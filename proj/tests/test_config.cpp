#include <gtest/gtest.h>

#include <string>

#include "heatsup/config.hpp"
#include "heatsup/errors.hpp"

using namespace heatsup;

namespace {

bool has_failure(const std::vector<ConstraintCheck>& v, const std::string& needle) {
  for (const auto& c : v)
    if (!c.pass && c.name.find(needle) != std::string::npos) return true;
  return false;
}

std::string message_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigurationError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, DefaultValidates) {
  const auto checks = validate(ExperimentConfig{});
  for (const auto& c : checks) EXPECT_TRUE(c.pass) << c.name;
  EXPECT_TRUE(all_pass(checks));
}

TEST(Config, RoundTrip) {
  ExperimentConfig c;
  c.experiment = ExperimentKind::WalshScaling;
  c.bc = BoundaryCondition::Neumann;
  c.mc.seed = 77;
  c.mc.n_paths = 1234;
  c.design.deltas = {0.005, 0.01, 0.03};
  c.design.m0_deltas = {{0.001, 0.01}, {0.002, 0.03}, {0.004, 0.05}};
  c.window.s0 = 0.35;
  c.seminorm.p0 = 12;
  c.output_dir = "somewhere/else";
  c.retain_raw = true;
  const ExperimentConfig back = parse_config(serialize(c));
  EXPECT_TRUE(back == c);
  EXPECT_EQ(serialize(back), serialize(c));
}

TEST(Config, PartialFileKeepsDefaults) {
  const ExperimentConfig c = parse_config("# comment\n[mc]\nseed = 5\n\n[experiment]\nkind = gamma22_moments\n");
  EXPECT_EQ(c.mc.seed, 5u);
  EXPECT_EQ(c.experiment, ExperimentKind::Gamma22Moments);
  EXPECT_EQ(c.mc.n_paths, ExperimentConfig{}.mc.n_paths);
}

TEST(Config, UnknownKeyReportsLine) {
  const std::string m = message_of("[mc]\nseed = 1\nbogus = 2\n");
  EXPECT_NE(m.find("line 3"), std::string::npos) << m;
  EXPECT_NE(m.find("bogus"), std::string::npos) << m;
}

TEST(Config, UnknownSectionReportsLine) {
  const std::string m = message_of("\n[nowhere]\n");
  EXPECT_NE(m.find("line 2"), std::string::npos) << m;
}

TEST(Config, MalformedValues) {
  EXPECT_THROW(parse_config("[mc]\nseed = abc\n"), ConfigurationError);
  EXPECT_THROW(parse_config("[mc]\nn_paths = -3\n"), ConfigurationError);
  EXPECT_THROW(parse_config("[output]\nretain_raw = maybe\n"), ConfigurationError);
  EXPECT_THROW(parse_config("[experiment]\nkind = nothing\n"), ConfigurationError);
  EXPECT_THROW(parse_config("[experiment]\nm0_deltas = 0.1\n"), ConfigurationError);
  EXPECT_THROW(parse_config("seed = 1\n"), ConfigurationError);
  EXPECT_THROW(parse_config("[mc\n"), ConfigurationError);
  EXPECT_THROW(load_config("/nonexistent/file.conf"), ConfigurationError);
}

TEST(Config, WideWindowFailsNamedConstraint) {
  ExperimentConfig c;
  c.window.delta1 = 0.5;
  c.window.J = {0.4, 0.6};
  EXPECT_TRUE(has_failure(validate(c), "delta1^{1/2} < min{inf J - c2, (C2 - sup J)/2}"));
}

TEST(Config, SmallP0Fails) {
  ExperimentConfig c;
  c.seminorm.p0 = 5;
  EXPECT_TRUE(has_failure(validate(c), "p0 - 2 > gamma0"));
}

TEST(Config, UnstableGridFails) {
  ExperimentConfig c;
  c.grid = {1.0, 100, 64};
  EXPECT_TRUE(has_failure(validate(c), "dt <= dx^2/2"));
}

TEST(Config, DensityRefusesTooFewPaths) {
  ExperimentConfig c;
  c.experiment = ExperimentKind::DensityF;
  c.mc.n_paths = 10;
  EXPECT_TRUE(has_failure(validate(c), "n_paths >= 100000"));
  c.mc.n_paths = 100000;
  EXPECT_TRUE(all_pass(validate(c)));
  c.experiment = ExperimentKind::DensityM0;
  c.mc.n_paths = 10;
  EXPECT_FALSE(all_pass(validate(c)));
}

TEST(Config, ScalingNeedsThreeDeltas) {
  ExperimentConfig c;
  c.experiment = ExperimentKind::WalshScaling;
  c.design.deltas = {0.01, 0.02};
  EXPECT_TRUE(has_failure(validate(c), "three delta1"));
}

TEST(Config, HashIsStable) {
  EXPECT_EQ(hex64(fnv1a("")), "cbf29ce484222325");
  EXPECT_EQ(fnv1a(serialize(ExperimentConfig{})), fnv1a(serialize(ExperimentConfig{})));
}
