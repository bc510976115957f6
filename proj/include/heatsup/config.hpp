#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "heatsup/field.hpp"
#include "heatsup/green.hpp"
#include "heatsup/seminorm.hpp"
#include "heatsup/suprema.hpp"

namespace heatsup {

enum class ExperimentKind {
  Identities,
  Regularity,
  GrrCheck,
  DensityF,
  DensityM0,
  Tails,
  WalshScaling,
  Gamma22Moments,
};
const char* to_string(ExperimentKind k);
ExperimentKind experiment_from_string(const std::string& s);

struct M0Delta {
  double delta1 = 0.0;
  double delta2 = 0.0;
  bool operator==(const M0Delta&) const = default;
};

struct McConfig {
  std::uint64_t n_paths = 10000;
  std::uint64_t seed = 20240901;
  std::uint64_t batch_size = 1000;
  unsigned threads = 1;
  bool operator==(const McConfig&) const = default;
};

/// Sampling designs and verification settings shared by the experiments.
struct DesignConfig {
  std::vector<double> deltas{0.01, 0.02, 0.04};
  std::vector<M0Delta> m0_deltas{{0.0016, 0.02}, {0.0064, 0.04}, {0.0144, 0.06}};
  int f_steps = 128;           // uniform steps over [s0, s0 + delta1]
  int f_refine = 40;           // geometric points near s0
  int m0_time_steps = 32;
  int m0_time_refine = 8;
  int m0_space_steps = 16;
  int rect_time_steps = 36;    // Ybar window [0, delta^2]
  int rect_space_steps = 18;   // Ybar window [y0, y0 + delta]
  int walsh_cells = 128;
  int truncation = 1024;       // spectral modes for the regularity paths
  int bootstrap = 200;
  int lattice = 81;
  int gamma22_extra_rounds = 7;
  bool operator==(const DesignConfig&) const = default;
};

struct ExperimentConfig {
  BoundaryCondition bc = BoundaryCondition::Dirichlet;
  double T = 1.0;
  SpaceTimeGrid grid{1.0, 8192, 64};
  WindowConfig window;
  SeminormParams seminorm = SeminormParams::time_defaults();
  SeminormParams rect = SeminormParams::rect_defaults();
  McConfig mc;
  ExperimentKind experiment = ExperimentKind::Identities;
  DesignConfig design;
  std::string output_dir = "out";
  bool retain_raw = false;

  bool operator==(const ExperimentConfig& o) const;
};

/// Sectioned key = value text; '#' starts a comment.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string serialize(const ExperimentConfig& c);

/// Every geometric and seminorm constraint with its margin.
std::vector<ConstraintCheck> validate(const ExperimentConfig& c);
bool all_pass(const std::vector<ConstraintCheck>& checks);

/// FNV-1a 64-bit digest.
std::uint64_t fnv1a(const std::string& bytes);
std::string hex64(std::uint64_t v);

}  // namespace heatsup
