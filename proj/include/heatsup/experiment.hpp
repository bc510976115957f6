#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "heatsup/config.hpp"
#include "heatsup/field.hpp"
#include "heatsup/suprema.hpp"

namespace heatsup {

inline constexpr const char* kCodeVersion = "heatsup 1.0.0";

struct CheckResult {
  std::string name;
  double value = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

struct RunOptions {
  std::string out_dir;  // overrides the configured directory when set
  bool resume = false;
  std::ostream* log = nullptr;
};

struct BatchRecord {
  std::string tag;
  std::uint64_t index = 0;
  std::uint64_t first = 0;
  std::uint64_t count = 0;
  std::string checksum;
  bool resumed = false;
};

struct ExperimentOutcome {
  ExperimentKind kind = ExperimentKind::Identities;
  std::vector<CheckResult> checks;
  std::vector<std::string> artifacts;  // relative to the output directory
  std::vector<BatchRecord> batches;
  double wall_seconds = 0.0;
  bool pass() const;
};

/// Runs the configured experiment and writes its artifacts, results.json and
/// manifest.json. Throws ConfigurationError for invalid configurations.
ExperimentOutcome run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// 0 when every check passes, 1 otherwise.
int exit_code(const ExperimentOutcome& outcome);

/// Reads results.json of a finished run.
std::vector<CheckResult> read_results(const std::filesystem::path& dir);

// ---------------------------------------------------------------------------
// Sampling designs of the Monte Carlo experiments.

/// Column y0 on the F window, anchored at (s0, y0); paths without a positive
/// increment are extended towards s0.
class FWindowDesign {
 public:
  FWindowDesign(const ExperimentConfig& c, double delta1);
  FieldPath sample(std::uint64_t seed, std::uint64_t path) const;
  const WindowConfig& window() const { return w_; }
  const GaussianWindowSampler& sampler() const { return sampler_; }

 private:
  WindowConfig w_;
  GaussianWindowSampler sampler_;
};

/// [0, delta1] x [y0, y0 + delta2] for M0.
class M0WindowDesign {
 public:
  M0WindowDesign(const ExperimentConfig& c, M0Delta d);
  FieldPath sample(std::uint64_t seed, std::uint64_t path) const;
  const WindowConfig& window() const { return w_; }

 private:
  WindowConfig w_;
  GaussianWindowSampler sampler_;
};

/// [0, delta^2] x [y0, y0 + delta] for the rectangle functional Ybar.
class RectWindowDesign {
 public:
  RectWindowDesign(const ExperimentConfig& c, M0Delta d);
  FieldPath sample(std::uint64_t seed, std::uint64_t path) const;
  const WindowConfig& window() const { return w_; }

 private:
  WindowConfig w_;
  GaussianWindowSampler sampler_;
};

/// Offsets from s0 and increments at y0 of an F-window path, extended towards
/// zero by `extra_rounds` ladder rounds.
struct OffsetTrace {
  std::vector<double> offset;
  std::vector<double> ubar;
};
OffsetTrace offset_trace(const FieldPath& path, const WindowConfig& w, std::uint64_t seed,
                         std::uint64_t path_index, int extra_rounds);

struct Gamma22Sample {
  double gamma = 0.0;
  int points_inside = 0;  // ladder points with psi(Y) = 1
  int rounds = 0;
};
/// gamma22 on an offset trace, refining until at least `min_inside` points
/// fall in the region where psi(Y) = 1 or `max_rounds` is reached.
Gamma22Sample gamma22_resolved(const FieldPath& path, const WindowConfig& w, const SeminormParams& sp,
                               const CutoffSpec& cut, std::uint64_t seed, std::uint64_t path_index,
                               int first_rounds, int max_rounds, int min_inside = 4);

/// One draw of the Walsh experiment: the solution on [s0, s0 + delta1] started
/// from an exact draw of u(s0, .), with the noise that drove it.
struct WalshDraw {
  FieldPath path;      // finite-difference steps
  NoiseField noise;
  std::size_t substeps = 1;
};
WalshDraw walsh_draw(const ExperimentConfig& c, const GaussianWindowSampler& initial, double delta1,
                     std::uint64_t seed, std::uint64_t path);
GaussianWindowSampler walsh_initial_sampler(const ExperimentConfig& c);

}  // namespace heatsup
