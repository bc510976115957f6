#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "heatsup/green.hpp"

namespace heatsup {

struct SpaceTimeGrid {
  double t_max = 1.0;
  int nt = 1000;
  int nx = 64;

  double dt() const { return t_max / nt; }
  double dx() const { return 1.0 / nx; }
  bool fd_stable() const { return dt() <= 0.5 * dx() * dx() * (1.0 + 1e-12); }
};

enum class SamplerKind : std::uint8_t { Spectral = 0, FiniteDifference = 1, GaussianWindow = 2 };
const char* to_string(SamplerKind s);

/// One sampled solution on a tensor grid times x positions. Axes need not be
/// uniform (window samplers refine near an anchor).
struct FieldPath {
  std::vector<double> times;
  std::vector<double> positions;
  std::vector<double> values;  // row-major, rows = times
  BoundaryCondition bc = BoundaryCondition::Dirichlet;
  std::uint64_t seed = 0;
  std::uint64_t path_index = 0;
  SamplerKind sampler = SamplerKind::Spectral;
  int truncation = 0;

  std::size_t rows() const { return times.size(); }
  std::size_t cols() const { return positions.size(); }
  double& operator()(std::size_t i, std::size_t j) { return values[i * cols() + j]; }
  double operator()(std::size_t i, std::size_t j) const { return values[i * cols() + j]; }

  static FieldPath zeros(std::vector<double> times, std::vector<double> positions,
                         BoundaryCondition bc);
  static FieldPath zeros(const SpaceTimeGrid& grid, BoundaryCondition bc);

  /// Keep every `ft`-th time and `fx`-th position.
  FieldPath coarsen(std::size_t ft, std::size_t fx) const;
};

/// White-noise integrals over the control volume of each spatial node and
/// each time step: increments(n, j) ~ N(0, dt * volume_j).
struct NoiseField {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<double> positions;
  std::vector<double> volumes;
  std::size_t nt = 0;
  std::vector<double> increments;  // nt x positions.size()

  std::size_t cols() const { return positions.size(); }
  double operator()(std::size_t n, std::size_t j) const { return increments[n * cols() + j]; }
  double& operator()(std::size_t n, std::size_t j) { return increments[n * cols() + j]; }
  double time(std::size_t n) const { return t0 + dt * static_cast<double>(n); }
};

std::vector<double> uniform_axis(double lo, double hi, int steps);

/// Exact OU transition of one spectral coefficient.
double ou_transition(double a, double lambda, double delta, double xi);

inline constexpr int kDefaultTruncation = 512;

/// Spectral sampler on an arbitrary sorted time axis (starting at or after 0).
FieldPath sample_spectral(const std::vector<double>& times, const std::vector<double>& positions,
                          BoundaryCondition bc, std::uint64_t seed, int truncation = kDefaultTruncation,
                          std::uint64_t path = 0);
FieldPath sample_spectral(const SpaceTimeGrid& grid, BoundaryCondition bc, std::uint64_t seed,
                          int truncation = kDefaultTruncation, std::uint64_t path = 0);

/// Optional start of a finite-difference run at t0 from a given nodal state.
struct FdStart {
  double t0 = 0.0;
  std::vector<double> state;  // empty means zero
};

NoiseField draw_noise(const SpaceTimeGrid& grid, std::uint64_t seed, std::uint64_t path,
                      double t0 = 0.0);

/// Explicit Euler-Maruyama scheme driven by a given noise field.
FieldPath run_finite_difference(const SpaceTimeGrid& grid, BoundaryCondition bc,
                                const NoiseField& noise, const FdStart& start = {});

std::pair<FieldPath, NoiseField> sample_finite_difference(const SpaceTimeGrid& grid,
                                                          BoundaryCondition bc, std::uint64_t seed,
                                                          std::uint64_t path = 0,
                                                          const FdStart& start = {});

struct SpaceTimePoint {
  double t;
  double x;
};

/// Exact Gaussian sampler for the solution restricted to a finite tensor grid.
/// The covariance is assembled from `covariance` and factorised once; with an
/// anchor the factorised components are increments u(p) - u(anchor), which
/// keeps points clustered near the anchor well conditioned.
class GaussianWindowSampler {
 public:
  GaussianWindowSampler(std::vector<double> times, std::vector<double> positions,
                        BoundaryCondition bc, std::optional<SpaceTimePoint> anchor = std::nullopt,
                        const KernelParams& params = {});

  FieldPath sample(std::uint64_t seed, std::uint64_t path) const;
  std::size_t dimension() const { return static_cast<std::size_t>(factor_.rows()); }
  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& positions() const { return positions_; }
  /// Entries of the covariance of the factorised components.
  const Eigen::MatrixXd& component_covariance() const { return cov_; }

 private:
  std::vector<double> times_, positions_;
  BoundaryCondition bc_;
  std::optional<SpaceTimePoint> anchor_;
  std::vector<std::ptrdiff_t> slot_;  // grid cell -> component index or -1
  std::ptrdiff_t anchor_slot_ = -1;
  Eigen::MatrixXd cov_;
  Eigen::MatrixXd factor_;
  bool triangular_ = true;
};

// Binary layout: magic, version, bc, sampler, seed, path, truncation, rows,
// cols, times, positions, row-major values (little-endian f64).
void write_binary(std::ostream& os, const FieldPath& path);
FieldPath read_binary_field(std::istream& is);
void write_binary(std::ostream& os, const NoiseField& noise);
NoiseField read_binary_noise(std::istream& is);
void write_csv(std::ostream& os, const FieldPath& path);

}  // namespace heatsup
