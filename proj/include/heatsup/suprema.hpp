#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "heatsup/field.hpp"
#include "heatsup/rng.hpp"

namespace heatsup {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return v >= lo && v <= hi; }
};

struct WindowConfig {
  double T = 1.0;
  double s0 = 0.4;
  double y0 = 0.5;
  double delta1 = 0.01;
  double delta2 = 0.05;
  Interval I{0.2, 0.8};
  Interval J{0.4, 0.58};
  double c1 = 0.1, C1 = 0.9;
  double c2 = 0.05, C2 = 0.99;
  double Cbar1 = 0.5;

  double delta() const;         // delta1^{1/2} + delta2
  double delta_bullet() const;  // delta^2
  double delta_star() const;    // delta ^ (1 - y0)
};

struct ConstraintCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
  double margin() const { return rhs - lhs; }
};

/// Geometric conditions for the (F1,F2) experiments.
std::vector<ConstraintCheck> check_window_F(const WindowConfig& w);
/// Geometric conditions for the M0 experiments.
std::vector<ConstraintCheck> check_window_M0(const WindowConfig& w);

struct SupStatistics {
  std::uint64_t seed = 0;
  double F1 = 0.0, F2 = 0.0, S = 0.0;
  double M0 = 0.0, Sbar = 0.0, Xbar = 0.0;
};

void write_csv_header(std::ostream& os, const SupStatistics*);
void write_csv_row(std::ostream& os, const SupStatistics& s);

/// How a requested coordinate was matched to an axis node.
struct Snap {
  double requested = 0.0;
  double snapped = 0.0;
  std::size_t index = 0;
  double shift() const { return snapped - requested; }
};

enum class SnapPolicy { Nearest, Exact };

Snap snap_to_axis(const std::vector<double>& axis, double v, SnapPolicy policy = SnapPolicy::Nearest);

struct FResult {
  double F1 = 0.0, F2 = 0.0, S = 0.0;
  std::size_t s0_index = 0, end_index = 0, y0_index = 0, argmax_index = 0;
  std::vector<Snap> snaps;
};

struct M0Result {
  double M0 = 0.0, Sbar = 0.0, Xbar = 0.0;
  std::size_t t_end = 0, x_begin = 0, x_end = 0;
  std::vector<Snap> snaps;
};

FResult compute_F(const FieldPath& path, const WindowConfig& w, SnapPolicy policy = SnapPolicy::Nearest);
M0Result compute_M0(const FieldPath& path, const WindowConfig& w, SnapPolicy policy = SnapPolicy::Nearest);

/// Increment views of a path around (s0, y0).
struct IncrementFields {
  std::vector<double> times;
  std::vector<double> ubar;        // u(t,y0) - u(s0,y0) for every grid time
  std::vector<double> positions;
  std::vector<double> ucheck;      // u(t,x) - u(t,y0), row-major
  const FieldPath* source = nullptr;

  /// u(t_i,x_j) + u(t_k,x_l) - u(t_i,x_l) - u(t_k,x_j)
  double rect(std::size_t i, std::size_t k, std::size_t j, std::size_t l) const;
};

IncrementFields increment_fields(const FieldPath& path, const WindowConfig& w);

/// Number of grid times whose ubar lies within `tol` of the window maximum.
std::size_t argmax_multiplicity(const FieldPath& path, const WindowConfig& w, double tol = 1e-12);

// ---------------------------------------------------------------------------
// Window designs used by the Monte Carlo experiments.

/// Time axis for F: s0, a uniform grid of `steps` intervals over [s0, s0+delta1]
/// and `refine` geometric points s0 + (delta1/steps) 2^{-k/2} near s0.
std::vector<double> f_window_times(const WindowConfig& w, int steps, int refine);

/// Time axis for M0: 0, a uniform grid over [0, delta1] and geometric points near 0.
std::vector<double> m0_window_times(const WindowConfig& w, int steps, int refine);
std::vector<double> m0_window_positions(const WindowConfig& w, int steps);

struct LadderPoint {
  double offset = 0.0;
  double value = 0.0;
};

/// Conditional extension of a geometric ladder of increments towards offset
/// zero, using the H = 1/4 fractional Brownian limit of the time increments
/// (variogram sqrt(h/pi)). The ladder holds the 16 finest offsets, coarsest
/// first, with ratio 2^{-1/2}; each round draws 8 finer points.
class LadderRefiner {
 public:
  static constexpr int K = 16;
  static constexpr int M = 8;
  LadderRefiner(std::vector<double> offsets, std::vector<double> values);
  std::vector<LadderPoint> next(const NormalStream& normals, std::uint64_t round);

 private:
  std::vector<double> off_, val_;
};

/// Ladder made of the 16 path times nearest above s0 at column y0.
LadderRefiner ladder_from_path(const FieldPath& path, std::size_t s0_index, std::size_t y0_index);

/// When every sampled increment in the F window is <= 0, extend the path
/// towards s0 with a self-similar local refinement until a positive increment
/// appears. Returns the number of added times (0 if none were needed).
std::size_t refine_until_positive(FieldPath& path, const WindowConfig& w, std::uint64_t seed,
                                  std::uint64_t path_index, int max_rounds = 400);

}  // namespace heatsup
