#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace heatsup {

/// Gaussian product-kernel estimate on a lattice. Values are stored with the
/// last dimension varying fastest.
struct DensityEstimate {
  int dims = 1;
  std::vector<std::vector<double>> axes;  // one lattice axis per dimension
  std::vector<double> values;
  std::vector<double> stderr_values;      // bootstrap; empty when not requested
  std::vector<double> bandwidth;
  std::size_t n_samples = 0;

  double at(std::size_t i, std::size_t j = 0) const;
  double se(std::size_t i, std::size_t j = 0) const;
  double cell_area() const;
  double mass() const;
  double peak() const;
};

struct KdeOptions {
  std::vector<double> bandwidth;    // empty: Silverman per dimension
  double bandwidth_factor = 1.0;    // 0.5 undersmooths for upper-bound checks
  int lattice_points = 81;          // per dimension
  std::vector<std::vector<double>> axes;  // explicit lattice overrides the automatic one
  int bootstrap = 0;                // resamples for per-cell standard errors
  std::uint64_t seed = 0;
  int bin_refine = 4;               // binning cells per lattice cell
};

/// Silverman's rule of thumb for a product kernel in `dims` dimensions.
double silverman_bandwidth(const std::vector<double>& x, int dims);

/// `samples[d]` holds the d-th coordinate of every sample (1 or 2 dims).
/// Linear binning on a grid `bin_refine` times finer than the lattice.
DensityEstimate kde(const std::vector<std::vector<double>>& samples, const KdeOptions& opt = {});

inline constexpr std::size_t kMinKdeSamples = 100;

struct TailPoint {
  double threshold = 0.0;
  double p = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
};

/// Empirical survival P{X > z} with 95% Wilson intervals; when no sample
/// exceeds z the upper limit is the rule-of-three value 3/n.
std::vector<TailPoint> tail_probability(const std::vector<double>& samples,
                                        const std::vector<double>& thresholds);

/// Smallest c in [lo, hi] with pred(c) true, for pred monotone in c.
double fit_minimal_constant(const std::function<bool(double)>& pred, double lo = 1e-6,
                            double hi = 1e6, int iterations = 200);

enum class Theorem { ThmF, CorF2, ThmM0, TailF2, TailM0, EqMoment };
const char* to_string(Theorem t);

struct DeltaVerdict {
  double delta = 0.0;
  std::size_t checked = 0;
  std::size_t excluded = 0;     // lattice points outside the admissible region
  std::size_t violations = 0;
  double worst_ratio = 0.0;     // max (estimate - slack) / bound
  bool pass = true;
};

struct BoundReport {
  Theorem theorem = Theorem::ThmF;
  std::string variant;
  double fitted_c = 0.0;
  double reference_delta = 0.0;
  std::vector<DeltaVerdict> verdicts;
  double collapse_distance = 0.0;
  double collapse_peak = 0.0;
  double collapse_tolerance = 0.1;
  bool collapse_checked = false;

  bool bound_pass() const;
  bool collapse_pass() const { return !collapse_checked || collapse_distance <= collapse_tolerance * collapse_peak; }
  bool pass() const { return bound_pass() && collapse_pass(); }
};

inline constexpr int kBoundReportSchemaVersion = 1;
std::string to_json(const BoundReport& r);
BoundReport bound_report_from_json(const std::string& s);

inline constexpr std::size_t kMinBoundSamples = 100000;

/// Samples of one delta configuration of the (F1, F2) experiment.
struct FSampleSet {
  double delta1 = 0.0;
  std::vector<double> F1, F2;
};

struct MSampleSet {
  double delta1 = 0.0, delta2 = 0.0;
  std::vector<double> M0;
  double delta() const;
};

struct BoundCheckOptions {
  std::size_t min_samples = kMinBoundSamples;
  int bootstrap = 200;
  double slack_se = 2.0;
  int lattice_points = 81;
  double collapse_tolerance = 0.1;
  std::uint64_t seed = 0;
  bool refined = false;  // include the (|z1|^{-1/4} ^ 1) exp(-z1^2/c) factor
};

/// Fits c at the largest delta1, checks the remaining ones within the
/// bootstrap slack and measures the scaling collapse.
BoundReport verify_density_bound_F(const std::vector<FSampleSet>& sets,
                                   const BoundCheckOptions& opt = {});
BoundReport verify_density_bound_M0(const std::vector<MSampleSet>& sets,
                                    const BoundCheckOptions& opt = {});

/// Gaussian tail envelope P{X > z} <= c exp(-z^2 / (c scale^2)) fitted at the
/// largest scale; thresholds z = scale * zeta over the given zeta grid.
BoundReport verify_tail_bound(Theorem which, const std::vector<double>& scales,
                              const std::vector<std::vector<double>>& samples,
                              const std::vector<double>& zeta,
                              std::size_t min_samples = 1000);

struct ScalingFit {
  double slope = 0.0;
  double slope_se = 0.0;
  double intercept = 0.0;
  std::vector<double> x, y, y_se;  // log scale, log mean, its standard error
  bool within(double target, double tol) const { return std::abs(slope - target) <= tol; }
};

/// Weighted log-log regression of the sample means against the scale.
ScalingFit mean_sup_scaling(const std::vector<double>& scales,
                            const std::vector<std::vector<double>>& samples);
/// Plain least squares of log y on log x (deterministic inputs).
ScalingFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y,
                      const std::vector<double>& y_se = {});

/// Increment-variance exponents; `lag` against the mean squared increment.
struct ExponentRow {
  std::string name;
  double target = 0.0;
  double tolerance = 0.0;
  ScalingFit fit;
  double ci_half_width = 0.0;
  bool pass() const { return std::abs(fit.slope - target) <= tolerance; }
};

/// Squared increments grouped by lag: sq[k] holds the observations at lag[k].
ExponentRow exponent_from_increments(const std::string& name, const std::vector<double>& lag,
                                     const std::vector<std::vector<double>>& sq, double target,
                                     double tolerance);

struct RegularityReport {
  std::vector<ExponentRow> rows;
  double rect_constant_coarse = 0.0;
  double rect_constant_fine = 0.0;
  bool rect_pass = false;
  bool pass() const;
};

void write_csv(std::ostream& os, const DensityEstimate& d);
void write_csv(std::ostream& os, const std::vector<TailPoint>& tail);

}  // namespace heatsup
