#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "heatsup/field.hpp"
#include "heatsup/suprema.hpp"

namespace heatsup {

struct SeminormParams {
  int p0 = 7;
  double gamma0 = 4.5;
  double theta = 0.25;
  double gamma1 = 0.018;
  double gamma2 = 0.0265;

  double theta1() const { return 0.5 - theta; }
  double theta2() const { return 2.0 * theta; }

  static SeminormParams time_defaults() { return {7, 4.5, 0.25, 0.018, 0.0265}; }
  static SeminormParams rect_defaults() { return {32, 5.0, 0.25, 0.018, 0.0265}; }
};

/// Admissibility of (p0, gamma0) and, for rectangle experiments, of theta,
/// gamma1, gamma2.
std::vector<ConstraintCheck> check_seminorm(const SeminormParams& sp, bool rectangle);

/// Running sum of positive terms given by their logarithms.
class LogSum {
 public:
  void add(double log_term);
  void add(const LogSum& other) { add(other.log()); }
  double log() const;
  bool empty() const { return max_ == -std::numeric_limits<double>::infinity(); }

 private:
  double max_ = -std::numeric_limits<double>::infinity();
  double scaled_ = 0.0;
};

/// Trapezoidal double sum for the (p, gamma) Hoelder seminorm of samples of f
/// on a uniform grid of step h; diagonal terms excluded.
double holder_seminorm(const std::vector<double>& f, double h, int p, double gamma);

/// log-valued trace r -> Y_r (or Ybar_r) on grid times.
struct SeminormTrace {
  std::vector<double> r;
  std::vector<double> log_value;
  std::vector<double> log_y0;  // rectangle traces only
  std::vector<double> log_y1;  // rectangle traces only
  std::size_t dropped = 0;     // terms below the smallest normal double

  double value(std::size_t k) const;
};

/// Y over [times[first], times[k]] for every k in [first, last], from samples
/// of one time series.
SeminormTrace y_trace(const std::vector<double>& times, const std::vector<double>& u,
                      std::size_t first, std::size_t last, const SeminormParams& sp);

/// Y_r trace on [s0, s0 + delta1] at y0.
SeminormTrace Y_trace(const FieldPath& path, const WindowConfig& w, const SeminormParams& sp);
double Y_r(const FieldPath& path, const WindowConfig& w, double r, const SeminormParams& sp);

/// Ybar trace on [0, Delta_bullet] over [y0, y0 + Delta_star]; the path must
/// cover that rectangle.
SeminormTrace Ybar_trace(const FieldPath& path, const WindowConfig& w, const SeminormParams& sp);
double Ybar_r(const FieldPath& path, const WindowConfig& w, double r, const SeminormParams& sp);

/// Cutoff threshold kept in log form; R may be far below the double range.
struct CutoffSpec {
  double log_c_grr = 0.0;
  double log_R = 0.0;
};

/// log of the largest c for which the supremum-control implications follow
/// from the explicit GRR constants.
double log_c_grr_time(const SeminormParams& sp);
double log_c_grr_rect(const SeminormParams& sp);

/// R = c a^{2p0} delta1^{-(gamma0-4)/2}
CutoffSpec cutoff_time(const SeminormParams& sp, double a, double delta1);
/// Rbar = c abar^{2p0} delta^{4-gamma0}
CutoffSpec cutoff_rect(const SeminormParams& sp, double abar, double delta);

/// psi(x) = psi0(x/R): 1 below R/2, 0 above R.
double psi(double x, double R);
double psi_log(double log_x, double log_R);
double psi_derivative(double x, double R);
/// c with |psi'| <= c / R.
double psi_slope_constant();

enum class Verdict { Pass, Vacuous, Fail };
const char* to_string(Verdict v);

Verdict grr_implication_check(const FieldPath& path, const WindowConfig& w, double r,
                              const SeminormParams& sp, const CutoffSpec& cut, double a);
Verdict grr_implication_check_rect(const FieldPath& path, const WindowConfig& w, double r,
                                   const SeminormParams& sp, const CutoffSpec& cut, double abar);

/// Counts over every grid r of one path.
struct GrrTally {
  std::size_t pass = 0, vacuous = 0, fail = 0;
  std::size_t premise_true = 0;       // Y_r <= R
  std::size_t conclusion_false = 0;   // sup > a
  std::size_t contrapositive_violations = 0;  // sup > a while Y_r <= R
  void merge(const GrrTally& o);
};

GrrTally grr_tally_time(const FieldPath& path, const WindowConfig& w, const SeminormTrace& trace,
                        const CutoffSpec& cut, double a);
GrrTally grr_tally_rect(const FieldPath& path, const WindowConfig& w, const SeminormTrace& trace,
                        const CutoffSpec& cut, double abar);

/// Trapezoid of psi(Y_r) over the trace.
double gamma22(const SeminormTrace& trace, const CutoffSpec& cut);
double gamma22(const FieldPath& path, const WindowConfig& w, const SeminormParams& sp,
               const CutoffSpec& cut);

}  // namespace heatsup
