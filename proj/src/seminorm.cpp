#include "heatsup/seminorm.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>

#include "heatsup/bump.hpp"
#include "heatsup/errors.hpp"

namespace heatsup {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const double kLogMinNormal = std::log(DBL_MIN);

ConstraintCheck lt(std::string name, double lhs, double rhs) {
  return {std::move(name), lhs, rhs, lhs < rhs};
}

// trapezoid weight of node i on the sub-axis [first, last]
double trap_weight(const std::vector<double>& t, std::size_t i, std::size_t first, std::size_t last) {
  const double left = i > first ? t[i] - t[i - 1] : 0.0;
  const double right = i < last ? t[i + 1] - t[i] : 0.0;
  return 0.5 * (left + right);
}
}  // namespace

std::vector<ConstraintCheck> check_seminorm(const SeminormParams& sp, bool rectangle) {
  std::vector<ConstraintCheck> out;
  out.push_back(lt("p0 >= 1", 0.0, sp.p0));
  out.push_back(lt("p0 - 2 > gamma0", sp.gamma0, sp.p0 - 2.0));
  out.push_back(lt("gamma0 > 4", 4.0, sp.gamma0));
  if (!rectangle) return out;
  const double q = 1.0 / (2.0 * sp.p0);
  out.push_back(lt("0 < theta", 0.0, sp.theta));
  out.push_back(lt("theta < 1/2", sp.theta, 0.5));
  out.push_back(lt("1/(2p0) < gamma1", q, sp.gamma1));
  out.push_back(lt("gamma1 < theta1/2 - 1/(2p0)", sp.gamma1, sp.theta1() / 2.0 - q));
  out.push_back(lt("1/(2p0) < gamma2", q, sp.gamma2));
  out.push_back(lt("gamma2 < theta2/2 - 1/(2p0)", sp.gamma2, sp.theta2() / 2.0 - q));
  const double lhs = 2.0 * sp.gamma1 + sp.gamma2;
  const double rhs = (sp.gamma0 - 1.0) * q;
  out.push_back({"2 gamma1 + gamma2 = (gamma0 - 1)/(2p0)", std::abs(lhs - rhs), 1e-12,
                 std::abs(lhs - rhs) < 1e-12});
  return out;
}

void LogSum::add(double x) {
  if (x == kNegInf) return;
  if (x > max_) {
    scaled_ = scaled_ * std::exp(max_ - x) + 1.0;
    max_ = x;
  } else {
    scaled_ += std::exp(x - max_);
  }
}

double LogSum::log() const { return empty() ? kNegInf : max_ + std::log(scaled_); }

double SeminormTrace::value(std::size_t k) const { return std::exp(log_value[k]); }

double holder_seminorm(const std::vector<double>& f, double h, int p, double gamma) {
  const std::size_t n = f.size();
  if (n < 2) return 0.0;
  const double expo = 1.0 + 2.0 * p * gamma;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double wj = (j + 1 == n) ? 0.5 : 1.0;
      const double d = std::abs(f[i] - f[j]);
      if (d == 0.0) continue;
      sum += 2.0 * wi * wj * std::pow(d, 2.0 * p) / std::pow((j - i) * h, expo);
    }
  }
  return std::pow(sum * h * h, 1.0 / (2.0 * p));
}

namespace {

// Generic accumulation of r -> 2 * sum_{first<=j<i<=k} w_i w_j T(i,j) where
// log T is supplied by `log_term` (may return -inf).
template <class LogTerm>
std::vector<double> accumulate_trace(const std::vector<double>& t, std::size_t first,
                                     std::size_t last, LogTerm log_term) {
  std::vector<double> out(last - first + 1, kNegInf);
  LogSum q;  // sum_{first<i<k} w~_i P_i
  const double log2 = std::log(2.0);
  for (std::size_t k = first + 1; k <= last; ++k) {
    LogSum pk;
    for (std::size_t j = first; j < k; ++j) {
      const double lt = log_term(k, j);
      if (lt == kNegInf) continue;
      pk.add(std::log(trap_weight(t, j, first, k)) + lt);
    }
    // pk used weights relative to the sub-axis ending at k: for j < k these
    // are the interior weights, matching w~_j
    LogSum yk = q;
    yk.add(std::log(0.5 * (t[k] - t[k - 1])) + pk.log());
    out[k - first] = log2 + yk.log();
    if (k < last) q.add(std::log(trap_weight(t, k, first, last)) + pk.log());
  }
  return out;
}

}  // namespace

SeminormTrace y_trace(const std::vector<double>& times, const std::vector<double>& u,
                      std::size_t first, std::size_t last, const SeminormParams& sp) {
  if (last >= times.size() || first > last) throw PreconditionError("invalid trace range");
  SeminormTrace tr;
  tr.r.assign(times.begin() + first, times.begin() + last + 1);
  const double two_p = 2.0 * sp.p0;
  const double half_g = sp.gamma0 / 2.0;
  std::size_t dropped = 0;
  tr.log_value = accumulate_trace(times, first, last, [&](std::size_t i, std::size_t j) {
    const double lu = two_p * std::log(std::abs(u[i] - u[j]));
    if (!(lu >= kLogMinNormal)) {
      ++dropped;
      return kNegInf;
    }
    return lu - half_g * std::log(times[i] - times[j]);
  });
  tr.dropped = dropped;
  return tr;
}

namespace {
std::vector<double> column(const FieldPath& p, std::size_t j) {
  std::vector<double> c(p.rows());
  for (std::size_t i = 0; i < p.rows(); ++i) c[i] = p(i, j);
  return c;
}
}  // namespace

SeminormTrace Y_trace(const FieldPath& p, const WindowConfig& w, const SeminormParams& sp) {
  const FResult f = compute_F(p, w);
  return y_trace(p.times, column(p, f.y0_index), f.s0_index, f.end_index, sp);
}

double Y_r(const FieldPath& p, const WindowConfig& w, double r, const SeminormParams& sp) {
  if (r < w.s0 || r > w.s0 + w.delta1 + 1e-12) throw PreconditionError("r outside [s0, s0+delta1]");
  const FResult f = compute_F(p, w);
  const std::size_t k = snap_to_axis(p.times, r).index;
  const auto tr = y_trace(p.times, column(p, f.y0_index), f.s0_index, k, sp);
  return tr.value(tr.r.size() - 1);
}

SeminormTrace Ybar_trace(const FieldPath& p, const WindowConfig& w, const SeminormParams& sp) {
  const std::size_t i0 = snap_to_axis(p.times, 0.0).index;
  const std::size_t i1 = snap_to_axis(p.times, w.delta_bullet()).index;
  const std::size_t j0 = snap_to_axis(p.positions, w.y0).index;
  const std::size_t j1 = snap_to_axis(p.positions, w.y0 + w.delta_star()).index;

  SeminormTrace tr = y_trace(p.times, column(p, j0), i0, i1, sp);
  tr.log_y0 = tr.log_value;

  const double two_p = 2.0 * sp.p0;
  const double et = 1.0 + two_p * sp.gamma1;
  const double ex = 1.0 + two_p * sp.gamma2;
  // spatial pair weights 2 w_x w_y |x-y|^{-ex}, x<y, in log form
  struct XPair {
    std::size_t a, b;
    double log_w;
  };
  std::vector<XPair> pairs;
  for (std::size_t a = j0; a <= j1; ++a)
    for (std::size_t b = a + 1; b <= j1; ++b)
      pairs.push_back({a, b,
                       std::log(2.0 * trap_weight(p.positions, a, j0, j1) *
                                trap_weight(p.positions, b, j0, j1)) -
                           ex * std::log(p.positions[b] - p.positions[a])});
  std::size_t dropped = tr.dropped;
  const std::size_t nc = p.cols();
  tr.log_y1 = accumulate_trace(p.times, i0, i1, [&](std::size_t i, std::size_t k) {
    const double* ri = &p.values[i * nc];
    const double* rk = &p.values[k * nc];
    LogSum s;
    for (const auto& xp : pairs) {
      const double rect = ri[xp.a] + rk[xp.b] - ri[xp.b] - rk[xp.a];
      const double lr = two_p * std::log(std::abs(rect));
      if (!(lr >= kLogMinNormal)) {
        ++dropped;
        continue;
      }
      s.add(lr + xp.log_w);
    }
    if (s.empty()) return kNegInf;
    return s.log() - et * std::log(p.times[i] - p.times[k]);
  });
  tr.dropped = dropped;
  for (std::size_t k = 0; k < tr.r.size(); ++k) {
    LogSum s;
    s.add(tr.log_y0[k]);
    s.add(tr.log_y1[k]);
    tr.log_value[k] = s.log();
  }
  return tr;
}

double Ybar_r(const FieldPath& p, const WindowConfig& w, double r, const SeminormParams& sp) {
  const auto tr = Ybar_trace(p, w, sp);
  const std::size_t k = snap_to_axis(tr.r, r).index;
  return tr.value(k);
}

// GRR chain: for f continuous on an interval with
//   int int (|f(t)-f(s)| / p(rho(t,s)))^{2p0} <= Y,
// |f(t)-f(s)| <= 10 int_0^{2 rho} Y^{1/2p0} mu(B(s,u/4))^{-1/p0} u^{q-1} du.
double log_c_grr_time(const SeminormParams& sp) {
  const double p0 = sp.p0;
  const double e = (sp.gamma0 - 4.0) / (2.0 * p0);
  // rho = |t-s|^{1/2}: mu(B) >= u^2/16 on the range of integration
  const double logK = std::log(10.0) + std::log(16.0) / p0 + e * std::log(2.0) - std::log(e);
  return -2.0 * p0 * logK;
}

double log_c_grr_rect(const SeminormParams& sp) {
  const double p0 = sp.p0;
  const double k0 = -log_c_grr_time(sp) / (2.0 * p0);
  // rho = |t-s| (resp. |x-y|): mu(B) >= u/4
  const auto k_lin = [p0](double g) {
    const double e = (2.0 * p0 * g - 1.0) / (2.0 * p0);
    return std::log(10.0) + std::log(4.0) / p0 + e * std::log(2.0) - std::log(e);
  };
  const double k12 = k_lin(sp.gamma1) + k_lin(sp.gamma2);
  const double log2 = std::log(2.0);
  return -2.0 * p0 * std::max(log2 + k0, log2 + k12);
}

CutoffSpec cutoff_time(const SeminormParams& sp, double a, double delta1) {
  CutoffSpec c;
  c.log_c_grr = log_c_grr_time(sp);
  c.log_R = c.log_c_grr + 2.0 * sp.p0 * std::log(a) - 0.5 * (sp.gamma0 - 4.0) * std::log(delta1);
  return c;
}

CutoffSpec cutoff_rect(const SeminormParams& sp, double abar, double delta) {
  CutoffSpec c;
  c.log_c_grr = log_c_grr_rect(sp);
  c.log_R = c.log_c_grr + 2.0 * sp.p0 * std::log(abar) + (4.0 - sp.gamma0) * std::log(delta);
  return c;
}

double psi(double x, double R) {
  if (!(R > 0.0)) throw PreconditionError("psi requires R > 0");
  const double s = x / R;
  if (s <= 0.5) return 1.0;
  if (s >= 1.0) return 0.0;
  return 1.0 - smoothstep(2.0 * s - 1.0).v;
}

double psi_log(double log_x, double log_R) {
  if (log_x == kNegInf) return 1.0;
  const double d = log_x - log_R;
  if (d <= -std::log(2.0)) return 1.0;
  if (d >= 0.0) return 0.0;
  return 1.0 - smoothstep(2.0 * std::exp(d) - 1.0).v;
}

double psi_derivative(double x, double R) {
  const double s = x / R;
  if (s <= 0.5 || s >= 1.0) return 0.0;
  return -2.0 * smoothstep(2.0 * s - 1.0).d1 / R;
}

double psi_slope_constant() { return 2.0 * smoothstep_max_slope(); }

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Vacuous: return "VACUOUS";
    case Verdict::Fail: return "FAIL";
  }
  return "?";
}

void GrrTally::merge(const GrrTally& o) {
  pass += o.pass;
  vacuous += o.vacuous;
  fail += o.fail;
  premise_true += o.premise_true;
  conclusion_false += o.conclusion_false;
  contrapositive_violations += o.contrapositive_violations;
}

namespace {
void tally(GrrTally& t, bool premise, bool conclusion) {
  if (premise) ++t.premise_true;
  if (!conclusion) ++t.conclusion_false;
  if (!conclusion && premise) ++t.contrapositive_violations;
  if (!premise) ++t.vacuous;
  else if (conclusion) ++t.pass;
  else ++t.fail;
}
}  // namespace

GrrTally grr_tally_time(const FieldPath& p, const WindowConfig& w, const SeminormTrace& trace,
                        const CutoffSpec& cut, double a) {
  const FResult f = compute_F(p, w);
  GrrTally t;
  double sup = 0.0;
  for (std::size_t k = 0; k < trace.r.size(); ++k) {
    const std::size_t i = f.s0_index + k;
    sup = std::max(sup, std::abs(p(i, f.y0_index) - f.F1));
    tally(t, trace.log_value[k] <= cut.log_R, sup <= a);
  }
  return t;
}

GrrTally grr_tally_rect(const FieldPath& p, const WindowConfig& w, const SeminormTrace& trace,
                        const CutoffSpec& cut, double abar) {
  const std::size_t i0 = snap_to_axis(p.times, 0.0).index;
  const std::size_t j0 = snap_to_axis(p.positions, w.y0).index;
  const std::size_t j1 = snap_to_axis(p.positions, w.y0 + w.delta2).index;
  GrrTally t;
  double sup = 0.0;
  for (std::size_t k = 0; k < trace.r.size(); ++k) {
    const std::size_t i = i0 + k;
    for (std::size_t j = j0; j <= j1; ++j) sup = std::max(sup, std::abs(p(i, j)));
    tally(t, trace.log_value[k] <= cut.log_R, sup <= abar);
  }
  return t;
}

Verdict grr_implication_check(const FieldPath& p, const WindowConfig& w, double r,
                              const SeminormParams& sp, const CutoffSpec& cut, double a) {
  const FResult f = compute_F(p, w);
  const std::size_t k = snap_to_axis(p.times, r).index;
  if (k < f.s0_index) throw PreconditionError("r before s0");
  const auto tr = y_trace(p.times, column(p, f.y0_index), f.s0_index, k, sp);
  if (tr.log_value.back() > cut.log_R) return Verdict::Vacuous;
  double sup = 0.0;
  for (std::size_t i = f.s0_index; i <= k; ++i) sup = std::max(sup, std::abs(p(i, f.y0_index) - f.F1));
  return sup <= a ? Verdict::Pass : Verdict::Fail;
}

Verdict grr_implication_check_rect(const FieldPath& p, const WindowConfig& w, double r,
                                   const SeminormParams& sp, const CutoffSpec& cut, double abar) {
  const auto tr = Ybar_trace(p, w, sp);
  const std::size_t k = snap_to_axis(tr.r, r).index;
  if (tr.log_value[k] > cut.log_R) return Verdict::Vacuous;
  const std::size_t i0 = snap_to_axis(p.times, 0.0).index;
  const std::size_t j0 = snap_to_axis(p.positions, w.y0).index;
  const std::size_t j1 = snap_to_axis(p.positions, w.y0 + w.delta2).index;
  double sup = 0.0;
  for (std::size_t i = i0; i <= i0 + k; ++i)
    for (std::size_t j = j0; j <= j1; ++j) sup = std::max(sup, std::abs(p(i, j)));
  return sup <= abar ? Verdict::Pass : Verdict::Fail;
}

double gamma22(const SeminormTrace& tr, const CutoffSpec& cut) {
  double g = 0.0;
  for (std::size_t k = 1; k < tr.r.size(); ++k) {
    const double a = psi_log(tr.log_value[k - 1], cut.log_R);
    const double b = psi_log(tr.log_value[k], cut.log_R);
    g += 0.5 * (a + b) * (tr.r[k] - tr.r[k - 1]);
  }
  return g;
}

double gamma22(const FieldPath& p, const WindowConfig& w, const SeminormParams& sp,
               const CutoffSpec& cut) {
  return gamma22(Y_trace(p, w, sp), cut);
}

}  // namespace heatsup
