#include "heatsup/suprema.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>

#include "heatsup/errors.hpp"
#include "heatsup/rng.hpp"

namespace heatsup {

double WindowConfig::delta() const { return std::sqrt(delta1) + delta2; }
double WindowConfig::delta_bullet() const { return delta() * delta(); }
double WindowConfig::delta_star() const { return std::min(delta(), 1.0 - y0); }

namespace {
ConstraintCheck less(std::string name, double lhs, double rhs) {
  return {std::move(name), lhs, rhs, lhs < rhs};
}
ConstraintCheck member(std::string name, double v, const Interval& in) {
  // encoded as distance outside the interval < 0+ ; margin = distance to nearest end
  const double inside = std::min(v - in.lo, in.hi - v);
  return {std::move(name), -inside, 0.0, inside >= 0.0};
}
std::vector<ConstraintCheck> bracket_checks(const WindowConfig& w) {
  return {
      less("0 < c1", 0.0, w.c1),
      less("c1 < inf I", w.c1, w.I.lo),
      less("sup I < C1", w.I.hi, w.C1),
      less("C1 < T + 1", w.C1, w.T + 1.0),
      less("I within ]0,T]", w.I.hi, w.T + 1e-15),
      less("0 < c2", 0.0, w.c2),
      less("c2 < inf J", w.c2, w.J.lo),
      less("sup J < C2", w.J.hi, w.C2),
      less("C2 < 1", w.C2, 1.0),
      member("y0 in J", w.y0, w.J),
  };
}
}  // namespace

std::vector<ConstraintCheck> check_window_F(const WindowConfig& w) {
  auto out = bracket_checks(w);
  out.push_back(less("0 < delta1 < 1", 0.0, w.delta1));
  out.push_back(less("delta1 < 1", w.delta1, 1.0));
  out.push_back(member("s0 in I", w.s0, w.I));
  out.push_back(member("s0 + delta1 in I", w.s0 + w.delta1, w.I));
  out.push_back(less("delta1^{1/2} < min{inf J - c2, (C2 - sup J)/2}", std::sqrt(w.delta1),
                     std::min(w.J.lo - w.c2, (w.C2 - w.J.hi) / 2.0)));
  return out;
}

std::vector<ConstraintCheck> check_window_M0(const WindowConfig& w) {
  auto out = bracket_checks(w);
  out.push_back(less("0 < Cbar1", 0.0, w.Cbar1));
  out.push_back(less("Cbar1 < T", w.Cbar1, w.T));
  out.push_back(less("0 < delta1", 0.0, w.delta1));
  out.push_back(less("0 < delta2", 0.0, w.delta2));
  out.push_back(member("y0 + delta2 in J", w.y0 + w.delta2, w.J));
  out.push_back(less("(delta1^{1/2} + delta2)^2 < Cbar1", w.delta_bullet(), w.Cbar1));
  out.push_back(less("delta1^{1/2} + delta2 < min{inf J - c2, (C2 - sup J)/2}", w.delta(),
                     std::min(w.J.lo - w.c2, (w.C2 - w.J.hi) / 2.0)));
  return out;
}

void write_csv_header(std::ostream& os, const SupStatistics*) {
  os << "seed,F1,F2,S,M0,Sbar,Xbar\n";
}

void write_csv_row(std::ostream& os, const SupStatistics& s) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%llu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                static_cast<unsigned long long>(s.seed), s.F1, s.F2, s.S, s.M0, s.Sbar, s.Xbar);
  os << buf;
}

Snap snap_to_axis(const std::vector<double>& axis, double v, SnapPolicy policy) {
  if (axis.empty()) throw ConfigurationError("empty axis");
  const double scale = std::max(1.0, std::abs(v));
  const double eps = 1e-12 * scale;
  if (v < axis.front() - eps || v > axis.back() + eps)
    throw ConfigurationError("window coordinate lies outside the sampled grid");
  const auto it = std::lower_bound(axis.begin(), axis.end(), v);
  std::size_t k = static_cast<std::size_t>(it - axis.begin());
  if (k == axis.size() || (k > 0 && v - axis[k - 1] <= axis[k] - v)) --k;
  Snap s{v, axis[k], k};
  if (policy == SnapPolicy::Exact && std::abs(s.shift()) > eps)
    throw ConfigurationError("window coordinate is off-grid and interpolation is disabled");
  return s;
}

FResult compute_F(const FieldPath& p, const WindowConfig& w, SnapPolicy policy) {
  FResult r;
  const Snap a = snap_to_axis(p.times, w.s0, policy);
  const Snap b = snap_to_axis(p.times, w.s0 + w.delta1, policy);
  const Snap y = snap_to_axis(p.positions, w.y0, policy);
  r.snaps = {a, b, y};
  r.s0_index = a.index;
  r.end_index = b.index;
  r.y0_index = y.index;
  r.F1 = p(a.index, y.index);
  r.argmax_index = a.index;
  double best = 0.0;
  for (std::size_t i = a.index + 1; i <= b.index; ++i) {
    const double v = p(i, y.index) - r.F1;
    if (v > best) {
      best = v;
      r.argmax_index = i;
    }
  }
  r.F2 = best;
  r.S = p.times[r.argmax_index];
  return r;
}

M0Result compute_M0(const FieldPath& p, const WindowConfig& w, SnapPolicy policy) {
  M0Result r;
  const Snap t0 = snap_to_axis(p.times, 0.0, policy);
  const Snap t1 = snap_to_axis(p.times, w.delta1, policy);
  const Snap x0 = snap_to_axis(p.positions, w.y0, policy);
  const Snap x1 = snap_to_axis(p.positions, w.y0 + w.delta2, policy);
  r.snaps = {t0, t1, x0, x1};
  r.t_end = t1.index;
  r.x_begin = x0.index;
  r.x_end = x1.index;
  std::size_t bi = t0.index, bj = x0.index;
  double best = p(bi, bj);
  for (std::size_t i = t0.index; i <= t1.index; ++i) {
    for (std::size_t j = x0.index; j <= x1.index; ++j) {
      if (p(i, j) > best) {
        best = p(i, j);
        bi = i;
        bj = j;
      }
    }
  }
  r.M0 = best;
  r.Sbar = p.times[bi];
  r.Xbar = p.positions[bj];
  return r;
}

double IncrementFields::rect(std::size_t i, std::size_t k, std::size_t j, std::size_t l) const {
  const FieldPath& p = *source;
  return p(i, j) + p(k, l) - p(i, l) - p(k, j);
}

IncrementFields increment_fields(const FieldPath& p, const WindowConfig& w) {
  IncrementFields f;
  const std::size_t i0 = snap_to_axis(p.times, w.s0).index;
  const std::size_t j0 = snap_to_axis(p.positions, w.y0).index;
  f.times = p.times;
  f.positions = p.positions;
  f.source = &p;
  f.ubar.resize(p.rows());
  f.ucheck.resize(p.values.size());
  for (std::size_t i = 0; i < p.rows(); ++i) {
    f.ubar[i] = p(i, j0) - p(i0, j0);
    for (std::size_t j = 0; j < p.cols(); ++j) f.ucheck[i * p.cols() + j] = p(i, j) - p(i, j0);
  }
  return f;
}

std::size_t argmax_multiplicity(const FieldPath& p, const WindowConfig& w, double tol) {
  const FResult r = compute_F(p, w);
  std::size_t count = 0;
  for (std::size_t i = r.s0_index; i <= r.end_index; ++i)
    if (std::abs(p(i, r.y0_index) - r.F1 - r.F2) <= tol) ++count;
  return count;
}

// ---------------------------------------------------------------------------

namespace {
constexpr double kRefineRatio = 0.70710678118654752440;  // 2^{-1/2}

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}
}  // namespace

std::vector<double> f_window_times(const WindowConfig& w, int steps, int refine) {
  std::vector<double> t;
  const double h = w.delta1 / steps;
  for (int k = 0; k <= steps; ++k) t.push_back(w.s0 + h * k);
  t.back() = w.s0 + w.delta1;
  double off = h;
  for (int k = 1; k <= refine; ++k) {
    off *= kRefineRatio;
    t.push_back(w.s0 + off);
  }
  return sorted_unique(std::move(t));
}

std::vector<double> m0_window_times(const WindowConfig& w, int steps, int refine) {
  std::vector<double> t;
  const double h = w.delta1 / steps;
  for (int k = 0; k <= steps; ++k) t.push_back(h * k);
  t.back() = w.delta1;
  double off = h;
  for (int k = 1; k <= refine; ++k) {
    off *= kRefineRatio;
    t.push_back(off);
  }
  return sorted_unique(std::move(t));
}

std::vector<double> m0_window_positions(const WindowConfig& w, int steps) {
  auto x = uniform_axis(w.y0, w.y0 + w.delta2, steps);
  return x;
}

namespace {
// Conditional law of an H = 1/4 fractional Brownian motion (variogram
// sqrt(h/pi), the small-scale limit of the time increments at a fixed
// interior point) at M finer geometric offsets given K coarser ones.
struct LadderModel {
  static constexpr int K = LadderRefiner::K;
  static constexpr int M = LadderRefiner::M;
  Eigen::MatrixXd gain;    // M x K
  Eigen::MatrixXd noise;   // M x M lower factor

  LadderModel() {
    std::vector<double> off(K + M);
    for (int k = 0; k < K + M; ++k) off[k] = std::pow(kRefineRatio, k);
    const auto v = [](double h) { return std::sqrt(std::abs(h) / std::numbers::pi); };
    Eigen::MatrixXd c(K + M, K + M);
    for (int a = 0; a < K + M; ++a)
      for (int b = 0; b < K + M; ++b) c(a, b) = 0.5 * (v(off[a]) + v(off[b]) - v(off[a] - off[b]));
    const Eigen::MatrixXd ckk = c.topLeftCorner(K, K);
    const Eigen::MatrixXd cnk = c.bottomLeftCorner(M, K);
    const Eigen::MatrixXd cnn = c.bottomRightCorner(M, M);
    Eigen::LDLT<Eigen::MatrixXd> solver(ckk);
    gain = solver.solve(cnk.transpose()).transpose();
    const Eigen::MatrixXd s = cnn - gain * cnk.transpose();
    noise = Eigen::LLT<Eigen::MatrixXd>(0.5 * (s + s.transpose())).matrixL();
  }
};

const LadderModel& ladder_model() {
  static const LadderModel model;
  return model;
}
}  // namespace

LadderRefiner::LadderRefiner(std::vector<double> offsets, std::vector<double> values)
    : off_(std::move(offsets)), val_(std::move(values)) {
  if (off_.size() != static_cast<std::size_t>(K) || val_.size() != off_.size())
    throw PreconditionError("ladder needs exactly 16 points");
  for (int k = 1; k < K; ++k)
    if (std::abs(off_[k] / off_[k - 1] - kRefineRatio) > 1e-6)
      throw PreconditionError("local refinement needs geometric times near s0");
}

std::vector<LadderPoint> LadderRefiner::next(const NormalStream& normals, std::uint64_t round) {
  const LadderModel& model = ladder_model();
  const double scale = std::pow(off_[0], 0.25);
  const Eigen::VectorXd known = Eigen::Map<const Eigen::VectorXd>(val_.data(), K);
  Eigen::VectorXd z(M);
  normals.fill(round * M, z.data(), M);
  const Eigen::VectorXd fresh = model.gain * known + scale * (model.noise * z);
  std::vector<LadderPoint> out(M);
  for (int m = 0; m < M; ++m) out[m] = {off_[0] * std::pow(kRefineRatio, K + m), fresh(m)};
  std::rotate(off_.begin(), off_.begin() + M, off_.end());
  std::rotate(val_.begin(), val_.begin() + M, val_.end());
  for (int m = 0; m < M; ++m) {
    off_[K - M + m] = out[m].offset;
    val_[K - M + m] = out[m].value;
  }
  return out;
}

LadderRefiner ladder_from_path(const FieldPath& p, std::size_t s0_index, std::size_t y0_index) {
  constexpr int K = LadderRefiner::K;
  if (s0_index + K >= p.rows()) throw PreconditionError("window too short for local refinement");
  std::vector<double> off(K), val(K);
  const double base = p(s0_index, y0_index);
  for (int k = 0; k < K; ++k) {
    const std::size_t row = s0_index + K - k;  // coarsest first
    off[k] = p.times[row] - p.times[s0_index];
    val[k] = p(row, y0_index) - base;
  }
  return LadderRefiner(std::move(off), std::move(val));
}

std::size_t refine_until_positive(FieldPath& p, const WindowConfig& w, std::uint64_t seed,
                                  std::uint64_t path_index, int max_rounds) {
  FResult f = compute_F(p, w);
  if (f.F2 > 0.0) return 0;
  const std::size_t i0 = f.s0_index, j0 = f.y0_index;
  LadderRefiner ladder = ladder_from_path(p, i0, j0);
  const NormalStream normals(seed, path_index, StreamTag::Refinement);
  std::vector<std::pair<double, double>> added;  // (offset, ubar)
  bool positive = false, representable = true;
  for (int round = 0; round < max_rounds && !positive && representable; ++round) {
    for (const auto& pt : ladder.next(normals, static_cast<std::uint64_t>(round))) {
      if (p.times[i0] + pt.offset <= p.times[i0]) {
        representable = false;  // offsets no longer representable next to s0
        break;
      }
      added.emplace_back(pt.offset, pt.value);
      if (pt.value > 0.0) positive = true;
    }
  }
  if (added.empty()) return 0;
  // splice the new rows in increasing time right after s0
  std::sort(added.begin(), added.end());
  const std::size_t nc = p.cols();
  std::vector<double> times, values;
  times.reserve(p.rows() + added.size());
  values.reserve(p.values.size() + added.size() * nc);
  for (std::size_t i = 0; i < p.rows(); ++i) {
    times.push_back(p.times[i]);
    values.insert(values.end(), p.values.begin() + i * nc, p.values.begin() + (i + 1) * nc);
    if (i == i0) {
      for (const auto& [o, u] : added) {
        times.push_back(p.times[i0] + o);
        const std::size_t base = values.size();
        values.insert(values.end(), p.values.begin() + i0 * nc, p.values.begin() + (i0 + 1) * nc);
        values[base + j0] = f.F1 + u;
      }
    }
  }
  p.times = std::move(times);
  p.values = std::move(values);
  return added.size();
}

}  // namespace heatsup
