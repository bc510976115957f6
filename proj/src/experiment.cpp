#include "heatsup/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "heatsup/density.hpp"
#include "heatsup/errors.hpp"
#include "heatsup/green.hpp"
#include "heatsup/malliavin.hpp"
#include "heatsup/rng.hpp"
#include "heatsup/seminorm.hpp"
#include "json.hpp"

namespace heatsup {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

bool ExperimentOutcome::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

int exit_code(const ExperimentOutcome& o) { return o.pass() ? 0 : 1; }

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + p.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_atomic(const fs::path& p, const std::string& content) {
  fs::create_directories(p.parent_path());
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f << content;
    if (!f) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, p);
}

double mean(const std::vector<double>& x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double stdev(const std::vector<double>& x) {
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return std::sqrt(s / static_cast<double>(x.size() - 1));
}

// log of the sample mean of exp(l) and the standard error of that log
std::pair<double, double> log_mean_exp(const std::vector<double>& l) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double v : l) mx = std::max(mx, v);
  std::vector<double> r(l.size());
  for (std::size_t i = 0; i < l.size(); ++i) r[i] = std::exp(l[i] - mx);
  const double m = mean(r);
  return {mx + std::log(m), stdev(r) / (m * std::sqrt(static_cast<double>(r.size())))};
}

// Per-path computations in batches with on-disk checkpoints.
class BatchRunner {
 public:
  BatchRunner(const ExperimentConfig& c, fs::path dir, bool resume, std::ostream* log)
      : cfg_(c), dir_(std::move(dir)), resume_(resume), log_(log), hash_(hex64(fnv1a(serialize(c)))) {}

  std::vector<std::vector<double>> collect(const std::string& tag, std::size_t ncols,
                                           const std::function<void(std::uint64_t, double*)>& fn,
                                           std::uint64_t limit = 0) {
    const std::uint64_t n = limit ? std::min(limit, cfg_.mc.n_paths) : cfg_.mc.n_paths;
    const std::uint64_t bs = cfg_.mc.batch_size;
    std::vector<double> rows(n * ncols);
    for (std::uint64_t first = 0, b = 0; first < n; first += bs, ++b) {
      const std::uint64_t count = std::min(bs, n - first);
      char name[64];
      std::snprintf(name, sizeof name, "%05llu.csv", static_cast<unsigned long long>(b));
      const fs::path file = dir_ / "checkpoints" / tag / name;
      BatchRecord rec{tag, b, first, count, "", false};
      if (resume_ && fs::exists(file) && load(file, first, count, ncols, rows.data() + first * ncols)) {
        rec.resumed = true;
      } else {
        compute(first, count, ncols, fn, rows.data() + first * ncols);
        write_atomic(file, render(first, count, ncols, rows.data() + first * ncols));
      }
      rec.checksum = hex64(fnv1a(read_file(file)));
      records_.push_back(rec);
      if (log_) *log_ << "  " << tag << " batch " << b << (rec.resumed ? " (resumed)" : "") << '\n';
    }
    std::vector<std::vector<double>> cols(ncols, std::vector<double>(n));
    for (std::uint64_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < ncols; ++k) cols[k][i] = rows[i * ncols + k];
    return cols;
  }

  const std::vector<BatchRecord>& records() const { return records_; }

 private:
  void compute(std::uint64_t first, std::uint64_t count, std::size_t ncols,
               const std::function<void(std::uint64_t, double*)>& fn, double* out) const {
    const unsigned nt = std::max(1u, std::min<unsigned>(cfg_.mc.threads, static_cast<unsigned>(count)));
    if (nt == 1) {
      for (std::uint64_t i = 0; i < count; ++i) fn(first + i, out + i * ncols);
      return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(nt);
    for (unsigned t = 0; t < nt; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::uint64_t i = t; i < count; i += nt) fn(first + i, out + i * ncols);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  std::string render(std::uint64_t first, std::uint64_t count, std::size_t ncols, const double* v) const {
    std::string s = "# config " + hash_ + " first " + std::to_string(first) + " count " +
                    std::to_string(count) + " cols " + std::to_string(ncols) + "\n";
    for (std::uint64_t i = 0; i < count; ++i) {
      for (std::size_t k = 0; k < ncols; ++k) {
        if (k) s += ',';
        s += fmt(v[i * ncols + k]);
      }
      s += '\n';
    }
    return s;
  }

  bool load(const fs::path& file, std::uint64_t first, std::uint64_t count, std::size_t ncols, double* out) const {
    std::istringstream in(read_file(file));
    std::string header;
    std::getline(in, header);
    const std::string expect = "# config " + hash_ + " first " + std::to_string(first) + " count " +
                               std::to_string(count) + " cols " + std::to_string(ncols);
    if (header != expect) return false;
    std::vector<double> tmp(count * ncols);
    std::string line;
    for (std::uint64_t i = 0; i < count; ++i) {
      if (!std::getline(in, line)) return false;
      std::istringstream ls(line);
      std::string cell;
      for (std::size_t k = 0; k < ncols; ++k) {
        if (!std::getline(ls, cell, ',')) return false;
        tmp[i * ncols + k] = std::strtod(cell.c_str(), nullptr);
      }
    }
    std::copy(tmp.begin(), tmp.end(), out);
    return true;
  }

  const ExperimentConfig& cfg_;
  fs::path dir_;
  bool resume_;
  std::ostream* log_;
  std::string hash_;
  std::vector<BatchRecord> records_;
};

struct Ctx {
  const ExperimentConfig& cfg;
  fs::path dir;
  BatchRunner runner;
  ExperimentOutcome out;
  std::ostream* log;

  void check(std::string name, double value, double target, double tol, bool pass, std::string detail = "") {
    out.checks.push_back({std::move(name), value, target, tol, pass, std::move(detail)});
    if (log) *log << (pass ? "  ok   " : "  FAIL ") << out.checks.back().name << " = " << value << '\n';
  }
  void artifact(const std::string& rel, const std::string& content) {
    write_atomic(dir / rel, content);
    out.artifacts.push_back(rel);
  }
  void say(const std::string& s) {
    if (log) *log << s << '\n';
  }
};

WindowConfig with_delta(const ExperimentConfig& c, double d1, double d2) {
  WindowConfig w = c.window;
  w.T = c.T;
  w.delta1 = d1;
  w.delta2 = d2;
  return w;
}

std::string tag_of(const std::string& stem, double v) { return stem + "_" + short_fmt(v); }

// ---------------------------------------------------------------------------

void run_identities(Ctx& x) {
  const auto& c = x.cfg;
  using clock = std::chrono::steady_clock;
  const auto secs = [](clock::time_point a) { return std::chrono::duration<double>(clock::now() - a).count(); };

  auto t0 = clock::now();
  double worst = 0.0;
  for (BoundaryCondition bc : {BoundaryCondition::Dirichlet, BoundaryCondition::Neumann}) {
    for (int k = 0; k <= 12; ++k) {
      const double t = std::pow(10.0, -4.0 + k / 3.0);
      for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j) {
          const double a = i / 19.0, b = j / 19.0;
          const double e = evaluate_green(t, a, b, bc, {400, 1e-12, KernelMethod::Eigen});
          const double m = evaluate_green(t, a, b, bc, {400, 1e-12, KernelMethod::Image});
          worst = std::max(worst, std::abs(e - m));
        }
    }
  }
  double ck = 0.0;
  for (BoundaryCondition bc : {BoundaryCondition::Dirichlet, BoundaryCondition::Neumann})
    for (double t : {0.01, 0.05, 0.2})
      for (double s : {0.02, 0.1})
        for (double a : {0.2, 0.5, 0.9})
          for (double b : {0.3, 0.6}) {
            const auto h = [&](double z) { return evaluate_green(s, z, b, bc); };
            ck = std::max(ck, std::abs(heat_semigroup(t, a, h, bc) - evaluate_green(t + s, a, b, bc)));
          }
  const double green_time = secs(t0);
  x.check("green.cross_method", worst, 0.0, 1e-8, worst <= 1e-8, "max |eigen - image| over t in [1e-4,1], 20x20 grid, both bcs");
  x.check("green.chapman_kolmogorov", ck, 0.0, 1e-6, ck <= 1e-6);
  x.check("green.runtime_seconds", green_time, 0.0, 10.0, green_time < 10.0);

  const double v_stat = covariance(5.0, 0.5, 5.0, 0.5, BoundaryCondition::Dirichlet);
  x.check("covariance.stationary", v_stat, 0.125, 1e-6, std::abs(v_stat - 0.125) <= 1e-6);
  const double v_small = covariance(1e-3, 0.5, 1e-3, 0.5, BoundaryCondition::Dirichlet);
  const double v_small_ref = std::sqrt(1e-3 / (2.0 * std::numbers::pi));
  x.check("covariance.small_time", v_small, v_small_ref, 1e-6, std::abs(v_small - v_small_ref) <= 1e-6);

  t0 = clock::now();
  SeparableSource a{[](double r) { return r; }, [](double) { return 1.0; },
                    [](double v) { return std::cos(std::numbers::pi * v); },
                    [](double v) { return -std::numbers::pi * std::sin(std::numbers::pi * v); },
                    [](double v) { return -std::numbers::pi * std::numbers::pi * std::cos(std::numbers::pi * v); }};
  const double A1 = heat_identity_A(0.3, 0.25, a, BoundaryCondition::Neumann);
  const double A1_ref = 0.3 * std::cos(0.25 * std::numbers::pi);
  SeparableSource b{[](double r) { return -std::expm1(-r); }, [](double r) { return std::exp(-r); },
                    [](double v) { return std::sin(std::numbers::pi * v); },
                    [](double v) { return std::numbers::pi * std::cos(std::numbers::pi * v); },
                    [](double v) { return -std::numbers::pi * std::numbers::pi * std::sin(std::numbers::pi * v); }};
  const double A2 = heat_identity_A(0.5, 0.5, b, BoundaryCondition::Dirichlet);
  const double A2_ref = -std::expm1(-0.5);
  const double heat_time = secs(t0);
  x.check("heat_identity.neumann_cos", A1, A1_ref, 1e-5, std::abs(A1 - A1_ref) <= 1e-5);
  x.check("heat_identity.dirichlet_sin", A2, A2_ref, 1e-5, std::abs(A2 - A2_ref) <= 1e-5);
  x.check("heat_identity.runtime_seconds", heat_time, 0.0, 30.0, heat_time < 30.0);

  // pairing identities on the configured window
  const WindowConfig w = with_delta(c, c.window.delta1, c.window.delta2);
  const AuxFieldSpec spec = AuxFieldSpec::standard(w);
  const double p1 = pair_DF1_uA1(w, spec, c.bc);
  x.check("pairing.DF1_uA1", p1, 1.0, 1e-5, std::abs(p1 - 1.0) <= 1e-5);
  const double p3 = pair_Duincrement_uA1(w.s0, w.s0 + w.delta1, w, spec, c.bc);
  x.check("pairing.Du_increment_uA1", p3, 0.0, 1e-6, std::abs(p3) <= 1e-6);

  // a sampled window for the path-dependent pairings
  const int cells = 16;
  const double cell = w.delta1 / cells;
  const auto n_before = static_cast<int>(std::lround(w.s0 / cell));
  const std::vector<double> times = uniform_axis(0.0, n_before * cell + w.delta1, n_before + cells);
  std::vector<double> window_times(times.begin() + n_before, times.end());
  WindowConfig wg = w;
  wg.s0 = times[n_before];
  const GaussianWindowSampler ws(window_times, {w.y0}, c.bc, SpaceTimePoint{wg.s0, w.y0});
  const FieldPath path = ws.sample(c.mc.seed, 0);
  const CutoffSpec cut = cutoff_time(c.seminorm, std::pow(w.delta1, 0.25), w.delta1);
  const std::vector<double> nodes = uniform_axis(0.0, 1.0, c.grid.nx);
  GridField ua2 = build_uA2(Y_trace(path, wg, c.seminorm), cut, spec, nodes);
  GridField full;
  full.times = times;
  full.positions = nodes;
  full.info_time = times;
  full.values.assign(times.size() * nodes.size(), 0.0);
  for (std::size_t k = 0; k < ua2.rows(); ++k)
    for (std::size_t j = 0; j < nodes.size(); ++j) full(n_before + k, j) = ua2(k, j);
  const GridField df1 = derivative_kernel_field(wg.s0, w.y0, times, nodes, c.bc);
  const double p2 = h_inner_product(df1, full, control_volumes(nodes));
  x.check("pairing.DF1_uA2", p2, 0.0, 0.0, p2 == 0.0, "disjoint supports on the common grid");

  const GaussianWindowSampler fws(f_window_times(w, 16, 16), {w.y0}, c.bc, SpaceTimePoint{w.s0, w.y0});
  const FieldPath fp = fws.sample(c.mc.seed, 1);
  const double p4 = pair_DYr_uA1(fp, w, w.s0 + w.delta1, c.seminorm, spec, c.bc);
  x.check("pairing.DYr_uA1", p4, 0.0, 1e-6, std::abs(p4) <= 1e-6);

  double iso = 0.0;
  const NormalStream u(c.mc.seed, 0, StreamTag::Initial);
  for (int k = 0; k < 10; ++k) {
    const double t = 0.05 + 0.9 * u.uniform(4 * k), xx = u.uniform(4 * k + 1);
    const double s = 0.05 + 0.9 * u.uniform(4 * k + 2), yy = u.uniform(4 * k + 3);
    iso = std::max(iso, std::abs(kernel_inner_product(t, xx, s, yy, c.bc) - covariance(t, xx, s, yy, c.bc)));
  }
  x.check("pairing.kernel_isometry", iso, 0.0, 1e-7, iso <= 1e-7);
}

// ---------------------------------------------------------------------------

void run_regularity(Ctx& x) {
  const auto& c = x.cfg;
  const std::vector<double> time_lags{1e-3, 2e-3, 4e-3, 8e-3, 1.6e-2};
  const std::vector<double> space_lags{1.0 / 128, 1.0 / 64, 1.0 / 32, 1.0 / 16};
  const std::vector<double> bases{0.3, 0.5, 0.7};
  const double t_base = 0.5;
  std::vector<double> times{t_base};
  for (double h : time_lags) times.push_back(t_base + h);
  std::vector<double> pos;
  for (double b : bases) {
    pos.push_back(b);
    for (double d : space_lags) pos.push_back(b + d);
  }
  std::sort(pos.begin(), pos.end());
  pos.erase(std::unique(pos.begin(), pos.end()), pos.end());
  const auto idx = [&](double v) { return snap_to_axis(pos, v).index; };
  const std::size_t nl = time_lags.size(), ns = space_lags.size();
  const auto cols = x.runner.collect("regularity", nl + ns, [&](std::uint64_t p, double* row) {
    const FieldPath f = sample_spectral(times, pos, c.bc, c.mc.seed, c.design.truncation, p);
    for (std::size_t k = 0; k < nl; ++k) {
      double s = 0.0;
      for (double b : bases) {
        const double d = f(k + 1, idx(b)) - f(0, idx(b));
        s += d * d;
      }
      row[k] = s / bases.size();
    }
    for (std::size_t k = 0; k < ns; ++k) {
      double s = 0.0;
      for (double b : bases) {
        const double d = f(0, idx(b + space_lags[k])) - f(0, idx(b));
        s += d * d;
      }
      row[nl + k] = s / bases.size();
    }
  });
  const std::vector<std::vector<double>> tsq(cols.begin(), cols.begin() + nl);
  const std::vector<std::vector<double>> ssq(cols.begin() + nl, cols.end());
  RegularityReport rep;
  rep.rows.push_back(exponent_from_increments("time", time_lags, tsq, 0.5, 0.05));
  rep.rows.push_back(exponent_from_increments("space", space_lags, ssq, 1.0, 0.10));

  const auto sweep = [&](int n) {
    double worst = 0.0;
    const auto tt = uniform_axis(0.1, 0.5, n - 1), xx = uniform_axis(0.2, 0.8, n - 1);
    for (double t : tt)
      for (double s : tt)
        for (double a : xx)
          for (double b : xx) {
            if (t <= s || a <= b) continue;
            const double v = rect_increment_variance(t, s, a, b, c.bc);
            worst = std::max(worst, v / std::min(std::sqrt(t - s), a - b));
          }
    return worst;
  };
  rep.rect_constant_coarse = sweep(13);
  rep.rect_constant_fine = sweep(25);
  rep.rect_pass = rep.rect_constant_fine <= 1.1 * rep.rect_constant_coarse;

  std::string csv = "name,lag,mean_sq\n";
  for (std::size_t k = 0; k < nl; ++k) csv += "time," + fmt(time_lags[k]) + "," + fmt(mean(tsq[k])) + "\n";
  for (std::size_t k = 0; k < ns; ++k) csv += "space," + fmt(space_lags[k]) + "," + fmt(mean(ssq[k])) + "\n";
  x.artifact("regularity_increments.csv", csv);
  for (const auto& r : rep.rows)
    x.check("regularity." + r.name + "_exponent", r.fit.slope, r.target, r.tolerance, r.pass(),
            "95% CI half width " + short_fmt(r.ci_half_width));
  x.check("regularity.rect_constant", rep.rect_constant_fine, rep.rect_constant_coarse, 0.1 * rep.rect_constant_coarse,
          rep.rect_pass, "C on 25^4 grid vs 13^4 grid");
}

// ---------------------------------------------------------------------------

void run_grr(Ctx& x) {
  const auto& c = x.cfg;
  std::vector<double> log_means, log_se;
  std::uint64_t fails = 0, vacuous = 0, passes = 0;
  bool consistent = true;
  std::string csv = "delta1,log_mean_Y,log_se,pass,vacuous,fail,contrapositive_violations\n";
  for (double d1 : c.design.deltas) {
    const FWindowDesign design(c, d1);
    const WindowConfig w = design.window();
    const CutoffSpec cut = cutoff_time(c.seminorm, std::pow(d1, 0.25), d1);
    const double a = std::pow(d1, 0.25);
    const auto cols = x.runner.collect(tag_of("grr_time", d1), 8, [&](std::uint64_t p, double* row) {
      const FieldPath f = design.sample(c.mc.seed, p);
      const SeminormTrace tr = Y_trace(f, w, c.seminorm);
      const GrrTally t = grr_tally_time(f, w, tr, cut, a);
      row[0] = tr.log_value.back();
      row[1] = t.pass;
      row[2] = t.vacuous;
      row[3] = t.fail;
      row[4] = t.premise_true;
      row[5] = t.conclusion_false;
      row[6] = t.contrapositive_violations;
      row[7] = tr.dropped;
    });
    const auto [lm, se] = log_mean_exp(cols[0]);
    log_means.push_back(lm);
    log_se.push_back(se);
    const auto sum = [](const std::vector<double>& v) { return static_cast<std::uint64_t>(std::accumulate(v.begin(), v.end(), 0.0)); };
    passes += sum(cols[1]);
    vacuous += sum(cols[2]);
    fails += sum(cols[3]);
    consistent = consistent && sum(cols[6]) == sum(cols[3]);
    csv += fmt(d1) + "," + fmt(lm) + "," + fmt(se) + "," + std::to_string(sum(cols[1])) + "," +
           std::to_string(sum(cols[2])) + "," + std::to_string(sum(cols[3])) + "," + std::to_string(sum(cols[6])) + "\n";
  }
  x.artifact("grr_time.csv", csv);
  x.check("grr.time.fail_count", static_cast<double>(fails), 0.0, 0.0, fails == 0,
          std::to_string(passes) + " pass, " + std::to_string(vacuous) + " vacuous");
  x.check("grr.time.contrapositive_consistent", consistent ? 1.0 : 0.0, 1.0, 0.0, consistent);
  {
    std::vector<double> lx(c.design.deltas.size());
    for (std::size_t i = 0; i < lx.size(); ++i) lx[i] = c.design.deltas[i];
    std::vector<double> y(log_means.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = std::exp(log_means[i] - log_means.front());
    const ScalingFit fit = loglog_fit(lx, y, log_se);
    const double target = 2.0 + (c.seminorm.p0 - c.seminorm.gamma0) / 2.0;
    x.check("seminorm.Y_exponent", fit.slope, target, 0.15, std::abs(fit.slope - target) <= 0.15,
            "slope se " + short_fmt(fit.slope_se));
  }

  log_means.clear();
  log_se.clear();
  fails = vacuous = passes = 0;
  consistent = true;
  std::vector<double> deltas;
  csv = "delta1,delta2,delta,log_mean_Ybar,log_se,pass,vacuous,fail,contrapositive_violations\n";
  for (const auto& m : c.design.m0_deltas) {
    const RectWindowDesign design(c, m);
    const WindowConfig w = design.window();
    const double abar = std::sqrt(w.delta());
    const CutoffSpec cut = cutoff_rect(c.rect, abar, w.delta());
    const auto cols = x.runner.collect(tag_of("grr_rect", m.delta1), 6, [&](std::uint64_t p, double* row) {
      const FieldPath f = design.sample(c.mc.seed, p);
      const SeminormTrace tr = Ybar_trace(f, w, c.rect);
      const GrrTally t = grr_tally_rect(f, w, tr, cut, abar);
      row[0] = tr.log_value.back();
      row[1] = t.pass;
      row[2] = t.vacuous;
      row[3] = t.fail;
      row[4] = t.contrapositive_violations;
      row[5] = tr.dropped;
    });
    const auto [lm, se] = log_mean_exp(cols[0]);
    log_means.push_back(lm);
    log_se.push_back(se);
    deltas.push_back(w.delta());
    const auto sum = [](const std::vector<double>& v) { return static_cast<std::uint64_t>(std::accumulate(v.begin(), v.end(), 0.0)); };
    passes += sum(cols[1]);
    vacuous += sum(cols[2]);
    fails += sum(cols[3]);
    consistent = consistent && sum(cols[4]) == sum(cols[3]);
    csv += fmt(m.delta1) + "," + fmt(m.delta2) + "," + fmt(w.delta()) + "," + fmt(lm) + "," + fmt(se) + "," +
           std::to_string(sum(cols[1])) + "," + std::to_string(sum(cols[2])) + "," + std::to_string(sum(cols[3])) +
           "," + std::to_string(sum(cols[4])) + "\n";
  }
  x.artifact("grr_rect.csv", csv);
  x.check("grr.rect.fail_count", static_cast<double>(fails), 0.0, 0.0, fails == 0,
          std::to_string(passes) + " pass, " + std::to_string(vacuous) + " vacuous");
  x.check("grr.rect.contrapositive_consistent", consistent ? 1.0 : 0.0, 1.0, 0.0, consistent);
  std::vector<double> y(log_means.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = std::exp(log_means[i] - log_means.front());
  const ScalingFit fit = loglog_fit(deltas, y, log_se);
  const double target = 4.0 + (c.rect.p0 - c.rect.gamma0);
  x.check("seminorm.Ybar_exponent", fit.slope, target, 0.3, std::abs(fit.slope - target) <= 0.3,
          "slope se " + short_fmt(fit.slope_se));
}

// ---------------------------------------------------------------------------

std::vector<FSampleSet> collect_F(Ctx& x, const std::string& stem) {
  const auto& c = x.cfg;
  std::vector<FSampleSet> sets;
  for (double d1 : c.design.deltas) {
    const FWindowDesign design(c, d1);
    const auto cols = x.runner.collect(tag_of(stem, d1), 4, [&](std::uint64_t p, double* row) {
      const FieldPath f = design.sample(c.mc.seed, p);
      const FResult r = compute_F(f, design.window());
      row[0] = r.F1;
      row[1] = r.F2;
      row[2] = r.S;
      row[3] = static_cast<double>(f.rows());
    });
    sets.push_back({d1, cols[0], cols[1]});
  }
  return sets;
}

std::vector<MSampleSet> collect_M0(Ctx& x, const std::string& stem) {
  const auto& c = x.cfg;
  std::vector<MSampleSet> sets;
  for (const auto& m : c.design.m0_deltas) {
    const M0WindowDesign design(c, m);
    const auto cols = x.runner.collect(tag_of(stem, m.delta1), 3, [&](std::uint64_t p, double* row) {
      const FieldPath f = design.sample(c.mc.seed, p);
      const M0Result r = compute_M0(f, design.window());
      row[0] = r.M0;
      row[1] = r.Sbar;
      row[2] = r.Xbar;
    });
    sets.push_back({m.delta1, m.delta2, cols[0]});
  }
  return sets;
}

std::vector<double> zeta_grid() {
  std::vector<double> z;
  for (int i = 0; i <= 30; ++i) z.push_back(1.0 + 0.1 * i);
  return z;
}

void tail_check(Ctx& x, Theorem which, const std::string& name, const std::vector<double>& scales,
                const std::vector<std::vector<double>>& samples) {
  const BoundReport rep = verify_tail_bound(which, scales, samples, zeta_grid());
  x.artifact("reports/" + name + ".json", to_json(rep));
  for (std::size_t k = 0; k < scales.size(); ++k) {
    std::vector<double> z;
    for (double v : zeta_grid()) z.push_back(scales[k] * v);
    std::ostringstream os;
    write_csv(os, tail_probability(samples[k], z));
    x.artifact("tails/" + tag_of(name, scales[k]) + ".csv", os.str());
  }
  double worst = 0.0;
  for (const auto& v : rep.verdicts) worst = std::max(worst, v.worst_ratio);
  x.check("tails." + name, worst, 1.0, 0.0, rep.pass(), "fitted c = " + short_fmt(rep.fitted_c));
}

void positivity_check(Ctx& x, const std::string& name, const std::vector<std::vector<double>>& samples) {
  std::uint64_t total = 0, positive = 0;
  for (const auto& s : samples)
    for (double v : s) {
      ++total;
      if (v > 0.0) ++positive;
    }
  x.check("positivity." + name, static_cast<double>(positive), static_cast<double>(total), 0.0, positive == total,
          std::to_string(positive) + "/" + std::to_string(total));
}

void sample_csv(Ctx& x, const std::string& rel, const std::vector<std::string>& names,
                const std::vector<const std::vector<double>*>& cols) {
  std::string s;
  for (std::size_t k = 0; k < names.size(); ++k) s += (k ? "," : "") + names[k];
  s += "\n";
  for (std::size_t i = 0; i < cols[0]->size(); ++i) {
    for (std::size_t k = 0; k < cols.size(); ++k) s += (k ? "," : "") + fmt((*cols[k])[i]);
    s += "\n";
  }
  x.artifact(rel, s);
}

// Coarse vs doubled resolution on the first paths of the smallest window.
void resolution_check(Ctx& x, const std::string& name, const std::vector<double>& coarse,
                      const std::function<double(std::uint64_t)>& fine_sup, const std::string& tag) {
  const std::uint64_t m = std::min<std::uint64_t>(x.cfg.mc.n_paths, 5000);
  const auto cols = x.runner.collect(tag, 1, [&](std::uint64_t p, double* row) { row[0] = fine_sup(p); }, m);
  const std::vector<double> c(coarse.begin(), coarse.begin() + static_cast<std::ptrdiff_t>(m));
  const double mc = mean(c), mf = mean(cols[0]);
  const double se = std::sqrt((stdev(c) * stdev(c) + stdev(cols[0]) * stdev(cols[0])) / static_cast<double>(m));
  const double rel = (mf - mc) / mc;
  const double tol = 0.05 + 4.0 * se / mc;
  x.artifact("resolution_" + name + ".csv", "n_paths,mean_nx,mean_2nx,relative_change,se\n" + std::to_string(m) + "," +
                                               fmt(mc) + "," + fmt(mf) + "," + fmt(rel) + "," + fmt(se) + "\n");
  x.check("resolution." + name, rel, 0.0, tol, std::abs(rel) <= tol,
          std::abs(rel) <= tol ? "converged at nx vs 2nx" : "not converged at nx vs 2nx");
}

void run_density_F(Ctx& x) {
  const auto& c = x.cfg;
  const auto sets = collect_F(x, "F");
  std::vector<std::vector<double>> f2;
  std::vector<double> scales;
  for (const auto& s : sets) {
    f2.push_back(s.F2);
    scales.push_back(std::pow(s.delta1, 0.25));
    if (c.retain_raw) sample_csv(x, "samples/" + tag_of("F", s.delta1) + ".csv", {"F1", "F2"}, {&s.F1, &s.F2});
  }
  positivity_check(x, "F2", f2);
  BoundCheckOptions opt;
  opt.bootstrap = c.design.bootstrap;
  opt.lattice_points = c.design.lattice;
  opt.seed = c.mc.seed;
  for (bool refined : {false, true}) {
    opt.refined = refined;
    const BoundReport rep = verify_density_bound_F(sets, opt);
    const std::string name = refined ? "density_F_refined" : "density_F_envelope";
    x.artifact("reports/" + name + ".json", to_json(rep));
    double worst = 0.0;
    for (const auto& v : rep.verdicts) worst = std::max(worst, v.worst_ratio);
    x.check("density.F." + rep.variant, worst, 1.0, 0.0, rep.bound_pass(), "fitted c = " + short_fmt(rep.fitted_c));
    if (!refined)
      x.check("density.F.collapse", rep.collapse_distance, 0.0, rep.collapse_tolerance * rep.collapse_peak,
              rep.collapse_pass(), "peak " + short_fmt(rep.collapse_peak));
  }
  for (const auto& s : sets) {
    KdeOptions ko;
    ko.bandwidth_factor = 0.5;
    ko.lattice_points = c.design.lattice;
    std::ostringstream os;
    write_csv(os, kde({s.F1, s.F2}, ko));
    x.artifact("density/" + tag_of("F", s.delta1) + ".csv", os.str());
  }
  tail_check(x, Theorem::TailF2, "F2", scales, f2);
  {
    ExperimentConfig fine = c;
    fine.design.f_steps *= 2;
    fine.design.f_refine *= 2;
    const FWindowDesign design(fine, sets.front().delta1);
    resolution_check(x, "F2", sets.front().F2, [&](std::uint64_t p) {
      return compute_F(design.sample(c.mc.seed, p), design.window()).F2;
    }, tag_of("F_2nx", sets.front().delta1));
  }
  const ScalingFit fit = mean_sup_scaling(c.design.deltas, f2);
  x.check("scaling.F2_mean", fit.slope, 0.25, 0.03, fit.within(0.25, 0.03), "slope se " + short_fmt(fit.slope_se));
}


void run_density_M0(Ctx& x) {
  const auto& c = x.cfg;
  const auto sets = collect_M0(x, "M0");
  std::vector<std::vector<double>> m0;
  std::vector<double> deltas, scales;
  for (const auto& s : sets) {
    m0.push_back(s.M0);
    deltas.push_back(s.delta());
    scales.push_back(std::sqrt(s.delta()));
    if (c.retain_raw) sample_csv(x, "samples/" + tag_of("M0", s.delta1) + ".csv", {"M0"}, {&s.M0});
  }
  positivity_check(x, "M0", m0);
  BoundCheckOptions opt;
  opt.bootstrap = c.design.bootstrap;
  opt.lattice_points = c.design.lattice;
  opt.seed = c.mc.seed;
  const BoundReport rep = verify_density_bound_M0(sets, opt);
  x.artifact("reports/density_M0.json", to_json(rep));
  double worst = 0.0;
  for (const auto& v : rep.verdicts) worst = std::max(worst, v.worst_ratio);
  x.check("density.M0." + rep.variant, worst, 1.0, 0.0, rep.bound_pass(), "fitted c = " + short_fmt(rep.fitted_c));
  x.check("density.M0.collapse", rep.collapse_distance, 0.0, rep.collapse_tolerance * rep.collapse_peak,
          rep.collapse_pass(), "peak " + short_fmt(rep.collapse_peak));
  for (const auto& s : sets) {
    KdeOptions ko;
    ko.bandwidth_factor = 0.5;
    ko.lattice_points = c.design.lattice;
    std::ostringstream os;
    write_csv(os, kde({s.M0}, ko));
    x.artifact("density/" + tag_of("M0", s.delta1) + ".csv", os.str());
  }
  tail_check(x, Theorem::TailM0, "M0", scales, m0);
  {
    ExperimentConfig fine = c;
    fine.design.m0_time_steps *= 2;
    fine.design.m0_time_refine *= 2;
    fine.design.m0_space_steps *= 2;
    const M0WindowDesign design(fine, c.design.m0_deltas.front());
    resolution_check(x, "M0", sets.front().M0, [&](std::uint64_t p) {
      return compute_M0(design.sample(c.mc.seed, p), design.window()).M0;
    }, tag_of("M0_2nx", sets.front().delta1));
  }
  const ScalingFit fit = mean_sup_scaling(deltas, m0);
  x.check("scaling.M0_mean", fit.slope, 0.5, 0.05, fit.within(0.5, 0.05), "slope se " + short_fmt(fit.slope_se));
}

void run_tails(Ctx& x) {
  const auto fsets = collect_F(x, "F");
  std::vector<std::vector<double>> f2;
  std::vector<double> fscales;
  for (const auto& s : fsets) {
    f2.push_back(s.F2);
    fscales.push_back(std::pow(s.delta1, 0.25));
  }
  tail_check(x, Theorem::TailF2, "F2", fscales, f2);
  const auto msets = collect_M0(x, "M0");
  std::vector<std::vector<double>> m0;
  std::vector<double> mscales;
  for (const auto& s : msets) {
    m0.push_back(s.M0);
    mscales.push_back(std::sqrt(s.delta()));
  }
  tail_check(x, Theorem::TailM0, "M0", mscales, m0);
}

// ---------------------------------------------------------------------------

void run_walsh(Ctx& x) {
  const auto& c = x.cfg;
  const GaussianWindowSampler initial = walsh_initial_sampler(c);
  std::vector<double> rms, rms_se, hn, hn_se;
  bool centred = true, isometric = true;
  std::string csv = "delta1,mean_delta,mean_delta_sq,se_delta_sq,mean_h_norm_sq,se_h_norm_sq\n";
  for (double d1 : c.design.deltas) {
    const WindowConfig w = with_delta(c, d1, c.window.delta2);
    const AuxFieldSpec spec = AuxFieldSpec::standard(w);
    const CutoffSpec cut = cutoff_time(c.seminorm, std::pow(d1, 0.25), d1);
    const auto cols = x.runner.collect(tag_of("walsh", d1), 2, [&](std::uint64_t p, double* row) {
      const WalshDraw d = walsh_draw(c, initial, d1, c.mc.seed, p);
      const FieldPath coarse = d.path.coarsen(d.substeps, 1);
      const GridField ua2 = build_uA2(Y_trace(coarse, w, c.seminorm), cut, spec, d.noise.positions);
      row[0] = walsh_integral(d.noise, ua2);
      row[1] = h_norm_squared(ua2, control_volumes(d.noise.positions));
    });
    const double n = static_cast<double>(cols[0].size());
    std::vector<double> sq(cols[0].size());
    for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = cols[0][i] * cols[0][i];
    const double m1 = mean(cols[0]), m2 = mean(sq), s2 = stdev(sq) / std::sqrt(n);
    const double mh = mean(cols[1]), sh = stdev(cols[1]) / std::sqrt(n);
    centred = centred && std::abs(m1) <= 4.0 * std::sqrt(m2 / n);
    // adapted integrands: E[delta^2] = E[|u|_H^2]
    std::vector<double> diff(sq.size());
    for (std::size_t i = 0; i < sq.size(); ++i) diff[i] = sq[i] - cols[1][i];
    isometric = isometric && std::abs(mean(diff)) <= 4.0 * stdev(diff) / std::sqrt(n);
    rms.push_back(std::sqrt(m2));
    rms_se.push_back(0.5 * s2 / m2);
    hn.push_back(mh);
    hn_se.push_back(sh / mh);
    csv += fmt(d1) + "," + fmt(m1) + "," + fmt(m2) + "," + fmt(s2) + "," + fmt(mh) + "," + fmt(sh) + "\n";
  }
  x.artifact("walsh.csv", csv);
  const ScalingFit fit = loglog_fit(c.design.deltas, rms, rms_se);
  x.check("walsh.L2_exponent", fit.slope, 0.75, 0.1, fit.within(0.75, 0.1), "slope se " + short_fmt(fit.slope_se));
  const ScalingFit hfit = loglog_fit(c.design.deltas, hn, hn_se);
  x.check("walsh.H_norm_exponent", hfit.slope, 1.5, 0.2, hfit.within(1.5, 0.2), "slope se " + short_fmt(hfit.slope_se));
  x.check("walsh.mean_zero", centred ? 1.0 : 0.0, 1.0, 0.0, centred, "|mean| within 4 standard errors");
  x.check("walsh.isometry", isometric ? 1.0 : 0.0, 1.0, 0.0, isometric, "E[delta^2] = E[|uA2|_H^2] within 4 standard errors");
}

// ---------------------------------------------------------------------------

void run_gamma22(Ctx& x) {
  const auto& c = x.cfg;
  std::vector<double> scaled;
  std::uint64_t unresolved = 0;
  bool finite = true;
  std::string csv = "delta1,mean_inverse_gamma,scaled,se,unresolved,mean_rounds\n";
  const int first = c.design.gamma22_extra_rounds;
  const int max_rounds = first + 8;
  for (double d1 : c.design.deltas) {
    const FWindowDesign design(c, d1);
    const WindowConfig w = design.window();
    const CutoffSpec cut = cutoff_time(c.seminorm, std::pow(d1, 0.25), d1);
    const auto cols = x.runner.collect(tag_of("gamma22", d1), 3, [&](std::uint64_t p, double* row) {
      const FieldPath f = design.sample(c.mc.seed, p);
      const Gamma22Sample g = gamma22_resolved(f, w, c.seminorm, cut, c.mc.seed, p, first, max_rounds);
      row[0] = g.gamma;
      row[1] = g.points_inside;
      row[2] = g.rounds;
    });
    std::vector<double> inv(cols[0].size());
    std::uint64_t bad = 0;
    for (std::size_t i = 0; i < inv.size(); ++i) {
      inv[i] = 1.0 / cols[0][i];
      if (!std::isfinite(inv[i])) finite = false;
      if (cols[1][i] < 4.0) ++bad;
    }
    unresolved += bad;
    const double m = mean(inv), se = stdev(inv) / std::sqrt(static_cast<double>(inv.size()));
    scaled.push_back(m * d1);
    csv += fmt(d1) + "," + fmt(m) + "," + fmt(m * d1) + "," + fmt(se * d1) + "," + std::to_string(bad) + "," +
           fmt(mean(cols[2])) + "\n";
  }
  x.artifact("gamma22.csv", csv);
  const double spread = *std::max_element(scaled.begin(), scaled.end()) / *std::min_element(scaled.begin(), scaled.end());
  x.check("gamma22.finite", finite ? 1.0 : 0.0, 1.0, 0.0, finite && unresolved == 0,
          std::to_string(unresolved) + " paths with an unresolved psi region");
  x.check("gamma22.scaled_moment_spread", spread, 1.0, 0.5, std::isfinite(spread) && spread <= 1.5,
          "max/min of delta1 E[1/gamma] over the delta1 grid");
}

std::string results_json(const ExperimentOutcome& o) {
  Json j;
  j["schema"] = "heatsup.results";
  j["version"] = 1;
  j["experiment"] = to_string(o.kind);
  j["pass"] = o.pass();
  Json checks = Json::array();
  for (const auto& c : o.checks)
    checks.push_back({{"name", c.name}, {"value", c.value}, {"target", c.target}, {"tolerance", c.tolerance},
                      {"pass", c.pass}, {"detail", c.detail}});
  j["checks"] = checks;
  j["artifacts"] = o.artifacts;
  return j.dump(2) + "\n";
}

}  // namespace

// ---------------------------------------------------------------------------

namespace {
WindowConfig f_window(const ExperimentConfig& c, double d1) { return with_delta(c, d1, c.window.delta2); }
}  // namespace

FWindowDesign::FWindowDesign(const ExperimentConfig& c, double delta1)
    : w_(f_window(c, delta1)),
      sampler_(f_window_times(w_, c.design.f_steps, c.design.f_refine), {w_.y0}, c.bc, SpaceTimePoint{w_.s0, w_.y0}) {}

FieldPath FWindowDesign::sample(std::uint64_t seed, std::uint64_t path) const {
  FieldPath p = sampler_.sample(seed, path);
  refine_until_positive(p, w_, seed, path);
  return p;
}

M0WindowDesign::M0WindowDesign(const ExperimentConfig& c, M0Delta d)
    : w_(with_delta(c, d.delta1, d.delta2)),
      sampler_(m0_window_times(w_, c.design.m0_time_steps, c.design.m0_time_refine),
               m0_window_positions(w_, c.design.m0_space_steps), c.bc) {}

FieldPath M0WindowDesign::sample(std::uint64_t seed, std::uint64_t path) const { return sampler_.sample(seed, path); }

RectWindowDesign::RectWindowDesign(const ExperimentConfig& c, M0Delta d)
    : w_(with_delta(c, d.delta1, d.delta2)),
      sampler_(uniform_axis(0.0, w_.delta_bullet(), c.design.rect_time_steps),
               uniform_axis(w_.y0, w_.y0 + w_.delta_star(), c.design.rect_space_steps), c.bc) {}

FieldPath RectWindowDesign::sample(std::uint64_t seed, std::uint64_t path) const { return sampler_.sample(seed, path); }

namespace {

constexpr std::uint64_t kGammaRoundBase = std::uint64_t{1} << 20;

struct OffsetBuilder {
  OffsetTrace trace;
  LadderRefiner ladder;
  NormalStream normals;
  int rounds = 0;

  OffsetBuilder(const FieldPath& p, const WindowConfig& w, std::uint64_t seed, std::uint64_t idx)
      : ladder(make(p, w)), normals(seed, idx, StreamTag::Refinement) {
    const FResult f = compute_F(p, w);
    for (std::size_t i = f.s0_index; i <= f.end_index; ++i) {
      trace.offset.push_back(p.times[i] - p.times[f.s0_index]);
      trace.ubar.push_back(p(i, f.y0_index) - p(f.s0_index, f.y0_index));
    }
  }

  static LadderRefiner make(const FieldPath& p, const WindowConfig& w) {
    const FResult f = compute_F(p, w);
    return ladder_from_path(p, f.s0_index, f.y0_index);
  }

  void extend(int n) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < trace.offset.size(); ++i) pts.emplace_back(trace.offset[i], trace.ubar[i]);
    for (int r = 0; r < n; ++r, ++rounds)
      for (const auto& pt : ladder.next(normals, kGammaRoundBase + static_cast<std::uint64_t>(rounds)))
        pts.emplace_back(pt.offset, pt.value);
    std::sort(pts.begin(), pts.end());
    trace.offset.clear();
    trace.ubar.clear();
    for (const auto& [o, u] : pts) {
      trace.offset.push_back(o);
      trace.ubar.push_back(u);
    }
  }
};

}  // namespace

OffsetTrace offset_trace(const FieldPath& path, const WindowConfig& w, std::uint64_t seed, std::uint64_t path_index,
                         int extra_rounds) {
  OffsetBuilder b(path, w, seed, path_index);
  b.extend(extra_rounds);
  return b.trace;
}

Gamma22Sample gamma22_resolved(const FieldPath& path, const WindowConfig& w, const SeminormParams& sp,
                               const CutoffSpec& cut, std::uint64_t seed, std::uint64_t path_index, int first_rounds,
                               int max_rounds, int min_inside) {
  OffsetBuilder b(path, w, seed, path_index);
  b.extend(first_rounds);
  Gamma22Sample out;
  for (;;) {
    const auto& t = b.trace;
    const SeminormTrace tr = y_trace(t.offset, t.ubar, 0, t.offset.size() - 1, sp);
    out.gamma = gamma22(tr, cut);
    out.points_inside = 0;
    for (std::size_t k = 1; k < tr.r.size(); ++k)
      if (psi_log(tr.log_value[k], cut.log_R) == 1.0) ++out.points_inside;
    out.rounds = b.rounds;
    if (out.points_inside >= min_inside || b.rounds >= max_rounds) return out;
    b.extend(1);
  }
}

GaussianWindowSampler walsh_initial_sampler(const ExperimentConfig& c) {
  return GaussianWindowSampler({c.window.s0}, uniform_axis(0.0, 1.0, c.grid.nx), c.bc);
}

WalshDraw walsh_draw(const ExperimentConfig& c, const GaussianWindowSampler& initial, double delta1,
                     std::uint64_t seed, std::uint64_t path) {
  const double dx = 1.0 / c.grid.nx;
  const double cell = delta1 / c.design.walsh_cells;
  const auto sub = static_cast<std::size_t>(std::ceil(cell / (0.5 * dx * dx) - 1e-9));
  const SpaceTimeGrid grid{delta1, static_cast<int>(c.design.walsh_cells * sub), c.grid.nx};
  const FieldPath u0 = initial.sample(seed, path);
  auto [fd, noise] = sample_finite_difference(grid, c.bc, seed, path, FdStart{c.window.s0, u0.values});
  return {std::move(fd), std::move(noise), sub};
}

ExperimentOutcome run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  const auto checks = validate(config);
  if (!all_pass(checks)) {
    std::string msg = "invalid configuration:";
    for (const auto& c : checks)
      if (!c.pass) msg += " [" + c.name + "]";
    throw ConfigurationError(msg);
  }
  const auto start = std::chrono::steady_clock::now();
  const fs::path dir = options.out_dir.empty() ? fs::path(config.output_dir) : fs::path(options.out_dir);
  fs::create_directories(dir);
  Ctx x{config, dir, BatchRunner(config, dir, options.resume, options.log), {}, options.log};
  x.out.kind = config.experiment;
  x.artifact("config.conf", serialize(config));
  x.say(std::string("experiment ") + to_string(config.experiment));
  switch (config.experiment) {
    case ExperimentKind::Identities: run_identities(x); break;
    case ExperimentKind::Regularity: run_regularity(x); break;
    case ExperimentKind::GrrCheck: run_grr(x); break;
    case ExperimentKind::DensityF: run_density_F(x); break;
    case ExperimentKind::DensityM0: run_density_M0(x); break;
    case ExperimentKind::Tails: run_tails(x); break;
    case ExperimentKind::WalshScaling: run_walsh(x); break;
    case ExperimentKind::Gamma22Moments: run_gamma22(x); break;
  }
  x.out.batches = x.runner.records();
  write_atomic(dir / "results.json", results_json(x.out));
  x.out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  Json m;
  m["schema"] = "heatsup.manifest";
  m["version"] = 1;
  m["code_version"] = kCodeVersion;
  m["experiment"] = to_string(config.experiment);
  m["config_hash"] = hex64(fnv1a(serialize(config)));
  m["config_file"] = "config.conf";
  m["seed"] = config.mc.seed;
  m["n_paths"] = config.mc.n_paths;
  m["batch_size"] = config.mc.batch_size;
  Json batches = Json::array();
  for (const auto& b : x.out.batches)
    batches.push_back({{"tag", b.tag}, {"index", b.index}, {"first", b.first}, {"count", b.count},
                       {"checksum", b.checksum}, {"resumed", b.resumed}});
  m["batches"] = batches;
  Json arts = Json::object();
  for (const auto& a : x.out.artifacts) arts[a] = hex64(fnv1a(read_file(dir / a)));
  arts["results.json"] = hex64(fnv1a(read_file(dir / "results.json")));
  m["artifact_checksums"] = arts;
  m["pass"] = x.out.pass();
  m["wall_seconds"] = x.out.wall_seconds;
  write_atomic(dir / "manifest.json", m.dump(2) + "\n");
  return x.out;
}

std::vector<CheckResult> read_results(const fs::path& dir) {
  const Json j = Json::parse(read_file(dir / "results.json"));
  if (j.value("schema", "") != "heatsup.results") throw std::runtime_error("not a results file");
  std::vector<CheckResult> out;
  for (const auto& c : j.at("checks"))
    out.push_back({c.at("name").get<std::string>(), c.at("value").get<double>(), c.at("target").get<double>(),
                   c.at("tolerance").get<double>(), c.at("pass").get<bool>(), c.at("detail").get<std::string>()});
  return out;
}

}  // namespace heatsup
