#include "heatsup/density.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <numbers>
#include <ostream>

#include "heatsup/errors.hpp"
#include "heatsup/rng.hpp"
#include "json.hpp"

namespace heatsup {

namespace {

double mean_of(const std::vector<double>& x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sd_of(const std::vector<double>& x) {
  const double m = mean_of(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return std::sqrt(s / static_cast<double>(x.size() - 1));
}

double quantile_sorted(const std::vector<double>& s, double q) {
  const double pos = q * static_cast<double>(s.size() - 1);
  const auto i = static_cast<std::size_t>(pos);
  const double f = pos - static_cast<double>(i);
  return i + 1 < s.size() ? s[i] * (1.0 - f) + s[i + 1] * f : s[i];
}

// Linear binning of one coordinate onto g0 + k * step, k in [0, nb).
struct BinWeight {
  std::ptrdiff_t k = -1;
  double frac = 0.0;  // weight of k + 1
};

BinWeight bin_of(double v, double g0, double step, std::size_t nb) {
  const double f = (v - g0) / step;
  if (!(f >= 0.0) || f >= static_cast<double>(nb - 1)) return {};
  const auto k = static_cast<std::ptrdiff_t>(f);
  return {k, f - static_cast<double>(k)};
}

}  // namespace

double DensityEstimate::at(std::size_t i, std::size_t j) const {
  return dims == 1 ? values[i] : values[i * axes[1].size() + j];
}

double DensityEstimate::se(std::size_t i, std::size_t j) const {
  if (stderr_values.empty()) return 0.0;
  return dims == 1 ? stderr_values[i] : stderr_values[i * axes[1].size() + j];
}

double DensityEstimate::cell_area() const {
  double a = 1.0;
  for (const auto& ax : axes) a *= (ax.back() - ax.front()) / static_cast<double>(ax.size() - 1);
  return a;
}

double DensityEstimate::mass() const {
  return std::accumulate(values.begin(), values.end(), 0.0) * cell_area();
}

double DensityEstimate::peak() const { return *std::max_element(values.begin(), values.end()); }

double silverman_bandwidth(const std::vector<double>& x, int dims) {
  if (x.size() < 2) throw DomainError("bandwidth needs at least two samples");
  std::vector<double> s = x;
  std::sort(s.begin(), s.end());
  const double iqr = quantile_sorted(s, 0.75) - quantile_sorted(s, 0.25);
  double sigma = sd_of(x);
  if (iqr > 0.0) sigma = std::min(sigma, iqr / 1.349);
  if (!(sigma > 0.0)) throw DomainError("degenerate samples: zero spread");
  const double d = dims;
  return sigma * std::pow(4.0 / (d + 2.0), 1.0 / (d + 4.0)) *
         std::pow(static_cast<double>(x.size()), -1.0 / (d + 4.0));
}

DensityEstimate kde(const std::vector<std::vector<double>>& samples, const KdeOptions& opt) {
  const int d = static_cast<int>(samples.size());
  if (d != 1 && d != 2) throw PreconditionError("kde supports 1 or 2 dimensions");
  const std::size_t n = samples[0].size();
  if (d == 2 && samples[1].size() != n) throw PreconditionError("sample columns differ in length");
  if (n < kMinKdeSamples) throw PreconditionError("kde needs at least 100 samples");

  DensityEstimate est;
  est.dims = d;
  est.n_samples = n;
  for (int k = 0; k < d; ++k) {
    const auto [lo, hi] = std::minmax_element(samples[k].begin(), samples[k].end());
    if (!(*hi > *lo)) throw DomainError("degenerate samples: zero variance in a dimension");
    double h = opt.bandwidth.empty() ? silverman_bandwidth(samples[k], d) : opt.bandwidth[k];
    h *= opt.bandwidth_factor;
    est.bandwidth.push_back(h);
    if (!opt.axes.empty()) {
      est.axes.push_back(opt.axes[k]);
    } else {
      std::vector<double> ax(static_cast<std::size_t>(opt.lattice_points));
      const double a = *lo - 3.0 * h, b = *hi + 3.0 * h;
      for (int i = 0; i < opt.lattice_points; ++i) ax[i] = a + (b - a) * i / (opt.lattice_points - 1);
      est.axes.push_back(ax);
    }
  }

  // fine binning grid covering the lattice plus five bandwidths on each side
  struct Axis {
    double g0, step;
    std::size_t nb;
    Eigen::MatrixXd kernel;  // lattice x bins
  };
  std::vector<Axis> grid(d);
  for (int k = 0; k < d; ++k) {
    const auto& ax = est.axes[k];
    const double spacing = (ax.back() - ax.front()) / static_cast<double>(ax.size() - 1);
    const double step = spacing / opt.bin_refine;
    const double h = est.bandwidth[k];
    const auto ext = static_cast<std::size_t>(std::ceil(5.0 * h / step));
    Axis& g = grid[k];
    g.step = step;
    g.g0 = ax.front() - static_cast<double>(ext) * step;
    g.nb = (ax.size() - 1) * opt.bin_refine + 1 + 2 * ext;
    g.kernel.resize(static_cast<Eigen::Index>(ax.size()), static_cast<Eigen::Index>(g.nb));
    const double norm = 1.0 / (h * std::sqrt(2.0 * std::numbers::pi));
    for (std::size_t a = 0; a < ax.size(); ++a)
      for (std::size_t b = 0; b < g.nb; ++b) {
        const double z = (ax[a] - (g.g0 + static_cast<double>(b) * step)) / h;
        g.kernel(a, b) = z * z < 100.0 ? norm * std::exp(-0.5 * z * z) : 0.0;
      }
  }

  std::vector<std::array<BinWeight, 2>> bw(n);
  for (std::size_t i = 0; i < n; ++i)
    for (int k = 0; k < d; ++k) bw[i][k] = bin_of(samples[k][i], grid[k].g0, grid[k].step, grid[k].nb);

  const auto nb0 = static_cast<Eigen::Index>(grid[0].nb);
  const auto nb1 = static_cast<Eigen::Index>(d == 2 ? grid[1].nb : 1);
  const auto evaluate = [&](const std::vector<double>* weight) {
    Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(nb0, nb1);
    for (std::size_t i = 0; i < n; ++i) {
      const double wi = weight ? (*weight)[i] : 1.0;
      if (wi == 0.0) continue;
      const auto& b0 = bw[i][0];
      if (b0.k < 0) continue;
      if (d == 1) {
        counts(b0.k, 0) += wi * (1.0 - b0.frac);
        counts(b0.k + 1, 0) += wi * b0.frac;
      } else {
        const auto& b1 = bw[i][1];
        if (b1.k < 0) continue;
        counts(b0.k, b1.k) += wi * (1.0 - b0.frac) * (1.0 - b1.frac);
        counts(b0.k + 1, b1.k) += wi * b0.frac * (1.0 - b1.frac);
        counts(b0.k, b1.k + 1) += wi * (1.0 - b0.frac) * b1.frac;
        counts(b0.k + 1, b1.k + 1) += wi * b0.frac * b1.frac;
      }
    }
    Eigen::MatrixXd dens = d == 1 ? Eigen::MatrixXd(grid[0].kernel * counts)
                                  : Eigen::MatrixXd(grid[0].kernel * counts * grid[1].kernel.transpose());
    dens /= static_cast<double>(n);
    std::vector<double> out(static_cast<std::size_t>(dens.size()));
    for (Eigen::Index a = 0; a < dens.rows(); ++a)
      for (Eigen::Index b = 0; b < dens.cols(); ++b)
        out[static_cast<std::size_t>(a * dens.cols() + b)] = std::max(dens(a, b), 0.0);
    return out;
  };

  est.values = evaluate(nullptr);
  if (opt.bootstrap > 0) {
    std::vector<double> sum(est.values.size(), 0.0), sum2(est.values.size(), 0.0);
    std::vector<double> weight(n);
    for (int b = 0; b < opt.bootstrap; ++b) {
      std::fill(weight.begin(), weight.end(), 0.0);
      const NormalStream stream(opt.seed, static_cast<std::uint64_t>(b), StreamTag::Bootstrap);
      for (std::size_t i = 0; i < n; ++i) {
        auto idx = static_cast<std::size_t>(stream.uniform(i) * static_cast<double>(n));
        weight[std::min(idx, n - 1)] += 1.0;
      }
      const auto v = evaluate(&weight);
      for (std::size_t c = 0; c < v.size(); ++c) {
        sum[c] += v[c];
        sum2[c] += v[c] * v[c];
      }
    }
    est.stderr_values.resize(est.values.size());
    const double B = opt.bootstrap;
    for (std::size_t c = 0; c < sum.size(); ++c) {
      const double m = sum[c] / B;
      est.stderr_values[c] = std::sqrt(std::max(sum2[c] / B - m * m, 0.0) * B / std::max(B - 1.0, 1.0));
    }
  }
  return est;
}

std::vector<TailPoint> tail_probability(const std::vector<double>& samples,
                                        const std::vector<double>& thresholds) {
  if (samples.empty()) throw PreconditionError("tail probability needs samples");
  std::vector<double> s = samples;
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  constexpr double z = 1.959963984540054;
  std::vector<TailPoint> out;
  for (double t : thresholds) {
    TailPoint p;
    p.threshold = t;
    p.count = static_cast<std::size_t>(s.end() - std::upper_bound(s.begin(), s.end(), t));
    p.p = static_cast<double>(p.count) / n;
    if (p.count == 0) {
      p.lo = 0.0;
      p.hi = std::min(1.0, 3.0 / n);
    } else {
      const double denom = 1.0 + z * z / n;
      const double centre = (p.p + z * z / (2.0 * n)) / denom;
      const double half = z * std::sqrt(p.p * (1.0 - p.p) / n + z * z / (4.0 * n * n)) / denom;
      p.lo = std::max(0.0, centre - half);
      p.hi = std::min(1.0, centre + half);
    }
    out.push_back(p);
  }
  return out;
}

double fit_minimal_constant(const std::function<bool(double)>& pred, double lo, double hi,
                            int iterations) {
  if (pred(lo)) return lo;
  if (!pred(hi)) return std::numeric_limits<double>::infinity();
  double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < iterations && b - a > 1e-12; ++i) {
    const double m = 0.5 * (a + b);
    (pred(std::exp(m)) ? b : a) = m;
  }
  return std::exp(b);
}

const char* to_string(Theorem t) {
  switch (t) {
    case Theorem::ThmF: return "ThmF";
    case Theorem::CorF2: return "CorF2";
    case Theorem::ThmM0: return "ThmM0";
    case Theorem::TailF2: return "TailF2";
    case Theorem::TailM0: return "TailM0";
    case Theorem::EqMoment: return "EqMoment";
  }
  return "?";
}

namespace {
Theorem theorem_from_string(const std::string& s) {
  for (Theorem t : {Theorem::ThmF, Theorem::CorF2, Theorem::ThmM0, Theorem::TailF2, Theorem::TailM0,
                    Theorem::EqMoment})
    if (s == to_string(t)) return t;
  throw ConfigurationError("unknown theorem tag: " + s);
}
}  // namespace

bool BoundReport::bound_pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const DeltaVerdict& v) { return v.pass; });
}

std::string to_json(const BoundReport& r) {
  nlohmann::ordered_json j;
  j["schema"] = "heatsup.bound_report";
  j["schema_version"] = kBoundReportSchemaVersion;
  j["theorem"] = to_string(r.theorem);
  j["variant"] = r.variant;
  j["fitted_c"] = r.fitted_c;
  j["reference_delta"] = r.reference_delta;
  j["verdicts"] = nlohmann::ordered_json::array();
  for (const auto& v : r.verdicts) {
    j["verdicts"].push_back({{"delta", v.delta},
                             {"checked", v.checked},
                             {"excluded", v.excluded},
                             {"violations", v.violations},
                             {"worst_ratio", v.worst_ratio},
                             {"pass", v.pass}});
  }
  j["collapse_checked"] = r.collapse_checked;
  j["collapse_distance"] = r.collapse_distance;
  j["collapse_peak"] = r.collapse_peak;
  j["collapse_tolerance"] = r.collapse_tolerance;
  j["pass"] = r.pass();
  return j.dump(2);
}

BoundReport bound_report_from_json(const std::string& s) {
  const auto j = nlohmann::json::parse(s);
  if (j.value("schema", "") != "heatsup.bound_report")
    throw ConfigurationError("not a bound report");
  if (j.at("schema_version").get<int>() != kBoundReportSchemaVersion)
    throw ConfigurationError("unsupported bound report schema version");
  BoundReport r;
  r.theorem = theorem_from_string(j.at("theorem").get<std::string>());
  r.variant = j.at("variant").get<std::string>();
  r.fitted_c = j.at("fitted_c").get<double>();
  r.reference_delta = j.at("reference_delta").get<double>();
  for (const auto& v : j.at("verdicts")) {
    DeltaVerdict d;
    d.delta = v.at("delta").get<double>();
    d.checked = v.at("checked").get<std::size_t>();
    d.excluded = v.at("excluded").get<std::size_t>();
    d.violations = v.at("violations").get<std::size_t>();
    d.worst_ratio = v.at("worst_ratio").get<double>();
    d.pass = v.at("pass").get<bool>();
    r.verdicts.push_back(d);
  }
  r.collapse_checked = j.at("collapse_checked").get<bool>();
  r.collapse_distance = j.at("collapse_distance").get<double>();
  r.collapse_peak = j.at("collapse_peak").get<double>();
  r.collapse_tolerance = j.at("collapse_tolerance").get<double>();
  return r;
}

double MSampleSet::delta() const { return std::sqrt(delta1) + delta2; }

namespace {

// Shared machinery of the two density bound checks. `bound(c, i, j)` is the
// envelope at lattice point (i, j) of estimate `e`; `admissible(i, j)` the
// region where it is claimed.
struct LatticeCheck {
  const DensityEstimate* est;
  std::function<double(double, std::size_t, std::size_t)> bound;
  std::function<bool(std::size_t, std::size_t)> admissible;
};

template <class F>
void for_each_point(const DensityEstimate& e, F f) {
  const std::size_t n0 = e.axes[0].size(), n1 = e.dims == 2 ? e.axes[1].size() : 1;
  for (std::size_t i = 0; i < n0; ++i)
    for (std::size_t j = 0; j < n1; ++j) f(i, j);
}

double fit_on_lattice(const LatticeCheck& lc) {
  return fit_minimal_constant([&](double c) {
    bool ok = true;
    for_each_point(*lc.est, [&](std::size_t i, std::size_t j) {
      if (!ok || !lc.admissible(i, j)) return;
      const double p = lc.est->at(i, j);
      if (p > 0.0 && p > lc.bound(c, i, j)) ok = false;
    });
    return ok;
  });
}

DeltaVerdict check_on_lattice(const LatticeCheck& lc, double c, double delta, double slack_se) {
  DeltaVerdict v;
  v.delta = delta;
  for_each_point(*lc.est, [&](std::size_t i, std::size_t j) {
    if (!lc.admissible(i, j)) {
      ++v.excluded;
      return;
    }
    ++v.checked;
    const double p = lc.est->at(i, j);
    if (p == 0.0) return;
    const double b = lc.bound(c, i, j);
    const double reduced = p - slack_se * lc.est->se(i, j);
    const double ratio = b > 0.0 ? reduced / b : (reduced > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    v.worst_ratio = std::max(v.worst_ratio, ratio);
    if (reduced > b) ++v.violations;
  });
  v.pass = v.violations == 0;
  return v;
}

std::vector<double> pooled_axis(const std::vector<std::vector<double>>& columns, double pad, int points) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& c : columns) {
    const auto [a, b] = std::minmax_element(c.begin(), c.end());
    lo = std::min(lo, *a);
    hi = std::max(hi, *b);
  }
  std::vector<double> ax(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) ax[i] = (lo - pad) + (hi - lo + 2.0 * pad) * i / (points - 1);
  return ax;
}

}  // namespace

BoundReport verify_density_bound_F(const std::vector<FSampleSet>& input, const BoundCheckOptions& opt) {
  if (input.size() < 2) throw PreconditionError("density bound check needs at least two delta1 values");
  for (const auto& s : input)
    if (s.F1.size() < opt.min_samples || s.F2.size() != s.F1.size())
      throw PreconditionError("insufficient samples for the density bound check");
  auto sets = input;
  std::sort(sets.begin(), sets.end(), [](const auto& a, const auto& b) { return a.delta1 < b.delta1; });

  BoundReport rep;
  rep.theorem = opt.refined ? Theorem::ThmF : Theorem::CorF2;
  rep.variant = opt.refined ? "refined" : "envelope";
  rep.reference_delta = sets.back().delta1;
  rep.collapse_tolerance = opt.collapse_tolerance;

  std::vector<DensityEstimate> est;
  for (std::size_t k = 0; k < sets.size(); ++k) {
    KdeOptions ko;
    ko.bandwidth_factor = 0.5;
    ko.lattice_points = opt.lattice_points;
    ko.bootstrap = opt.bootstrap;
    ko.seed = opt.seed + k;
    est.push_back(kde({sets[k].F1, sets[k].F2}, ko));
  }
  const auto make_check = [&](std::size_t k) {
    const double d1 = sets[k].delta1;
    const double q = std::pow(d1, 0.25);
    const DensityEstimate* e = &est[k];
    LatticeCheck lc;
    lc.est = e;
    lc.admissible = [e, q](std::size_t, std::size_t j) { return e->axes[1][j] >= q; };
    const bool refined = opt.refined;
    lc.bound = [e, d1, q, refined](double c, std::size_t i, std::size_t j) {
      const double z1 = e->axes[0][i], z2 = e->axes[1][j];
      double b = c / q * std::exp(-z2 * z2 / (c * std::sqrt(d1)));
      if (refined) {
        const double a = std::abs(z1);
        b *= (a > 1.0 ? std::pow(a, -0.25) : 1.0) * std::exp(-z1 * z1 / c);
      }
      return b;
    };
    return lc;
  };
  rep.fitted_c = fit_on_lattice(make_check(sets.size() - 1));
  for (std::size_t k = 0; k < sets.size(); ++k)
    rep.verdicts.push_back(check_on_lattice(make_check(k), rep.fitted_c, sets[k].delta1, opt.slack_se));

  // scaling collapse in (z1, z2 / delta1^{1/4})
  std::vector<std::vector<double>> z1s, zetas;
  for (const auto& s : sets) {
    const double q = std::pow(s.delta1, 0.25);
    std::vector<double> zeta(s.F2.size());
    for (std::size_t i = 0; i < zeta.size(); ++i) zeta[i] = s.F2[i] / q;
    z1s.push_back(s.F1);
    zetas.push_back(std::move(zeta));
  }
  const double h1 = silverman_bandwidth(z1s.back(), 2), h2 = silverman_bandwidth(zetas.back(), 2);
  KdeOptions ko;
  ko.bandwidth = {h1, h2};
  ko.axes = {pooled_axis(z1s, 3.0 * h1, opt.lattice_points), pooled_axis(zetas, 3.0 * h2, opt.lattice_points)};
  std::vector<DensityEstimate> scaled;
  for (std::size_t k = 0; k < sets.size(); ++k) scaled.push_back(kde({z1s[k], zetas[k]}, ko));
  rep.collapse_checked = true;
  for (const auto& e : scaled) rep.collapse_peak = std::max(rep.collapse_peak, e.peak());
  for (std::size_t a = 0; a < scaled.size(); ++a)
    for (std::size_t b = a + 1; b < scaled.size(); ++b)
      for_each_point(scaled[a], [&](std::size_t i, std::size_t j) {
        if (scaled[a].axes[1][j] < 1.0) return;
        rep.collapse_distance = std::max(rep.collapse_distance, std::abs(scaled[a].at(i, j) - scaled[b].at(i, j)));
      });
  return rep;
}

BoundReport verify_density_bound_M0(const std::vector<MSampleSet>& input, const BoundCheckOptions& opt) {
  if (input.size() < 2) throw PreconditionError("density bound check needs at least two configurations");
  for (const auto& s : input)
    if (s.M0.size() < opt.min_samples) throw PreconditionError("insufficient samples for the density bound check");
  auto sets = input;
  std::sort(sets.begin(), sets.end(), [](const auto& a, const auto& b) { return a.delta() < b.delta(); });

  BoundReport rep;
  rep.theorem = Theorem::ThmM0;
  rep.variant = "envelope";
  rep.reference_delta = sets.back().delta();
  rep.collapse_tolerance = opt.collapse_tolerance;

  std::vector<DensityEstimate> est;
  for (std::size_t k = 0; k < sets.size(); ++k) {
    KdeOptions ko;
    ko.bandwidth_factor = 0.5;
    ko.lattice_points = opt.lattice_points;
    ko.bootstrap = opt.bootstrap;
    ko.seed = opt.seed + k;
    est.push_back(kde({sets[k].M0}, ko));
  }
  const auto make_check = [&](std::size_t k) {
    const double d = sets[k].delta();
    const double q = std::sqrt(d);
    const DensityEstimate* e = &est[k];
    LatticeCheck lc;
    lc.est = e;
    lc.admissible = [e, q](std::size_t i, std::size_t) { return e->axes[0][i] >= q; };
    lc.bound = [e, d, q](double c, std::size_t i, std::size_t) {
      const double z = e->axes[0][i];
      return c / q * std::exp(-z * z / (c * d));
    };
    return lc;
  };
  rep.fitted_c = fit_on_lattice(make_check(sets.size() - 1));
  for (std::size_t k = 0; k < sets.size(); ++k)
    rep.verdicts.push_back(check_on_lattice(make_check(k), rep.fitted_c, sets[k].delta(), opt.slack_se));

  std::vector<std::vector<double>> scaled_samples;
  for (const auto& s : sets) {
    const double q = std::sqrt(s.delta());
    std::vector<double> z(s.M0.size());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = s.M0[i] / q;
    scaled_samples.push_back(std::move(z));
  }
  const double h = silverman_bandwidth(scaled_samples.back(), 1);
  KdeOptions ko;
  ko.bandwidth = {h};
  ko.axes = {pooled_axis(scaled_samples, 3.0 * h, opt.lattice_points)};
  std::vector<DensityEstimate> scaled;
  for (const auto& z : scaled_samples) scaled.push_back(kde({z}, ko));
  rep.collapse_checked = true;
  for (const auto& e : scaled) rep.collapse_peak = std::max(rep.collapse_peak, e.peak());
  for (std::size_t a = 0; a < scaled.size(); ++a)
    for (std::size_t b = a + 1; b < scaled.size(); ++b)
      for (std::size_t i = 0; i < scaled[a].axes[0].size(); ++i) {
        if (scaled[a].axes[0][i] < 1.0) continue;
        rep.collapse_distance = std::max(rep.collapse_distance, std::abs(scaled[a].at(i) - scaled[b].at(i)));
      }
  return rep;
}

BoundReport verify_tail_bound(Theorem which, const std::vector<double>& scales,
                              const std::vector<std::vector<double>>& samples,
                              const std::vector<double>& zeta, std::size_t min_samples) {
  if (scales.size() != samples.size() || scales.size() < 2)
    throw PreconditionError("tail check needs matching scales and samples for at least two deltas");
  for (const auto& s : samples)
    if (s.size() < min_samples) throw PreconditionError("insufficient samples for the tail check");
  std::vector<std::size_t> order(scales.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return scales[a] < scales[b]; });

  BoundReport rep;
  rep.theorem = which;
  rep.variant = "gaussian_tail";
  const std::size_t ref = order.back();
  rep.reference_delta = scales[ref];
  const auto curve = [&](std::size_t k) {
    std::vector<double> z(zeta.size());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = scales[k] * zeta[i];
    return tail_probability(samples[k], z);
  };
  const auto bound = [](double c, double z, double s) { return c * std::exp(-z * z / (c * s * s)); };
  const auto ref_curve = curve(ref);
  rep.fitted_c = fit_minimal_constant([&](double c) {
    for (const auto& p : ref_curve)
      if (p.p > bound(c, p.threshold, scales[ref])) return false;
    return true;
  });
  for (std::size_t k : order) {
    DeltaVerdict v;
    v.delta = scales[k];
    for (const auto& p : curve(k)) {
      ++v.checked;
      const double b = bound(rep.fitted_c, p.threshold, scales[k]);
      v.worst_ratio = std::max(v.worst_ratio, b > 0.0 ? p.lo / b : 0.0);
      if (p.lo > b) ++v.violations;
    }
    v.pass = v.violations == 0;
    rep.verdicts.push_back(v);
  }
  return rep;
}

ScalingFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y,
                      const std::vector<double>& y_se) {
  if (x.size() != y.size() || x.size() < 2) throw PreconditionError("regression needs two points");
  ScalingFit f;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DomainError("log-log regression needs positive data");
    f.x.push_back(std::log(x[i]));
    f.y.push_back(std::log(y[i]));
    f.y_se.push_back(y_se.empty() ? 0.0 : y_se[i]);
  }
  const bool weighted = !y_se.empty() && std::all_of(f.y_se.begin(), f.y_se.end(), [](double s) { return s > 0.0; });
  double sw = 0, sx = 0, sy = 0;
  std::vector<double> w(f.x.size(), 1.0);
  if (weighted)
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = 1.0 / (f.y_se[i] * f.y_se[i]);
  for (std::size_t i = 0; i < w.size(); ++i) {
    sw += w[i];
    sx += w[i] * f.x[i];
    sy += w[i] * f.y[i];
  }
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    sxx += w[i] * (f.x[i] - mx) * (f.x[i] - mx);
    sxy += w[i] * (f.x[i] - mx) * (f.y[i] - my);
  }
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (weighted) {
    f.slope_se = std::sqrt(1.0 / sxx);
  } else if (w.size() > 2) {
    double rss = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double r = f.y[i] - f.intercept - f.slope * f.x[i];
      rss += r * r;
    }
    f.slope_se = std::sqrt(rss / static_cast<double>(w.size() - 2) / sxx);
  }
  return f;
}

ScalingFit mean_sup_scaling(const std::vector<double>& scales, const std::vector<std::vector<double>>& samples) {
  if (scales.size() < 3 || scales.size() != samples.size())
    throw PreconditionError("scaling regression needs at least three delta values");
  std::vector<double> m, se;
  for (const auto& s : samples) {
    if (s.size() < 2) throw PreconditionError("scaling regression needs samples");
    const double mu = mean_of(s);
    m.push_back(mu);
    se.push_back(sd_of(s) / (std::abs(mu) * std::sqrt(static_cast<double>(s.size()))));
  }
  return loglog_fit(scales, m, se);
}

ExponentRow exponent_from_increments(const std::string& name, const std::vector<double>& lag,
                                     const std::vector<std::vector<double>>& sq, double target,
                                     double tolerance) {
  ExponentRow row;
  row.name = name;
  row.target = target;
  row.tolerance = tolerance;
  std::vector<double> m, se;
  for (const auto& s : sq) {
    const double mu = mean_of(s);
    m.push_back(mu);
    se.push_back(s.size() > 1 ? sd_of(s) / (mu * std::sqrt(static_cast<double>(s.size()))) : 0.0);
  }
  row.fit = loglog_fit(lag, m, se);
  row.ci_half_width = 1.96 * row.fit.slope_se;
  return row;
}

bool RegularityReport::pass() const {
  return rect_pass && std::all_of(rows.begin(), rows.end(), [](const ExponentRow& r) { return r.pass(); });
}

void write_csv(std::ostream& os, const DensityEstimate& d) {
  os.precision(17);
  if (d.dims == 1) {
    os << "z,value,stderr\n";
    for (std::size_t i = 0; i < d.axes[0].size(); ++i) os << d.axes[0][i] << ',' << d.at(i) << ',' << d.se(i) << '\n';
  } else {
    os << "z1,z2,value,stderr\n";
    for (std::size_t i = 0; i < d.axes[0].size(); ++i)
      for (std::size_t j = 0; j < d.axes[1].size(); ++j)
        os << d.axes[0][i] << ',' << d.axes[1][j] << ',' << d.at(i, j) << ',' << d.se(i, j) << '\n';
  }
}

void write_csv(std::ostream& os, const std::vector<TailPoint>& tail) {
  os.precision(17);
  os << "threshold,p,lo,hi,count\n";
  for (const auto& p : tail) os << p.threshold << ',' << p.p << ',' << p.lo << ',' << p.hi << ',' << p.count << '\n';
}

}  // namespace heatsup
