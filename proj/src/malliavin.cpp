#include "heatsup/malliavin.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "heatsup/errors.hpp"

namespace heatsup {

using boost::math::quadrature::gauss_kronrod;

Jet phi0(double s) { return plateau(s, 0.0, 1.0, 1.0, 1.0); }

AuxFieldSpec AuxFieldSpec::standard(const WindowConfig& w, double g0_amplitude) {
  AuxFieldSpec a;
  const double c1 = w.c1, C1 = w.C1, T = w.T, c2 = w.c2, C2 = w.C2;
  a.f0 = [=](double t) { return plateau(t, c1, C1, c1 / 2.0, (T - C1) / 2.0); };
  a.g0 = [=](double v) {
    Jet j = plateau(v, c2, C2, c2 / 2.0, (1.0 - C2) / 2.0);
    return Jet{g0_amplitude * j.v, g0_amplitude * j.d1, g0_amplitude * j.d2};
  };
  a.y0 = w.y0;
  a.delta1 = w.delta1;
  a.delta = w.delta();
  return a;
}

Jet AuxFieldSpec::phi_delta1(double v) const {
  const double s = std::sqrt(delta1);
  const Jet j = phi0((v - y0) / s);
  return {j.v, j.d1 / s, j.d2 / delta1};
}

Jet AuxFieldSpec::phibar_delta(double v) const {
  const Jet j = phi0((v - y0) / delta);
  return {j.v, j.d1 / delta, j.d2 / (delta * delta)};
}

SeparableSource AuxFieldSpec::source() const {
  const auto f = f0;
  const auto g = g0;
  return {[f](double r) { return f(r).v; }, [f](double r) { return f(r).d1; },
          [g](double v) { return g(v).v; }, [g](double v) { return g(v).d1; },
          [g](double v) { return g(v).d2; }};
}

double pair_DF1_uA1(const WindowConfig& w, const AuxFieldSpec& spec, BoundaryCondition bc,
                    const KernelParams& params) {
  if (!(w.s0 > 0.0)) throw DomainError("degenerate window: F1 vanishes when s0 = 0");
  return heat_identity_A(w.s0, w.y0, spec.source(), bc, params);
}

double pair_Duincrement_uA1(double t, double s, const WindowConfig& w, const AuxFieldSpec& spec,
                            BoundaryCondition bc, const KernelParams& params, bool diagnostic) {
  if (!diagnostic && !(w.I.contains(t) && w.I.contains(s)))
    throw PreconditionError("pairing times must lie in I");
  if (t == s) return 0.0;
  const auto src = spec.source();
  const auto A = [&](double a) { return a > 0.0 ? heat_identity_A(a, w.y0, src, bc, params) : 0.0; };
  return A(t) - A(s);
}

std::vector<double> psi_integral(const SeminormTrace& tr, const CutoffSpec& cut) {
  std::vector<double> g(tr.r.size(), 0.0);
  for (std::size_t k = 1; k < tr.r.size(); ++k) {
    const double a = psi_log(tr.log_value[k - 1], cut.log_R);
    const double b = psi_log(tr.log_value[k], cut.log_R);
    g[k] = g[k - 1] + 0.5 * (a + b) * (tr.r[k] - tr.r[k - 1]);
  }
  return g;
}

GridField build_uA2(const SeminormTrace& tr, const CutoffSpec& cut, const AuxFieldSpec& spec,
                    const std::vector<double>& positions) {
  GridField u;
  u.times = tr.r;
  u.positions = positions;
  u.info_time = tr.r;
  u.values.assign(tr.r.size() * positions.size(), 0.0);
  const auto gamma = psi_integral(tr, cut);
  std::vector<Jet> phi(positions.size());
  for (std::size_t j = 0; j < positions.size(); ++j) phi[j] = spec.phi_delta1(positions[j]);
  for (std::size_t k = 1; k < tr.r.size(); ++k) {
    const double p = psi_log(tr.log_value[k], cut.log_R);
    for (std::size_t j = 0; j < positions.size(); ++j) u(k, j) = phi[j].v * p - phi[j].d2 * gamma[k];
  }
  return u;
}

GridField build_uA2(const FieldPath& path, const WindowConfig& w, const SeminormParams& sp,
                    const CutoffSpec& cut, const AuxFieldSpec& spec) {
  return build_uA2(Y_trace(path, w, sp), cut, spec, path.positions);
}

std::vector<double> control_volumes(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<double> v(n, 0.0);
  if (n < 2) return v;
  for (std::size_t j = 0; j < n; ++j) {
    const double left = j > 0 ? x[j] - x[j - 1] : 0.0;
    const double right = j + 1 < n ? x[j + 1] - x[j] : 0.0;
    v[j] = 0.5 * (left + right);
  }
  return v;
}

double h_inner_product(const GridField& a, const GridField& b, const std::vector<double>& vol) {
  if (a.times != b.times || a.positions != b.positions)
    throw PreconditionError("fields live on different grids");
  if (vol.size() != a.cols()) throw PreconditionError("volume vector does not match the grid");
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < a.rows(); ++k) {
    double row = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) row += vol[j] * a(k, j) * b(k, j);
    s += (a.times[k + 1] - a.times[k]) * row;
  }
  return s;
}

double h_norm_squared(const GridField& a, const std::vector<double>& vol) {
  return h_inner_product(a, a, vol);
}

double walsh_integral(const NoiseField& noise, const GridField& h) {
  if (h.cols() != noise.cols()) throw PreconditionError("integrand and noise positions differ");
  for (std::size_t j = 0; j < h.cols(); ++j)
    if (std::abs(h.positions[j] - noise.positions[j]) > 1e-12)
      throw PreconditionError("integrand and noise positions differ");
  if (h.info_time.size() != h.rows()) throw ContractError("integrand carries no adaptedness record");
  const double eps = 1e-9 * noise.dt;
  const auto step_of = [&](double t) {
    const double f = (t - noise.t0) / noise.dt;
    const double n = std::round(f);
    if (std::abs(f - n) * noise.dt > eps || n < 0.0 || n > static_cast<double>(noise.nt))
      throw PreconditionError("integrand time is not a noise step time");
    return static_cast<std::size_t>(n);
  };
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < h.rows(); ++k) {
    if (h.info_time[k] > h.times[k] + eps)
      throw ContractError("integrand is not adapted: row depends on noise after its cell start");
    const std::size_t n0 = step_of(h.times[k]), n1 = step_of(h.times[k + 1]);
    for (std::size_t n = n0; n < n1; ++n)
      for (std::size_t j = 0; j < h.cols(); ++j) total += h(k, j) * noise(n, j);
  }
  return total;
}

GridField derivative_kernel_field(double t, double x, const std::vector<double>& times,
                                  const std::vector<double>& positions, BoundaryCondition bc,
                                  const KernelParams& params) {
  GridField g;
  g.times = times;
  g.positions = positions;
  g.info_time.assign(times.size(), -std::numeric_limits<double>::infinity());
  g.values.assign(times.size() * positions.size(), 0.0);
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!(times[k] < t)) continue;
    for (std::size_t j = 0; j < positions.size(); ++j)
      g(k, j) = evaluate_green(t - times[k], x, positions[j], bc, params);
  }
  return g;
}

double kernel_inner_product(double t, double x, double s, double y, BoundaryCondition bc,
                            const KernelParams& params, double tol) {
  if (s > t) {
    std::swap(t, s);
    std::swap(x, y);
  }
  if (s <= 0.0) return 0.0;
  const double gap = t - s;
  // r = s - sigma^2
  const auto outer = [&](double sigma) {
    if (sigma == 0.0) return 0.0;
    const double tau = sigma * sigma;
    const auto other = [&](double v) { return evaluate_green(gap + tau, x, v, bc, params); };
    return 2.0 * sigma * heat_semigroup(tau, y, other, bc, params, tol);
  };
  return gauss_kronrod<double, 31>::integrate(outer, 0.0, std::sqrt(s), 15, tol);
}

double pair_DYr_uA1(const FieldPath& p, const WindowConfig& w, double r, const SeminormParams& sp,
                    const AuxFieldSpec& spec, BoundaryCondition bc, const KernelParams& params,
                    std::function<double(double)> pairing) {
  const FResult f = compute_F(p, w);
  const std::size_t i0 = f.s0_index;
  const std::size_t i1 = snap_to_axis(p.times, r).index;
  if (i1 < i0) throw PreconditionError("r before s0");
  if (!pairing) {
    const auto src = spec.source();
    pairing = [src, bc, params, y0 = w.y0](double t) {
      return t > 0.0 ? heat_identity_A(t, y0, src, bc, params) : 0.0;
    };
  }
  std::vector<double> P(i1 - i0 + 1), u(i1 - i0 + 1), t(i1 - i0 + 1);
  for (std::size_t i = i0; i <= i1; ++i) {
    t[i - i0] = p.times[i];
    u[i - i0] = p(i, f.y0_index);
    P[i - i0] = pairing(p.times[i]);
  }
  const std::size_t n = t.size();
  const auto weight = [&](std::size_t i) {
    return 0.5 * ((i > 0 ? t[i] - t[i - 1] : 0.0) + (i + 1 < n ? t[i + 1] - t[i] : 0.0));
  };
  const int odd = 2 * sp.p0 - 1;
  double sum = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const double dp = P[i] - P[j];
      const double inc = u[i] - u[j];
      if (dp == 0.0 || inc == 0.0) continue;
      sum += weight(i) * weight(j) * std::pow(inc, odd) * dp / std::pow(t[i] - t[j], sp.gamma0 / 2.0);
    }
  }
  return 2.0 * 2.0 * sp.p0 * sum;
}

double pair_DF2_uA2(const std::vector<double>& r, const std::vector<double>& psi_values, double S,
                    const AuxFieldSpec& spec, BoundaryCondition bc, const KernelParams& params,
                    double tol) {
  if (r.size() != psi_values.size() || r.size() < 2) throw PreconditionError("bad psi trace");
  if (S < r.front() || S > r.back()) throw PreconditionError("S outside the trace");
  const auto phi = [&](double v) { return spec.phi_delta1(v).v; };
  const auto phi2 = [&](double v) { return spec.phi_delta1(v).d2; };
  double gamma = 0.0, total = 0.0;
  for (std::size_t k = 0; k + 1 < r.size() && r[k] < S; ++k) {
    const double a = r[k], b = std::min(r[k + 1], S), h = r[k + 1] - r[k];
    const double p0 = psi_values[k], slope = (psi_values[k + 1] - psi_values[k]) / h;
    const double g0 = gamma;
    const auto integrand = [&](double rho) {
      const double d = rho - a;
      const double ps = p0 + slope * d;
      const double gm = g0 + p0 * d + 0.5 * slope * d * d;
      const double tau = S - rho;
      return ps * heat_semigroup(tau, spec.y0, phi, bc, params, tol) -
             gm * heat_semigroup(tau, spec.y0, phi2, bc, params, tol);
    };
    total += gauss_kronrod<double, 15>::integrate(integrand, a, b, 10, tol);
    gamma += p0 * h + 0.5 * slope * h * h;
  }
  return total;
}

}  // namespace heatsup
