#include "heatsup/green.hpp"

#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "heatsup/errors.hpp"

namespace heatsup {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kImageTermFloor = 1e-16;

void check_position(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("position outside [0,1]");
}

double sign_of_reflection(BoundaryCondition bc) {
  return bc == BoundaryCondition::Dirichlet ? -1.0 : 1.0;
}

// Whole-line heat kernel (4 pi t)^{-1/2} exp(-d^2 / 4t).
double gauss(double t, double d) {
  return std::exp(-d * d / (4.0 * t)) / std::sqrt(4.0 * kPi * t);
}

// Integral of gauss(tau, d) over tau in [0, b].
double gauss_integrated(double b, double d) {
  d = std::abs(d);
  const double sb = std::sqrt(b);
  return sb / std::sqrt(kPi) * std::exp(-d * d / (4.0 * b)) - 0.5 * d * std::erfc(d / (2.0 * sb));
}

template <class Term>
double image_sum(Term term, BoundaryCondition bc, double x, double y, int max_images) {
  const double sgn = sign_of_reflection(bc);
  double sum = term(x - y) + sgn * term(x + y);
  for (int k = 1;; ++k) {
    if (k > max_images) {
      throw TruncationError("image series did not converge", std::abs(term(2.0 * k - 2.0)));
    }
    const double a = term(x - y + 2.0 * k) + term(x - y - 2.0 * k);
    const double b = term(x + y + 2.0 * k) + term(x + y - 2.0 * k);
    sum += a + sgn * b;
    if (k >= 2 && std::max(std::abs(a), std::abs(b)) < kImageTermFloor) break;
  }
  return sum;
}

// Smallest N with tail bound of sum_{n>N} weight(n) e^{-pi^2 t n^2} below tol.
template <class Bound>
int modes_needed(Bound tail, double tol, int cap) {
  int n = 1;
  while (tail(n) > tol) {
    if (n >= cap) throw TruncationError("eigen series needs more modes than allowed", tail(cap));
    n = std::min(cap, n * 2);
  }
  int lo = n / 2, hi = n;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    (tail(mid) > tol ? lo : hi) = mid;
  }
  return hi;
}

double green_eigen(double t, double x, double y, BoundaryCondition bc, const KernelParams& p) {
  const auto tail = [t](int n) {
    const double a = kPi * kPi * t;
    const double first = 2.0 * std::exp(-a * (n + 1.0) * (n + 1.0));
    return first / (1.0 - std::exp(-a * (2.0 * n + 3.0)));
  };
  const int modes = modes_needed(tail, 0.5 * p.tolerance, p.truncation);
  double sum = bc == BoundaryCondition::Neumann ? 1.0 : 0.0;
  for (int n = 1; n <= modes; ++n) {
    sum += eigenfunction(n, x, bc) * eigenfunction(n, y, bc) * std::exp(-eigenvalue(n) * t);
  }
  return sum;
}

double green_image(double t, double x, double y, BoundaryCondition bc, const KernelParams& p) {
  return image_sum([t](double d) { return gauss(t, d); }, bc, x, y, p.truncation);
}

double gamma_eigen(double b, double x, double y, BoundaryCondition bc, const KernelParams& p) {
  const auto tail = [b](int n) {
    const double a = kPi * kPi * b;
    const double m = n + 1.0;
    const double first = 2.0 * std::exp(-a * m * m) / (kPi * kPi * m * m);
    return first / (1.0 - std::exp(-a * (2.0 * n + 3.0)));
  };
  const int modes = modes_needed(tail, 0.5 * p.tolerance, p.truncation);
  double stationary;
  if (bc == BoundaryCondition::Dirichlet) {
    stationary = std::min(x, y) - x * y;
  } else {
    const auto s = [](double th) { return kPi * kPi / 6.0 - kPi * th / 2.0 + th * th / 4.0; };
    stationary = b + (s(kPi * std::abs(x - y)) + s(kPi * (x + y))) / (kPi * kPi);
  }
  double sum = 0.0;
  for (int n = 1; n <= modes; ++n) {
    const double lam = eigenvalue(n);
    sum += eigenfunction(n, x, bc) * eigenfunction(n, y, bc) * std::exp(-lam * b) / lam;
  }
  return stationary - sum;
}

double gamma_image(double b, double x, double y, BoundaryCondition bc, const KernelParams& p) {
  return image_sum([b](double d) { return gauss_integrated(b, d); }, bc, x, y, p.truncation);
}

bool use_image(double t, const KernelParams& p) {
  switch (p.method) {
    case KernelMethod::Image: return true;
    case KernelMethod::Eigen: return false;
    case KernelMethod::Auto: break;
  }
  return t < kCrossoverTime;
}

}  // namespace

const char* to_string(BoundaryCondition bc) {
  return bc == BoundaryCondition::Dirichlet ? "dirichlet" : "neumann";
}

BoundaryCondition boundary_from_string(const std::string& s) {
  if (s == "dirichlet" || s == "Dirichlet") return BoundaryCondition::Dirichlet;
  if (s == "neumann" || s == "Neumann") return BoundaryCondition::Neumann;
  throw ConfigurationError("unknown boundary condition '" + s + "'");
}

double eigenvalue(int n) { return kPi * kPi * static_cast<double>(n) * n; }

double eigenfunction(int n, double x, BoundaryCondition bc) {
  if (bc == BoundaryCondition::Dirichlet) return std::numbers::sqrt2 * std::sin(n * kPi * x);
  if (n == 0) return 1.0;
  return std::numbers::sqrt2 * std::cos(n * kPi * x);
}

double evaluate_green(double t, double x, double y, BoundaryCondition bc, const KernelParams& p) {
  if (!(t > 0.0)) throw DomainError("green kernel requires t > 0");
  check_position(x);
  check_position(y);
  return use_image(t, p) ? green_image(t, x, y, bc, p) : green_eigen(t, x, y, bc, p);
}

double integrated_green(double b, double x, double y, BoundaryCondition bc, const KernelParams& p) {
  if (b < 0.0) throw DomainError("integrated kernel requires b >= 0");
  check_position(x);
  check_position(y);
  if (b == 0.0) return 0.0;
  return use_image(b, p) ? gamma_image(b, x, y, bc, p) : gamma_eigen(b, x, y, bc, p);
}

double covariance(double t, double x, double s, double y, BoundaryCondition bc,
                  const KernelParams& p) {
  if (t < 0.0 || s < 0.0) throw DomainError("covariance requires nonnegative times");
  if (t == 0.0 || s == 0.0) return 0.0;
  return 0.5 * (integrated_green(t + s, x, y, bc, p) - integrated_green(std::abs(t - s), x, y, bc, p));
}

double covariance_series(double t, double x, double s, double y, BoundaryCondition bc, int modes) {
  if (t < 0.0 || s < 0.0) throw DomainError("covariance requires nonnegative times");
  const double lo = std::min(t, s);
  double sum = bc == BoundaryCondition::Neumann ? lo : 0.0;
  for (int n = 1; n <= modes; ++n) {
    const double lam = eigenvalue(n);
    sum += eigenfunction(n, x, bc) * eigenfunction(n, y, bc) * std::exp(-lam * std::abs(t - s)) *
           -std::expm1(-2.0 * lam * lo) / (2.0 * lam);
  }
  return sum;
}

double rect_increment_variance(double t, double s, double x, double y, BoundaryCondition bc,
                               const KernelParams& p) {
  // a = u(t,x), b = u(s,y), c = u(t,y), d = u(s,x); variance of a + b - c - d
  const std::array<double, 4> tt{t, s, t, s};
  const std::array<double, 4> xx{x, y, y, x};
  const std::array<double, 4> w{1.0, 1.0, -1.0, -1.0};
  double v = 0.0;
  for (int i = 0; i < 4; ++i) {
    for (int j = i; j < 4; ++j) {
      const double c = covariance(tt[i], xx[i], tt[j], xx[j], bc, p);
      v += (i == j ? 1.0 : 2.0) * w[i] * w[j] * c;
    }
  }
  return std::max(v, 0.0);
}

double heat_semigroup(double tau, double x, const std::function<double(double)>& h,
                      BoundaryCondition bc, const KernelParams& params, double tol) {
  check_position(x);
  if (tau <= 0.0) return h(x);
  using boost::math::quadrature::gauss_kronrod;
  const double s = std::sqrt(tau);
  constexpr double kReach = 13.0;  // exp(-w^2/4) below 1e-18 beyond this
  const double wlo = std::max(-x / s, -kReach);
  const double whi = std::min((1.0 - x) / s, kReach);
  const auto integrand = [&](double w) {
    const double v = std::clamp(x + s * w, 0.0, 1.0);
    return s * evaluate_green(tau, x, v, bc, params) * h(v);
  };
  double total = 0.0;
  if (wlo < 0.0) total += gauss_kronrod<double, 31>::integrate(integrand, wlo, 0.0, 15, tol);
  if (whi > 0.0) total += gauss_kronrod<double, 31>::integrate(integrand, 0.0, whi, 15, tol);
  return total;
}

double heat_identity_A(double t, double x, const SeparableSource& src, BoundaryCondition bc,
                       const KernelParams& params, double tol) {
  if (!(t > 0.0)) throw DomainError("heat identity requires t > 0");
  check_position(x);
  constexpr double kBcTol = 1e-10;
  if (std::abs(src.f(0.0)) > kBcTol) throw PreconditionError("f(0) must vanish");
  if (bc == BoundaryCondition::Dirichlet) {
    if (std::abs(src.g(0.0)) > kBcTol || std::abs(src.g(1.0)) > kBcTol)
      throw PreconditionError("g must vanish at 0 and 1 for Dirichlet kernels");
  } else if (std::abs(src.dg(0.0)) > kBcTol || std::abs(src.dg(1.0)) > kBcTol) {
    throw PreconditionError("g' must vanish at 0 and 1 for Neumann kernels");
  }
  using boost::math::quadrature::gauss_kronrod;
  // r = t - sigma^2 removes the 1/sqrt(t-r) concentration of the kernel
  const auto outer = [&](double sigma) {
    if (sigma == 0.0) return 0.0;
    const double r = t - sigma * sigma;
    const double fr = src.f(r), dfr = src.df(r);
    const auto source = [&](double v) { return dfr * src.g(v) - fr * src.d2g(v); };
    return 2.0 * sigma * heat_semigroup(sigma * sigma, x, source, bc, params, tol);
  };
  return gauss_kronrod<double, 31>::integrate(outer, 0.0, std::sqrt(t), 15, tol);
}

}  // namespace heatsup
