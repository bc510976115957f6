#pragma once

#include <functional>
#include <string>

namespace heatsup {

enum class BoundaryCondition { Dirichlet, Neumann };

enum class KernelMethod { Eigen, Image, Auto };

struct KernelParams {
  int truncation = 400;       // max eigenmodes / image pairs
  double tolerance = 1e-12;   // target absolute error
  KernelMethod method = KernelMethod::Auto;
};

/// Crossover between image sums (small t) and eigen sums (large t).
inline constexpr double kCrossoverTime = 0.05;

const char* to_string(BoundaryCondition bc);
BoundaryCondition boundary_from_string(const std::string& s);

/// Eigenpair of -d^2/dx^2 on [0,1]; n starts at 1 (Dirichlet) or 0 (Neumann).
double eigenvalue(int n);
double eigenfunction(int n, double x, BoundaryCondition bc);

/// Heat kernel G(t,x,y) on [0,1].
double evaluate_green(double t, double x, double y, BoundaryCondition bc,
                      const KernelParams& params = {});

/// Time-integrated kernel: integral of G(tau,x,y) over tau in [0,b].
double integrated_green(double b, double x, double y, BoundaryCondition bc,
                        const KernelParams& params = {});

/// E[u(t,x) u(s,y)] for the mild solution started at zero.
double covariance(double t, double x, double s, double y, BoundaryCondition bc,
                  const KernelParams& params = {});

/// Plain truncated eigen series of the covariance with `modes` terms (no tail
/// correction). Useful as an independent cross-check.
double covariance_series(double t, double x, double s, double y, BoundaryCondition bc,
                         int modes);

/// E[(u(t,x)+u(s,y)-u(t,y)-u(s,x))^2].
double rect_increment_variance(double t, double s, double x, double y, BoundaryCondition bc,
                               const KernelParams& params = {});

/// Heat semigroup applied to h at (tau, x): integral over [0,1] of G(tau,x,v) h(v).
double heat_semigroup(double tau, double x, const std::function<double(double)>& h,
                      BoundaryCondition bc, const KernelParams& params = {},
                      double tol = 1e-11);

/// f(r) g(v) with the derivatives needed to apply (d/dr - d^2/dv^2).
struct SeparableSource {
  std::function<double(double)> f, df;
  std::function<double(double)> g, dg, d2g;
};

/// A(t,x) = integral over [0,t]x[0,1] of G(t-r,x,v) (d_r - d_vv)(f g)(r,v).
/// Equals f(t) g(x) when f(0)=0 and g matches the boundary condition.
double heat_identity_A(double t, double x, const SeparableSource& src, BoundaryCondition bc,
                       const KernelParams& params = {}, double tol = 1e-10);

}  // namespace heatsup
