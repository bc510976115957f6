#pragma once

#include <functional>
#include <vector>

#include "heatsup/bump.hpp"
#include "heatsup/field.hpp"
#include "heatsup/green.hpp"
#include "heatsup/seminorm.hpp"
#include "heatsup/suprema.hpp"

namespace heatsup {

/// phi0: 1 on [0,1], supported in [-1,2].
Jet phi0(double s);

/// Smooth cutoffs of the auxiliary fields.
struct AuxFieldSpec {
  std::function<Jet(double)> f0;  // time cutoff
  std::function<Jet(double)> g0;  // space cutoff
  double y0 = 0.5;
  double delta1 = 0.01;
  double delta = 0.0;  // delta1^{1/2} + delta2

  /// f0 = 1 on [c1, C1], support [c1/2, (C1+T)/2]; g0 = amplitude on [c2, C2],
  /// support [c2/2, (C2+1)/2].
  static AuxFieldSpec standard(const WindowConfig& w, double g0_amplitude = 1.0);

  Jet phi_delta1(double v) const;    // phi0((v - y0) / delta1^{1/2})
  Jet phibar_delta(double v) const;  // phi0((v - y0) / delta)
  SeparableSource source() const;    // f0(r) g0(v)
};

/// <DF1, uA1>: integral over [0,s0]x[0,1] of G(s0-r,y0,v)(d_r - d_vv)(f0 g0).
double pair_DF1_uA1(const WindowConfig& w, const AuxFieldSpec& spec, BoundaryCondition bc,
                    const KernelParams& params = {});

/// <D(u(t,y0) - u(s,y0)), uA1>. Outside I the call is rejected unless
/// `diagnostic` is set.
double pair_Duincrement_uA1(double t, double s, const WindowConfig& w, const AuxFieldSpec& spec,
                            BoundaryCondition bc, const KernelParams& params = {},
                            bool diagnostic = false);

/// Values on a time x space grid. Row k is measurable with respect to the
/// noise up to `info_time[k]`.
struct GridField {
  std::vector<double> times;
  std::vector<double> positions;
  std::vector<double> values;  // row-major
  std::vector<double> info_time;

  std::size_t rows() const { return times.size(); }
  std::size_t cols() const { return positions.size(); }
  double operator()(std::size_t i, std::size_t j) const { return values[i * cols() + j]; }
  double& operator()(std::size_t i, std::size_t j) { return values[i * cols() + j]; }
};

/// Running integral r -> int_{s0}^r psi(Y_a) da (trapezoid on the trace).
std::vector<double> psi_integral(const SeminormTrace& trace, const CutoffSpec& cut);

/// uA2(r,v) = phi(v) psi(Y_r) - phi''(v) int_{s0}^r psi(Y_a) da on the trace
/// times (r > s0), 0 at r = s0.
GridField build_uA2(const SeminormTrace& trace, const CutoffSpec& cut, const AuxFieldSpec& spec,
                    const std::vector<double>& positions);
GridField build_uA2(const FieldPath& path, const WindowConfig& w, const SeminormParams& sp,
                    const CutoffSpec& cut, const AuxFieldSpec& spec);

/// Control volumes of a nodal axis: half cells at the two ends.
std::vector<double> control_volumes(const std::vector<double>& positions);

/// Discrete H inner product: row k weighted by times[k+1] - times[k].
double h_inner_product(const GridField& a, const GridField& b, const std::vector<double>& volumes);
double h_norm_squared(const GridField& a, const std::vector<double>& volumes);

/// Walsh integral of an adapted integrand: row k multiplies the noise on
/// [times[k], times[k+1]). Every integrand time must be a noise step time.
double walsh_integral(const NoiseField& noise, const GridField& integrand);

/// Kernel of Du(t,x) sampled on a grid: 1_{r<t} G(t-r, x, v), info time 0.
GridField derivative_kernel_field(double t, double x, const std::vector<double>& times,
                                  const std::vector<double>& positions, BoundaryCondition bc,
                                  const KernelParams& params = {});

/// <Du(t,x), Du(s,y)>_H by nested quadrature.
double kernel_inner_product(double t, double x, double s, double y, BoundaryCondition bc,
                            const KernelParams& params = {}, double tol = 1e-10);

/// <DY_r, uA1> over [s0, r] on the path grid with the per-time pairing
/// P(t) = <Du(t,y0), uA1>; by default P is evaluated by quadrature.
double pair_DYr_uA1(const FieldPath& path, const WindowConfig& w, double r,
                    const SeminormParams& sp, const AuxFieldSpec& spec, BoundaryCondition bc,
                    const KernelParams& params = {},
                    std::function<double(double)> pairing = nullptr);

/// <D(u(S,y0) - u(s0,y0)), uA2> in the continuum with psi(Y) interpolated
/// linearly between trace times. Expected value: int_{s0}^S psi(Y_r) dr.
double pair_DF2_uA2(const std::vector<double>& r, const std::vector<double>& psi_values,
                    double S, const AuxFieldSpec& spec, BoundaryCondition bc,
                    const KernelParams& params = {}, double tol = 1e-9);

}  // namespace heatsup
