#pragma once

namespace heatsup {

/// Value with first and second derivatives.
struct Jet {
  double v = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// C-infinity monotone transition: 0 for s <= 0, 1 for s >= 1,
/// h(s) = e(s) / (e(s) + e(1-s)) with e(s) = exp(-1/s).
Jet smoothstep(double s);

/// Smooth plateau: 1 on [a, b], 0 outside [a - ramp_lo, b + ramp_hi].
Jet plateau(double x, double a, double b, double ramp_lo, double ramp_hi);

/// Supremum of h' over [0,1] (attained at s = 1/2).
double smoothstep_max_slope();

}  // namespace heatsup
