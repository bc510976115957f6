#include "heatsup/bump.hpp"

#include <cmath>

namespace heatsup {

namespace {
// e(s) = exp(-1/s) and its derivatives; all vanish for s <= 0.
Jet edge(double s) {
  if (s <= 0.0) return {};
  const double e = std::exp(-1.0 / s);
  const double s2 = s * s;
  return {e, e / s2, e * (1.0 / (s2 * s2) - 2.0 / (s2 * s))};
}
}  // namespace

Jet smoothstep(double s) {
  if (s <= 0.0) return {0.0, 0.0, 0.0};
  if (s >= 1.0) return {1.0, 0.0, 0.0};
  const Jet a = edge(s);
  const Jet b0 = edge(1.0 - s);
  const Jet b{b0.v, -b0.d1, b0.d2};
  const double d = a.v + b.v;
  const double dd = a.d1 + b.d1;
  const double ddd = a.d2 + b.d2;
  const double v = a.v / d;
  const double v1 = (a.d1 - v * dd) / d;
  const double v2 = (a.d2 - 2.0 * v1 * dd - v * ddd) / d;
  return {v, v1, v2};
}

Jet plateau(double x, double a, double b, double ramp_lo, double ramp_hi) {
  if (x < a) {
    const Jet h = smoothstep((x - (a - ramp_lo)) / ramp_lo);
    return {h.v, h.d1 / ramp_lo, h.d2 / (ramp_lo * ramp_lo)};
  }
  if (x > b) {
    const Jet h = smoothstep(((b + ramp_hi) - x) / ramp_hi);
    return {h.v, -h.d1 / ramp_hi, h.d2 / (ramp_hi * ramp_hi)};
  }
  return {1.0, 0.0, 0.0};
}

double smoothstep_max_slope() { return smoothstep(0.5).d1; }

}  // namespace heatsup
