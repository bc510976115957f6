#include "heatsup/rng.hpp"

#include <cmath>
#include <numbers>

namespace heatsup {

namespace {
constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline double to_unit(std::uint32_t hi, std::uint32_t lo) {
  // 53 random bits, shifted off zero
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 21) ^ (lo >> 11);
  return (static_cast<double>(bits & ((1ull << 53) - 1)) + 0.5) * 0x1.0p-53;
}
}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c,
                                        std::array<std::uint32_t, 2> k) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, c[0], hi0, lo0);
    mulhilo(kM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kW0;
    k[1] += kW1;
  }
  return c;
}

NormalStream::NormalStream(std::uint64_t seed, std::uint64_t path, StreamTag tag)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      path_lo_(static_cast<std::uint32_t>(path)),
      path_hi_tag_((static_cast<std::uint32_t>(path >> 32) & 0x00FFFFFFu) |
                   (static_cast<std::uint32_t>(tag) << 24)) {}

std::array<std::uint32_t, 4> NormalStream::block(std::uint64_t b) const {
  return philox4x32({static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                     path_lo_, path_hi_tag_},
                    key_);
}

double NormalStream::operator()(std::uint64_t index) const {
  const auto w = block(index >> 1);
  const double u1 = to_unit(w[0], w[1]);
  const double u2 = to_unit(w[2], w[3]);
  const double rad = std::sqrt(-2.0 * std::log(u1));
  const double ang = 2.0 * std::numbers::pi * u2;
  return (index & 1u) ? rad * std::sin(ang) : rad * std::cos(ang);
}

void NormalStream::fill(std::uint64_t first, double* out, std::size_t n) const {
  std::size_t i = 0;
  if (n == 0) return;
  if (first & 1u) {
    out[i++] = (*this)(first);
  }
  for (; i + 1 < n; i += 2) {
    const auto w = block((first + i) >> 1);
    const double rad = std::sqrt(-2.0 * std::log(to_unit(w[0], w[1])));
    const double ang = 2.0 * std::numbers::pi * to_unit(w[2], w[3]);
    out[i] = rad * std::cos(ang);
    out[i + 1] = rad * std::sin(ang);
  }
  if (i < n) out[i] = (*this)(first + i);
}

double NormalStream::uniform(std::uint64_t index) const {
  const auto w = block(index >> 1);
  return (index & 1u) ? to_unit(w[2], w[3]) : to_unit(w[0], w[1]);
}

}  // namespace heatsup
