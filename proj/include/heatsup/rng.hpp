#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

namespace heatsup {

/// Philox4x32-10 block function (Salmon, Moraes, Dror, Shaw 2011).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key);

/// Stream tags separating the independent uses of one (seed, path) pair.
enum class StreamTag : std::uint32_t {
  SpectralModes = 1,
  FdNoise = 2,
  GaussianWindow = 3,
  Refinement = 4,
  Bootstrap = 5,
  Initial = 6,
};

/// Standard normals addressed by (seed, path, tag, index). Pure function of its
/// key, so any subset of indices can be drawn in any order.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t path, StreamTag tag);

  double operator()(std::uint64_t index) const;
  void fill(std::uint64_t first, double* out, std::size_t n) const;

  /// Uniform on (0,1), same addressing.
  double uniform(std::uint64_t index) const;

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint32_t path_lo_;
  std::uint32_t path_hi_tag_;
  std::array<std::uint32_t, 4> block(std::uint64_t b) const;
};

}  // namespace heatsup
