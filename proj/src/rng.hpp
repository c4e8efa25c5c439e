#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace itwlab {

// Philox4x64-10 counter-based generator. A block is a pure function of
// (counter, key), so streams can be split and consumed in any order.
struct Philox4x64 {
  static std::array<std::uint64_t, 4> block(std::array<std::uint64_t, 4> counter,
                                            std::array<std::uint64_t, 2> key);
};

// Stateless stream of N(0,1) variates indexed by a 64-bit counter.
// Same (seed, path_index, stream, index) always yields the same value,
// independent of call order or thread placement.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t path_index, std::uint64_t stream)
      : key_{seed, path_index}, stream_(stream) {}

  double normal(std::uint64_t index) const;
  void fill(std::uint64_t start_index, std::span<double> out) const;

 private:
  std::array<double, 4> block_normals(std::uint64_t block) const;

  std::array<std::uint64_t, 2> key_;
  std::uint64_t stream_;
};

}  // namespace itwlab
