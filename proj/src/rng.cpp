#include "rng.hpp"

#include <cmath>

namespace itwlab {

namespace {

constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
  const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  hi = static_cast<std::uint64_t>(p >> 64);
  lo = static_cast<std::uint64_t>(p);
}

inline void round_once(std::array<std::uint64_t, 4>& c, const std::array<std::uint64_t, 2>& k) {
  std::uint64_t hi0, lo0, hi1, lo1;
  mulhilo(kMul0, c[0], hi0, lo0);
  mulhilo(kMul1, c[2], hi1, lo1);
  c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

// Uniform in (0,1]: never 0, so log() below is safe.
inline double unit_open(std::uint64_t v) {
  return static_cast<double>((v >> 11) + 1) * 0x1.0p-53;
}

inline double unit_closed(std::uint64_t v) {
  return static_cast<double>(v >> 11) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint64_t, 4> Philox4x64::block(std::array<std::uint64_t, 4> counter,
                                               std::array<std::uint64_t, 2> key) {
  for (int r = 0; r < 10; ++r) {
    round_once(counter, key);
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return counter;
}

std::array<double, 4> NormalStream::block_normals(std::uint64_t block) const {
  const auto out = Philox4x64::block({block, stream_, 0, 0}, key_);
  const double r0 = std::sqrt(-2.0 * std::log(unit_open(out[0])));
  const double a0 = 2.0 * M_PI * unit_closed(out[1]);
  const double r1 = std::sqrt(-2.0 * std::log(unit_open(out[2])));
  const double a1 = 2.0 * M_PI * unit_closed(out[3]);
  return {r0 * std::cos(a0), r0 * std::sin(a0), r1 * std::cos(a1), r1 * std::sin(a1)};
}

double NormalStream::normal(std::uint64_t index) const {
  return block_normals(index >> 2)[index & 3];
}

void NormalStream::fill(std::uint64_t start_index, std::span<double> out) const {
  std::size_t i = 0;
  std::uint64_t idx = start_index;
  while (i < out.size() && (idx & 3) != 0) out[i++] = normal(idx++);
  while (i + 4 <= out.size()) {
    const auto z = block_normals(idx >> 2);
    out[i] = z[0];
    out[i + 1] = z[1];
    out[i + 2] = z[2];
    out[i + 3] = z[3];
    i += 4;
    idx += 4;
  }
  while (i < out.size()) out[i++] = normal(idx++);
}

}  // namespace itwlab
