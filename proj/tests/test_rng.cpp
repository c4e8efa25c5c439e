#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "rng.hpp"

using itwlab::NormalStream;
using itwlab::Philox4x64;

TEST_CASE("Philox4x64-10 matches the reference implementation") {
  // Golden vectors generated with numpy.random.Philox (random_raw).
  {
    const auto out = Philox4x64::block({0, 0, 0, 0}, {0, 0});
    CHECK(out[0] == 0x02f4ba6408e4d89bULL);
    CHECK(out[1] == 0x3dd62b0b9ca8c5b2ULL);
    CHECK(out[2] == 0x1c8667a55d902e79ULL);
    CHECK(out[3] == 0x907d7a052fd5b4dcULL);
  }
  {
    const auto out = Philox4x64::block({1, 0, 0, 0}, {0, 0});
    CHECK(out[0] == 0x809bf322883987c3ULL);
    CHECK(out[1] == 0x471128b9e807f7ddULL);
    CHECK(out[2] == 0xf250ba0dbec065b7ULL);
    CHECK(out[3] == 0xfc6ed66767a457bcULL);
  }
  {
    const auto out = Philox4x64::block({~0ULL, ~0ULL, ~0ULL, ~0ULL}, {~0ULL, ~0ULL});
    CHECK(out[0] == 0x44b7493d1acfc229ULL);
    CHECK(out[1] == 0x6636af8e997921ddULL);
    CHECK(out[2] == 0x3f73e132b5b3780eULL);
    CHECK(out[3] == 0x605644dde03b01b1ULL);
  }
  {
    const auto out = Philox4x64::block({1, 2, 3, 4}, {5, 6});
    CHECK(out[0] == 0x92ab6a0e75619263ULL);
    CHECK(out[1] == 0xd8ff75bdc6bf8f60ULL);
    CHECK(out[2] == 0x450e124938725640ULL);
    CHECK(out[3] == 0x94eb1a7cffd20cbbULL);
  }
  {
    const auto out =
        Philox4x64::block({0xdeadbeef, 0xcafebabe, 0x12345678, 0x9abcdef0},
                          {0xa5a5a5a5, 0x5a5a5a5a});
    CHECK(out[0] == 0xd50d91a5327e2a5bULL);
    CHECK(out[1] == 0x0a4ed5e827659074ULL);
    CHECK(out[2] == 0xec1f61a2719e7db2ULL);
    CHECK(out[3] == 0x5a320f278064417fULL);
  }
}

TEST_CASE("normal stream is reproducible and order independent") {
  NormalStream s(12345, 7, 2);
  std::vector<double> batch(1000);
  s.fill(0, batch);
  for (std::size_t i : {0u, 1u, 17u, 999u}) CHECK(batch[i] == s.normal(i));

  // unaligned start
  std::vector<double> tail(37);
  s.fill(963, tail);
  for (std::size_t i = 0; i < tail.size(); ++i) CHECK(tail[i] == batch[963 + i]);

  // distinct streams and paths decorrelate
  NormalStream other(12345, 8, 2);
  CHECK(other.normal(0) != s.normal(0));
  NormalStream stream2(12345, 7, 3);
  CHECK(stream2.normal(0) != s.normal(0));
}

TEST_CASE("normal stream has N(0,1) moments") {
  NormalStream s(777, 0, 0);
  const std::size_t n = 400000;
  std::vector<double> xs(n);
  s.fill(0, xs);
  const auto mv = oracles::mean_var(xs);
  CHECK(std::abs(mv.mean) < 4.0 * mv.se_mean + 1e-12);
  CHECK(std::abs(mv.var - 1.0) < 4.0 * mv.se_var);

  // kurtosis
  double m4 = 0.0;
  for (double x : xs) m4 += x * x * x * x;
  m4 /= static_cast<double>(n);
  const double se_m4 = std::sqrt((oracles::gaussian_moment(8) - 9.0) / static_cast<double>(n));
  CHECK(std::abs(m4 - 3.0) < 4.0 * se_m4);
}
