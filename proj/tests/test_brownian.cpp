#include <doctest.h>

#include <cmath>
#include <vector>

#include "brownian.hpp"
#include "oracles.hpp"

using itwlab::BrownianLattice;
using itwlab::LatticeConfig;

TEST_CASE("lattice geometry and validation") {
  LatticeConfig cfg{1, 0.5, 1.0, 1.0};
  const auto lat = BrownianLattice::sample(cfg, 7, 0);
  CHECK(lat.cells() == 4);
  CHECK(lat.negative_cells() == 2);
  CHECK(lat.positive_cells() == 2);
  for (std::int64_t c = 0; c < lat.cells(); ++c) CHECK(std::isfinite(lat.increment(0, c)));

  CHECK_THROWS_AS(BrownianLattice::sample({1, -0.1, 1.0, 1.0}, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(BrownianLattice::sample({1, 0.3, 1.0, 1.0}, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(BrownianLattice::sample({1, 0.5, 0.0, 1.0}, 1, 0), std::invalid_argument);
}

TEST_CASE("lattice is deterministic in (seed, path_index)") {
  LatticeConfig cfg{2, 1.0 / 64, 2.0, 1.0};
  const auto a = BrownianLattice::sample(cfg, 99, 5);
  const auto b = BrownianLattice::sample(cfg, 99, 5);
  for (int j = 0; j < 2; ++j)
    for (std::int64_t c = 0; c < a.cells(); ++c)
      CHECK(a.increment(j, c) == b.increment(j, c));
  const auto c = BrownianLattice::sample(cfg, 99, 6);
  bool any_diff = false;
  for (std::int64_t i = 0; i < a.cells(); ++i)
    any_diff = any_diff || a.increment(0, i) != c.increment(0, i);
  CHECK(any_diff);
}

TEST_CASE("increment law matches N(0, step) at scale") {
  // mean within 3 SE of 0 and variance within 3 SE of step over 1e5 paths
  const double step = 0.5;
  LatticeConfig cfg{1, step, 0.5, 0.5};
  const int n = 100000;
  std::vector<double> first(n);
  for (int p = 0; p < n; ++p)
    first[p] = BrownianLattice::sample(cfg, 2024, static_cast<std::uint64_t>(p)).increment(0, 0);
  const auto mv = oracles::mean_var(first);
  CHECK(std::abs(mv.mean) < 3.0 * std::sqrt(step / n));
  CHECK(std::abs(mv.var - step) < 3.0 * mv.se_var);
}

TEST_CASE("per-cell variance across a single lattice stays near step") {
  // one long lattice, empirical variance of its cells
  LatticeConfig cfg{1, 1.0 / 1024, 16.0, 1.0};
  const auto lat = BrownianLattice::sample(cfg, 5, 1);
  std::vector<double> xs(lat.increments(0).begin(), lat.increments(0).end());
  const auto mv = oracles::mean_var(xs);
  CHECK(std::abs(mv.var - cfg.step) < 5.0 * mv.se_var);
}

TEST_CASE("prefix values and coarsening agree") {
  LatticeConfig cfg{1, 1.0 / 128, 1.0, 1.0};
  const auto lat = BrownianLattice::sample(cfg, 11, 3);
  double acc = 0.0;
  for (std::int64_t c = 0; c < 64; ++c) acc += lat.positive_increment(0, c);
  CHECK(lat.value(0, 64) == doctest::Approx(acc).epsilon(1e-15));

  const auto coarse = lat.coarsen(4);
  CHECK(coarse.positive_cells() == 32);
  CHECK(coarse.value(0, 16) == doctest::Approx(lat.value(0, 64)).epsilon(1e-14));
  CHECK(coarse.step() == doctest::Approx(4.0 / 128));
}

TEST_CASE("grid index lookup") {
  LatticeConfig cfg{1, 0.25, 1.0, 1.0};
  const auto lat = BrownianLattice::sample(cfg, 1, 0);
  CHECK(lat.grid_index(0.5) == 2);
  CHECK(lat.on_grid(0.75));
  CHECK(!lat.on_grid(0.3));
  CHECK_THROWS_AS(lat.grid_index(0.3), std::invalid_argument);
}
