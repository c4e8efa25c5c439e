#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rng.hpp"

namespace itwlab {

struct LatticeConfig {
  int dims = 1;
  double step = 1.0 / 1024;  // grid step
  double left = 50.0;        // grid starts at -left
  double right = 1.0;        // grid ends at +right
};

// Discretized two-sided Brownian motion on a uniform grid over [-left, right].
// Increments are N(0, step), one per cell per component, derived from a
// counter-based stream so the lattice is a pure function of
// (config, seed, path_index).
class BrownianLattice {
 public:
  static BrownianLattice sample(const LatticeConfig& cfg, std::uint64_t seed,
                                std::uint64_t path_index);

  int dims() const { return cfg_.dims; }
  double step() const { return cfg_.step; }
  double left() const { return cfg_.left; }
  double right() const { return cfg_.right; }
  const LatticeConfig& config() const { return cfg_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t path_index() const { return path_index_; }

  std::int64_t cells() const { return n_neg_ + n_pos_; }
  std::int64_t negative_cells() const { return n_neg_; }
  std::int64_t positive_cells() const { return n_pos_; }

  // Cell 0 covers [-left, -left+step).
  double increment(int j, std::int64_t cell) const { return incs_[idx(j, cell)]; }
  std::span<const double> increments(int j) const {
    return {incs_.data() + static_cast<std::size_t>(j) * cells(),
            static_cast<std::size_t>(cells())};
  }

  // Increment of the cell starting at the non-negative grid point gi.
  double positive_increment(int j, std::int64_t gi) const {
    return incs_[idx(j, n_neg_ + gi)];
  }

  // B_j at non-negative grid point gi in [0, positive_cells()], with B_j(0)=0.
  double value(int j, std::int64_t gi) const {
    return pos_prefix_[static_cast<std::size_t>(j) * (n_pos_ + 1) + gi];
  }

  // B_j(t) for t >= 0 on the grid; throws if t is not a grid point.
  double value_at(int j, double t) const;

  std::int64_t grid_index(double t) const;  // t >= 0 on the grid, else throws
  bool on_grid(double t) const;
  double time(std::int64_t gi) const { return static_cast<double>(gi) * cfg_.step; }

  // Aggregates groups of `factor` cells into one. The result is the same
  // Brownian motion observed on the coarser grid (used for
  // quadrature-consistency checks at a fixed realization).
  BrownianLattice coarsen(int factor) const;

 private:
  BrownianLattice() = default;
  std::size_t idx(int j, std::int64_t cell) const {
    return static_cast<std::size_t>(j) * cells() + cell;
  }
  void rebuild_prefix();

  LatticeConfig cfg_;
  std::uint64_t seed_ = 0;
  std::uint64_t path_index_ = 0;
  std::int64_t n_neg_ = 0;
  std::int64_t n_pos_ = 0;
  std::vector<double> incs_;        // dims x cells
  std::vector<double> pos_prefix_;  // dims x (n_pos+1)
};

BrownianLattice sample_lattice(const LatticeConfig& cfg, std::uint64_t seed,
                               std::uint64_t path_index);

}  // namespace itwlab
