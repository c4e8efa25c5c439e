#pragma once

#include <cstdint>
#include <vector>

#include "brownian.hpp"

namespace itwlab {

// Fractional Brownian motion W^H derived from one BrownianLattice by exact
// per-cell averages of the moving-average kernel
//   (s-u)_+^(H-1/2) - (-u)_+^(H-1/2),
// together with the split at time u <= r
//   W^H(r) = W1(u,r) + W2(u,r),
// where W1(u,r) integrates the kernel over (u,r] only (independent of the
// past) and W2 is defined as the difference, so reconstruction is exact.
class FbmPath {
 public:
  // eval_indices: strictly increasing lattice grid indices in [0, n_pos];
  // empty means every grid point.
  static FbmPath build(const BrownianLattice& lat, double hurst,
                       std::vector<std::int64_t> eval_indices = {});

  double hurst() const { return hurst_; }
  int dims() const { return dims_; }
  double step() const { return step_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t path_index() const { return path_index_; }
  std::int64_t points() const { return static_cast<std::int64_t>(times_.size()); }
  double time(std::int64_t m) const { return times_[m]; }
  const std::vector<double>& times() const { return times_; }

  // W^H_j at eval point m.
  double value(int j, std::int64_t m) const { return values_[val_idx(j, m)]; }

  // W^{1,H}_j(t_i, t_m) and W^{2,H}_j(t_i, t_m) for eval indices i <= m.
  double w1(int j, std::int64_t i, std::int64_t m) const {
    return w1_[tri_idx(j, i, m)];
  }
  double w2(int j, std::int64_t i, std::int64_t m) const {
    return value(j, m) - w1(j, i, m);
  }

  // Time-based accessors (one entry per component); u and r must be eval
  // times with u <= r.
  std::vector<double> w1_at(double u, double r) const;
  std::vector<double> w2_at(double u, double r) const;
  std::vector<double> value_at(double r) const;

  std::int64_t eval_index(double t) const;  // throws if t is not an eval point

  // Exact average of (r-v)^(H-1/2) over a cell at distance `gap` cells
  // before r (gap >= 1).
  double kernel_cell_avg(std::int64_t gap) const { return kbar_[gap]; }

  // Discrete Var(W1(t_i, t_m)) for eval points on the full grid; depends on
  // the index gap only.
  double w1_variance(std::int64_t i, std::int64_t m) const;

 private:
  FbmPath() = default;
  std::size_t val_idx(int j, std::int64_t m) const {
    return static_cast<std::size_t>(j) * times_.size() + m;
  }
  std::size_t tri_idx(int j, std::int64_t i, std::int64_t m) const {
    return static_cast<std::size_t>(j) * tri_size_ + static_cast<std::size_t>(m) * (m + 1) / 2 + i;
  }

  double hurst_ = 0.0;
  int dims_ = 1;
  double step_ = 0.0;
  std::uint64_t seed_ = 0;
  std::uint64_t path_index_ = 0;
  std::vector<double> times_;
  std::vector<std::int64_t> grid_of_eval_;  // lattice grid index per eval point
  std::size_t tri_size_ = 0;
  std::vector<double> kbar_;     // kernel cell averages by gap (index 0 unused)
  std::vector<double> kbar2_;    // step * cumulative sum of kbar^2
  std::vector<double> values_;   // dims x points
  std::vector<double> w1_;       // dims x triangular pair table
};

FbmPath fbm_from_lattice(const BrownianLattice& lat, double hurst,
                         const std::vector<double>& eval_times = {});

}  // namespace itwlab
