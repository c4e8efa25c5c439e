#include "fbm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace itwlab {

FbmPath FbmPath::build(const BrownianLattice& lat, double hurst,
                       std::vector<std::int64_t> eval_indices) {
  if (!(hurst > 0.0 && hurst < 1.0) || hurst == 0.5)
    throw std::invalid_argument("Hurst index must lie in (0,1) excluding 1/2");

  const std::int64_t n_pos = lat.positive_cells();
  const std::int64_t n_neg = lat.negative_cells();
  if (eval_indices.empty()) {
    eval_indices.resize(n_pos + 1);
    std::iota(eval_indices.begin(), eval_indices.end(), std::int64_t{0});
  }
  if (eval_indices.front() != 0)
    throw std::invalid_argument("eval grid must start at t=0");
  for (std::size_t k = 0; k < eval_indices.size(); ++k) {
    if (eval_indices[k] < 0 || eval_indices[k] > n_pos)
      throw std::invalid_argument("eval point not on lattice");
    if (k > 0 && eval_indices[k] <= eval_indices[k - 1])
      throw std::invalid_argument("eval grid must be strictly increasing");
  }

  FbmPath path;
  path.hurst_ = hurst;
  path.dims_ = lat.dims();
  path.step_ = lat.step();
  path.seed_ = lat.seed();
  path.path_index_ = lat.path_index();
  path.grid_of_eval_ = std::move(eval_indices);
  const std::size_t E = path.grid_of_eval_.size();
  path.times_.resize(E);
  for (std::size_t k = 0; k < E; ++k) path.times_[k] = lat.time(path.grid_of_eval_[k]);
  path.tri_size_ = E * (E + 1) / 2;

  // Exact cell averages of (r-v)^(H-1/2): kbar[g] over the cell ending g
  // steps before r. The closed-form antiderivative keeps the u->r
  // singularity integrable for H < 1/2.
  const double p = hurst + 0.5;
  const double dt = lat.step();
  const std::int64_t max_gap = n_pos + n_neg;
  path.kbar_.resize(max_gap + 1, 0.0);
  path.kbar2_.resize(n_pos + 1, 0.0);
  const double scale = std::pow(dt, hurst - 0.5) / p;
  double prev = 0.0;
  for (std::int64_t g = 1; g <= max_gap; ++g) {
    const double cur = std::pow(static_cast<double>(g), p);
    path.kbar_[g] = scale * (cur - prev);
    prev = cur;
  }
  for (std::int64_t g = 1; g <= n_pos; ++g)
    path.kbar2_[g] = path.kbar2_[g - 1] + dt * path.kbar_[g] * path.kbar_[g];

  path.values_.assign(static_cast<std::size_t>(path.dims_) * E, 0.0);
  path.w1_.assign(static_cast<std::size_t>(path.dims_) * path.tri_size_, 0.0);

  for (int j = 0; j < path.dims_; ++j) {
    // Tail sum over cells left of 0, shared across targets.
    double tail_base = 0.0;
    for (std::int64_t q = 1; q <= n_neg; ++q)
      tail_base += path.kbar_[q] * lat.increment(j, n_neg - q);

    for (std::size_t m = 0; m < E; ++m) {
      const std::int64_t gm = path.grid_of_eval_[m];
      // Positive cells, descending; record W1 at eval anchors on the way.
      double acc = 0.0;
      std::int64_t next_anchor = static_cast<std::int64_t>(m);
      path.w1_[path.tri_idx(j, next_anchor, m)] = 0.0;
      --next_anchor;
      for (std::int64_t c = gm - 1; c >= 0; --c) {
        acc += path.kbar_[gm - c] * lat.positive_increment(j, c);
        while (next_anchor >= 0 && path.grid_of_eval_[next_anchor] == c) {
          path.w1_[path.tri_idx(j, next_anchor, m)] = acc;
          --next_anchor;
        }
      }
      // Left tail of the moving-average kernel, truncated at -left.
      double tail = -tail_base;
      for (std::int64_t q = 1; q <= n_neg; ++q)
        tail += path.kbar_[gm + q] * lat.increment(j, n_neg - q);
      path.values_[path.val_idx(j, m)] = acc + tail;
    }
  }
  return path;
}

std::int64_t FbmPath::eval_index(double t) const {
  const double raw = t / step_;
  const std::int64_t gi = static_cast<std::int64_t>(std::round(raw));
  if (std::abs(raw - std::round(raw)) > 1e-9 * std::max(1.0, std::abs(raw)))
    throw std::invalid_argument("time is not on the lattice grid");
  // eval grid stores lattice indices in increasing order
  auto it = std::lower_bound(grid_of_eval_.begin(), grid_of_eval_.end(), gi);
  if (it == grid_of_eval_.end() || *it != gi)
    throw std::invalid_argument("time is not an eval grid point");
  return static_cast<std::int64_t>(it - grid_of_eval_.begin());
}

std::vector<double> FbmPath::w1_at(double u, double r) const {
  if (u > r + 1e-12) throw std::invalid_argument("w1 requires u <= r");
  const std::int64_t i = eval_index(u), m = eval_index(r);
  std::vector<double> out(dims_);
  for (int j = 0; j < dims_; ++j) out[j] = w1(j, i, m);
  return out;
}

std::vector<double> FbmPath::w2_at(double u, double r) const {
  if (u > r + 1e-12) throw std::invalid_argument("w2 requires u <= r");
  const std::int64_t i = eval_index(u), m = eval_index(r);
  std::vector<double> out(dims_);
  for (int j = 0; j < dims_; ++j) out[j] = w2(j, i, m);
  return out;
}

std::vector<double> FbmPath::value_at(double r) const {
  const std::int64_t m = eval_index(r);
  std::vector<double> out(dims_);
  for (int j = 0; j < dims_; ++j) out[j] = value(j, m);
  return out;
}

double FbmPath::w1_variance(std::int64_t i, std::int64_t m) const {
  const std::int64_t gap = grid_of_eval_[m] - grid_of_eval_[i];
  return kbar2_[gap];
}

FbmPath fbm_from_lattice(const BrownianLattice& lat, double hurst,
                         const std::vector<double>& eval_times) {
  std::vector<std::int64_t> idx;
  idx.reserve(eval_times.size());
  for (double t : eval_times) idx.push_back(lat.grid_index(t));
  return FbmPath::build(lat, hurst, std::move(idx));
}

}  // namespace itwlab
