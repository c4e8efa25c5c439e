#include "brownian.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace itwlab {

namespace {

std::int64_t checked_count(double span, double step, const char* what) {
  const double raw = span / step;
  const double rounded = std::round(raw);
  if (rounded < 1.0 || std::abs(raw - rounded) > 1e-9 * std::max(1.0, std::abs(raw))) {
    throw std::invalid_argument(std::string(what) + " must be an integral number of cells");
  }
  return static_cast<std::int64_t>(rounded);
}

}  // namespace

BrownianLattice BrownianLattice::sample(const LatticeConfig& cfg, std::uint64_t seed,
                                        std::uint64_t path_index) {
  if (cfg.step <= 0.0) throw std::invalid_argument("lattice step must be positive");
  if (cfg.left <= 0.0 || cfg.right <= 0.0)
    throw std::invalid_argument("lattice horizons must be positive");
  if (cfg.dims < 1) throw std::invalid_argument("dims must be >= 1");

  BrownianLattice lat;
  lat.cfg_ = cfg;
  lat.seed_ = seed;
  lat.path_index_ = path_index;
  lat.n_neg_ = checked_count(cfg.left, cfg.step, "left horizon");
  lat.n_pos_ = checked_count(cfg.right, cfg.step, "right horizon");
  checked_count(cfg.left + cfg.right, cfg.step, "total span");

  const std::int64_t n = lat.cells();
  lat.incs_.resize(static_cast<std::size_t>(cfg.dims) * n);
  const double sd = std::sqrt(cfg.step);
  for (int j = 0; j < cfg.dims; ++j) {
    NormalStream stream(seed, path_index, static_cast<std::uint64_t>(j));
    std::span<double> row{lat.incs_.data() + static_cast<std::size_t>(j) * n,
                          static_cast<std::size_t>(n)};
    stream.fill(0, row);
    for (double& v : row) v *= sd;
  }
  lat.rebuild_prefix();
  return lat;
}

void BrownianLattice::rebuild_prefix() {
  pos_prefix_.assign(static_cast<std::size_t>(cfg_.dims) * (n_pos_ + 1), 0.0);
  for (int j = 0; j < cfg_.dims; ++j) {
    double acc = 0.0;
    double* out = pos_prefix_.data() + static_cast<std::size_t>(j) * (n_pos_ + 1);
    out[0] = 0.0;
    for (std::int64_t c = 0; c < n_pos_; ++c) {
      acc += incs_[idx(j, n_neg_ + c)];
      out[c + 1] = acc;
    }
  }
}

bool BrownianLattice::on_grid(double t) const {
  if (t < -1e-12 || t > cfg_.right + 1e-12) return false;
  const double raw = t / cfg_.step;
  return std::abs(raw - std::round(raw)) <= 1e-9 * std::max(1.0, std::abs(raw));
}

std::int64_t BrownianLattice::grid_index(double t) const {
  if (!on_grid(t))
    throw std::invalid_argument("time " + std::to_string(t) + " is not on the lattice grid");
  return static_cast<std::int64_t>(std::round(t / cfg_.step));
}

double BrownianLattice::value_at(int j, double t) const { return value(j, grid_index(t)); }

BrownianLattice BrownianLattice::coarsen(int factor) const {
  if (factor < 1) throw std::invalid_argument("coarsen factor must be >= 1");
  if (n_neg_ % factor != 0 || n_pos_ % factor != 0)
    throw std::invalid_argument("coarsen factor must divide the cell counts");

  BrownianLattice lat;
  lat.cfg_ = cfg_;
  lat.cfg_.step = cfg_.step * factor;
  lat.seed_ = seed_;
  lat.path_index_ = path_index_;
  lat.n_neg_ = n_neg_ / factor;
  lat.n_pos_ = n_pos_ / factor;
  const std::int64_t n = lat.cells();
  lat.incs_.assign(static_cast<std::size_t>(cfg_.dims) * n, 0.0);
  for (int j = 0; j < cfg_.dims; ++j) {
    for (std::int64_t c = 0; c < n; ++c) {
      double acc = 0.0;
      for (int k = 0; k < factor; ++k) acc += incs_[idx(j, c * factor + k)];
      lat.incs_[static_cast<std::size_t>(j) * n + c] = acc;
    }
  }
  lat.rebuild_prefix();
  return lat;
}

BrownianLattice sample_lattice(const LatticeConfig& cfg, std::uint64_t seed,
                               std::uint64_t path_index) {
  return BrownianLattice::sample(cfg, seed, path_index);
}

}  // namespace itwlab
