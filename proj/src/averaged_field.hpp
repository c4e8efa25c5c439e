#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fbm.hpp"
#include "fields.hpp"
#include "grid_field.hpp"

namespace itwlab::averaging {

struct TimeGridSpec {
  double horizon = 1.0;  // tabulate A on [0, horizon]
  int rows = 128;        // recorded rows after 0 (uniform)
};

struct SpaceGridSpec {
  int points = 128;
  bool periodic = true;
  double circumference = 6.2831853071795864769;  // periodic domain
  double xmin = -2.0, xmax = 2.0;                // line window otherwise
};

// Tabulated averaging operator A_u(x) = int_0^u b(s, x + W^H_s) ds on a
// time x space grid. Rows are cumulative, so increments add exactly.
class AveragedField {
 public:
  std::int64_t rows() const { return static_cast<std::int64_t>(times_.size()); }
  double time(std::int64_t i) const { return times_[i]; }
  double time_step() const { return times_.size() > 1 ? times_[1] - times_[0] : 0.0; }
  int space_points() const { return space_.points; }
  const SpaceGridSpec& space() const { return space_; }
  double x(int k) const;
  double value(std::int64_t ti, int k) const {
    return values_[static_cast<std::size_t>(ti) * space_.points + k];
  }

  // delta A_{s,t}(x) with cubic interpolation between space nodes; throws
  // std::out_of_range (with the position in the message) when x leaves a
  // non-periodic window.
  double delta(std::int64_t si, std::int64_t ti, double xq) const;

  std::int64_t row_of(double t) const;
  fspace::GridField delta_slice(std::int64_t si, std::int64_t ti) const;  // periodic only
  std::vector<double> gradient_row(std::int64_t ti) const;

  void to_csv(const std::string& path) const;

  std::string drift_id;
  double hurst = 0.0;
  std::uint64_t seed = 0, path_index = 0;

  friend AveragedField compute_A(const fields::AdaptedField&, const FbmPath&,
                                 const TimeGridSpec&, const SpaceGridSpec&);

 private:
  SpaceGridSpec space_;
  std::vector<double> times_;
  std::vector<double> values_;  // rows x points
  // per-frequency accumulators sum_s w_s exp(i k W_s) at each recorded row
  std::vector<std::complex<double>> freq_acc_;  // rows x modes (Fourier route)
  std::vector<fields::FourierMode> modes_;
};

// Deterministic drifts only; the time grid rows must divide the path grid.
AveragedField compute_A(const fields::AdaptedField& b, const FbmPath& path,
                        const TimeGridSpec& tg, const SpaceGridSpec& sg);

fspace::NormReport holder_two_param_norm(const AveragedField& A, double beta, double gamma);
fspace::NormReport holder_two_param_norm_c1(const AveragedField& A, double beta, double gamma);

struct ExponentFit {
  double exponent = 0.0;
  double ci_low = 0.0, ci_high = 0.0;  // bootstrap band when sampled
  std::vector<double> gaps;
  std::vector<double> values;
};

// Regression of log sup_s c1gamma(delta A_{s,s+gap}) on log gap over dyadic
// gaps (>= 4 scales).
ExponentFit holder_exponent_fit(const AveragedField& A, double gamma);

struct MomentScanConfig {
  std::string drift_id = "peano";
  double hurst = 0.25;
  int ell = 4;
  double gamma = 0.25;
  int n_paths = 500;
  std::vector<double> gaps;  // dyadic, >= 5 scales
  double horizon = 1.0;
  double path_step = 1.0 / 1024;
  double left_mult = 8.0;  // lattice left horizon = left_mult * horizon
  SpaceGridSpec space;
  std::uint64_t seed = 1;
  int workers = 0;
  int bootstrap = 200;
};

struct MomentScanResult {
  ExponentFit fit;      // slope of log E[||dA||^ell]^(1/ell) vs log gap
  int n_paths = 0;
  int ell = 4;
  double gamma = 0.0;
};

MomentScanResult regularity_moment_scan(const MomentScanConfig& cfg);

struct RoughnessRow {
  int modes = 0;
  double with_noise = 0.0;  // median over paths of sup_x |d_x A_T(x)|
  double control = 0.0;     // same with W == 0
};

struct RoughnessConfig {
  std::vector<int> mode_ladder{32, 64, 128, 256};
  double hurst = 0.25;
  int n_paths = 50;
  double horizon = 1.0;
  double path_step = 1.0 / 1024;
  int space_points = 512;
  std::uint64_t seed = 2;
  std::uint64_t fseed = 7;
  int workers = 0;
};

std::vector<RoughnessRow> roughness_stress_test(const RoughnessConfig& cfg);

}  // namespace itwlab::averaging
