#pragma once

#include <functional>
#include <string>
#include <vector>

#include "averaged_field.hpp"
#include "fbm.hpp"

namespace itwlab::young {

// delta A_{u,v}(x); backing may be a tabulated AveragedField or a closed form.
using DeltaFn = std::function<double(double u, double v, double x)>;

DeltaFn delta_from(const averaging::AveragedField& A);

class Partition {
 public:
  static Partition uniform(double s, double t, std::int64_t pieces);
  // random refinement with mesh at most `mesh`
  static Partition random(double s, double t, double mesh, std::uint64_t seed);
  explicit Partition(std::vector<double> breakpoints);

  const std::vector<double>& breakpoints() const { return pts_; }
  double mesh() const;
  std::int64_t pieces() const { return static_cast<std::int64_t>(pts_.size()) - 1; }

 private:
  std::vector<double> pts_;
};

struct YoungIntegral {
  double value = 0.0;
  double error_estimate = 0.0;  // |S_k - S_{k-1}| at the last refinement
  int levels = 0;
  bool converged = false;
};

// Riemann sums sum delta A_{u,v}(Y_u) over dyadic refinements of [s,t] until
// two successive sums differ by < tol (max depth 16; non-convergence is
// reported through `converged` and the Cauchy residual).
YoungIntegral young_integral(const DeltaFn& dA, const std::function<double(double)>& Y, double s,
                             double t, double tol, int max_depth = 16);

double riemann_sum(const DeltaFn& dA, const std::function<double(double)>& Y,
                   const Partition& part);

struct YoungSolution {
  std::vector<double> times;
  std::vector<double> values;           // Y_{t_i}
  std::vector<double> local_increments; // per-step delta A applied
  double richardson_error = 0.0;        // |Y_T^h - Y_T^{h/2}|
  double empirical_order = 0.0;         // from h, h/2, h/4 endpoints
  double holder_proxy = 0.0;            // ||Y||_{C^beta} grid proxy
  double holder_beta = 0.0;
};

// One-step Davie scheme Y_{i+1} = Y_i + delta A_{t_i,t_{i+1}}(Y_i).
YoungSolution solve_yode(const DeltaFn& dA, double y0, double s, double t, std::int64_t steps,
                         double holder_beta = 0.5);

// X = Y + W^H on the solution grid (component 0).
std::vector<double> sde_reconstruct(const YoungSolution& y, const FbmPath& path);

struct CrosscheckResult {
  double sup_difference = 0.0;
  std::vector<double> times;
  std::vector<double> x_young;
  std::vector<double> x_euler;
};

// Euler-Maruyama on X against the Davie scheme on Y = X - W^H for a smooth
// drift along the same path.
CrosscheckResult euler_crosscheck(const fields::AdaptedField& b, const FbmPath& path, double x0,
                                  std::int64_t steps);

double holder_proxy(std::span<const double> times, std::span<const double> values, double beta);

}  // namespace itwlab::young
