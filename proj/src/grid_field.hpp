#pragma once

#include <complex>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace itwlab::fspace {

struct NormReport {
  std::string kind;       // "sobolev(m,p)" | "holder(g)" | "two_param(b,g)"
  double value = 0.0;
  int resolution = 0;
  std::string estimator;  // "plancherel" | "grid-lp" | "grid-pairs" | ...
};

// Real field sampled on a periodic grid, d in {1,2}, n points per axis
// (power of two), circumference L (default 2*pi). Spectral cache holds the
// Fourier coefficients c_k with values = sum c_k exp(i 2pi k.x / L).
class GridField {
 public:
  GridField(int dim, int n, double circumference = 6.2831853071795864769);

  static GridField from_function(int dim, int n, double circumference,
                                 const std::function<double(std::span<const double>)>& f);

  int dim() const { return dim_; }
  int points() const { return n_; }
  double circumference() const { return circ_; }
  double cell() const { return circ_ / n_; }
  std::size_t size() const { return values_.size(); }

  double value(std::size_t flat) const { return values_[flat]; }
  double& value(std::size_t flat) {
    spectrum_valid_ = false;
    return values_[flat];
  }
  double at(int i, int j = 0) const {
    return values_[static_cast<std::size_t>(i) * (dim_ == 2 ? n_ : 1) + j];
  }
  std::span<const double> values() const { return values_; }
  void coordinates(std::size_t flat, std::span<double> out) const;

  const std::vector<std::complex<double>>& spectrum() const;
  static GridField from_spectrum(int dim, int n, double circumference,
                                 std::vector<std::complex<double>> coeffs);

  // signed integer mode index along an axis for flattened spectral index
  double frequency(std::size_t flat, int axis) const;

  void to_csv(const std::string& path) const;
  static GridField from_csv(const std::string& path);

 private:
  int dim_, n_;
  double circ_;
  std::vector<double> values_;
  mutable std::vector<std::complex<double>> spectrum_;
  mutable bool spectrum_valid_ = false;
};

GridField heat_apply(const GridField& f, double tau);
double sobolev_norm_value(const GridField& f, double m, double p);
NormReport sobolev_norm(const GridField& f, double m, double p);

struct SmoothingFit {
  double slope = 0.0;     // of log ||P_tau f||_{W^{m,p}} vs log tau
  double constant = 0.0;  // sup_tau tau^(gamma/2) ||P_tau f|| / ||f||_{W^{m-gamma,p}}
  std::vector<double> taus;
  std::vector<double> norms;
};
SmoothingFit smoothing_check(const GridField& f, double gamma, double m, double p,
                             std::span<const double> taus);

GridField spectral_gradient(const GridField& f, int axis);
double sup_abs(const GridField& f);
// Hoelder-gamma seminorm of the values over grid pairs (d=1 exhaustive,
// d=2 via dyadic offsets), with periodic distances.
double cgamma_seminorm(const GridField& f, double gamma);
// C^{1+gamma} proxy: sup|f| + sup|grad f| + Hoelder-gamma seminorm of the
// gradient (spectral gradients).
double c1gamma_proxy(const GridField& f, double gamma);
double embedding_ratio(const GridField& f, double p, double eps1, double gamma);

// Least-squares slope/intercept of y against x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace itwlab::fspace
