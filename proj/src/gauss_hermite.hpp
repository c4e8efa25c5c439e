#pragma once

#include <vector>

namespace itwlab {

// Gauss-Hermite rule for the weight exp(-x^2); exact on polynomials of
// degree <= 2n-1.
class GaussHermite {
 public:
  explicit GaussHermite(int n);

  int size() const { return static_cast<int>(nodes_.size()); }
  double node(int i) const { return nodes_[i]; }
  double weight(int i) const { return weights_[i]; }

  // E[f(mu + sigma Z)] with Z ~ N(0,1).
  template <class F>
  double gaussian_mean(double mu, double sigma, F&& f) const {
    constexpr double inv_sqrt_pi = 0.5641895835477562869;
    const double s = 1.4142135623730950488 * sigma;
    double acc = 0.0;
    for (int i = 0; i < size(); ++i) acc += weights_[i] * f(mu + s * nodes_[i]);
    return inv_sqrt_pi * acc;
  }

  static const GaussHermite& standard21();

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

}  // namespace itwlab
