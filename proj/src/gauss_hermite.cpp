#include "gauss_hermite.hpp"

#include <cmath>
#include <stdexcept>

namespace itwlab {

namespace {

double hermite(int n, double x) {
  double hm = 1.0, h = 2.0 * x;
  if (n == 0) return hm;
  for (int k = 1; k < n; ++k) {
    const double hn = 2.0 * x * h - 2.0 * k * hm;
    hm = h;
    h = hn;
  }
  return h;
}

double bisect_root(int n, double lo, double hi) {
  double flo = hermite(n, lo);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = hermite(n, mid);
    if (fm == 0.0) return mid;
    if ((flo < 0) == (fm < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-15 * (1.0 + std::abs(mid))) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

GaussHermite::GaussHermite(int n) {
  if (n < 1) throw std::invalid_argument("Gauss-Hermite order must be >= 1");
  // Roots of H_k interlace roots of H_{k+1}; grow the root set from k=1.
  std::vector<double> roots{0.0};
  for (int k = 2; k <= n; ++k) {
    const double bound = std::sqrt(2.0 * k + 1.0) + 1.0;
    std::vector<double> next(k);
    for (int i = 0; i < k; ++i) {
      const double lo = (i == 0) ? -bound : roots[i - 1];
      const double hi = (i == k - 1) ? bound : roots[i];
      next[i] = bisect_root(k, lo, hi);
    }
    roots = std::move(next);
  }
  nodes_ = roots;
  weights_.resize(n);
  // w_i = 2^(n-1) n! sqrt(pi) / (n^2 H_{n-1}(x_i)^2)
  double coef = std::sqrt(M_PI) * std::pow(2.0, n - 1) / (static_cast<double>(n) * n);
  for (int k = 2; k <= n; ++k) coef *= k;
  for (int i = 0; i < n; ++i) {
    const double h = hermite(n - 1, nodes_[i]);
    weights_[i] = coef / (h * h);
  }
}

const GaussHermite& GaussHermite::standard21() {
  static const GaussHermite rule(21);
  return rule;
}

}  // namespace itwlab
