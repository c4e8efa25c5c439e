#include "grid_field.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace itwlab::fspace {

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// In-place radix-2 FFT; sign = -1 forward, +1 inverse (unscaled).
void fft_pow2(std::span<std::complex<double>> a, int sign) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2.0 * M_PI / static_cast<double>(len);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const auto u = a[i + k];
        const auto v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

void fft_nd(std::vector<std::complex<double>>& a, int dim, int n, int sign) {
  if (dim == 1) {
    fft_pow2(a, sign);
    return;
  }
  std::vector<std::complex<double>> tmp(n);
  for (int r = 0; r < n; ++r)
    fft_pow2(std::span<std::complex<double>>(a.data() + static_cast<std::size_t>(r) * n, n), sign);
  for (int c = 0; c < n; ++c) {
    for (int r = 0; r < n; ++r) tmp[r] = a[static_cast<std::size_t>(r) * n + c];
    fft_pow2(tmp, sign);
    for (int r = 0; r < n; ++r) a[static_cast<std::size_t>(r) * n + c] = tmp[r];
  }
}

int signed_mode(int k, int n) { return k <= n / 2 ? k : k - n; }

}  // namespace

GridField::GridField(int dim, int n, double circumference)
    : dim_(dim), n_(n), circ_(circumference) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("GridField supports d in {1,2}");
  if (!power_of_two(n)) throw std::invalid_argument("points per axis must be a power of two");
  if (circ_ <= 0) throw std::invalid_argument("circumference must be positive");
  values_.assign(dim == 1 ? n : static_cast<std::size_t>(n) * n, 0.0);
}

GridField GridField::from_function(int dim, int n, double circumference,
                                   const std::function<double(std::span<const double>)>& f) {
  GridField g(dim, n, circumference);
  const double h = circumference / n;
  double xy[2];
  if (dim == 1) {
    for (int i = 0; i < n; ++i) {
      xy[0] = i * h;
      g.values_[i] = f(std::span<const double>(xy, 1));
    }
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        xy[0] = i * h;
        xy[1] = j * h;
        g.values_[static_cast<std::size_t>(i) * n + j] = f(std::span<const double>(xy, 2));
      }
  }
  return g;
}

void GridField::coordinates(std::size_t flat, std::span<double> out) const {
  const double h = cell();
  if (dim_ == 1) {
    out[0] = static_cast<double>(flat) * h;
  } else {
    out[0] = static_cast<double>(flat / n_) * h;
    out[1] = static_cast<double>(flat % n_) * h;
  }
}

const std::vector<std::complex<double>>& GridField::spectrum() const {
  if (!spectrum_valid_) {
    for (double v : values_)
      if (!std::isfinite(v)) throw std::domain_error("field contains non-finite values");
    spectrum_.assign(values_.begin(), values_.end());
    fft_nd(spectrum_, dim_, n_, -1);
    const double scale = 1.0 / static_cast<double>(values_.size());
    for (auto& c : spectrum_) c *= scale;
    spectrum_valid_ = true;
  }
  return spectrum_;
}

GridField GridField::from_spectrum(int dim, int n, double circumference,
                                   std::vector<std::complex<double>> coeffs) {
  GridField g(dim, n, circumference);
  if (coeffs.size() != g.values_.size()) throw std::invalid_argument("spectrum size mismatch");
  auto work = coeffs;
  fft_nd(work, dim, n, +1);
  for (std::size_t i = 0; i < g.values_.size(); ++i) g.values_[i] = work[i].real();
  g.spectrum_ = std::move(coeffs);
  g.spectrum_valid_ = true;
  return g;
}

double GridField::frequency(std::size_t flat, int axis) const {
  const double base = 2.0 * M_PI / circ_;
  if (dim_ == 1) return base * signed_mode(static_cast<int>(flat), n_);
  const int k = axis == 0 ? static_cast<int>(flat) / n_ : static_cast<int>(flat) % n_;
  return base * signed_mode(k, n_);
}

void GridField::to_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(17);
  if (dim_ == 1) {
    out << "x,value\n";
    for (int i = 0; i < n_; ++i) out << i * cell() << "," << values_[i] << "\n";
  } else {
    out << "x1,x2,value\n";
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        out << i * cell() << "," << j * cell() << ","
            << values_[static_cast<std::size_t>(i) * n_ + j] << "\n";
  }
}

GridField GridField::from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string line;
  std::getline(in, line);
  const int dim = line.find("x2") != std::string::npos ? 2 : 1;
  std::vector<double> xs, vals;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::vector<double> row;
    while (std::getline(ss, tok, ',')) row.push_back(std::stod(tok));
    xs.push_back(row[0]);
    vals.push_back(row.back());
  }
  const int n = dim == 1 ? static_cast<int>(vals.size())
                         : static_cast<int>(std::lround(std::sqrt(double(vals.size()))));
  const double circ = dim == 1 && n > 1 ? xs[1] * n : 2.0 * M_PI;
  GridField g(dim, n, dim == 1 ? circ : 2.0 * M_PI);
  std::copy(vals.begin(), vals.end(), g.values_.begin());
  return g;
}

GridField heat_apply(const GridField& f, double tau) {
  if (tau < 0) throw std::invalid_argument("heat time must be nonnegative");
  auto coeffs = f.spectrum();
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    double q = 0.0;
    for (int a = 0; a < f.dim(); ++a) {
      const double xi = f.frequency(k, a);
      q += xi * xi;
    }
    coeffs[k] *= std::exp(-0.5 * tau * q);
  }
  return GridField::from_spectrum(f.dim(), f.points(), f.circumference(), std::move(coeffs));
}

double sobolev_norm_value(const GridField& f, double m, double p) {
  if (p < 1) throw std::invalid_argument("p must be >= 1");
  const auto& coeffs = f.spectrum();
  if (p == 2.0) {
    double acc = 0.0;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
      double q = 1.0;
      for (int a = 0; a < f.dim(); ++a) {
        const double xi = f.frequency(k, a);
        q += xi * xi;
      }
      acc += std::pow(q, m) * std::norm(coeffs[k]);
    }
    return std::sqrt(std::pow(f.circumference(), f.dim()) * acc);
  }
  auto weighted = coeffs;
  for (std::size_t k = 0; k < weighted.size(); ++k) {
    double q = 1.0;
    for (int a = 0; a < f.dim(); ++a) {
      const double xi = f.frequency(k, a);
      q += xi * xi;
    }
    weighted[k] *= std::pow(q, 0.5 * m);
  }
  const GridField g = GridField::from_spectrum(f.dim(), f.points(), f.circumference(),
                                               std::move(weighted));
  double acc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) acc += std::pow(std::abs(g.value(i)), p);
  return std::pow(acc * std::pow(g.cell(), f.dim()), 1.0 / p);
}

NormReport sobolev_norm(const GridField& f, double m, double p) {
  std::ostringstream kind;
  kind << "sobolev(" << m << "," << p << ")";
  return {kind.str(), sobolev_norm_value(f, m, p), f.points(),
          p == 2.0 ? "plancherel" : "bessel-multiplier+grid-lp"};
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw std::invalid_argument("fit needs >= 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double det = n * sxx - sx * sx;
  if (std::abs(det) < 1e-300) throw std::domain_error("degenerate fit");
  LineFit out;
  out.slope = (n * sxy - sx * sy) / det;
  out.intercept = (sy - out.slope * sx) / n;
  return out;
}

SmoothingFit smoothing_check(const GridField& f, double gamma, double m, double p,
                             std::span<const double> taus) {
  if (taus.size() < 6) throw std::invalid_argument("smoothing check needs >= 6 tau values");
  SmoothingFit fit;
  fit.taus.assign(taus.begin(), taus.end());
  const double base = sobolev_norm_value(f, m - gamma, p);
  std::vector<double> lx, ly;
  for (double tau : taus) {
    const double nv = sobolev_norm_value(heat_apply(f, tau), m, p);
    fit.norms.push_back(nv);
    if (nv > 0.0) {
      lx.push_back(std::log(tau));
      ly.push_back(std::log(nv));
    }
    if (base > 0.0) fit.constant = std::max(fit.constant, std::pow(tau, 0.5 * gamma) * nv / base);
  }
  if (lx.size() < 2) throw std::domain_error("degenerate smoothing fit: norms vanish");
  fit.slope = fit_line(lx, ly).slope;
  return fit;
}

GridField spectral_gradient(const GridField& f, int axis) {
  auto coeffs = f.spectrum();
  const int n = f.points();
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    double xi = f.frequency(k, axis);
    // Nyquist mode has no well-defined sign; zero it in the derivative.
    const int mode = f.dim() == 1 ? static_cast<int>(k)
                                  : (axis == 0 ? static_cast<int>(k) / n : static_cast<int>(k) % n);
    if (mode == n / 2) xi = 0.0;
    coeffs[k] *= std::complex<double>(0.0, xi);
  }
  return GridField::from_spectrum(f.dim(), f.points(), f.circumference(), std::move(coeffs));
}

double sup_abs(const GridField& f) {
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, std::abs(f.value(i)));
  return m;
}

double cgamma_seminorm(const GridField& f, double gamma) {
  const int n = f.points();
  const double h = f.cell();
  const double L = f.circumference();
  double best = 0.0;
  if (f.dim() == 1) {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        double dist = (j - i) * h;
        dist = std::min(dist, L - dist);
        if (dist <= 0) continue;
        best = std::max(best, std::abs(f.value(j) - f.value(i)) / std::pow(dist, gamma));
      }
    }
    return best;
  }
  // d=2: dyadic offsets along axes and the diagonal
  for (int off = 1; off < n; off *= 2) {
    const double dist_axis = std::min(off * h, L - off * h);
    const double dist_diag = dist_axis * std::sqrt(2.0);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double v = f.at(i, j);
        const double da = std::abs(f.at((i + off) % n, j) - v);
        const double db = std::abs(f.at(i, (j + off) % n) - v);
        const double dc = std::abs(f.at((i + off) % n, (j + off) % n) - v);
        if (dist_axis > 0)
          best = std::max(best, std::max(da, db) / std::pow(dist_axis, gamma));
        best = std::max(best, dc / std::pow(dist_diag, gamma));
      }
    }
  }
  return best;
}

double c1gamma_proxy(const GridField& f, double gamma) {
  double acc = sup_abs(f);
  for (int a = 0; a < f.dim(); ++a) {
    const GridField grad = spectral_gradient(f, a);
    acc += sup_abs(grad) + cgamma_seminorm(grad, gamma);
  }
  return acc;
}

double embedding_ratio(const GridField& f, double p, double eps1, double gamma) {
  if (gamma >= eps1) throw std::invalid_argument("embedding probe requires gamma < eps1");
  const double num = c1gamma_proxy(f, gamma);
  const double den = sobolev_norm_value(f, 1.0 + f.dim() / p + eps1, p);
  if (num == 0.0 && den == 0.0) return 0.0;
  return num / den;
}

}  // namespace itwlab::fspace
