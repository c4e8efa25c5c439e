// Test-only oracles: frozen constants computed by independent quadrature
// before the implementation existed, plus small brute-force helpers. Nothing
// here may call into the code paths under test.
#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace oracles {

// Var(W^H(1)) = 1/(2H) + int_0^inf ((1+v)^(H-1/2) - v^(H-1/2))^2 dv,
// high-precision quadrature (mpmath, 30 digits), untruncated and truncated
// at the default left horizon 50.
inline constexpr double kVarConstH025 = 2.3962804694711844;
inline constexpr double kVarConstH03 = 1.8750709111678688;
inline constexpr double kVarConstH07 = 0.83889297187184361;
inline constexpr double kVarConstH025L50 = 2.3961643596924959;
inline constexpr double kVarConstH03L50 = 1.8749530584904114;
inline constexpr double kVarConstH07L50 = 0.83255517041393791;

inline double var_const(double hurst) {
  if (hurst == 0.25) return kVarConstH025;
  if (hurst == 0.3) return kVarConstH03;
  if (hurst == 0.7) return kVarConstH07;
  throw std::invalid_argument("no frozen variance constant for this H");
}

// Composite Simpson, used for small test-side integrals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

// Brute-force O(n^2) DFT for FFT validation.
inline std::vector<std::complex<double>> dft(std::span<const std::complex<double>> in) {
  const std::size_t n = in.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t j = 0; j < n; ++j) {
      const double ang = -2.0 * M_PI * static_cast<double>(k * j % n) / static_cast<double>(n);
      acc += in[j] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    out[k] = acc;
  }
  return out;
}

// Exact N(0,1) absolute moments E|Z|^m for small even m.
inline double gaussian_moment(int m) {
  double acc = 1.0;
  for (int k = m - 1; k > 1; k -= 2) acc *= k;
  return m % 2 == 0 ? acc : 0.0;
}

struct MeanVar {
  double mean = 0.0;
  double var = 0.0;
  double se_mean = 0.0;
  double se_var = 0.0;
};

inline MeanVar mean_var(std::span<const double> xs) {
  MeanVar out;
  const double n = static_cast<double>(xs.size());
  for (double x : xs) out.mean += x;
  out.mean /= n;
  for (double x : xs) out.var += (x - out.mean) * (x - out.mean);
  out.var /= (n - 1.0);
  out.se_mean = std::sqrt(out.var / n);
  out.se_var = out.var * std::sqrt(2.0 / (n - 1.0));
  return out;
}

}  // namespace oracles
