#include "fields.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "gauss_hermite.hpp"
#include "rng.hpp"

namespace itwlab::fields {

namespace {

constexpr double kTwoPi = 6.2831853071795864769;

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double double_factorial_odd(int k) {  // (2k-1)!!
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r *= 2 * i - 1;
  return r;
}

// E[(y + sqrt(tau) Z)^m]
double hermite_mean(int m, double tau, double y) {
  double acc = 0.0;
  double tk = 1.0;
  for (int k = 0; 2 * k <= m; ++k) {
    acc += binom(m, 2 * k) * double_factorial_odd(k) * tk * std::pow(y, m - 2 * k);
    tk *= tau;
  }
  return acc;
}

struct ActiveIncrements {
  int anchor[3];
  double sd[3];
  int count = 0;  // active anchors; total GH dims = count * dim
};

}  // namespace

template <class F>
double AdaptedField::conditional_mean(double s, double u, std::span<const double> bu,
                                      F&& fn) const {
  ActiveIncrements inc;
  const int n = anchors();
  const int d = dim();
  for (int i = 0; i < n; ++i) {
    const double var = std::min(anchor_time(i), s) - std::min(anchor_time(i), u);
    if (var > 0.0) {
      if (inc.count == 3 || (inc.count + 1) * d > 3)
        throw std::domain_error("conditional quadrature limited to 3 Gaussian dimensions");
      inc.anchor[inc.count] = i;
      inc.sd[inc.count] = std::sqrt(var);
      ++inc.count;
    }
  }
  if (inc.count == 0) return fn(bu);

  const auto& gh = GaussHermite::standard21();
  const int nn = gh.size();
  const int dims = inc.count * d;
  std::array<double, 6> y{};
  for (int k = 0; k < n * d; ++k) y[k] = bu[k];
  const double sqrt2 = 1.4142135623730950488;
  const double norm = std::pow(M_PI, -0.5 * dims);

  double acc = 0.0;
  std::array<int, 3> it{};
  while (true) {
    double w = 1.0;
    for (int a = 0; a < dims; ++a) {
      const int which = a / d, j = a % d;
      const int i = inc.anchor[which];
      y[i * d + j] = bu[i * d + j] + sqrt2 * inc.sd[which] * gh.node(it[a]);
      w *= gh.weight(it[a]);
    }
    acc += w * fn(std::span<const double>(y.data(), n * d));
    int a = 0;
    for (; a < dims; ++a) {
      if (++it[a] < nn) break;
      it[a] = 0;
    }
    if (a == dims) break;
  }
  return norm * acc;
}

template <class F>
double AdaptedField::heat_smooth_x(double tau, std::span<const double> x, F&& fn) const {
  if (tau <= 0.0) return fn(x);
  const auto& gh = GaussHermite::standard21();
  const int nn = gh.size();
  const int d = dim();
  const double s = 1.4142135623730950488 * std::sqrt(tau);
  std::array<double, 2> xs{};
  double acc = 0.0;
  if (d == 1) {
    for (int a = 0; a < nn; ++a) {
      xs[0] = x[0] + s * gh.node(a);
      acc += gh.weight(a) * fn(std::span<const double>(xs.data(), 1));
    }
    return acc / std::sqrt(M_PI);
  }
  for (int a = 0; a < nn; ++a) {
    for (int b = 0; b < nn; ++b) {
      xs[0] = x[0] + s * gh.node(a);
      xs[1] = x[1] + s * gh.node(b);
      acc += gh.weight(a) * gh.weight(b) * fn(std::span<const double>(xs.data(), 2));
    }
  }
  return acc / M_PI;
}

double AdaptedField::dphi_dx(int, double, std::span<const double>, std::span<const double>) const {
  throw std::domain_error("field '" + id() + "' lacks declared x-gradient");
}

double AdaptedField::dphi_danchor(int, int, double, std::span<const double>,
                                  std::span<const double>) const {
  if (anchors() == 0) return 0.0;
  throw std::domain_error("field '" + id() + "' lacks anchor derivatives");
}

double AdaptedField::d2phi_danchor_dx(int, int, double, std::span<const double>,
                                      std::span<const double>) const {
  if (anchors() == 0) return 0.0;
  throw std::domain_error("field '" + id() + "' lacks mixed anchor/x derivatives");
}

double AdaptedField::fa(double s, double u, std::span<const double> bu,
                        std::span<const double> x) const {
  return conditional_mean(s, u, bu,
                          [&](std::span<const double> y) { return phi(s, y, x); });
}

double AdaptedField::dfa_dx(int j, double s, double u, std::span<const double> bu,
                            std::span<const double> x) const {
  return conditional_mean(s, u, bu,
                          [&](std::span<const double> y) { return dphi_dx(j, s, y, x); });
}

double AdaptedField::g(int j, double s, double u, std::span<const double> bu,
                       std::span<const double> x) const {
  double acc = 0.0;
  for (int i = 0; i < anchors(); ++i) {
    if (u <= std::min(anchor_time(i), s)) {
      acc += conditional_mean(
          s, u, bu, [&](std::span<const double> y) { return dphi_danchor(i, j, s, y, x); });
    }
  }
  return acc;
}

double AdaptedField::dg_dx(int j, double s, double u, std::span<const double> bu,
                           std::span<const double> x) const {
  double acc = 0.0;
  for (int i = 0; i < anchors(); ++i) {
    if (u <= std::min(anchor_time(i), s)) {
      acc += conditional_mean(s, u, bu, [&](std::span<const double> y) {
        return d2phi_danchor_dx(i, j, s, y, x);
      });
    }
  }
  return acc;
}

double AdaptedField::heat_eval(double tau, double t, std::span<const double> b,
                               std::span<const double> x) const {
  return heat_smooth_x(tau, x, [&](std::span<const double> xs) { return phi(t, b, xs); });
}

double AdaptedField::heat_fa(double tau, double s, double u, std::span<const double> bu,
                             std::span<const double> x) const {
  return heat_smooth_x(tau, x, [&](std::span<const double> xs) { return fa(s, u, bu, xs); });
}

double AdaptedField::heat_dfa(double tau, int j, double s, double u, std::span<const double> bu,
                              std::span<const double> x) const {
  return heat_smooth_x(tau, x,
                       [&](std::span<const double> xs) { return dfa_dx(j, s, u, bu, xs); });
}

double AdaptedField::heat_g(double tau, int j, double s, double u, std::span<const double> bu,
                            std::span<const double> x) const {
  return heat_smooth_x(tau, x, [&](std::span<const double> xs) { return g(j, s, u, bu, xs); });
}

double AdaptedField::heat_dg(double tau, int j, double s, double u, std::span<const double> bu,
                             std::span<const double> x) const {
  return heat_smooth_x(tau, x,
                       [&](std::span<const double> xs) { return dg_dx(j, s, u, bu, xs); });
}

namespace {

// Deterministic fields: no anchors, g == 0, fa == f. Entries provide value,
// gradient and (when closed-form) the heat action.
class DeterministicField : public AdaptedField {
 public:
  virtual double value(double t, std::span<const double> x) const = 0;
  virtual double grad(int j, double t, std::span<const double> x) const {
    (void)j, (void)t, (void)x;
    throw std::domain_error("field '" + id() + "' lacks declared x-gradient");
  }
  virtual double heat_value(double tau, double t, std::span<const double> x) const {
    return heat_smooth_x(tau, x, [&](std::span<const double> xs) { return value(t, xs); });
  }
  virtual double heat_grad(double tau, int j, double t, std::span<const double> x) const {
    return heat_smooth_x(tau, x, [&](std::span<const double> xs) { return grad(j, t, xs); });
  }

  double phi(double t, std::span<const double>, std::span<const double> x) const final {
    return value(t, x);
  }
  double dphi_dx(int j, double t, std::span<const double>, std::span<const double> x) const final {
    return grad(j, t, x);
  }
  double fa(double s, double, std::span<const double>, std::span<const double> x) const final {
    return value(s, x);
  }
  double dfa_dx(int j, double s, double, std::span<const double>,
                std::span<const double> x) const final {
    return grad(j, s, x);
  }
  double g(int, double, double, std::span<const double>, std::span<const double>) const final {
    return 0.0;
  }
  double dg_dx(int, double, double, std::span<const double>, std::span<const double>) const final {
    return 0.0;
  }
  double heat_eval(double tau, double t, std::span<const double>,
                   std::span<const double> x) const final {
    return heat_value(tau, t, x);
  }
  double heat_fa(double tau, double s, double, std::span<const double>,
                 std::span<const double> x) const final {
    return heat_value(tau, s, x);
  }
  double heat_dfa(double tau, int j, double s, double, std::span<const double>,
                  std::span<const double> x) const final {
    return heat_grad(tau, j, s, x);
  }
  double heat_g(double, int, double, double, std::span<const double>,
                std::span<const double>) const final {
    return 0.0;
  }
  double heat_dg(double, int, double, double, std::span<const double>,
                 std::span<const double>) const final {
    return 0.0;
  }
};

class ConstField final : public DeterministicField {
 public:
  std::string id() const override { return "const"; }
  std::string description() const override { return "f(t,y) = 1"; }
  double value(double, std::span<const double>) const override { return 1.0; }
  double grad(int, double, std::span<const double>) const override { return 0.0; }
  double heat_value(double, double, std::span<const double>) const override { return 1.0; }
  double heat_grad(double, int, double, std::span<const double>) const override { return 0.0; }
};

class LinearField final : public DeterministicField {
 public:
  std::string id() const override { return "linear"; }
  std::string description() const override { return "f(t,y) = y"; }
  double value(double, std::span<const double> x) const override { return x[0]; }
  double grad(int j, double, std::span<const double>) const override { return j == 0 ? 1.0 : 0.0; }
  double heat_value(double, double, std::span<const double> x) const override { return x[0]; }
  double heat_grad(double, int j, double, std::span<const double>) const override {
    return j == 0 ? 1.0 : 0.0;
  }
};

class TrigField final : public DeterministicField {
 public:
  // value = sin(y) or cos(y), optionally times cos(t)
  TrigField(bool is_sin, bool time_cos)
      : sin_(is_sin), time_cos_(time_cos) {}
  std::string id() const override {
    if (time_cos_) return "sincos";
    return sin_ ? "sin" : "cos";
  }
  std::string description() const override {
    if (time_cos_) return "f(t,y) = sin(y) cos(t)";
    return sin_ ? "f(t,y) = sin(y)" : "f(t,y) = cos(y)";
  }
  double tfac(double t) const { return time_cos_ ? std::cos(t) : 1.0; }
  double value(double t, std::span<const double> x) const override {
    return tfac(t) * (sin_ ? std::sin(x[0]) : std::cos(x[0]));
  }
  double grad(int j, double t, std::span<const double> x) const override {
    if (j != 0) return 0.0;
    return tfac(t) * (sin_ ? std::cos(x[0]) : -std::sin(x[0]));
  }
  double heat_value(double tau, double t, std::span<const double> x) const override {
    return std::exp(-0.5 * tau) * value(t, x);
  }
  double heat_grad(double tau, int j, double t, std::span<const double> x) const override {
    return std::exp(-0.5 * tau) * grad(j, t, x);
  }

 private:
  bool sin_, time_cos_;
};

class Sin2dField final : public DeterministicField {
 public:
  std::string id() const override { return "sin2d"; }
  std::string description() const override { return "f(t,y) = sin(y1) cos(y2)  (d=2)"; }
  int dim() const override { return 2; }
  double value(double, std::span<const double> x) const override {
    return std::sin(x[0]) * std::cos(x[1]);
  }
  double grad(int j, double, std::span<const double> x) const override {
    return j == 0 ? std::cos(x[0]) * std::cos(x[1]) : -std::sin(x[0]) * std::sin(x[1]);
  }
  double heat_value(double tau, double t, std::span<const double> x) const override {
    return std::exp(-tau) * value(t, x);
  }
  double heat_grad(double tau, int j, double t, std::span<const double> x) const override {
    return std::exp(-tau) * grad(j, t, x);
  }
};

class GaussBumpField final : public DeterministicField {
 public:
  explicit GaussBumpField(double sigma) : sigma_(sigma) {
    if (sigma <= 0) throw std::invalid_argument("gauss bump needs sigma > 0");
  }
  std::string id() const override {
    std::ostringstream os;
    os << "gauss:sigma=" << sigma_;
    return os.str();
  }
  std::string description() const override { return "f(t,y) = exp(-y^2/(2 sigma^2))"; }
  double value(double, std::span<const double> x) const override {
    return std::exp(-x[0] * x[0] / (2.0 * sigma_ * sigma_));
  }
  double grad(int j, double t, std::span<const double> x) const override {
    return j == 0 ? -x[0] / (sigma_ * sigma_) * value(t, x) : 0.0;
  }
  double heat_value(double tau, double, std::span<const double> x) const override {
    const double v = sigma_ * sigma_ + tau;
    return sigma_ / std::sqrt(v) * std::exp(-x[0] * x[0] / (2.0 * v));
  }
  double heat_grad(double tau, int j, double t, std::span<const double> x) const override {
    if (j != 0) return 0.0;
    const double v = sigma_ * sigma_ + tau;
    return -x[0] / v * heat_value(tau, t, x);
  }

 private:
  double sigma_;
};

class PolyField final : public DeterministicField {
 public:
  PolyField() {
    coef_.resize(9);
    double fact = 1.0;
    for (int m = 0; m <= 8; ++m) {
      if (m > 0) fact *= m;
      coef_[m] = (m % 2 == 0 ? 1.0 : -1.0) / fact;
    }
  }
  std::string id() const override { return "poly8"; }
  std::string description() const override { return "degree-8 polynomial sum (-1)^m y^m / m!"; }
  double value(double, std::span<const double> x) const override {
    double acc = 0.0;
    for (int m = 8; m >= 0; --m) acc = acc * x[0] + coef_[m];
    return acc;
  }
  double grad(int j, double, std::span<const double> x) const override {
    if (j != 0) return 0.0;
    double acc = 0.0;
    for (int m = 8; m >= 1; --m) acc = acc * x[0] + m * coef_[m];
    return acc;
  }
  double heat_value(double tau, double, std::span<const double> x) const override {
    double acc = 0.0;
    for (int m = 0; m <= 8; ++m) acc += coef_[m] * hermite_mean(m, tau, x[0]);
    return acc;
  }
  double heat_grad(double tau, int j, double, std::span<const double> x) const override {
    if (j != 0) return 0.0;
    double acc = 0.0;
    for (int m = 1; m <= 8; ++m) acc += coef_[m] * m * hermite_mean(m - 1, tau, x[0]);
    return acc;
  }

 private:
  std::vector<double> coef_;
};

class WeierstrassField final : public DeterministicField {
 public:
  WeierstrassField(double s, int K) : s_(s), K_(K) {
    if (K < 0 || K > 40) throw std::invalid_argument("weierstrass K out of range");
  }
  std::string id() const override {
    std::ostringstream os;
    os << "weierstrass:s=" << s_ << ":K=" << K_;
    return os.str();
  }
  std::string description() const override {
    return "lacunary sum 2^(-ks) cos(2^k y), k <= K";
  }
  double sobolev_class() const override { return s_; }
  double value(double, std::span<const double> x) const override {
    double acc = 0.0;
    for (int k = 0; k <= K_; ++k)
      acc += std::pow(2.0, -k * s_) * std::cos(std::ldexp(1.0, k) * x[0]);
    return acc;
  }
  double grad(int j, double, std::span<const double> x) const override {
    if (j != 0) return 0.0;
    double acc = 0.0;
    for (int k = 0; k <= K_; ++k) {
      const double f = std::ldexp(1.0, k);
      acc -= std::pow(2.0, -k * s_) * f * std::sin(f * x[0]);
    }
    return acc;
  }
  double heat_value(double tau, double, std::span<const double> x) const override {
    double acc = 0.0;
    for (int k = 0; k <= K_; ++k) {
      const double f = std::ldexp(1.0, k);
      acc += std::pow(2.0, -k * s_) * std::exp(-0.5 * tau * f * f) * std::cos(f * x[0]);
    }
    return acc;
  }
  double heat_grad(double tau, int j, double, std::span<const double> x) const override {
    if (j != 0) return 0.0;
    double acc = 0.0;
    for (int k = 0; k <= K_; ++k) {
      const double f = std::ldexp(1.0, k);
      acc -= std::pow(2.0, -k * s_) * std::exp(-0.5 * tau * f * f) * f * std::sin(f * x[0]);
    }
    return acc;
  }

 private:
  double s_;
  int K_;
};

class PeanoField final : public DeterministicField {
 public:
  std::string id() const override { return "peano"; }
  std::string description() const override { return "b(y) = sqrt(2) sgn(y) sqrt(|y|)"; }
  bool has_gradient() const override { return false; }
  double sobolev_class() const override { return 1.0; }
  double value(double, std::span<const double> x) const override {
    const double y = x[0];
    return std::sqrt(2.0) * (y >= 0 ? 1.0 : -1.0) * std::sqrt(std::abs(y));
  }
};

class FourierModesField final : public DeterministicField {
 public:
  FourierModesField(std::vector<FourierMode> modes, int d, double circumference, std::string id,
                    double cls)
      : modes_(std::move(modes)), d_(d), circ_(circumference), id_(std::move(id)), class_(cls) {
    if (d != 1 && d != 2) throw std::invalid_argument("fourier fields support d in {1,2}");
    if (circ_ <= 0) throw std::invalid_argument("circumference must be positive");
  }
  std::string id() const override { return id_; }
  std::string description() const override { return "truncated Fourier series"; }
  int dim() const override { return d_; }
  bool distributional() const override { return true; }
  double circumference() const override { return circ_; }
  double sobolev_class() const override { return class_; }
  const std::vector<FourierMode>* fourier_modes() const override { return &modes_; }

  void check_domain(std::span<const double> x) const {
    for (int j = 0; j < d_; ++j)
      if (!std::isfinite(x[j]) || std::abs(x[j]) > 100.0 * circ_)
        throw std::invalid_argument("point outside periodic domain of distributional field");
  }
  double value_smoothed(double tau, std::span<const double> x) const {
    check_domain(x);
    const double base = kTwoPi / circ_;
    double acc = 0.0;
    for (const auto& m : modes_) {
      const double k1 = base * m.k[0], k2 = d_ == 2 ? base * m.k[1] : 0.0;
      const double phase = k1 * x[0] + (d_ == 2 ? k2 * x[1] : 0.0);
      const double damp = std::exp(-0.5 * tau * (k1 * k1 + k2 * k2));
      const double w = (m.k[0] == 0 && m.k[1] == 0) ? 1.0 : 2.0;
      acc += w * damp * (m.re * std::cos(phase) - m.im * std::sin(phase));
    }
    return acc;
  }
  double grad_smoothed(double tau, int j, std::span<const double> x) const {
    check_domain(x);
    const double base = kTwoPi / circ_;
    double acc = 0.0;
    for (const auto& m : modes_) {
      const double k1 = base * m.k[0], k2 = d_ == 2 ? base * m.k[1] : 0.0;
      const double kj = j == 0 ? k1 : k2;
      const double phase = k1 * x[0] + (d_ == 2 ? k2 * x[1] : 0.0);
      const double damp = std::exp(-0.5 * tau * (k1 * k1 + k2 * k2));
      const double w = (m.k[0] == 0 && m.k[1] == 0) ? 1.0 : 2.0;
      acc += w * damp * kj * (-m.re * std::sin(phase) - m.im * std::cos(phase));
    }
    return acc;
  }

  double value(double, std::span<const double> x) const override { return value_smoothed(0.0, x); }
  double grad(int j, double, std::span<const double> x) const override {
    return grad_smoothed(0.0, j, x);
  }
  double heat_value(double tau, double, std::span<const double> x) const override {
    return value_smoothed(tau, x);
  }
  double heat_grad(double tau, int j, double, std::span<const double> x) const override {
    return grad_smoothed(tau, j, x);
  }

 private:
  std::vector<FourierMode> modes_;
  int d_;
  double circ_;
  std::string id_;
  double class_;
};

// phi(x) * B_k(tau_b ^ t); the Malliavin derivative factors as
// phi(x) 1{theta <= tau_b}.
class ProductField final : public AdaptedField {
 public:
  enum class Shape { Cos, Sin, Square };
  ProductField(Shape shape, double tau_b, int k) : shape_(shape), tau_b_(tau_b), k_(k) {
    if (tau_b <= 0) throw std::invalid_argument("product field needs tau > 0");
    if (k != 1) throw std::invalid_argument("product field supports k=1 (d=1)");
  }
  std::string id() const override {
    std::ostringstream os;
    os << "product:" << shape_name() << ":tau=" << tau_b_ << ":k=" << k_;
    return os.str();
  }
  std::string description() const override {
    return std::string("f(t,y) = ") + shape_name() + "(y) * B1(tau ^ t)";
  }
  int anchors() const override { return 1; }
  double anchor_time(int) const override { return tau_b_; }
  bool product_form() const override { return true; }

  const char* shape_name() const {
    switch (shape_) {
      case Shape::Cos: return "cos";
      case Shape::Sin: return "sin";
      default: return "square";
    }
  }
  double shape(double y) const {
    switch (shape_) {
      case Shape::Cos: return std::cos(y);
      case Shape::Sin: return std::sin(y);
      default: return y * y;
    }
  }
  double shape_grad(double y) const {
    switch (shape_) {
      case Shape::Cos: return -std::sin(y);
      case Shape::Sin: return std::cos(y);
      default: return 2.0 * y;
    }
  }
  double heat_shape(double tau, double y) const {
    switch (shape_) {
      case Shape::Cos: return std::exp(-0.5 * tau) * std::cos(y);
      case Shape::Sin: return std::exp(-0.5 * tau) * std::sin(y);
      default: return y * y + tau;
    }
  }
  double heat_shape_grad(double tau, double y) const {
    switch (shape_) {
      case Shape::Cos: return -std::exp(-0.5 * tau) * std::sin(y);
      case Shape::Sin: return std::exp(-0.5 * tau) * std::cos(y);
      default: return 2.0 * y;
    }
  }

  double phi(double, std::span<const double> b, std::span<const double> x) const override {
    return shape(x[0]) * b[0];
  }
  double dphi_dx(int j, double, std::span<const double> b,
                 std::span<const double> x) const override {
    return j == 0 ? shape_grad(x[0]) * b[0] : 0.0;
  }
  double dphi_danchor(int i, int j, double, std::span<const double>,
                      std::span<const double> x) const override {
    return (i == 0 && j == 0) ? shape(x[0]) : 0.0;
  }
  double d2phi_danchor_dx(int i, int j, double, std::span<const double>,
                          std::span<const double> x) const override {
    return (i == 0 && j == 0) ? shape_grad(x[0]) : 0.0;
  }

  double fa(double, double, std::span<const double> bu, std::span<const double> x) const override {
    return shape(x[0]) * bu[0];
  }
  double dfa_dx(int j, double, double, std::span<const double> bu,
                std::span<const double> x) const override {
    return j == 0 ? shape_grad(x[0]) * bu[0] : 0.0;
  }
  double g(int j, double s, double u, std::span<const double>,
           std::span<const double> x) const override {
    if (j != 0 || u > std::min(tau_b_, s)) return 0.0;
    return shape(x[0]);
  }
  double dg_dx(int j, double s, double u, std::span<const double>,
               std::span<const double> x) const override {
    if (j != 0 || u > std::min(tau_b_, s)) return 0.0;
    return shape_grad(x[0]);
  }
  double heat_eval(double tau, double, std::span<const double> b,
                   std::span<const double> x) const override {
    return heat_shape(tau, x[0]) * b[0];
  }
  double heat_fa(double tau, double, double, std::span<const double> bu,
                 std::span<const double> x) const override {
    return heat_shape(tau, x[0]) * bu[0];
  }
  double heat_dfa(double tau, int j, double, double, std::span<const double> bu,
                  std::span<const double> x) const override {
    return j == 0 ? heat_shape_grad(tau, x[0]) * bu[0] : 0.0;
  }
  double heat_g(double tau, int j, double s, double u, std::span<const double>,
                std::span<const double> x) const override {
    if (j != 0 || u > std::min(tau_b_, s)) return 0.0;
    return heat_shape(tau, x[0]);
  }
  double heat_dg(double tau, int j, double s, double u, std::span<const double>,
                 std::span<const double> x) const override {
    if (j != 0 || u > std::min(tau_b_, s)) return 0.0;
    return heat_shape_grad(tau, x[0]);
  }

 private:
  Shape shape_;
  double tau_b_;
  int k_;
};

// phi = B1(gamma ^ t)^2 * y; closed-form conditional moments, used to
// pin the quadrature-backed defaults in tests.
class AnchoredSquareField final : public AdaptedField {
 public:
  explicit AnchoredSquareField(double gamma) : gamma_(gamma) {}
  std::string id() const override {
    std::ostringstream os;
    os << "bsq:gamma=" << gamma_;
    return os.str();
  }
  std::string description() const override { return "f(t,y) = B1(gamma ^ t)^2 * y"; }
  int anchors() const override { return 1; }
  double anchor_time(int) const override { return gamma_; }

  double phi(double, std::span<const double> b, std::span<const double> x) const override {
    return b[0] * b[0] * x[0];
  }
  double dphi_dx(int j, double, std::span<const double> b, std::span<const double>) const override {
    return j == 0 ? b[0] * b[0] : 0.0;
  }
  double dphi_danchor(int i, int j, double, std::span<const double> b,
                      std::span<const double> x) const override {
    return (i == 0 && j == 0) ? 2.0 * b[0] * x[0] : 0.0;
  }
  double d2phi_danchor_dx(int i, int j, double, std::span<const double> b,
                          std::span<const double>) const override {
    return (i == 0 && j == 0) ? 2.0 * b[0] : 0.0;
  }

  double residual_var(double s, double u) const {
    return std::min(gamma_, s) - std::min(gamma_, u);
  }
  double fa(double s, double u, std::span<const double> bu,
            std::span<const double> x) const override {
    return (bu[0] * bu[0] + residual_var(s, u)) * x[0];
  }
  double dfa_dx(int j, double s, double u, std::span<const double> bu,
                std::span<const double>) const override {
    return j == 0 ? bu[0] * bu[0] + residual_var(s, u) : 0.0;
  }
  double g(int j, double s, double u, std::span<const double> bu,
           std::span<const double> x) const override {
    if (j != 0 || u > std::min(gamma_, s)) return 0.0;
    return 2.0 * bu[0] * x[0];
  }
  double dg_dx(int j, double s, double u, std::span<const double> bu,
               std::span<const double>) const override {
    if (j != 0 || u > std::min(gamma_, s)) return 0.0;
    return 2.0 * bu[0];
  }
  // Linear in x, so the heat action is the identity on every slot.
  double heat_eval(double, double t, std::span<const double> b,
                   std::span<const double> x) const override {
    return phi(t, b, x);
  }
  double heat_fa(double, double s, double u, std::span<const double> bu,
                 std::span<const double> x) const override {
    return fa(s, u, bu, x);
  }
  double heat_dfa(double, int j, double s, double u, std::span<const double> bu,
                  std::span<const double> x) const override {
    return dfa_dx(j, s, u, bu, x);
  }
  double heat_g(double, int j, double s, double u, std::span<const double> bu,
                std::span<const double> x) const override {
    return g(j, s, u, bu, x);
  }
  double heat_dg(double, int j, double s, double u, std::span<const double> bu,
                 std::span<const double> x) const override {
    return dg_dx(j, s, u, bu, x);
  }

 private:
  double gamma_;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, sep)) out.push_back(tok);
  return out;
}

double param(const std::vector<std::string>& parts, const std::string& key, double fallback,
             bool* found = nullptr) {
  for (const auto& p : parts) {
    const auto eq = p.find('=');
    if (eq != std::string::npos && p.substr(0, eq) == key) {
      if (found) *found = true;
      return std::stod(p.substr(eq + 1));
    }
  }
  if (found) *found = false;
  return fallback;
}

std::vector<FourierMode> white_noise_modes(int K, double decay, std::uint64_t fseed) {
  // Random-phase coefficients |c_k| = (1+k)^(-decay), k = 1..K.
  std::vector<FourierMode> modes;
  modes.reserve(K);
  NormalStream phases(fseed, 0x466f7572, 0);  // dedicated stream for phases
  for (int k = 1; k <= K; ++k) {
    const double mag = std::pow(1.0 + k, -decay);
    // uniform angle from two normals
    const double a = std::atan2(phases.normal(2 * k), phases.normal(2 * k + 1));
    modes.push_back({{k, 0}, 0.5 * mag * std::cos(a), 0.5 * mag * std::sin(a)});
  }
  return modes;
}

}  // namespace

std::shared_ptr<const AdaptedField> make_fourier_field(std::vector<FourierMode> modes, int dim,
                                                       double circumference, std::string id,
                                                       double sobolev_class) {
  return std::make_shared<FourierModesField>(std::move(modes), dim, circumference, std::move(id),
                                             sobolev_class);
}

std::shared_ptr<const AdaptedField> load_fourier_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open Fourier coefficient file " + path);
  std::string line;
  std::vector<FourierMode> modes;
  int d = 1;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (header) {  // k_1[,k_2],re,im
      const auto cols = split(line, ',');
      d = static_cast<int>(cols.size()) - 2;
      if (d != 1 && d != 2) throw std::invalid_argument("coefficient CSV must have k_1[,k_2],re,im");
      header = false;
      continue;
    }
    const auto cols = split(line, ',');
    if (static_cast<int>(cols.size()) != d + 2)
      throw std::invalid_argument("malformed coefficient row: " + line);
    FourierMode m;
    m.k[0] = std::stoi(cols[0]);
    if (d == 2) m.k[1] = std::stoi(cols[1]);
    m.re = std::stod(cols[d]);
    m.im = std::stod(cols[d + 1]);
    modes.push_back(m);
  }
  return make_fourier_field(std::move(modes), d, kTwoPi, "fourier-csv:" + path, 0.0);
}

std::shared_ptr<const AdaptedField> make_field(const std::string& id) {
  const auto parts = split(id, ':');
  if (parts.empty()) throw std::invalid_argument("empty field id");
  const std::string& head = parts[0];
  if (head == "const") return std::make_shared<ConstField>();
  if (head == "linear") return std::make_shared<LinearField>();
  if (head == "sin") return std::make_shared<TrigField>(true, false);
  if (head == "cos") return std::make_shared<TrigField>(false, false);
  if (head == "sincos") return std::make_shared<TrigField>(true, true);
  if (head == "sin2d") return std::make_shared<Sin2dField>();
  if (head == "gauss") return std::make_shared<GaussBumpField>(param(parts, "sigma", 0.5));
  if (head == "poly8") return std::make_shared<PolyField>();
  if (head == "weierstrass")
    return std::make_shared<WeierstrassField>(param(parts, "s", 0.5),
                                              static_cast<int>(param(parts, "K", 12)));
  if (head == "peano") return std::make_shared<PeanoField>();
  if (head == "product") {
    if (parts.size() < 2) throw std::invalid_argument("product field needs a shape");
    ProductField::Shape shape;
    if (parts[1] == "cos") shape = ProductField::Shape::Cos;
    else if (parts[1] == "sin") shape = ProductField::Shape::Sin;
    else if (parts[1] == "square") shape = ProductField::Shape::Square;
    else throw std::invalid_argument("unknown product shape " + parts[1]);
    return std::make_shared<ProductField>(shape, param(parts, "tau", 0.5),
                                          static_cast<int>(param(parts, "k", 1)));
  }
  if (head == "bsq") return std::make_shared<AnchoredSquareField>(param(parts, "gamma", 0.6));
  if (head == "fourier") {
    const int K = static_cast<int>(param(parts, "K", 64));
    const double decay = param(parts, "decay", 0.5);
    const auto fseed = static_cast<std::uint64_t>(param(parts, "fseed", 7));
    std::ostringstream os;
    os << "fourier:decay=" << decay << ":K=" << K << ":fseed=" << fseed;
    return make_fourier_field(white_noise_modes(K, decay, fseed), 1, kTwoPi, os.str(),
                              decay - 0.5);
  }
  if (head == "fourier-csv") {
    if (parts.size() < 2) throw std::invalid_argument("fourier-csv needs a path");
    return load_fourier_csv(id.substr(id.find(':') + 1));
  }
  throw std::invalid_argument("unknown field id '" + id + "'");
}

std::vector<CatalogEntry> catalog() {
  const char* ids[] = {
      "const",
      "linear",
      "sin",
      "cos",
      "sincos",
      "sin2d",
      "gauss:sigma=0.5",
      "gauss:sigma=0.1",
      "gauss:sigma=0.02",
      "poly8",
      "weierstrass:s=0.5:K=12",
      "peano",
      "product:cos:tau=0.5:k=1",
      "product:square:tau=0.4:k=1",
      "bsq:gamma=0.6",
      "fourier:decay=0.5:K=64:fseed=7",
      "fourier:decay=0:K=256:fseed=7",
  };
  std::vector<CatalogEntry> out;
  for (const char* id : ids) {
    const auto f = make_field(id);
    out.push_back({f->id(), f->description(), f->dim(), f->anchors(), f->sobolev_class(),
                   f->distributional()});
  }
  return out;
}

FieldSample::FieldSample(std::shared_ptr<const AdaptedField> field, const BrownianLattice& lat)
    : field_(std::move(field)), lat_(&lat) {
  if (field_->dim() > lat.dims())
    throw std::invalid_argument("field dimension exceeds lattice dimension");
  for (int i = 0; i < field_->anchors(); ++i)
    anchor_idx_.push_back(lat.grid_index(field_->anchor_time(i)));
}

void FieldSample::anchors_at_index(std::int64_t gi, std::span<double> out) const {
  const int d = field_->dim();
  for (int i = 0; i < field_->anchors(); ++i) {
    const std::int64_t a = std::min(anchor_idx_[i], gi);
    for (int j = 0; j < d; ++j) out[i * d + j] = lat_->value(j, a);
  }
}

void FieldSample::anchors_at(double t, std::span<double> out) const {
  anchors_at_index(lat_->grid_index(t), out);
}

double FieldSample::eval(double t, std::span<const double> x) const {
  std::array<double, 6> b{};
  anchors_at(t, std::span<double>(b.data(), anchor_doubles()));
  return field_->eval(t, std::span<const double>(b.data(), anchor_doubles()), x);
}

double FieldSample::eval_fa(double s, double t, std::span<const double> x) const {
  if (t > s + 1e-12) throw std::invalid_argument("eval_fa requires t <= s");
  std::array<double, 6> b{};
  anchors_at(t, std::span<double>(b.data(), anchor_doubles()));
  return field_->fa(s, t, std::span<const double>(b.data(), anchor_doubles()), x);
}

double FieldSample::eval_g(int j, double s, double u, std::span<const double> x) const {
  if (u > s + 1e-12) throw std::invalid_argument("eval_g requires u <= s");
  std::array<double, 6> b{};
  anchors_at(u, std::span<double>(b.data(), anchor_doubles()));
  return field_->g(j, s, u, std::span<const double>(b.data(), anchor_doubles()), x);
}

double FieldSample::eval_divergence(double s, double u, std::span<const double> x) const {
  if (!field_->has_gradient())
    throw std::domain_error("field '" + field_->id() + "' lacks declared x-gradient");
  std::array<double, 6> b{};
  anchors_at(u, std::span<double>(b.data(), anchor_doubles()));
  double acc = 0.0;
  for (int j = 0; j < field_->dim(); ++j)
    acc += field_->dg_dx(j, s, u, std::span<const double>(b.data(), anchor_doubles()), x);
  return acc;
}

}  // namespace itwlab::fields
