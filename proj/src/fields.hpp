#pragma once

#include <array>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "brownian.hpp"

namespace itwlab::fields {

// Adapted cylindrical random field
//   f(omega, t, x) = phi(t, B(gamma_1 ^ t), ..., B(gamma_n ^ t), x),
// together with its conditional projection
//   fa(s, u, x) = E_u[f(s, x)]
// and projected Malliavin data
//   g_j(s, u, x) = E_u[(D_j f(s, x))(u)]
//             = sum_i E_u[dphi/db_{i,j}] 1{u <= gamma_i ^ s}.
//
// Anchor values are packed as b[i*dim()+j] = B_j(gamma_i ^ t). Conditional
// quantities receive the anchors at the conditioning time u; the defaults
// integrate the independent Gaussian increments with tensorized
// Gauss-Hermite quadrature (21 nodes per dimension, at most 3 active
// dimensions) and smooth in x the same way. Catalog entries override with
// closed forms.
class AdaptedField {
 public:
  virtual ~AdaptedField() = default;

  virtual std::string id() const = 0;
  virtual std::string description() const = 0;
  virtual int dim() const { return 1; }
  virtual int anchors() const { return 0; }
  virtual double anchor_time(int /*i*/) const { return 0.0; }
  bool deterministic() const { return anchors() == 0; }
  virtual bool has_gradient() const { return true; }
  virtual bool distributional() const { return false; }
  virtual bool product_form() const { return false; }
  // > 0 when the field lives on a periodic domain of this circumference.
  virtual double circumference() const { return 0.0; }
  // Supremum of m with f(t,.) in W^{m,2} (metadata for regime validation).
  virtual double sobolev_class() const { return 1e9; }
  // Mode list for Fourier-series fields, nullptr otherwise.
  virtual const std::vector<struct FourierMode>* fourier_modes() const { return nullptr; }

  // Outer function and its partials.
  virtual double phi(double t, std::span<const double> b, std::span<const double> x) const = 0;
  virtual double dphi_dx(int j, double t, std::span<const double> b,
                         std::span<const double> x) const;
  virtual double dphi_danchor(int i, int j, double t, std::span<const double> b,
                              std::span<const double> x) const;
  virtual double d2phi_danchor_dx(int i, int j, double t, std::span<const double> b,
                                  std::span<const double> x) const;

  // f and its conditional quantities. bu holds anchors at the conditioning
  // time (for eval, at t itself).
  double eval(double t, std::span<const double> b, std::span<const double> x) const {
    return phi(t, b, x);
  }
  virtual double fa(double s, double u, std::span<const double> bu,
                    std::span<const double> x) const;
  virtual double dfa_dx(int j, double s, double u, std::span<const double> bu,
                        std::span<const double> x) const;
  virtual double g(int j, double s, double u, std::span<const double> bu,
                   std::span<const double> x) const;
  virtual double dg_dx(int j, double s, double u, std::span<const double> bu,
                       std::span<const double> x) const;

  // Heat-smoothed (variance tau) versions, acting on the x slot.
  virtual double heat_eval(double tau, double t, std::span<const double> b,
                           std::span<const double> x) const;
  virtual double heat_fa(double tau, double s, double u, std::span<const double> bu,
                         std::span<const double> x) const;
  virtual double heat_dfa(double tau, int j, double s, double u, std::span<const double> bu,
                          std::span<const double> x) const;
  virtual double heat_g(double tau, int j, double s, double u, std::span<const double> bu,
                        std::span<const double> x) const;
  virtual double heat_dg(double tau, int j, double s, double u, std::span<const double> bu,
                         std::span<const double> x) const;

 protected:
  // E over the Gaussian anchor increments between u and s of a callable
  // taking the integrated anchor vector.
  template <class F>
  double conditional_mean(double s, double u, std::span<const double> bu, F&& fn) const;
  // Tensor Gauss-Hermite smoothing in x.
  template <class F>
  double heat_smooth_x(double tau, std::span<const double> x, F&& fn) const;
};

// One Fourier mode of a real field: value contributes
//   w * (re cos(k.y) - im sin(k.y)),  w = 1 for k = 0 and 2 otherwise.
struct FourierMode {
  std::array<int, 2> k{0, 0};
  double re = 0.0;
  double im = 0.0;
};

std::shared_ptr<const AdaptedField> make_field(const std::string& id);
std::shared_ptr<const AdaptedField> make_fourier_field(std::vector<FourierMode> modes, int dim,
                                                       double circumference, std::string id,
                                                       double sobolev_class);
std::shared_ptr<const AdaptedField> load_fourier_csv(const std::string& path);

struct CatalogEntry {
  std::string id;
  std::string description;
  int dim;
  int anchors;
  double sobolev_class;
  bool distributional;
};
std::vector<CatalogEntry> catalog();

// A FieldSpec bound to one lattice; anchor times must lie on the grid.
class FieldSample {
 public:
  FieldSample(std::shared_ptr<const AdaptedField> field, const BrownianLattice& lat);

  const AdaptedField& field() const { return *field_; }

  double eval(double t, std::span<const double> x) const;
  double eval_fa(double s, double t, std::span<const double> x) const;
  double eval_g(int j, double s, double u, std::span<const double> x) const;
  double eval_divergence(double s, double u, std::span<const double> x) const;

  // Anchors B_j(gamma_i ^ t) packed [i*d+j]; grid-index variant for hot loops.
  void anchors_at(double t, std::span<double> out) const;
  void anchors_at_index(std::int64_t gi, std::span<double> out) const;
  int anchor_doubles() const { return field_->anchors() * field_->dim(); }

 private:
  std::shared_ptr<const AdaptedField> field_;
  const BrownianLattice* lat_;
  std::vector<std::int64_t> anchor_idx_;
};

}  // namespace itwlab::fields
