#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "brownian.hpp"
#include "fbm.hpp"
#include "fields.hpp"

namespace itwlab::verifier {

// Reading of the first (semigroup) term for the identity on [s,t]:
//   W2Anchored: int_s^t P_{sigma(r-s)} f(r, W2(s,r)+x) dr
//   Literal:    int_s^t P_{sigma(r-s)} f(r, W^H(r)+x) dr
// with sigma(v) = v^{2H} / (2H).
enum class T1Reading { W2Anchored, Literal };

// Test-only fault injection for the sign-convention guard.
enum class Mutation { None, FlipT2, FlipT4 };

struct IdentityTerms {
  double lhs = 0.0;
  double t1 = 0.0;
  double t2 = 0.0;  // d f^a stochastic integral
  double t3 = 0.0;  // divergence drift term
  double t4 = 0.0;  // g stochastic integral
  double residual() const { return lhs - (t1 + t2 + t3 - t4); }
};

// Per-(component, Ito node) integrand weights of the stochastic terms;
// exposed so adaptedness can be checked by re-randomizing the future.
struct TermWeights {
  std::int64_t first_node = 0;
  std::vector<double> t2;  // dims x nodes
  std::vector<double> t4;
};

IdentityTerms compute_terms(const fields::FieldSample& sample, const FbmPath& path,
                            const BrownianLattice& lat, std::int64_t s_index,
                            std::int64_t t_index, std::span<const double> x, T1Reading reading,
                            Mutation mutation = Mutation::None, TermWeights* dump = nullptr);

struct TermStats {
  double mean = 0.0;
  double rms = 0.0;
};

struct LevelStats {
  double dt = 0.0;
  int steps = 0;
  double rms_residual = 0.0;
  double rms_lhs = 0.0;
  double rel_rms = 0.0;  // rms_residual / rms_lhs (rms_lhs > 0)
  TermStats lhs, t1, t2, t3, t4;
};

struct VerifyConfig {
  std::string field_id = "sin";
  double hurst = 0.3;
  int dims = 1;
  double horizon = 1.0;
  double left_mult = 50.0;
  std::vector<int> level_steps{256, 512, 1024};  // dt = horizon / steps
  int n_paths = 200;
  std::vector<std::vector<double>> x_probes{{0.0}};
  double start = 0.0;  // identity on [start, horizon]
  T1Reading reading = T1Reading::W2Anchored;
  std::uint64_t seed = 1;
  int workers = 0;
  double tol_rel_rms = 0.02;
  bool require_positive_slope = true;
  Mutation mutation = Mutation::None;
};

struct VerifierReport {
  std::string field_id;
  double hurst = 0.0;
  int dims = 1;
  int n_paths = 0;
  std::uint64_t seed = 0;
  std::string reading;
  std::vector<LevelStats> levels;
  double decay_slope = 0.0;  // of log rms_residual vs log dt; positive = decays
  double finest_rel_rms = 0.0;
  bool pass_rel_rms = false;
  bool pass_slope = false;
  bool passed = false;
};

VerifierReport verify_identity(const VerifyConfig& cfg);

struct ReadingResolution {
  VerifierReport anchored;
  VerifierReport literal;
  std::string chosen;  // "w2" | "literal"
};

// Runs both T1 readings on a deterministic field and keeps the one whose
// residual decays with dt; throws std::runtime_error when neither decays.
ReadingResolution resolve_t1_reading(VerifyConfig cfg);

struct ClarkOconeConfig {
  std::string functional = "B1sq";  // B1 | B1sq | expB1
  double t1 = 1.0;
  std::vector<int> level_steps{1024, 2048, 4096};
  int n_paths = 10000;
  std::uint64_t seed = 3;
  int workers = 0;
};

struct ClarkOconeLevel {
  double dt = 0.0;
  double rms_residual = 0.0;
  double rel_rms = 0.0;  // relative to RMS of the stochastic part F - E_0[F]
};

struct ClarkOconeReport {
  std::string functional;
  std::vector<ClarkOconeLevel> levels;
  double fitted_order = 0.0;  // slope of log RMS vs log dt
  int n_paths = 0;
};

ClarkOconeReport clark_ocone_check(const ClarkOconeConfig& cfg);

// Assumption regime check: 1/2 - H*alpha - 1/p > 0.
struct RegimeCheck {
  bool in_regime = false;
  double margin = 0.0;
  std::string message;
};
RegimeCheck validate_regime(double hurst, double alpha, double p);

}  // namespace itwlab::verifier
