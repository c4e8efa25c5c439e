#include "averaged_field.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "parallel.hpp"
#include "rng.hpp"

namespace itwlab::averaging {

namespace {

// sup|v| + sup|grad| + Hoelder-gamma seminorm of grad for a line-window
// tabulation (4th-order interior finite differences).
double c1gamma_proxy_line(std::span<const double> v, double dx, double gamma) {
  const int n = static_cast<int>(v.size());
  std::vector<double> grad(n, 0.0);
  for (int i = 0; i < n; ++i) {
    if (i >= 2 && i + 2 < n) {
      grad[i] = (-v[i + 2] + 8 * v[i + 1] - 8 * v[i - 1] + v[i - 2]) / (12 * dx);
    } else if (i + 1 < n && i >= 1) {
      grad[i] = (v[i + 1] - v[i - 1]) / (2 * dx);
    } else if (i + 1 < n) {
      grad[i] = (v[i + 1] - v[i]) / dx;
    } else {
      grad[i] = (v[i] - v[i - 1]) / dx;
    }
  }
  double sup = 0.0, sup_g = 0.0, sem = 0.0;
  for (int i = 0; i < n; ++i) {
    sup = std::max(sup, std::abs(v[i]));
    sup_g = std::max(sup_g, std::abs(grad[i]));
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      sem = std::max(sem, std::abs(grad[j] - grad[i]) / std::pow((j - i) * dx, gamma));
  return sup + sup_g + sem;
}

double delta_proxy(const AveragedField& A, std::int64_t si, std::int64_t ti, double gamma) {
  if (A.space().periodic) return fspace::c1gamma_proxy(A.delta_slice(si, ti), gamma);
  std::vector<double> diff(A.space_points());
  for (int k = 0; k < A.space_points(); ++k) diff[k] = A.value(ti, k) - A.value(si, k);
  const double dx = (A.space().xmax - A.space().xmin) / (A.space_points() - 1);
  return c1gamma_proxy_line(diff, dx, gamma);
}

std::uint64_t uniform_below(const std::array<std::uint64_t, 4>& blk, int lane, std::uint64_t n) {
  return blk[lane] % n;
}

}  // namespace

double AveragedField::x(int k) const {
  if (space_.periodic) return space_.circumference / space_.points * k;
  return space_.xmin + (space_.xmax - space_.xmin) / (space_.points - 1) * k;
}

std::int64_t AveragedField::row_of(double t) const {
  const double dt = time_step();
  const double raw = t / dt;
  if (std::abs(raw - std::round(raw)) > 1e-9 * std::max(1.0, std::abs(raw)) ||
      std::round(raw) < 0 || std::round(raw) >= static_cast<double>(rows()))
    throw std::invalid_argument("time is not a tabulated row of A");
  return static_cast<std::int64_t>(std::round(raw));
}

double AveragedField::delta(std::int64_t si, std::int64_t ti, double xq) const {
  const int M = space_.points;
  const double* a = values_.data() + static_cast<std::size_t>(si) * M;
  const double* b = values_.data() + static_cast<std::size_t>(ti) * M;
  auto diff_at = [&](int k) { return b[k] - a[k]; };

  double u;
  int i0;
  if (space_.periodic) {
    const double h = space_.circumference / M;
    double pos = std::fmod(xq, space_.circumference);
    if (pos < 0) pos += space_.circumference;
    u = pos / h;
    i0 = static_cast<int>(std::floor(u));
    u -= i0;
    const double p0 = diff_at((i0 - 1 + M) % M), p1 = diff_at(i0 % M),
                 p2 = diff_at((i0 + 1) % M), p3 = diff_at((i0 + 2) % M);
    return 0.5 * ((2 * p1) + (-p0 + p2) * u + (2 * p0 - 5 * p1 + 4 * p2 - p3) * u * u +
                  (-p0 + 3 * p1 - 3 * p2 + p3) * u * u * u);
  }
  const double h = (space_.xmax - space_.xmin) / (M - 1);
  if (xq < space_.xmin || xq > space_.xmax)
    throw std::out_of_range("position " + std::to_string(xq) +
                            " left the tabulated spatial window [" +
                            std::to_string(space_.xmin) + "," + std::to_string(space_.xmax) + "]");
  u = (xq - space_.xmin) / h;
  i0 = std::min(static_cast<int>(std::floor(u)), M - 2);
  u -= i0;
  const double p0 = diff_at(std::max(i0 - 1, 0)), p1 = diff_at(i0), p2 = diff_at(i0 + 1),
               p3 = diff_at(std::min(i0 + 2, M - 1));
  return 0.5 * ((2 * p1) + (-p0 + p2) * u + (2 * p0 - 5 * p1 + 4 * p2 - p3) * u * u +
                (-p0 + 3 * p1 - 3 * p2 + p3) * u * u * u);
}

fspace::GridField AveragedField::delta_slice(std::int64_t si, std::int64_t ti) const {
  if (!space_.periodic) throw std::domain_error("delta_slice requires a periodic space grid");
  fspace::GridField g(1, space_.points, space_.circumference);
  for (int k = 0; k < space_.points; ++k) g.value(k) = value(ti, k) - value(si, k);
  return g;
}

std::vector<double> AveragedField::gradient_row(std::int64_t ti) const {
  const int M = space_.points;
  std::vector<double> out(M);
  if (space_.periodic) {
    fspace::GridField g(1, M, space_.circumference);
    for (int k = 0; k < M; ++k) g.value(k) = value(ti, k);
    const auto grad = fspace::spectral_gradient(g, 0);
    for (int k = 0; k < M; ++k) out[k] = grad.value(k);
    return out;
  }
  const double dx = (space_.xmax - space_.xmin) / (M - 1);
  std::vector<double> row(M);
  for (int k = 0; k < M; ++k) row[k] = value(ti, k);
  for (int i = 0; i < M; ++i) {
    if (i >= 2 && i + 2 < M)
      out[i] = (-row[i + 2] + 8 * row[i + 1] - 8 * row[i - 1] + row[i - 2]) / (12 * dx);
    else if (i >= 1 && i + 1 < M)
      out[i] = (row[i + 1] - row[i - 1]) / (2 * dx);
    else if (i + 1 < M)
      out[i] = (row[i + 1] - row[i]) / dx;
    else
      out[i] = (row[i] - row[i - 1]) / dx;
  }
  return out;
}

void AveragedField::to_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(17);
  out << "t";
  for (int k = 0; k < space_.points; ++k) out << ",x" << x(k);
  out << "\n";
  for (std::int64_t i = 0; i < rows(); ++i) {
    out << time(i);
    for (int k = 0; k < space_.points; ++k) out << "," << value(i, k);
    out << "\n";
  }
}

AveragedField compute_A(const fields::AdaptedField& b, const FbmPath& path,
                        const TimeGridSpec& tg, const SpaceGridSpec& sg) {
  if (!b.deterministic())
    throw std::invalid_argument("compute_A takes deterministic drifts only");
  if (b.dim() != 1) throw std::invalid_argument("compute_A tabulates d=1 drifts");
  if (tg.rows < 1) throw std::invalid_argument("time grid needs at least one row");

  // locate the path sub-grid covering [0, horizon]
  const double h = path.step();
  const double raw_steps = tg.horizon / h;
  const auto total_steps = static_cast<std::int64_t>(std::round(raw_steps));
  if (std::abs(raw_steps - std::round(raw_steps)) > 1e-9 || total_steps > path.points() - 1)
    throw std::invalid_argument("A horizon must be a path grid point");
  if (total_steps % tg.rows != 0)
    throw std::invalid_argument("A rows must divide the path steps");
  const std::int64_t per_row = total_steps / tg.rows;

  AveragedField A;
  A.space_ = sg;
  A.drift_id = b.id();
  A.hurst = path.hurst();
  A.seed = path.seed();
  A.path_index = path.path_index();
  A.times_.resize(tg.rows + 1);
  for (int r = 0; r <= tg.rows; ++r) A.times_[r] = tg.horizon / tg.rows * r;
  const int M = sg.points;
  A.values_.assign(static_cast<std::size_t>(tg.rows + 1) * M, 0.0);

  const auto* modes = b.fourier_modes();
  if (b.distributional() && modes == nullptr)
    throw std::invalid_argument("distributional drifts need a Fourier representation");

  if (modes != nullptr) {
    if (!sg.periodic)
      throw std::invalid_argument("Fourier drifts tabulate on the periodic grid");
    const std::size_t K = modes->size();
    A.modes_ = *modes;
    A.freq_acc_.assign(static_cast<std::size_t>(tg.rows + 1) * K, {0.0, 0.0});
    const double base = 2.0 * M_PI / b.circumference();
    // highest mode order for the power recurrence
    int kmax = 0;
    for (const auto& m : A.modes_) kmax = std::max(kmax, std::abs(m.k[0]));
    std::vector<std::complex<double>> pow_cache(kmax + 1);
    auto phases_at = [&](std::int64_t p, std::vector<std::complex<double>>& out) {
      const double w = path.value(0, p);
      const std::complex<double> z(std::cos(base * w), std::sin(base * w));
      pow_cache[0] = {1.0, 0.0};
      for (int q = 1; q <= kmax; ++q) pow_cache[q] = pow_cache[q - 1] * z;
      for (std::size_t mi = 0; mi < K; ++mi) {
        const int k = A.modes_[mi].k[0];
        out[mi] = k >= 0 ? pow_cache[k] : std::conj(pow_cache[-k]);
      }
    };
    std::vector<std::complex<double>> acc(K, {0.0, 0.0}), prev(K), next(K);
    phases_at(0, prev);
    for (int r = 1; r <= tg.rows; ++r) {
      for (std::int64_t s = 0; s < per_row; ++s) {
        const std::int64_t p = static_cast<std::int64_t>(r - 1) * per_row + s;
        phases_at(p + 1, next);
        for (std::size_t mi = 0; mi < K; ++mi) acc[mi] += 0.5 * h * (prev[mi] + next[mi]);
        std::swap(prev, next);
      }
      std::copy(acc.begin(), acc.end(),
                A.freq_acc_.begin() + static_cast<std::size_t>(r) * K);
      // synthesize the row: A(u,x) = sum_m w Re(c_m Z_m e^{i k x})
      double* row = A.values_.data() + static_cast<std::size_t>(r) * M;
      const double dx = sg.circumference / M;
      for (std::size_t mi = 0; mi < K; ++mi) {
        const auto& md = A.modes_[mi];
        const double wgt = (md.k[0] == 0 && md.k[1] == 0) ? 1.0 : 2.0;
        const std::complex<double> cz = std::complex<double>(md.re, md.im) * acc[mi];
        const double ang = base * md.k[0] * dx;
        const std::complex<double> rot(std::cos(ang), std::sin(ang));
        std::complex<double> ph(1.0, 0.0);
        for (int k = 0; k < M; ++k) {
          row[k] += wgt * (cz * ph).real();
          ph *= rot;
        }
      }
    }
    return A;
  }

  // direct route: trapezoid in s per x node
  std::vector<double> prev_eval(M), next_eval(M), acc(M, 0.0);
  auto eval_row = [&](std::int64_t p, std::vector<double>& out) {
    const double w = path.value(0, p);
    const double t = path.time(p);
    std::array<double, 1> xq;
    for (int k = 0; k < M; ++k) {
      xq[0] = A.x(k) + w;
      out[k] = b.eval(t, {}, std::span<const double>(xq.data(), 1));
    }
  };
  eval_row(0, prev_eval);
  for (int r = 1; r <= tg.rows; ++r) {
    for (std::int64_t s = 0; s < per_row; ++s) {
      const std::int64_t p = static_cast<std::int64_t>(r - 1) * per_row + s;
      eval_row(p + 1, next_eval);
      for (int k = 0; k < M; ++k) acc[k] += 0.5 * h * (prev_eval[k] + next_eval[k]);
      std::swap(prev_eval, next_eval);
    }
    std::copy(acc.begin(), acc.end(), A.values_.begin() + static_cast<std::size_t>(r) * M);
  }
  return A;
}

fspace::NormReport holder_two_param_norm(const AveragedField& A, double beta, double gamma) {
  const std::int64_t R = A.rows();
  const int M = A.space_points();
  const std::int64_t rstride = std::max<std::int64_t>(1, R / 128);
  const int xstride = std::max(1, M / 128);
  double best = 0.0;
  for (std::int64_t si = 0; si < R; si += rstride) {
    for (std::int64_t ti = si + rstride; ti < R; ti += rstride) {
      const double gap = std::pow(A.time(ti) - A.time(si), beta);
      for (int a = 0; a < M; a += xstride) {
        const double va = A.value(ti, a) - A.value(si, a);
        for (int c = a + xstride; c < M; c += xstride) {
          const double vc = A.value(ti, c) - A.value(si, c);
          const double dist = std::abs(A.x(c) - A.x(a));
          best = std::max(best, std::abs(vc - va) / (gap * std::pow(dist, gamma)));
        }
      }
    }
  }
  std::ostringstream kind;
  kind << "two_param(" << beta << "," << gamma << ")";
  return {kind.str(), best, M, "grid-pairs"};
}

fspace::NormReport holder_two_param_norm_c1(const AveragedField& A, double beta, double gamma) {
  const std::int64_t R = A.rows();
  const std::int64_t rstride = std::max<std::int64_t>(1, R / 64);
  double best = 0.0;
  for (std::int64_t si = 0; si < R; si += rstride)
    for (std::int64_t ti = si + rstride; ti < R; ti += rstride)
      best = std::max(best, delta_proxy(A, si, ti, gamma) /
                                std::pow(A.time(ti) - A.time(si), beta));
  std::ostringstream kind;
  kind << "two_param(" << beta << ",1+" << gamma << ")";
  return {kind.str(), best, A.space_points(), "grid-pairs-c1"};
}

ExponentFit holder_exponent_fit(const AveragedField& A, double gamma) {
  const std::int64_t R = A.rows() - 1;
  ExponentFit fit;
  std::vector<double> lx, ly;
  for (std::int64_t g = 1; g <= R; g *= 2) {
    double best = 0.0;
    for (std::int64_t s = 0; s + g <= R; s += std::max<std::int64_t>(1, g / 2))
      best = std::max(best, delta_proxy(A, s, s + g, gamma));
    fit.gaps.push_back(A.time(g));
    fit.values.push_back(best);
    if (best > 0) {
      lx.push_back(std::log(A.time(g)));
      ly.push_back(std::log(best));
    }
  }
  if (fit.gaps.size() < 4) throw std::invalid_argument("exponent fit needs >= 4 dyadic scales");
  if (lx.size() < 2) throw std::domain_error("degenerate exponent fit");
  fit.exponent = fspace::fit_line(lx, ly).slope;
  return fit;
}

MomentScanResult regularity_moment_scan(const MomentScanConfig& cfg) {
  if (cfg.n_paths < 2) throw std::invalid_argument("moment scan needs >= 2 paths");
  if (cfg.gaps.size() < 5) throw std::invalid_argument("moment scan needs >= 5 dyadic gaps");
  const auto drift = fields::make_field(cfg.drift_id);

  const int G = static_cast<int>(cfg.gaps.size());
  // per-path mean of proxy^ell for each gap
  std::vector<double> per_path(static_cast<std::size_t>(cfg.n_paths) * G, 0.0);

  LatticeConfig lc;
  lc.dims = 1;
  lc.step = cfg.path_step;
  lc.left = cfg.left_mult * cfg.horizon;
  lc.right = cfg.horizon;

  const int rows = static_cast<int>(std::round(cfg.horizon / cfg.gaps.front()));
  TimeGridSpec tg{cfg.horizon, rows};

  parallel_for(cfg.n_paths, cfg.workers, [&](std::int64_t p) {
    const auto lat = BrownianLattice::sample(lc, cfg.seed, static_cast<std::uint64_t>(p));
    const auto path = FbmPath::build(lat, cfg.hurst);
    const auto A = compute_A(*drift, path, tg, cfg.space);
    for (int gi = 0; gi < G; ++gi) {
      const std::int64_t gap_rows = A.row_of(cfg.gaps[gi]);
      double acc = 0.0;
      int count = 0;
      for (std::int64_t s = 0; s + gap_rows < A.rows(); s += gap_rows) {
        const double v = delta_proxy(A, s, s + gap_rows, cfg.gamma);
        acc += std::pow(v, cfg.ell);
        ++count;
      }
      per_path[static_cast<std::size_t>(p) * G + gi] = acc / count;
    }
  });

  auto slope_of = [&](const std::vector<std::int64_t>& pick) {
    std::vector<double> lx, ly;
    for (int gi = 0; gi < G; ++gi) {
      double m = 0.0;
      for (auto p : pick) m += per_path[static_cast<std::size_t>(p) * G + gi];
      m /= static_cast<double>(pick.size());
      lx.push_back(std::log(cfg.gaps[gi]));
      ly.push_back(std::log(std::pow(m, 1.0 / cfg.ell)));
    }
    return fspace::fit_line(lx, ly).slope;
  };

  std::vector<std::int64_t> all(cfg.n_paths);
  for (int p = 0; p < cfg.n_paths; ++p) all[p] = p;

  MomentScanResult out;
  out.n_paths = cfg.n_paths;
  out.ell = cfg.ell;
  out.gamma = cfg.gamma;
  out.fit.exponent = slope_of(all);
  out.fit.gaps = cfg.gaps;
  for (int gi = 0; gi < G; ++gi) {
    double m = 0.0;
    for (int p = 0; p < cfg.n_paths; ++p) m += per_path[static_cast<std::size_t>(p) * G + gi];
    out.fit.values.push_back(std::pow(m / cfg.n_paths, 1.0 / cfg.ell));
  }

  // bootstrap CI over paths
  std::vector<double> slopes(cfg.bootstrap);
  for (int rep = 0; rep < cfg.bootstrap; ++rep) {
    std::vector<std::int64_t> pick(cfg.n_paths);
    for (int i = 0; i < cfg.n_paths; ++i) {
      const auto blk = Philox4x64::block(
          {static_cast<std::uint64_t>(rep), static_cast<std::uint64_t>(i), 0xb007, 0},
          {cfg.seed, 0x626f6f74});
      pick[i] = static_cast<std::int64_t>(uniform_below(blk, 0, cfg.n_paths));
    }
    slopes[rep] = slope_of(pick);
  }
  std::sort(slopes.begin(), slopes.end());
  out.fit.ci_low = slopes[static_cast<std::size_t>(0.025 * cfg.bootstrap)];
  out.fit.ci_high = slopes[std::min<std::size_t>(cfg.bootstrap - 1,
                                                 static_cast<std::size_t>(0.975 * cfg.bootstrap))];
  return out;
}

std::vector<RoughnessRow> roughness_stress_test(const RoughnessConfig& cfg) {
  std::vector<RoughnessRow> table;
  LatticeConfig lc;
  lc.dims = 1;
  lc.step = cfg.path_step;
  lc.left = 8.0 * cfg.horizon;
  lc.right = cfg.horizon;
  for (int K : cfg.mode_ladder) {
    std::ostringstream id;
    id << "fourier:decay=0:K=" << K << ":fseed=" << cfg.fseed;
    const auto drift = fields::make_field(id.str());
    SpaceGridSpec sg;
    sg.points = cfg.space_points;
    sg.periodic = true;
    sg.circumference = drift->circumference();
    TimeGridSpec tg{cfg.horizon, 1};

    std::vector<double> sups(cfg.n_paths);
    parallel_for(cfg.n_paths, cfg.workers, [&](std::int64_t p) {
      const auto lat = BrownianLattice::sample(lc, cfg.seed, static_cast<std::uint64_t>(p));
      const auto path = FbmPath::build(lat, cfg.hurst);
      const auto A = compute_A(*drift, path, tg, sg);
      const auto grad = A.gradient_row(A.rows() - 1);
      double sup = 0.0;
      for (double v : grad) sup = std::max(sup, std::abs(v));
      sups[p] = sup;
    });
    std::sort(sups.begin(), sups.end());
    RoughnessRow row;
    row.modes = K;
    row.with_noise = sups[sups.size() / 2];
    // control: W == 0 gives A_T(x) = T b(x) exactly
    double sup = 0.0;
    std::array<double, 1> xq;
    for (int k = 0; k < cfg.space_points; ++k) {
      xq[0] = drift->circumference() / cfg.space_points * k;
      sup = std::max(sup, std::abs(drift->dphi_dx(0, cfg.horizon, {},
                                                  std::span<const double>(xq.data(), 1))));
    }
    row.control = cfg.horizon * sup;
    table.push_back(row);
  }
  return table;
}

}  // namespace itwlab::averaging
