#include "young.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>

#include "rng.hpp"

namespace itwlab::young {

DeltaFn delta_from(const averaging::AveragedField& A) {
  const auto* ptr = &A;
  return [ptr](double u, double v, double x) {
    return ptr->delta(ptr->row_of(u), ptr->row_of(v), x);
  };
}

Partition::Partition(std::vector<double> breakpoints) : pts_(std::move(breakpoints)) {
  if (pts_.size() < 2) throw std::invalid_argument("partition needs >= 2 breakpoints");
  for (std::size_t i = 1; i < pts_.size(); ++i)
    if (pts_[i] <= pts_[i - 1])
      throw std::invalid_argument("partition breakpoints must be strictly increasing");
}

Partition Partition::uniform(double s, double t, std::int64_t pieces) {
  if (pieces < 1 || t <= s) throw std::invalid_argument("bad uniform partition");
  std::vector<double> pts(pieces + 1);
  for (std::int64_t i = 0; i <= pieces; ++i)
    pts[i] = s + (t - s) * static_cast<double>(i) / static_cast<double>(pieces);
  pts.back() = t;
  return Partition(std::move(pts));
}

Partition Partition::random(double s, double t, double mesh, std::uint64_t seed) {
  if (mesh <= 0 || t <= s) throw std::invalid_argument("bad random partition");
  std::vector<double> pts{s};
  std::uint64_t ctr = 0;
  while (pts.back() < t) {
    const auto blk = Philox4x64::block({ctr++, 0x706172, 0, 0}, {seed, 0x72616e64});
    const double u = static_cast<double>(blk[0] >> 11) * 0x1.0p-53;
    const double step = mesh * (0.5 + 0.5 * u);
    pts.push_back(std::min(t, pts.back() + step));
  }
  if (pts.back() != t) pts.push_back(t);
  return Partition(std::move(pts));
}

double Partition::mesh() const {
  double m = 0.0;
  for (std::size_t i = 1; i < pts_.size(); ++i) m = std::max(m, pts_[i] - pts_[i - 1]);
  return m;
}

double riemann_sum(const DeltaFn& dA, const std::function<double(double)>& Y,
                   const Partition& part) {
  const auto& p = part.breakpoints();
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) acc += dA(p[i], p[i + 1], Y(p[i]));
  return acc;
}

YoungIntegral young_integral(const DeltaFn& dA, const std::function<double(double)>& Y, double s,
                             double t, double tol, int max_depth) {
  YoungIntegral out;
  double prev = dA(s, t, Y(s));
  out.value = prev;
  out.levels = 0;
  for (int k = 1; k <= max_depth; ++k) {
    double cur;
    try {
      cur = riemann_sum(dA, Y, Partition::uniform(s, t, std::int64_t{1} << k));
    } catch (const std::invalid_argument&) {
      // refinement exceeded the tabulated grid; stop at the best sum
      break;
    }
    out.error_estimate = std::abs(cur - prev);
    out.value = cur;
    out.levels = k;
    prev = cur;
    if (out.error_estimate < tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

namespace {

std::vector<double> davie_path(const DeltaFn& dA, double y0, double s, double t,
                               std::int64_t steps, std::vector<double>* increments) {
  std::vector<double> y(steps + 1);
  y[0] = y0;
  if (increments) increments->assign(steps, 0.0);
  for (std::int64_t i = 0; i < steps; ++i) {
    const double u = s + (t - s) * static_cast<double>(i) / static_cast<double>(steps);
    const double v = s + (t - s) * static_cast<double>(i + 1) / static_cast<double>(steps);
    const double inc = dA(u, v, y[i]);
    if (increments) (*increments)[i] = inc;
    y[i + 1] = y[i] + inc;
    if (!std::isfinite(y[i + 1]))
      throw std::runtime_error("Young solver diverged at t=" + std::to_string(v));
  }
  return y;
}

}  // namespace

double holder_proxy(std::span<const double> times, std::span<const double> values, double beta) {
  const std::size_t n = times.size();
  const std::size_t stride = std::max<std::size_t>(1, n / 512);
  double best = std::abs(values[0]);
  for (std::size_t i = 0; i < n; i += stride) {
    best = std::max(best, std::abs(values[i]));
    for (std::size_t j = i + stride; j < n; j += stride) {
      best = std::max(best,
                      std::abs(values[j] - values[i]) / std::pow(times[j] - times[i], beta));
    }
  }
  return best;
}

YoungSolution solve_yode(const DeltaFn& dA, double y0, double s, double t, std::int64_t steps,
                         double holder_beta) {
  if (steps < 1 || t <= s) throw std::invalid_argument("bad solver grid");
  YoungSolution sol;
  sol.values = davie_path(dA, y0, s, t, steps, &sol.local_increments);
  sol.times.resize(steps + 1);
  for (std::int64_t i = 0; i <= steps; ++i)
    sol.times[i] = s + (t - s) * static_cast<double>(i) / static_cast<double>(steps);
  sol.holder_beta = holder_beta;
  sol.holder_proxy = holder_proxy(sol.times, sol.values, holder_beta);

  // Richardson comparison when the backing tabulation admits finer grids.
  try {
    const auto half = davie_path(dA, y0, s, t, steps * 2, nullptr);
    sol.richardson_error = std::abs(half.back() - sol.values.back());
    const auto quarter = davie_path(dA, y0, s, t, steps * 4, nullptr);
    const double e2 = std::abs(quarter.back() - half.back());
    if (e2 > 0 && sol.richardson_error > 0)
      sol.empirical_order = std::log2(sol.richardson_error / e2);
  } catch (const std::invalid_argument&) {
    sol.richardson_error = std::numeric_limits<double>::quiet_NaN();
    sol.empirical_order = std::numeric_limits<double>::quiet_NaN();
  }
  return sol;
}

std::vector<double> sde_reconstruct(const YoungSolution& y, const FbmPath& path) {
  std::vector<double> x(y.values.size());
  for (std::size_t i = 0; i < y.values.size(); ++i)
    x[i] = y.values[i] + path.value(0, path.eval_index(y.times[i]));
  return x;
}

CrosscheckResult euler_crosscheck(const fields::AdaptedField& b, const FbmPath& path, double x0,
                                  std::int64_t steps) {
  if (!b.deterministic() || b.dim() != 1)
    throw std::invalid_argument("crosscheck takes deterministic d=1 drifts");
  const double T = path.time(path.points() - 1);

  // Window sized from the path range; the Davie route interpolates A inside.
  double wmin = 0.0, wmax = 0.0;
  for (std::int64_t i = 0; i < path.points(); ++i) {
    wmin = std::min(wmin, path.value(0, i));
    wmax = std::max(wmax, path.value(0, i));
  }
  averaging::SpaceGridSpec sg;
  sg.periodic = false;
  sg.points = 1025;
  sg.xmin = x0 - (wmax - wmin) - std::abs(x0) - 4.0;
  sg.xmax = x0 + (wmax - wmin) + std::abs(x0) + 4.0;
  averaging::TimeGridSpec tg{T, static_cast<int>(steps)};
  const auto A = averaging::compute_A(b, path, tg, sg);

  const auto sol = solve_yode(delta_from(A), x0, 0.0, T, steps);

  CrosscheckResult out;
  out.times = sol.times;
  out.x_young = sde_reconstruct(sol, path);
  out.x_euler.resize(steps + 1);
  out.x_euler[0] = x0;
  const double h = T / static_cast<double>(steps);
  std::array<double, 1> xq;
  const std::int64_t per = (path.points() - 1) / steps;
  for (std::int64_t i = 0; i < steps; ++i) {
    xq[0] = out.x_euler[i];
    const double drift = b.eval(sol.times[i], {}, std::span<const double>(xq.data(), 1));
    const double dw = path.value(0, (i + 1) * per) - path.value(0, i * per);
    out.x_euler[i + 1] = out.x_euler[i] + drift * h + dw;
  }
  for (std::int64_t i = 0; i <= steps; ++i)
    out.sup_difference = std::max(out.sup_difference, std::abs(out.x_young[i] - out.x_euler[i]));
  return out;
}

}  // namespace itwlab::young
