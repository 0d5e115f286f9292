#include "a1bellman/closed_form.hpp"
#include "a1bellman/errors.hpp"
#include "a1bellman/rng.hpp"
#include "a1bellman/verify.hpp"
#include "sampling.hpp"

#include <algorithm>
#include <cmath>

namespace a1bellman {
namespace {

using detail::Accumulator;

void require_q(const Params& p) {
  if (p.degenerate) throw DegenerateError("property suites require Q > 1");
}

struct Point {
  double x, y;
};

Point random_point(const Params& p, CounterRng& rng) { return {rng.uniform(), rng.uniform(1.0, p.Q)}; }

// Point on the dividing line y = 1 + (Q-1) x.
Point line_point(const Params& p, double x) { return {x, 1.0 + (p.Q - 1.0) * x}; }

}  // namespace

CheckReport check_concavity(const Params& p, long long n_samples, std::uint64_t seed,
                            double tol) {
  require_q(p);
  return detail::run_indexed(
      "concavity", static_cast<std::uint64_t>(n_samples), tol,
      [&](std::uint64_t i, Accumulator& acc) {
        CounterRng rng(seed, i);
        Point a, b;
        switch (i % 4) {
          case 0:
          case 1:
            a = random_point(p, rng);
            b = random_point(p, rng);
            break;
          case 2:
            // collinear on the dividing line, where M is linear
            a = line_point(p, rng.uniform());
            b = line_point(p, rng.uniform());
            break;
          default:
            // both on y = Q, exercising f across node intervals
            a = {std::ldexp(rng.uniform(), -p.d * rng.below(6)), p.Q};
            b = {rng.uniform(), p.Q};
            break;
        }
        const double lam = rng.uniform();
        const double mx = lam * a.x + (1.0 - lam) * b.x;
        const double my = lam * a.y + (1.0 - lam) * b.y;
        const double slack =
            eval_M(p, mx, my) - (lam * eval_M(p, a.x, a.y) + (1.0 - lam) * eval_M(p, b.x, b.y));
        acc.record(i, slack,
                   {{"x1", a.x}, {"y1", a.y}, {"x2", b.x}, {"y2", b.y}, {"lambda", lam}});
      });
}

CheckReport check_t_monotonicity(const Params& p, long long n_samples, std::uint64_t seed,
                                 double tol) {
  require_q(p);
  return detail::run_indexed(
      "t-monotonicity", static_cast<std::uint64_t>(n_samples), tol,
      [&](std::uint64_t i, Accumulator& acc) {
        CounterRng rng(seed, i);
        const Point pt = random_point(p, rng);
        // y / t2 >= 1 keeps the rescaled point in Omega
        double t1 = rng.uniform(1.0, pt.y);
        double t2 = rng.uniform(1.0, pt.y);
        if (t1 > t2) std::swap(t1, t2);
        if (i % 8 == 0) {
          t1 = 1.0;
          t2 = pt.y;
        }
        const double slack = t1 * eval_M(p, pt.x, pt.y / t1) - t2 * eval_M(p, pt.x, pt.y / t2);
        acc.record(i, slack, {{"x", pt.x}, {"y", pt.y}, {"t1", t1}, {"t2", t2}});
      });
}

CheckReport check_smooth_bound(const Params& p, long long n_grid, double tol) {
  require_q(p);
  constexpr int kNodes = 41;  // N^-k for k = 0..40
  const auto n = static_cast<std::uint64_t>(std::max(0LL, n_grid));
  auto report = detail::run_indexed(
      "smooth-bound", n + kNodes, tol, [&](std::uint64_t i, Accumulator& acc) {
        if (i < kNodes) {
          const int k = static_cast<int>(i);
          const double x = std::ldexp(1.0, -p.d * k);
          const double f = eval_f(p, x);
          const double fs = eval_f_smooth(p, x);
          // equality required: relative gap counts against the slack
          acc.record(i, -std::abs(fs - f) / fs, {{"x", x}, {"f", f}, {"f_smooth", fs}});
          ++acc.counters["nodes"];
          return;
        }
        const double x = n <= 1 ? 1.0 : static_cast<double>(i - kNodes) / static_cast<double>(n - 1);
        const double f = eval_f(p, x);
        const double fs = eval_f_smooth(p, x);
        const double gap = fs - f;
        if (x > 0.0 && gap <= 1e-9 * fs) {
          const NodeInterval ni = node_interval(p, x);
          const double lo = std::ldexp(1.0, -p.d * (ni.k + 1));
          const double hi = std::ldexp(1.0, -p.d * ni.k);
          const double dist = std::min(x - lo, hi - x) / x;
          ++acc.counters[dist <= 1e-9 ? "touching_near_node" : "touching_off_node"];
        }
        acc.record(i, gap, {{"x", x}, {"f", f}, {"f_smooth", fs}});
      });
  return report;
}

CheckReport check_branch_continuity(const Params& p, long long n_points, double tol) {
  require_q(p);
  const auto n = static_cast<std::uint64_t>(std::max(0LL, n_points));
  return detail::run_indexed(
      "branch-continuity", n, tol, [&](std::uint64_t i, Accumulator& acc) {
        const double x = n <= 1 ? 1.0 : static_cast<double>(i) / static_cast<double>(n - 1);
        const Point pt = line_point(p, x);
        const double lower = pt.x + pt.y - 1.0;
        const double s = (pt.y - 1.0) / (p.Q - 1.0);
        // x / s is 1 up to the rounding of y - 1
        const double upper = s > 0.0 ? s * eval_f(p, std::min(1.0, pt.x / s)) : 0.0;
        acc.record(i, -std::abs(lower - upper),
                   {{"x", pt.x}, {"y", pt.y}, {"lower", lower}, {"upper", upper}});
      });
}

CheckReport check_homogeneity(const Params& p, long long n_samples, std::uint64_t seed,
                              double tol) {
  require_q(p);
  return detail::run_indexed(
      "homogeneity", static_cast<std::uint64_t>(n_samples), tol,
      [&](std::uint64_t i, Accumulator& acc) {
        CounterRng rng(seed, i);
        const double x = rng.uniform();
        const double m = std::exp(rng.uniform(-3.0, 3.0));
        const double y = m * rng.uniform(1.0, p.Q);
        const double lam = std::exp(rng.uniform(-5.0, 5.0));
        const double lhs = eval_B(p, x, lam * y, lam * m);
        const double rhs = lam * eval_B(p, x, y, m);
        const double rel = std::abs(lhs - rhs) / std::max(std::abs(rhs), 1e-300);
        acc.record(i, -rel, {{"x", x}, {"y", y}, {"m", m}, {"lambda", lam}});
      });
}

CheckReport check_wedge_domination(const Params& p, int k_max, long long n_side, double tol) {
  require_q(p);
  if (k_max < 1) throw DomainError("k_max must be >= 1");
  const auto side = static_cast<std::uint64_t>(std::max(3LL, n_side));
  const std::uint64_t per_k = side * side;
  return detail::run_indexed(
      "wedge-domination", per_k * static_cast<std::uint64_t>(k_max), tol,
      [&](std::uint64_t i, Accumulator& acc) {
        const int k = 1 + static_cast<int>(i / per_k);
        const std::uint64_t cell = i % per_k;
        // x log-spaced down to N^-(k+2), so the grid straddles both planes
        const std::uint64_t j = cell % side;
        const double x = j == 0 ? 0.0
                                : std::ldexp(1.0, -p.d * (k + 2)) *
                                      std::pow(std::ldexp(1.0, p.d * (k + 2)),
                                               static_cast<double>(j - 1) /
                                                   static_cast<double>(side - 2));
        const double y = 1.0 + (p.Q - 1.0) * static_cast<double>(cell / side) /
                                   static_cast<double>(side - 1);
        acc.record(i, wedge_Mk(p, k, x, y) - eval_M(p, x, y),
                   {{"k", static_cast<double>(k)}, {"x", x}, {"y", y}});
      });
}

}  // namespace a1bellman
