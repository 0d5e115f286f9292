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
using detail::Witness;

// Draws per sample before the sample is given up as inadmissible.
constexpr int kMaxAttempts = 4096;

void require_sampling_params(const Params& p) {
  if (p.degenerate) throw DegenerateError("samplers require Q > 1");
}

Witness main_witness(const MainTuple& t, const Params& p) {
  return {{"x", t.x}, {"y", t.y}, {"xt", t.xt}, {"yt", t.yt},
          {"xh", t.x_hat(p)}, {"yh", t.y_hat(p)}};
}

double node(const Params& p, int k) { return std::ldexp(1.0, -p.d * k); }

// One candidate tuple for the two-point Main Inequality. Strata 0-1 are
// uniform on Omega x Omega; stratum 2 pins xt = 0 and/or yt = 1 (the
// configuration that generates f); stratum 3 pins yh = Q and xh to a node.
MainTuple draw_main_tuple(const Params& p, CounterRng& rng, int stratum) {
  MainTuple t;
  t.x = rng.uniform();
  t.y = rng.uniform(1.0, p.Q);
  t.xt = rng.uniform();
  t.yt = rng.uniform(1.0, p.Q);
  if (stratum == 2) {
    const int pick = rng.below(3);
    if (pick != 1) t.xt = 0.0;
    if (pick != 0) t.yt = 1.0;
    if (rng.coin()) t.x = node(p, 1 + rng.below(6)) * rng.uniform(1.0, static_cast<double>(p.N));
  } else if (stratum == 3) {
    t.yt = (p.N * t.y - p.Q) / (p.N - 1);
    const double xh = node(p, rng.below(8));
    t.xt = (p.N * t.x - xh) / (p.N - 1);
  }
  return t;
}

}  // namespace

void CheckReport::finalize() {
  if (samples == 0 && applicable) {
    applicable = false;
    if (note.empty()) note = "no admissible samples";
  }
  passed = applicable && worst_slack >= -tol;
}

MainRejection main_tuple_admissibility(const Params& p, const MainTuple& t) {
  if (!in_omega(p, t.x, t.y) || !in_omega(p, t.xt, t.yt)) return MainRejection::OutsideOmega;
  const double xh = t.x_hat(p);
  if (xh < -kBoundaryTol || xh > 1.0 + kBoundaryTol) return MainRejection::XHatRange;
  if (t.y_hat(p) < p.Q - kBoundaryTol) return MainRejection::YHatBelowQ;
  if (t.xt > t.x + kBoundaryTol) return MainRejection::Order;
  return MainRejection::None;
}

double main_inequality_M_slack(const Params& p, const MainTuple& t) {
  const double n = p.N;
  const double xh = std::min(1.0, std::max(0.0, t.x_hat(p)));
  const double yh = t.y_hat(p);
  const double rhs = (n - 1.0) / n * eval_M(p, t.xt, t.yt) + yh / (n * p.Q) * eval_M(p, xh, p.Q);
  return eval_M(p, t.x, t.y) - rhs;
}

CheckReport check_main_inequality_M(const Params& p, long long n_samples, std::uint64_t seed,
                                    double tol) {
  require_sampling_params(p);
  return detail::run_indexed(
      "main-inequality-M", static_cast<std::uint64_t>(n_samples), tol,
      [&](std::uint64_t i, Accumulator& acc) {
        CounterRng rng(seed, i);
        const int stratum = static_cast<int>(i % 4);
        for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
          const MainTuple t = draw_main_tuple(p, rng, stratum);
          switch (main_tuple_admissibility(p, t)) {
            case MainRejection::None: {
              acc.record(i, main_inequality_M_slack(p, t), main_witness(t, p));
              return;
            }
            case MainRejection::Order:
              // xh >= 0 alone would have admitted this tuple.
              ++acc.counters["rejected_by_order_only"];
              break;
            case MainRejection::XHatRange:
              ++acc.counters["rejected_by_xhat"];
              break;
            case MainRejection::YHatBelowQ:
              ++acc.counters["rejected_by_yhat"];
              break;
            case MainRejection::OutsideOmega:
              ++acc.counters["rejected_outside_omega"];
              break;
          }
        }
        ++acc.counters["exhausted"];
      });
}

bool b_tuple_admissible(const Params& p, const std::vector<DomainPoint>& children) {
  if (static_cast<int>(children.size()) != p.N) return false;
  double min_m = children.front().m;
  double sx = 0, sy = 0;
  for (const auto& c : children) {
    if (!in_omega_b(p, c)) return false;
    min_m = std::min(min_m, c.m);
    sx += c.x;
    sy += c.y;
  }
  return in_omega_b(p, sx / p.N, sy / p.N, min_m);
}

double main_inequality_B_slack(const Params& p, const std::vector<DomainPoint>& children) {
  double min_m = children.front().m;
  double sx = 0, sy = 0, sb = 0;
  for (const auto& c : children) {
    min_m = std::min(min_m, c.m);
    sx += c.x;
    sy += c.y;
    sb += eval_B(p, c.x, c.y, c.m);
  }
  const double n = p.N;
  const double x = std::min(1.0, sx / n);
  const double y = std::min(p.Q * min_m, std::max(min_m, sy / n));
  return eval_B(p, x, y, min_m) - sb / n;
}

CheckReport check_main_inequality_B(const Params& p, long long n_samples, std::uint64_t seed,
                                    double tol) {
  require_sampling_params(p);
  const int n = p.N;
  return detail::run_indexed(
      "main-inequality-B", static_cast<std::uint64_t>(n_samples), tol,
      [&](std::uint64_t i, Accumulator& acc) {
        CounterRng rng(seed, i);
        std::vector<DomainPoint> kids(n);
        if (i % 2 == 0) {
          // General m_i >= 1 with one child pinned at m = 1; redraw until the
          // parent average stays in Omega_B.
          for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
            const int pinned = rng.below(n);
            double sy = 0;
            for (int c = 0; c < n; ++c) {
              DomainPoint& pt = kids[c];
              pt.m = (c == pinned) ? 1.0 : rng.uniform(1.0, p.Q);
              pt.y = rng.uniform(pt.m, p.Q * pt.m);
              pt.x = rng.uniform();
              sy += pt.y;
            }
            if (sy / n <= p.Q) {
              Witness w;
              for (int c = 0; c < n; ++c) {
                const std::string s = std::to_string(c);
                w.push_back({"x" + s, kids[c].x});
                w.push_back({"y" + s, kids[c].y});
                w.push_back({"m" + s, kids[c].m});
              }
              ++acc.counters["stratum_general_m"];
              acc.record(i, main_inequality_B_slack(p, kids), w);
              return;
            }
          }
          ++acc.counters["exhausted"];
          return;
        }
        if (i % 4 == 3) {
          // The corner step: N-1 trivial children and one rescaled copy of a
          // point on y = Q. Saturates the inequality.
          const double c = p.corner_multiplier<double>();
          for (int j = 1; j < n; ++j) kids[j] = DomainPoint{0.0, 1.0, 1.0};
          kids[0] = DomainPoint{rng.uniform(), c * p.Q, c};
          ++acc.counters["stratum_corner_step"];
          acc.record(i, main_inequality_B_slack(p, kids),
                     {{"x0", kids[0].x}, {"y0", kids[0].y}, {"m0", kids[0].m}});
          return;
        }
        // Reduced form: k children with y_i <= Q at m = 1, N-k children with
        // y_i >= Q at m_i = y_i / Q, keeping <y_i> <= Q.
        const int k = 1 + static_cast<int>((i / 4) % static_cast<std::uint64_t>(n - 1));
        double budget = 0;
        for (int c = 0; c < k; ++c) {
          kids[c].y = rng.uniform(1.0, p.Q);
          kids[c].m = 1.0;
          kids[c].x = rng.uniform();
          budget += p.Q - kids[c].y;
        }
        for (int c = k; c < n; ++c) {
          const double extra = budget * rng.uniform() / (n - k);
          kids[c].y = p.Q + extra;
          kids[c].m = kids[c].y / p.Q;
          kids[c].x = rng.uniform();
        }
        Witness w{{"k", static_cast<double>(k)}};
        for (int c = 0; c < n; ++c) {
          const std::string s = std::to_string(c);
          w.push_back({"x" + s, kids[c].x});
          w.push_back({"y" + s, kids[c].y});
          w.push_back({"m" + s, kids[c].m});
        }
        ++acc.counters["stratum_k" + std::to_string(k)];
        acc.record(i, main_inequality_B_slack(p, kids), w);
      });
}

bool wedge_region(const Params& p, int k, double x, double y) {
  if (k < 0) return false;
  if (!in_omega_k(p, k + 1, x, y)) return false;
  if (k == 0) return true;
  // strictly outside Omega_k, up to the boundary tolerance
  return y >= 1.0 + (p.Q - 1.0) * std::ldexp(x, p.d * k) - kBoundaryTol;
}

bool wedge_tuple_admissible(const Params& p, int k, const MainTuple& t) {
  if (!wedge_region(p, k, t.x, t.y)) return false;
  if (!in_omega(p, t.xt, t.yt)) return false;
  const double xh = t.x_hat(p);
  if (xh < -kBoundaryTol || xh > 1.0 + kBoundaryTol) return false;
  return t.y_hat(p) >= p.Q - kBoundaryTol;
}

double wedge_inequality_slack(const Params& p, int k, const MainTuple& t) {
  const double n = p.N;
  const double xh = std::min(1.0, std::max(0.0, t.x_hat(p)));
  const double yh = t.y_hat(p);
  const double rhs = (n - 1.0) / n * wedge_Mk(p, k, t.xt, t.yt) +
                     (1.0 / n) * (yh / p.Q) * wedge_Mk(p, k, xh, p.Q);
  return wedge_Mk(p, k, t.x, t.y) - rhs;
}

CheckReport check_wedge_inequality(const Params& p, int k_max, long long n_samples,
                                   std::uint64_t seed, double tol) {
  require_sampling_params(p);
  if (k_max < 1) throw DomainError("k_max must be >= 1");
  const double n = p.N;
  const double q = p.Q;
  return detail::run_indexed(
      "wedge-inequality", static_cast<std::uint64_t>(n_samples), tol,
      [&](std::uint64_t i, Accumulator& acc) {
        CounterRng rng(seed, i);
        const int k = static_cast<int>(i % static_cast<std::uint64_t>(k_max + 1));
        const int stratum = static_cast<int>((i / static_cast<std::uint64_t>(k_max + 1)) % 4);
        for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
          MainTuple t;
          // yt >= 1 with yh >= Q needs y >= (Q + N - 1)/N.
          t.y = rng.uniform((q + n - 1.0) / n, q);
          if (k == 0) {
            t.x = rng.uniform((t.y - 1.0) / ((q - 1.0) * n), 1.0);
          } else {
            const double u = rng.uniform(node(p, k + 1), node(p, k));
            t.x = u * (t.y - 1.0) / (q - 1.0);
          }
          const double yh_lo = std::max(q, n * t.y - (n - 1.0) * q);
          const double yh_hi = n * t.y - (n - 1.0);
          double yh = rng.uniform(yh_lo, yh_hi);
          if (stratum == 1) yh = q;
          const double xh_lo = std::max(0.0, n * t.x - (n - 1.0));
          const double xh_hi = std::min(1.0, n * t.x);
          double xh = rng.uniform(xh_lo, xh_hi);
          if (stratum == 2 && node(p, k) >= xh_lo && node(p, k) <= xh_hi) xh = node(p, k);
          if (stratum == 3) xh = xh_hi;  // xt = 0
          t.yt = (n * t.y - yh) / (n - 1.0);
          t.xt = (n * t.x - xh) / (n - 1.0);
          if (!wedge_tuple_admissible(p, k, t)) {
            ++acc.counters["redrawn"];
            continue;
          }
          ++acc.counters["k" + std::to_string(k)];
          Witness w = main_witness(t, p);
          w.insert(w.begin(), {"k", static_cast<double>(k)});
          acc.record(i, wedge_inequality_slack(p, k, t), w);
          return;
        }
        ++acc.counters["exhausted"];
      });
}

}  // namespace a1bellman
