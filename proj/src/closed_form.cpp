#include "a1bellman/closed_form.hpp"

#include "a1bellman/errors.hpp"

#include <cmath>
#include <sstream>

namespace a1bellman {
namespace {

// Beyond this index eta^k is evaluated in log space.
constexpr int kMaxDirectPower = 60;

void require_nondegenerate(const Params& p, const char* what) {
  if (p.degenerate) throw DegenerateError(std::string(what) + " requires Q > 1");
}

void require_unit(double x, const char* what) {
  if (!(x >= -kBoundaryTol && x <= 1.0 + kBoundaryTol)) {
    std::ostringstream msg;
    msg << what << ": x = " << x << " outside [0, 1]";
    throw DomainError(msg.str());
  }
}

double clamp_unit(double x) { return std::min(1.0, std::max(0.0, x)); }

double eta_power(const Params& p, int k) {
  if (k <= kMaxDirectPower) return std::pow(p.eta, k);
  return std::exp(k * std::log(p.eta));
}

void require_omega(const Params& p, double x, double y) {
  if (!in_omega(p, x, y)) {
    std::ostringstream msg;
    msg << "(x, y) = (" << x << ", " << y << ") outside Omega for Q = " << p.Q;
    throw DomainError(msg.str());
  }
}

}  // namespace

NodeInterval node_interval(const Params& p, double x) {
  if (!(x > 0.0 && x <= 1.0)) throw DomainError("node_interval needs x in (0, 1]");
  // x = mant * 2^exp with mant in [0.5, 1); x <= 2^-dk  <=>  2^(exp-1) <= 2^-dk
  // unless x is itself a power of two.
  int exp = 0;
  const double mant = std::frexp(x, &exp);
  const int floor_log2 = exp - 1;  // 2^floor_log2 <= x < 2^(floor_log2+1)
  const bool power_of_two = (mant == 0.5);
  const int neg = -floor_log2;  // >= 0
  NodeInterval out;
  if (power_of_two) {
    // x = 2^-neg. Node iff d divides neg; otherwise k = floor(neg / d).
    out.k = neg / p.d;
    out.at_node = (neg % p.d == 0);
  } else {
    // 2^-neg < x < 2^(-neg+1): x <= N^-k  <=>  d k <= neg - 1.
    out.k = (neg - 1) / p.d;
    out.at_node = false;
  }
  return out;
}

double eval_f(const Params& p, double x) {
  require_nondegenerate(p, "eval_f");
  require_unit(x, "eval_f");
  x = clamp_unit(x);
  if (x == 0.0) return 0.0;
  const NodeInterval iv = node_interval(p, x);
  // Chord through (N^-(k+1), Q eta^(k+1)) and (N^-k, Q eta^k):
  // f(x) = eta^k ((Q - 1) + N^k x).
  const double scaled = std::ldexp(x, p.d * iv.k);
  if (iv.k <= kMaxDirectPower) return eta_power(p, iv.k) * ((p.Q - 1.0) + scaled);
  return std::exp(iv.k * std::log(p.eta) + std::log((p.Q - 1.0) + scaled));
}

double eval_f_smooth(const Params& p, double x) {
  require_nondegenerate(p, "eval_f_smooth");
  require_unit(x, "eval_f_smooth");
  x = clamp_unit(x);
  if (x == 0.0) return 0.0;
  return p.Q * std::pow(x, p.epsilon);
}

double f_slope(const Params& p, double x) {
  require_nondegenerate(p, "f_slope");
  if (!(x > 0.0 && x < 1.0)) throw DomainError("f_slope needs x in (0, 1)");
  const NodeInterval iv = node_interval(p, x);
  const double upper = std::ldexp(1.0, -p.d * iv.k);
  const double lower = std::ldexp(1.0, -p.d * (iv.k + 1));
  if (std::abs(x - upper) <= 1e-12 * upper || std::abs(x - lower) <= 1e-12 * lower) {
    throw NodePointError("f_slope is undefined at the node N^-k");
  }
  return std::pow(p.N * p.eta, iv.k);
}

double eval_M(const Params& p, double x, double y) {
  require_omega(p, x, y);
  x = clamp_unit(x);
  if (p.degenerate) return x;
  y = std::min(p.Q, std::max(1.0, y));
  if (y <= 1.0 + (p.Q - 1.0) * x + kBoundaryTol) return x + y - 1.0;
  const double scale = (y - 1.0) / (p.Q - 1.0);
  const double u = std::min(1.0, x / scale);
  return scale * eval_f(p, u);
}

double eval_B(const Params& p, double x, double y, double m) {
  if (!in_omega_b(p, x, y, m)) {
    std::ostringstream msg;
    msg << "(x, y, m) = (" << x << ", " << y << ", " << m << ") outside Omega_B for Q = "
        << p.Q;
    throw DomainError(msg.str());
  }
  if (p.degenerate) return m * clamp_unit(x);
  const double ratio = std::min(p.Q, std::max(1.0, y / m));
  return m * eval_M(p, x, ratio);
}

std::string BranchInfo::describe() const {
  if (!upper) return "lower branch";
  std::ostringstream out;
  out << "upper branch, " << (interval.at_node ? "node" : "interval") << " k=" << interval.k;
  return out.str();
}

BranchInfo describe_M(const Params& p, double x, double y) {
  require_omega(p, x, y);
  BranchInfo info;
  if (p.degenerate || y <= 1.0 + (p.Q - 1.0) * x + kBoundaryTol) return info;
  info.upper = true;
  const double u = std::min(1.0, clamp_unit(x) * (p.Q - 1.0) / (y - 1.0));
  if (u > 0.0) info.interval = node_interval(p, u);
  return info;
}

WedgeCoeffs wedge_coeffs(const Params& p, int k) {
  if (k < 0) throw DomainError("wedge index must be >= 0");
  WedgeCoeffs c;
  c.k = k;
  c.b = eta_power(p, k);
  c.a = std::ldexp(c.b, p.d * k);
  return c;
}

double wedge_Mk(const Params& p, int k, double x, double y) {
  require_nondegenerate(p, "wedge_Mk");
  require_omega(p, x, y);
  if (k == 0) return wedge_coeffs(p, 0).plane(x, y);
  if (in_omega_k(p, k, x, y)) return wedge_coeffs(p, k - 1).plane(x, y);
  return wedge_coeffs(p, k).plane(x, y);
}

std::vector<SurfaceSample> tabulate_B(const Params& p, const std::vector<double>& xs,
                                      const std::vector<double>& ys, double m) {
  std::vector<SurfaceSample> out;
  out.reserve(xs.size() * ys.size());
  for (double x : xs) {
    for (double y : ys) {
      if (!in_omega_b(p, x, y, m)) continue;
      out.push_back({x, y, m, eval_B(p, x, y, m)});
    }
  }
  return out;
}

}  // namespace a1bellman
