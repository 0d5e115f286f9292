#include "a1bellman/params.hpp"

#include "a1bellman/errors.hpp"

#include <cmath>
#include <string>

namespace a1bellman {

Params new_params(double Q, int d) {
  if (!std::isfinite(Q)) throw DomainError("Q must be finite");
  if (Q < 1.0) throw DomainError("Q must be >= 1, got " + std::to_string(Q));
  if (d < 1 || d > kMaxDimension) {
    throw DomainError("d must lie in [1, " + std::to_string(kMaxDimension) +
                      "], got " + std::to_string(d));
  }
  Params p;
  p.Q = Q;
  p.d = d;
  p.N = 1 << d;
  p.degenerate = (Q == 1.0);
  const double n = p.N;
  // (N-1)/(NQ) is small for large Q; log1p keeps epsilon accurate there.
  const double loss = (n - 1.0) / (n * Q);
  p.eta = 1.0 - loss;
  p.epsilon = -std::log1p(-loss) / std::log(n);
  return p;
}

bool in_omega(const Params& p, double x, double y) {
  if (!std::isfinite(x) || !std::isfinite(y)) return false;
  return x >= -kBoundaryTol && x <= 1.0 + kBoundaryTol && y >= 1.0 - kBoundaryTol &&
         y <= p.Q + kBoundaryTol;
}

bool in_omega_k(const Params& p, int k, double x, double y) {
  if (k < 0) throw DomainError("k must be >= 0");
  if (!in_omega(p, x, y)) return false;
  // ldexp keeps N^k x exact.
  return y <= 1.0 + (p.Q - 1.0) * std::ldexp(x, p.d * k) + kBoundaryTol;
}

bool in_omega_b(const Params& p, double x, double y, double m) {
  if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(m)) return false;
  if (x < -kBoundaryTol || x > 1.0 + kBoundaryTol) return false;
  if (m <= 0.0) return false;
  return y >= m - kBoundaryTol && y <= p.Q * m + kBoundaryTol;
}

double osekowski_p_max(const Params& p) {
  if (p.degenerate) throw DegenerateError("p_max is unbounded for Q = 1");
  const double n = p.N;
  return std::log(n) / std::log(n - (n - 1.0) / p.Q);
}

}  // namespace a1bellman
