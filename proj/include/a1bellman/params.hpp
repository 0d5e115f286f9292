#pragma once

#include "a1bellman/numeric.hpp"

#include <optional>

namespace a1bellman {

/// Absolute tolerance used by every domain-membership predicate.
inline constexpr double kBoundaryTol = 1e-12;

/// Largest supported dimension; keeps N = 2^d at most 2^20.
inline constexpr int kMaxDimension = 20;

/// Problem constants: the A1 bound Q, the dimension d, and the quantities
/// derived from them.
///
/// N = 2^d is the number of dyadic children per cube, eta = 1 - (N-1)/(NQ)
/// is the value retained each time the extremal set shrinks by a factor N,
/// and epsilon = -log(eta)/log(N) is the sharp A-infinity exponent.
struct Params {
  double Q = 1.0;
  int d = 1;
  int N = 2;
  double eta = 0.5;
  double epsilon = 1.0;
  /// Q == 1: every admissible weight is constant.
  bool degenerate = true;

  /// Q converted to T. Exact for Rational since Q is a double.
  template <class T>
  T q_as() const {
    return from_double<T>(Q);
  }

  /// eta recomputed in T from Q, so rational mode carries no rounding.
  template <class T>
  T eta_as() const {
    const T q = q_as<T>();
    return T(1) - T(N - 1) / (T(N) * q);
  }

  /// (NQ - (N-1))/Q, the factor applied to the copied weight by the
  /// corner step.
  template <class T>
  T corner_multiplier() const {
    const T q = q_as<T>();
    return (T(N) * q - T(N - 1)) / q;
  }
};

/// Builds Params, rejecting Q < 1, non-finite Q, and d outside [1, 20].
Params new_params(double Q, int d);

/// A point of the three-variable domain; m defaults to 1.
struct DomainPoint {
  double x = 0.0;
  double y = 1.0;
  double m = 1.0;
};

/// 0 <= x <= 1 and 1 <= y <= Q, with kBoundaryTol slack. False for NaN.
bool in_omega(const Params& p, double x, double y);

/// in_omega and y <= 1 + (Q-1) N^k x.
bool in_omega_k(const Params& p, int k, double x, double y);

/// 0 <= x <= 1 and 0 < m <= y <= Q m.
bool in_omega_b(const Params& p, double x, double y, double m);
inline bool in_omega_b(const Params& p, const DomainPoint& pt) {
  return in_omega_b(p, pt.x, pt.y, pt.m);
}

/// Largest exponent of the weak-type estimate, log N / log(N - (N-1)/Q).
/// Satisfies 1 - 1/p_max = epsilon. Throws DegenerateError for Q = 1.
double osekowski_p_max(const Params& p);

}  // namespace a1bellman
