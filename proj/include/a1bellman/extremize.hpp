#pragma once

// Explicit weight/set pairs that attain (or approach) the Bellman function.
//
// Every construction is templated on the scalar: double for everyday use,
// Rational for exact bookkeeping of the corner values Q eta^k.

#include "a1bellman/closed_form.hpp"
#include "a1bellman/dyadic.hpp"
#include "a1bellman/errors.hpp"
#include "a1bellman/params.hpp"

#include <cmath>
#include <string>
#include <type_traits>
#include <vector>

namespace a1bellman {

/// Largest number of binary digits a single concatenation may use.
inline constexpr int kMaxDigits = 32;

template <class T>
struct BasicPair {
  BasicWeight<T> w;
  DyadicSet E;
  DomainPoint target;
  WeightStats<T> achieved;
  int truncation_depth = 0;
};

using ExtremalPair = BasicPair<double>;
using ExactPair = BasicPair<Rational>;

template <class T>
BasicPair<T> pair_from(BasicWeight<T> w, DyadicSet E, DomainPoint target, int depth = 0) {
  WeightStats<T> s = stats(w, E);
  return BasicPair<T>{std::move(w), std::move(E), target, std::move(s), depth};
}

/// The trivial pair (w = 1, E = empty): stats (0, 1, 1, 1, 0).
template <class T>
BasicPair<T> trivial_pair(const Params& p) {
  return pair_from(BasicWeight<T>::leaf(p.N, T(1)), DyadicSet::empty(p.N), DomainPoint{0, 1, 1});
}

/// Weight 1 on the first N-1 children and 1 + N(y-1) on the last, with E = P.
/// Attains M(1, y) = y.
template <class T>
BasicPair<T> boundary_weight(const Params& p, const T& y) {
  const T q = p.q_as<T>();
  if (y < T(1) || y > q) throw DomainError("boundary_weight needs 1 <= y <= Q");
  DomainPoint target{1.0, to_double(y), 1.0};
  if (y == T(1)) return pair_from(BasicWeight<T>::leaf(p.N, T(1)), DyadicSet::full(p.N), target);
  std::vector<BasicWeight<T>> kids(p.N - 1, BasicWeight<T>::leaf(p.N, T(1)));
  kids.push_back(BasicWeight<T>::leaf(p.N, T(1) + T(p.N) * (y - T(1))));
  return pair_from(BasicWeight<T>::internal(kids), DyadicSet::full(p.N), target);
}

inline ExtremalPair boundary_weight(const Params& p, double y) {
  return boundary_weight<double>(p, y);
}

/// Set companion of the corner step: E rescaled into the first child.
inline DyadicSet apply_S(const DyadicSet& E, int max_height = kDefaultMaxHeight) {
  std::vector<DyadicSet> kids(E.fanout(), DyadicSet::empty(E.fanout()));
  kids.front() = E;
  return DyadicSet::internal(kids, max_height);
}

/// Corner step: a scaled copy of w times (NQ - (N-1))/Q in the first child,
/// weight 1 on the other N-1 children, and E copied into the first child.
/// Requires <w> = Q, ess inf w = 1, [w] <= Q. Keeps <w> = Q and the
/// characteristic at Q, divides |E| by N, and multiplies w(E) by eta.
template <class T>
BasicPair<T> apply_T(const Params& p, const BasicPair<T>& pair,
                     int max_height = kDefaultMaxHeight) {
  if (p.degenerate) throw DegenerateError("apply_T requires Q > 1");
  const T q = p.q_as<T>();
  if (!nearly_equal(pair.achieved.y, q)) throw DomainError("apply_T needs <w> = Q");
  if (!nearly_equal(pair.achieved.m, T(1))) throw DomainError("apply_T needs ess inf w = 1");
  if (!nearly_le(pair.achieved.characteristic, q)) throw DomainError("apply_T needs [w] <= Q");
  if (pair.w.fanout() != p.N) throw IncompatibleTreesError("pair fan-out differs from N");
  std::vector<BasicWeight<T>> kids(p.N, BasicWeight<T>::leaf(p.N, T(1)));
  kids.front() = pair.w.scaled(p.corner_multiplier<T>());
  BasicWeight<T> w = BasicWeight<T>::internal(kids, max_height);
  DyadicSet E = apply_S(pair.E, max_height);
  DomainPoint target{pair.target.x / p.N, pair.target.y, 1.0};
  return pair_from(std::move(w), std::move(E), target, pair.truncation_depth);
}

/// k-fold corner step applied to boundary_weight(Q). Stats are
/// (N^-k, Q, 1, Q, Q eta^k), exactly so in rational mode.
template <class T>
BasicPair<T> build_corner(const Params& p, int k, int max_height = kDefaultMaxHeight) {
  if (p.degenerate) throw DegenerateError("build_corner requires Q > 1");
  if (k < 0) throw DomainError("corner index must be >= 0");
  if (k + 1 > max_height) {
    throw DepthCapError("corner k = " + std::to_string(k) + " needs height " +
                        std::to_string(k + 1) + " > cap " + std::to_string(max_height));
  }
  BasicPair<T> pair = boundary_weight<T>(p, p.q_as<T>());
  for (int i = 0; i < k; ++i) pair = apply_T(p, pair, max_height);
  pair.target = DomainPoint{std::ldexp(1.0, -p.d * k), p.Q, 1.0};
  return pair;
}

inline ExtremalPair build_corner(const Params& p, int k) { return build_corner<double>(p, k); }

/// First `depth` binary digits of lambda in [0, 1]. Dyadic rationals use the
/// terminating expansion; lambda = 1 is 0.111...
template <class T>
std::vector<int> binary_digits(const T& lambda, int depth) {
  if (lambda < T(0) || lambda > T(1)) throw DomainError("lambda must lie in [0, 1]");
  std::vector<int> digits(static_cast<std::size_t>(depth), 1);
  if (lambda == T(1)) return digits;
  T rest = lambda;
  for (int j = 0; j < depth; ++j) {
    rest = rest * T(2);
    if (rest >= T(1)) {
      digits[j] = 1;
      rest -= T(1);
    } else {
      digits[j] = 0;
    }
  }
  return digits;
}

/// Halving concatenation truncated after `depth` digits of lambda.
///
/// Stage j splits the current cube's children in half (index order): the
/// first N/2 receive a copy of pair1 if the j-th digit is 1 and of pair0
/// otherwise, the second half carry stage j+1. After the last stage the
/// remaining region, of measure 2^-depth, receives `filler` (by default the
/// trivial pair). With lambda_D the truncated lambda the statistics are
///   x = lambda_D x1 + (1 - lambda_D - 2^-D) x0 + 2^-D x_fill,
/// and likewise for <w> and w(E).
template <class T>
BasicPair<T> concatenate(const Params& p, const T& lambda, const BasicPair<T>& pair0,
                         const BasicPair<T>& pair1, int depth,
                         const std::type_identity_t<BasicPair<T>>* filler = nullptr,
                         int max_height = kDefaultMaxHeight) {
  if (depth < 1) throw DomainError("concatenate needs depth >= 1");
  if (depth > kMaxDigits) {
    throw DepthCapError("concatenate depth " + std::to_string(depth) + " exceeds " +
                        std::to_string(kMaxDigits) + " digits");
  }
  const T q = p.q_as<T>();
  for (const BasicPair<T>* in : {&pair0, &pair1}) {
    if (in->w.fanout() != p.N) throw IncompatibleTreesError("pair fan-out differs from N");
    if (!nearly_equal(in->achieved.m, T(1))) throw DomainError("concatenate needs ess inf = 1");
    if (!nearly_le(in->achieved.characteristic, q)) throw DomainError("concatenate needs [w] <= Q");
  }
  const std::vector<int> digits = binary_digits(lambda, depth);
  const BasicPair<T> trivial = trivial_pair<T>(p);
  const BasicPair<T>& fill = filler ? *filler : trivial;

  const int half = p.N / 2;
  BasicWeight<T> w = fill.w;
  DyadicSet E = fill.E;
  for (int j = depth - 1; j >= 0; --j) {
    const BasicPair<T>& piece = digits[j] ? pair1 : pair0;
    std::vector<BasicWeight<T>> wk(p.N, w);
    std::vector<DyadicSet> ek(p.N, E);
    for (int i = 0; i < half; ++i) {
      wk[i] = piece.w;
      ek[i] = piece.E;
    }
    w = BasicWeight<T>::internal(wk, max_height);
    E = DyadicSet::internal(ek, max_height);
  }
  const double lam = to_double(lambda);
  DomainPoint target{(1 - lam) * pair0.target.x + lam * pair1.target.x,
                     (1 - lam) * pair0.target.y + lam * pair1.target.y, 1.0};
  return pair_from(std::move(w), std::move(E), target, depth);
}

/// lambda truncated to its first `depth` binary digits.
template <class T>
T truncated_lambda(const T& lambda, int depth) {
  const std::vector<int> digits = binary_digits(lambda, depth);
  T out(0);
  T scale(1);
  for (int b : digits) {
    scale = scale / T(2);
    if (b) out += scale;
  }
  return out;
}

/// Pair for a target (x, y) in Omega with m = 1.
///
///  * y <= 1 + (Q-1)x, x = 1: boundary_weight(y), exact.
///  * y <= 1 + (Q-1)x, x < 1: C_x((1, empty), boundary_weight(1 + (y-1)/x)).
///  * y = Q: a corner pair at nodes, otherwise C_mu(corner k+1, corner k)
///    with x = (1-mu) N^-(k+1) + mu N^-k; the residual region is filled with
///    (boundary_weight(Q), empty) so <w> stays exactly Q.
///  * otherwise: C_lambda((1, empty), line pair at u = x(Q-1)/(y-1)) with
///    lambda = (y-1)/(Q-1).
///
/// The value undershoots M(x, y) by at most 2 Q 2^-depth.
template <class T>
BasicPair<T> build_extremizer(const Params& p, double x, double y, int depth,
                              int max_height = kDefaultMaxHeight) {
  if (p.degenerate) throw DegenerateError("build_extremizer requires Q > 1");
  if (!in_omega(p, x, y)) throw DomainError("extremizer target outside Omega");
  if (depth < 1 || depth > kMaxDigits) {
    throw DepthCapError("extremizer depth must lie in [1, " + std::to_string(kMaxDigits) + "]");
  }
  x = std::min(1.0, std::max(0.0, x));
  y = std::min(p.Q, std::max(1.0, y));
  const DomainPoint target{x, y, 1.0};
  const bool lower = y <= 1.0 + (p.Q - 1.0) * x + kBoundaryTol;

  auto finish = [&](BasicPair<T> pair) {
    pair.target = target;
    pair.truncation_depth = depth;
    return pair;
  };

  if (lower) {
    if (x == 1.0) return finish(boundary_weight<T>(p, from_double<T>(y)));
    if (x == 0.0) return finish(trivial_pair<T>(p));
    // y' = 1 + (y-1)/x can exceed Q by rounding on the dividing line.
    const double y_prime = std::min(p.Q, 1.0 + (y - 1.0) / x);
    const BasicPair<T> inner = boundary_weight<T>(p, from_double<T>(y_prime));
    return finish(concatenate(p, from_double<T>(x), trivial_pair<T>(p), inner, depth, nullptr,
                              max_height));
  }

  const double lambda = (y - 1.0) / (p.Q - 1.0);
  const double u = std::min(1.0, x / lambda);
  BasicPair<T> line = [&] {
    const BasicPair<T> top = boundary_weight<T>(p, p.q_as<T>());
    if (u == 0.0) return pair_from(top.w, DyadicSet::empty(p.N), DomainPoint{0, p.Q, 1});
    const NodeInterval iv = node_interval(p, u);
    if (iv.at_node) return build_corner<T>(p, iv.k, max_height);
    const double hi = std::ldexp(1.0, -p.d * iv.k);
    const double lo = std::ldexp(1.0, -p.d * (iv.k + 1));
    const double mu = std::min(1.0, std::max(0.0, (u - lo) / (hi - lo)));
    const BasicPair<T> fill = pair_from(top.w, DyadicSet::empty(p.N), DomainPoint{0, p.Q, 1});
    return concatenate(p, from_double<T>(mu), build_corner<T>(p, iv.k + 1, max_height),
                       build_corner<T>(p, iv.k, max_height), depth, &fill, max_height);
  }();
  if (y >= p.Q) return finish(std::move(line));
  return finish(concatenate(p, from_double<T>(lambda), trivial_pair<T>(p), line, depth, nullptr,
                            max_height));
}

inline ExtremalPair build_extremizer(const Params& p, double x, double y, int depth) {
  return build_extremizer<double>(p, x, y, depth);
}

}  // namespace a1bellman
