#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <type_traits>

namespace a1bellman {

/// Exact rational scalar used by the bookkeeping mode of the tree walks.
using Rational = boost::multiprecision::cpp_rational;

template <class T>
inline constexpr bool is_exact_v = std::is_same_v<T, Rational>;

/// Exact for Rational: every finite double is a dyadic rational.
template <class T>
T from_double(double v) {
  if constexpr (is_exact_v<T>) {
    return Rational(v);
  } else {
    return static_cast<T>(v);
  }
}

template <class T>
double to_double(const T& v) {
  if constexpr (is_exact_v<T>) {
    return v.template convert_to<double>();
  } else {
    return static_cast<double>(v);
  }
}

template <class T>
bool is_finite_value(const T& v) {
  if constexpr (is_exact_v<T>) {
    (void)v;
    return true;
  } else {
    return std::isfinite(v);
  }
}

/// Equality used for construction preconditions: exact in rational mode,
/// relative 1e-9 in floating point.
template <class T>
bool nearly_equal(const T& a, const T& b) {
  if constexpr (is_exact_v<T>) {
    return a == b;
  } else {
    return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b));
  }
}

/// a <= b up to the same tolerance as nearly_equal.
template <class T>
bool nearly_le(const T& a, const T& b) {
  if constexpr (is_exact_v<T>) {
    return a <= b;
  } else {
    return a <= b + 1e-9 * std::max(1.0, std::abs(b));
  }
}

}  // namespace a1bellman
