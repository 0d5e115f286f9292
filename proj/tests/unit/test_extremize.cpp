#include "a1bellman/closed_form.hpp"
#include "a1bellman/extremize.hpp"
#include "reference.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace a1bellman;

namespace {

const Params P10 = new_params(10, 2);

Rational pow_r(const Rational& b, int k) {
  Rational out(1);
  for (int i = 0; i < k; ++i) out *= b;
  return out;
}

void expect_normalized(const Params& p, const ExtremalPair& pair) {
  EXPECT_EQ(pair.achieved.m, 1.0);
  EXPECT_LE(pair.achieved.characteristic, p.Q + 1e-9);
  EXPECT_LE(pair.achieved.value,
            eval_B(p, pair.achieved.x, std::min(p.Q, pair.achieved.y), 1) + 1e-9);
}

}  // namespace

TEST(Extremize, BoundaryWeight) {
  const auto b = boundary_weight(P10, 10.0);
  ASSERT_EQ(b.w.child_count(), 4u);
  EXPECT_EQ(b.w.child(0).value(), 1);
  EXPECT_EQ(b.w.child(3).value(), 37);
  EXPECT_EQ(b.achieved.value, 10);
  EXPECT_TRUE(boundary_weight(P10, 1.0).w.is_leaf());
  EXPECT_EQ(boundary_weight(P10, 1.0).achieved.value, 1);
  const auto q2 = boundary_weight(new_params(2, 1), 2.0);
  EXPECT_EQ(q2.w.child(1).value(), 3);
  EXPECT_EQ(q2.achieved.value, 2);
  EXPECT_THROW(boundary_weight(P10, 0.5), DomainError);
  EXPECT_THROW(boundary_weight(P10, 10.5), DomainError);
}

TEST(Extremize, ApplyS) {
  const auto once = apply_S(DyadicSet::full(4));
  EXPECT_DOUBLE_EQ(measure(once), 0.25);
  EXPECT_TRUE(once.child(0).is_full());
  EXPECT_DOUBLE_EQ(measure(apply_S(once)), 1.0 / 16);
  EXPECT_TRUE(apply_S(DyadicSet::empty(4)).is_empty());
}

TEST(Extremize, ApplyT) {
  const auto t1 = apply_T(P10, boundary_weight(P10, 10.0));
  EXPECT_NEAR(t1.achieved.value, 9.25, 1e-13);
  EXPECT_EQ(t1.achieved.x, 0.25);
  EXPECT_NEAR(t1.achieved.y, 10, 1e-13);
  EXPECT_NEAR(t1.achieved.characteristic, 10, 1e-13);
  EXPECT_NEAR(a1_characteristic(t1.w), 10, 1e-13);
  const auto t2 = apply_T(P10, t1);
  EXPECT_NEAR(t2.achieved.value, 8.55625, 1e-13);
  EXPECT_EQ(t2.achieved.x, 1.0 / 16);
  EXPECT_THROW(apply_T(P10, boundary_weight(P10, 7.0)), DomainError);
  EXPECT_THROW(apply_T(new_params(1, 2), boundary_weight(P10, 1.0)), DegenerateError);
}

TEST(Extremize, ApplyTScalesByEtaOnAnyShape) {
  // a different weight with average Q, ess inf 1 and characteristic Q:
  // leaves (1, 1, 19, 19) at depth 1 under N = 4
  const ExactPair pair = pair_from(
      ExactWeight::from_leaves(4, 1, std::vector<Rational>{1, 1, 19, 19}),
      DyadicSet::internal({DyadicSet::empty(4), DyadicSet::full(4), DyadicSet::full(4),
                           DyadicSet::empty(4)}),
      DomainPoint{0.5, 10, 1});
  ASSERT_EQ(pair.achieved.y, Rational(10));
  const ExactPair t = apply_T(P10, pair);
  EXPECT_EQ(t.achieved.value, pair.achieved.value * P10.eta_as<Rational>());
  EXPECT_EQ(t.achieved.x, pair.achieved.x / 4);
  EXPECT_EQ(t.achieved.y, Rational(10));
  EXPECT_EQ(t.achieved.m, Rational(1));
}

TEST(Extremize, ExactCorners) {
  for (const auto& [num, den, d] : {std::tuple{10, 1, 2}, {2, 1, 1}, {7, 2, 3}}) {
    const Params p = new_params(static_cast<double>(num) / den, d);
    const Rational q(num, den);
    const int N = 1 << d;
    const Rational eta = Rational(1) - Rational(N - 1) / (Rational(N) * q);
    for (int k = 0; k <= 12; ++k) {
      const ExactPair c = build_corner<Rational>(p, k);
      EXPECT_EQ(c.achieved.x, pow_r(Rational(1, N), k));
      EXPECT_EQ(c.achieved.y, q);
      EXPECT_EQ(c.achieved.m, Rational(1));
      EXPECT_EQ(c.achieved.characteristic, q);
      EXPECT_EQ(c.achieved.value, q * pow_r(eta, k)) << "k=" << k;
    }
  }
  EXPECT_EQ(build_corner<Rational>(P10, 3).achieved.value, Rational(791453125, 100000000));
  EXPECT_EQ(build_corner<Rational>(P10, 3).achieved.x, Rational(1, 64));
  EXPECT_NEAR(build_corner(new_params(2, 1), 1).achieved.value, 1.5, 1e-15);
  EXPECT_THROW(build_corner(P10, -1), DomainError);
  EXPECT_THROW(build_corner<double>(P10, 200), DepthCapError);
}

TEST(Extremize, CornerMatchesNaiveStats) {
  for (int k = 0; k <= 4; ++k) {
    const auto c = build_corner(P10, k);
    const auto want = ref::stats(c.w, c.E);
    EXPECT_NEAR(c.achieved.value, static_cast<double>(want.value), 1e-12);
    EXPECT_NEAR(c.achieved.characteristic, static_cast<double>(want.characteristic), 1e-12);
  }
}

TEST(Extremize, BinaryDigits) {
  EXPECT_EQ(binary_digits(0.375, 5), (std::vector<int>{0, 1, 1, 0, 0}));
  EXPECT_EQ(binary_digits(1.0, 3), (std::vector<int>{1, 1, 1}));
  EXPECT_EQ(binary_digits(0.0, 3), (std::vector<int>{0, 0, 0}));
  EXPECT_THROW(binary_digits(1.5, 3), DomainError);
  EXPECT_EQ(truncated_lambda(Rational(1, 3), 4), Rational(5, 16));
}

TEST(Extremize, ConcatenateHalf) {
  const auto pair = concatenate(P10, 0.5, trivial_pair<double>(P10), build_corner(P10, 0), 20);
  EXPECT_NEAR(pair.achieved.x, 0.5, 1e-5);
  EXPECT_NEAR(pair.achieved.y, 5.5, 1e-5);
  EXPECT_NEAR(pair.achieved.value, 5.0, 1e-5);
  EXPECT_NEAR(eval_M(P10, 0.5, 5.5), 5.0, 1e-15);
  expect_normalized(P10, pair);
}

TEST(Extremize, ConcatenateDyadicLambdaExact) {
  const ExactPair p0 = trivial_pair<Rational>(P10);
  const ExactPair p1 = build_corner<Rational>(P10, 1);
  const Rational lam(3, 8);
  const Rational pad = Rational(1, 1 << 6);
  const ExactPair c = concatenate(P10, lam, p0, p1, 6);
  // padding is (1, empty) like pair0, so the mix is exact with weight 1 - lambda on pair0
  EXPECT_EQ(c.achieved.x, lam * p1.achieved.x);
  EXPECT_EQ(c.achieved.y, lam * p1.achieved.y + (Rational(1) - lam - pad) + pad);
  EXPECT_EQ(c.achieved.value, lam * p1.achieved.value);
  EXPECT_EQ(c.achieved.m, Rational(1));
}

TEST(Extremize, ConcatenateZeroAndIdentical) {
  const auto corner = build_corner(P10, 2);
  const auto zero = concatenate(P10, 0.0, corner, build_corner(P10, 0), 16);
  EXPECT_NEAR(zero.achieved.value, corner.achieved.value, 10 * std::ldexp(1.0, -16));
  const auto same = concatenate(P10, 0.7, corner, corner, 16);
  const double pad = std::ldexp(1.0, -16);
  EXPECT_NEAR(same.achieved.x, corner.achieved.x, pad);
  EXPECT_NEAR(same.achieved.value, corner.achieved.value, 10 * pad);
  EXPECT_THROW(concatenate(P10, 0.5, corner, corner, 33), DepthCapError);
  EXPECT_THROW(concatenate(P10, 1.5, corner, corner, 8), DomainError);
  EXPECT_THROW(concatenate(P10, 0.5, corner, corner, 0), DomainError);
}

TEST(Extremize, ExtremizerExamples) {
  const auto a = build_extremizer(P10, 1, 7, 20);
  EXPECT_EQ(a.achieved.value, 7);
  EXPECT_EQ(a.w.child(3).value(), 25);

  const auto b = build_extremizer(P10, 1.0 / 16, 10, 20);
  EXPECT_NEAR(b.achieved.value, 8.55625, 1e-13);
  EXPECT_EQ(b.achieved.x, 1.0 / 16);

  const auto c = build_extremizer(P10, 0.5, 10, 24);
  EXPECT_NEAR(c.achieved.value, eval_f(P10, 0.5), 1e-4);
  EXPECT_NEAR(c.achieved.value, 9.5, 1e-4);
  EXPECT_NEAR(c.achieved.y, 10, 1e-12);

  EXPECT_THROW(build_extremizer(P10, 0.5, 11, 10), DomainError);
  EXPECT_THROW(build_extremizer(P10, 0.5, 5, 40), DepthCapError);
  EXPECT_THROW(build_extremizer(new_params(1, 2), 0.5, 1, 10), DegenerateError);
}

TEST(Extremize, ExtremizerRegions) {
  // lower, upper, y = Q off-node, x = 0, y = 1
  const std::vector<std::pair<double, double>> pts = {
      {0.3, 2.0}, {0.05, 6.0}, {0.2, 10.0}, {0.0, 4.0}, {0.4, 1.0}, {0.1, 1.9}};
  for (const auto& [x, y] : pts) {
    const auto pair = build_extremizer(P10, x, y, 24);
    expect_normalized(P10, pair);
    EXPECT_NEAR(pair.achieved.x, x, 1e-6) << x << "," << y;
    EXPECT_NEAR(pair.achieved.y, y, 1e-5) << x << "," << y;
    EXPECT_GE(pair.achieved.value, eval_M(P10, x, y) - 2 * 10 * std::ldexp(1.0, -24));
  }
}

TEST(Extremize, BellmanConsistency) {
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> u(0, 1);
  for (const auto& [Q, d] : {std::pair{10.0, 2}, {2.0, 1}, {5.0, 3}}) {
    const Params p = new_params(Q, d);
    const double bound = 2 * Q * std::ldexp(1.0, -20);
    for (int i = 0; i < 200; ++i) {
      const double x = u(gen), y = 1 + (Q - 1) * u(gen);
      const auto pair = build_extremizer(p, x, y, 20);
      const auto& s = pair.achieved;
      EXPECT_EQ(s.m, 1.0);
      EXPECT_LE(s.characteristic, Q + 1e-9);
      EXPECT_LE(s.value, eval_M(p, x, y) + 1e-9);
      EXPECT_LE(s.value, eval_M(p, std::min(1.0, s.x), std::min(Q, s.y)) + 1e-9);
      EXPECT_GE(s.value, eval_M(p, std::min(1.0, s.x), std::min(Q, s.y)) - bound)
          << "Q=" << Q << " x=" << x << " y=" << y;
      EXPECT_NEAR(s.x, x, std::ldexp(1.0, -20) * std::max(1.0, Q));
      EXPECT_NEAR(s.y, y, std::ldexp(1.0, -20) * std::max(1.0, Q));
    }
  }
}

TEST(Extremize, ExactExtremizerAtDyadicTarget) {
  // x = 3/8 on the dividing line side: lambda = x is dyadic, so the rational
  // construction reproduces the target up to the (1, empty) padding exactly
  const ExactPair pair = build_extremizer<Rational>(P10, 0.375, 1.75, 8);
  EXPECT_EQ(pair.achieved.x, Rational(3, 8));
  EXPECT_EQ(pair.achieved.y, Rational(7, 4));
  EXPECT_EQ(pair.achieved.value, Rational(9, 8));  // M = x + y - 1
}
