#include "a1bellman/closed_form.hpp"
#include "a1bellman/extremize.hpp"
#include "a1bellman/verify.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>

using namespace a1bellman;

namespace {

const Params P10 = new_params(10, 2);

// Scoped override of the worker count.
class ThreadsEnv {
 public:
  explicit ThreadsEnv(const char* value) {
    if (const char* old = std::getenv("BELLMAN_THREADS")) saved_ = old, had_ = true;
    setenv("BELLMAN_THREADS", value, 1);
  }
  ~ThreadsEnv() {
    if (had_) {
      setenv("BELLMAN_THREADS", saved_.c_str(), 1);
    } else {
      unsetenv("BELLMAN_THREADS");
    }
  }

 private:
  std::string saved_;
  bool had_ = false;
};

void expect_same(const CheckReport& a, const CheckReport& b) {
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_EQ(a.worst_slack, b.worst_slack);
  EXPECT_EQ(a.worst_witness, b.worst_witness);
  EXPECT_EQ(a.counters, b.counters);
  EXPECT_EQ(a.passed, b.passed);
}

}  // namespace

TEST(Verify, MainAdmissibility) {
  EXPECT_EQ(main_tuple_admissibility(P10, {1, 10, 1, 10}), MainRejection::None);
  EXPECT_EQ(main_tuple_admissibility(P10, {0.25, 10, 0, 1}), MainRejection::None);
  EXPECT_EQ(main_tuple_admissibility(P10, {0.5, 11, 0, 1}), MainRejection::OutsideOmega);
  EXPECT_EQ(main_tuple_admissibility(P10, {0.5, 5, 2, 1}), MainRejection::OutsideOmega);
  EXPECT_EQ(main_tuple_admissibility(P10, {0.5, 5, 0, 1}), MainRejection::XHatRange);
  EXPECT_EQ(main_tuple_admissibility(P10, {0.1, 5, 0.5, 1}), MainRejection::XHatRange);
  EXPECT_EQ(main_tuple_admissibility(P10, {0.5, 2, 0.5, 2}), MainRejection::YHatBelowQ);
  // xt > x while xh stays in [0, 1]: only the order constraint rejects
  EXPECT_EQ(main_tuple_admissibility(P10, {0.5, 5, 0.6, 2}), MainRejection::Order);
}

TEST(Verify, MainSlackExamples) {
  EXPECT_NEAR(main_inequality_M_slack(P10, {1, 10, 1, 10}), 0, 1e-12);
  EXPECT_NEAR(main_inequality_M_slack(P10, {0.25, 10, 0, 1}), 0, 1e-12);
  for (int k = 0; k <= 6; ++k) {
    const double x = std::ldexp(1.0, -2 * k);
    EXPECT_GE(main_inequality_M_slack(P10, {x, 10, x, 10}), -1e-12) << k;
  }
  // same corner step for N = 2
  const Params p2 = new_params(2, 1);
  EXPECT_NEAR(main_inequality_M_slack(p2, {0.5, 2, 0, 1}), 0, 1e-12);
}

TEST(Verify, MainSampler) {
  for (const auto& [Q, d] : {std::pair{10.0, 2}, {2.0, 1}, {5.0, 3}}) {
    const auto r = check_main_inequality_M(new_params(Q, d), 20000, 7);
    EXPECT_TRUE(r.passed) << r.worst_slack;
    EXPECT_EQ(r.samples, 20000);
    EXPECT_GE(r.worst_slack, -1e-9);
    EXPECT_LT(r.worst_slack, 1e-6);  // equality configurations are sampled
    EXPECT_FALSE(r.worst_witness.empty());
  }
  EXPECT_THROW(check_main_inequality_M(new_params(1, 2), 10, 1), DegenerateError);
}

TEST(Verify, BAdmissibilityAndSlack) {
  const std::vector<DomainPoint> same(4, DomainPoint{0.3, 5, 1});
  EXPECT_TRUE(b_tuple_admissible(P10, same));
  EXPECT_NEAR(main_inequality_B_slack(P10, same), 0, 1e-12);

  std::vector<DomainPoint> step(4, DomainPoint{0, 1, 1});
  step[0] = DomainPoint{1, 37, 3.7};
  EXPECT_TRUE(b_tuple_admissible(P10, step));
  EXPECT_NEAR(main_inequality_B_slack(P10, step), 0, 1e-12);

  std::vector<DomainPoint> bad = same;
  bad[1] = DomainPoint{0.3, 50, 1};
  EXPECT_FALSE(b_tuple_admissible(P10, bad));
  EXPECT_FALSE(b_tuple_admissible(P10, std::vector<DomainPoint>(3, DomainPoint{0.3, 5, 1})));
}

TEST(Verify, BSampler) {
  const auto r = check_main_inequality_B(new_params(10, 1), 100000, 3);
  EXPECT_TRUE(r.passed);
  EXPECT_GE(r.worst_slack, -1e-9);
  const auto r4 = check_main_inequality_B(P10, 20000, 3);
  EXPECT_TRUE(r4.passed);
  for (int k = 1; k <= 3; ++k) EXPECT_GT(r4.counters.at("stratum_k" + std::to_string(k)), 0);
  EXPECT_GT(r4.counters.at("stratum_corner_step"), 0);
  EXPECT_LT(r4.worst_slack, 1e-9);
}

TEST(Verify, WedgeRegionAndSlack) {
  EXPECT_TRUE(wedge_region(P10, 0, 0.5, 3));
  EXPECT_FALSE(wedge_region(P10, 0, 0.1, 5));
  EXPECT_TRUE(wedge_region(P10, 1, 1.0 / 16, 10));
  EXPECT_FALSE(wedge_region(P10, 1, 0.5, 3));   // inside Omega_1
  EXPECT_FALSE(wedge_region(P10, 1, 0.01, 10)); // outside Omega_2
  // xh = N^-k: the boundary case of the final factorization
  const MainTuple t{1.0 / 16, 10, 0, 1};
  EXPECT_TRUE(wedge_tuple_admissible(P10, 1, t));
  EXPECT_NEAR(wedge_inequality_slack(P10, 1, t), 0, 1e-12);
  // yh = Q exactly
  const MainTuple flat{0.02, 9, 0.015, 8.6666666666666667};
  ASSERT_NEAR(flat.y_hat(P10), 10, 1e-12);
  if (wedge_tuple_admissible(P10, 2, flat)) {
    EXPECT_GE(wedge_inequality_slack(P10, 2, flat), -1e-12);
  }
}

TEST(Verify, WedgeSampler) {
  for (const auto& [Q, d] : {std::pair{10.0, 2}, {2.0, 1}, {5.0, 3}}) {
    const auto r = check_wedge_inequality(new_params(Q, d), 6, 14000, 11);
    EXPECT_TRUE(r.passed) << Q << "," << d;
    for (int k = 0; k <= 6; ++k) EXPECT_GT(r.counters.at("k" + std::to_string(k)), 0);
  }
  EXPECT_THROW(check_wedge_inequality(P10, 0, 100, 1), DomainError);
}

TEST(Verify, PropertySuites) {
  for (const auto& [Q, d] : {std::pair{10.0, 2}, {2.0, 1}, {5.0, 3}}) {
    const Params p = new_params(Q, d);
    EXPECT_TRUE(check_concavity(p, 20000, 5).passed);
    EXPECT_TRUE(check_t_monotonicity(p, 20000, 5).passed);
    EXPECT_TRUE(check_smooth_bound(p, 20000).passed);
    EXPECT_TRUE(check_branch_continuity(p, 2000).passed);
    EXPECT_TRUE(check_homogeneity(p, 20000, 5).passed);
    EXPECT_TRUE(check_wedge_domination(p, 6, 60).passed);
  }
  const Params one = new_params(1, 1);
  EXPECT_THROW(check_concavity(one, 10, 1), DegenerateError);
  EXPECT_THROW(check_smooth_bound(one, 10), DegenerateError);
}

TEST(Verify, SmoothBoundCountsNodes) {
  const auto r = check_smooth_bound(P10, 1000);
  EXPECT_EQ(r.counters.at("nodes"), 41);
  EXPECT_NEAR(r.worst_slack, 0, 1e-12);
}

TEST(Verify, Determinism) {
  CheckReport serial_m, serial_b, serial_w;
  {
    ThreadsEnv env("1");
    serial_m = check_main_inequality_M(P10, 30000, 99);
    serial_b = check_main_inequality_B(P10, 30000, 99);
    serial_w = check_wedge_inequality(P10, 4, 30000, 99);
  }
  for (const char* threads : {"3", "8"}) {
    ThreadsEnv env(threads);
    expect_same(serial_m, check_main_inequality_M(P10, 30000, 99));
    expect_same(serial_b, check_main_inequality_B(P10, 30000, 99));
    expect_same(serial_w, check_wedge_inequality(P10, 4, 30000, 99));
  }
  const auto other = check_main_inequality_M(P10, 30000, 100);
  EXPECT_NE(other.worst_witness, serial_m.worst_witness);
}

TEST(Verify, ZeroSamplesIsReported) {
  const auto r = check_main_inequality_M(P10, 0, 1);
  EXPECT_FALSE(r.applicable);
  EXPECT_FALSE(r.passed);
  EXPECT_EQ(r.note, "no admissible samples");
}

TEST(Verify, ReportFinalize) {
  CheckReport r;
  r.samples = 5;
  r.worst_slack = -2e-9;
  r.tol = 1e-9;
  r.finalize();
  EXPECT_FALSE(r.passed);
  r.worst_slack = -1e-9;
  r.finalize();
  EXPECT_TRUE(r.passed);
}

TEST(Verify, WeakTypeConstant) {
  const auto r = check_weak_type(DyadicWeight::leaf(4, 1.0), 1.5);
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.worst_slack, 0);
  EXPECT_TRUE(std::isinf(weak_type_endpoint(DyadicWeight::leaf(4, 1.0))));
}

TEST(Verify, WeakTypeBoundaryIsSharp) {
  const auto w = boundary_weight(P10, 10.0).w;
  const double pmax = osekowski_p_max(P10);
  EXPECT_NEAR(weak_type_endpoint(w), pmax, 1e-14);
  EXPECT_NEAR(37 * std::pow(0.25, 1 / pmax), 10, 1e-12);
  const auto r = check_weak_type(w, pmax);
  EXPECT_TRUE(r.passed);
  EXPECT_NEAR(r.worst_slack, 0, 1e-12);
}

TEST(Verify, WeakTypeCorners) {
  const double pmax = osekowski_p_max(P10);
  for (int k = 0; k <= 8; ++k) {
    const auto r = check_weak_type(build_corner(P10, k).w, pmax);
    EXPECT_TRUE(r.passed) << k;
    EXPECT_GE(r.worst_slack, -1e-9);
  }
}

TEST(Verify, WeakTypeInapplicable) {
  const auto w = boundary_weight(P10, 10.0).w;
  const auto above = check_weak_type(w, osekowski_p_max(P10) * 1.01);
  EXPECT_FALSE(above.applicable);
  EXPECT_FALSE(above.passed);
  const auto shifted = check_weak_type(w.scaled(2.0), 1.01);
  EXPECT_FALSE(shifted.applicable);
  EXPECT_THROW(check_weak_type(w, 0.5), DomainError);
}
