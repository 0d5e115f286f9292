#include "a1bellman/closed_form.hpp"
#include "a1bellman/extremize.hpp"
#include "a1bellman/report_io.hpp"
#include "a1bellman/verify.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace a1bellman;

namespace {

const OracleBucket* find_bucket(const OracleTable& t, double x, double y) {
  const long long key = std::llround((y - 1) / t.y_width);
  for (const auto& b : t.buckets) {
    if (b.x == x && b.y_key == key) return &b;
  }
  return nullptr;
}

const OracleTable& depth2_table() {
  static const OracleTable t = [] {
    const Params p = new_params(2, 1);
    return brute_force_oracle(p, 2, default_oracle_grid(p, 6, 2), Rational(1, 4));
  }();
  return t;
}

}  // namespace

TEST(Oracle, DepthOneExample) {
  const Params p = new_params(2, 1);
  const OracleTable t = brute_force_oracle(p, 1, {1, 3}, Rational(1, 2));
  const OracleBucket* b = find_bucket(t, 0.5, 2);
  ASSERT_NE(b, nullptr);
  EXPECT_DOUBLE_EQ(b->value, 1.5);
  const auto& wit = t.witnesses.at(b->witness_id);
  EXPECT_DOUBLE_EQ(a1_characteristic(wit.w), 2);
  EXPECT_DOUBLE_EQ(wit.stats.value, 1.5);
  // E is the heavier leaf
  EXPECT_TRUE(wit.E.child(1).is_full());
  EXPECT_TRUE(oracle_vs_closed_form(t, p).passed);
}

TEST(Oracle, DefaultGrid) {
  const Params p = new_params(2, 1);
  const auto g = default_oracle_grid(p, 3, 2);
  // {1, 2, 3} from the uniform part, 3 and 1.5 * 3 = 4.5 and 1.5 from corners 0, 1
  EXPECT_EQ(g, (std::vector<double>{1, 1.5, 2, 3, 4.5}));
  EXPECT_THROW(default_oracle_grid(p, 1, 2), DomainError);
}

TEST(Oracle, DepthTwoSandwich) {
  const Params p = new_params(2, 1);
  const OracleTable& t = depth2_table();
  EXPECT_GT(t.weights_enumerated, t.weights_admissible);
  EXPECT_GT(t.weights_admissible, 0);
  for (const auto& b : t.buckets) {
    EXPECT_LE(b.value, eval_B(p, b.x, b.witness_y, 1) + 1e-9) << b.x << "," << b.witness_y;
  }
  const OracleBucket* c1 = find_bucket(t, 0.5, 2);
  const OracleBucket* c2 = find_bucket(t, 0.25, 2);
  ASSERT_NE(c1, nullptr);
  ASSERT_NE(c2, nullptr);
  EXPECT_NEAR(c1->value, 1.5, 1e-12);
  EXPECT_NEAR(c2->value, 1.125, 1e-12);
  const CheckReport r = oracle_vs_closed_form(t, p);
  EXPECT_TRUE(r.passed) << format_report(r);
  EXPECT_EQ(r.counters.count("corner_not_representable"), 0u);
}

TEST(Oracle, WitnessesRoundTrip) {
  const OracleTable& t = depth2_table();
  for (const auto& b : t.buckets) {
    const auto& wit = t.witnesses.at(b.witness_id);
    const auto s = stats(wit.w, wit.E);
    EXPECT_NEAR(s.x, b.x, 1e-12);
    EXPECT_NEAR(s.value, b.value, 1e-12);
    EXPECT_NEAR(s.y, b.witness_y, 1e-12);
    EXPECT_EQ(s.m, 1.0);
    EXPECT_LE(s.characteristic, t.params.Q + 1e-9);
    EXPECT_EQ(std::llround((s.y - 1) / t.y_width), b.y_key);
  }
}

TEST(Oracle, FullSetBucketsReturnTheAverage) {
  for (const auto& b : depth2_table().buckets) {
    if (b.x == 1.0) {
      EXPECT_NEAR(b.value, b.witness_y, 1e-12);
    }
  }
}

TEST(Oracle, Validation) {
  const Params p = new_params(2, 1);
  EXPECT_THROW(brute_force_oracle(p, 1, {2, 3}, Rational(1, 2)), DomainError);
  EXPECT_THROW(brute_force_oracle(p, 1, {1, 0.5}, Rational(1, 2)), DomainError);
  EXPECT_THROW(brute_force_oracle(p, 1, {1, 3}, Rational(1, 3)), DomainError);
  EXPECT_THROW(brute_force_oracle(p, 1, {1, 3}, Rational(0)), DomainError);
  EXPECT_THROW(brute_force_oracle(p, 1, {1, 3}, Rational(2)), DomainError);
  EXPECT_THROW(brute_force_oracle(p, 0, {1, 3}, Rational(1, 2)), DomainError);
  EXPECT_THROW(brute_force_oracle(new_params(1, 1), 1, {1, 3}, Rational(1, 2)),
               DegenerateError);
}

TEST(Oracle, RefusesInfeasibleSizes) {
  const Params p = new_params(2, 1);
  std::vector<double> grid;
  for (int i = 0; i < 40; ++i) grid.push_back(1 + 0.1 * i);
  try {
    brute_force_oracle(p, 5, grid, Rational(1, 32));
    FAIL() << "expected InfeasibleError";
  } catch (const InfeasibleError& e) {
    EXPECT_NE(std::string(e.what()).find("about"), std::string::npos) << e.what();
  }
  EXPECT_THROW(brute_force_oracle(new_params(2, 3), 5, {1, 2}, Rational(1, 8)), InfeasibleError);
}

TEST(Oracle, Serialization) {
  const OracleTable& t = depth2_table();
  const std::string csv = oracle_to_csv(t);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "x,y,m,value,witness_id");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, t.buckets.size());

  const auto j = oracle_to_json(t);
  EXPECT_EQ(j.at("buckets").size(), t.buckets.size());
  EXPECT_FALSE(j.contains("witnesses"));
  EXPECT_EQ(j.at("x_step").get<std::string>(), "1/4");
  const auto jw = oracle_to_json(t, true);
  EXPECT_EQ(jw.at("witnesses").size(), t.witnesses.size());
}

TEST(Oracle, DeterministicAcrossThreads) {
  const Params p = new_params(2, 1);
  const auto grid = default_oracle_grid(p, 6, 2);
  setenv("BELLMAN_THREADS", "1", 1);
  const std::string a = oracle_to_csv(brute_force_oracle(p, 2, grid, Rational(1, 4)));
  setenv("BELLMAN_THREADS", "5", 1);
  const std::string b = oracle_to_csv(brute_force_oracle(p, 2, grid, Rational(1, 4)));
  unsetenv("BELLMAN_THREADS");
  EXPECT_EQ(a, b);
}
