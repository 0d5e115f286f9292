#include "a1bellman/closed_form.hpp"
#include "a1bellman/errors.hpp"
#include "a1bellman/extremize.hpp"
#include "a1bellman/parallel.hpp"
#include "a1bellman/verify.hpp"
#include "sampling.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace a1bellman {
namespace {

// Subtrees are kept only up to this many expanded leaves.
constexpr int kMaxOracleLeaves = 1 << 12;
constexpr double kCharSlack = 1e-9;

// One subtree up to sibling permutation: children are nondecreasing
// indices into the previous level.
struct LevelNode {
  double average;
  double min_value;
  double ratio;
  std::vector<int> kids;
  std::vector<double> desc_leaves;
};

double binomial(double n, double k) {
  double r = 1.0;
  for (int i = 0; i < static_cast<int>(k); ++i) r = r * (n - i) / (i + 1);
  return r;
}

// Calls visit(t) for every nondecreasing tuple t of length n over [0, K)
// with t[0] == first.
template <class Visit>
void for_each_multiset(int K, int n, int first, Visit&& visit) {
  std::vector<int> t(n, first);
  while (true) {
    visit(t);
    int pos = n - 1;
    while (pos > 0 && t[pos] == K - 1) --pos;
    if (pos == 0) return;
    ++t[pos];
    for (int i = pos + 1; i < n; ++i) t[i] = t[pos];
  }
}

void check_size(double combos, int level) {
  if (combos > kOracleMaxCombinations) {
    std::ostringstream msg;
    msg << "oracle would enumerate about " << combos << " child combinations at level " << level
        << " (limit " << kOracleMaxCombinations << "); reduce depth or grid size";
    throw InfeasibleError(msg.str());
  }
}

struct Best {
  double value = -1.0;
  double y = 0.0;
  std::vector<int> tuple;
};

}  // namespace

std::vector<double> default_oracle_grid(const Params& p, int grid_size, int depth) {
  if (grid_size < 2) throw DomainError("oracle grid size must be >= 2");
  std::set<double> vals{1.0};
  for (int j = 1; j < grid_size; ++j) {
    vals.insert(1.0 + j * (p.Q - 1.0) * p.N / (grid_size - 1));
  }
  if (!p.degenerate) {
    for (int k = 0; k < depth; ++k) {
      for (const auto& [v, mass] : value_distribution(build_corner(p, k).w)) vals.insert(v);
    }
  }
  return {vals.begin(), vals.end()};
}

OracleTable brute_force_oracle(const Params& p, int depth, const std::vector<double>& grid,
                               const Rational& x_step) {
  if (p.degenerate) throw DegenerateError("oracle requires Q > 1");
  if (depth < 1) throw DomainError("oracle depth must be >= 1");
  std::vector<double> values(grid);
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  if (values.empty() || values.front() != 1.0) throw DomainError("oracle grid must contain 1");
  for (double v : values) {
    if (!std::isfinite(v) || v < 1.0) throw DomainError("oracle grid values must be >= 1");
  }
  const int N = p.N;
  const double leaves_d = std::pow(static_cast<double>(N), depth);
  if (leaves_d > kMaxOracleLeaves) {
    throw InfeasibleError("oracle tree has " + std::to_string(leaves_d) + " leaves (limit " +
                          std::to_string(kMaxOracleLeaves) + ")");
  }
  const int L = static_cast<int>(leaves_d);
  const Rational per_step = x_step * L;
  if (x_step <= 0 || x_step > 1 || denominator(per_step) != 1) {
    throw DomainError("x_step must be a positive multiple of N^-depth, at most 1");
  }
  const int s = static_cast<int>(numerator(per_step));
  const int J = L / s;
  const double q_cap = p.Q + kCharSlack;
  const double width = 0.05 * (p.Q - 1.0);
  const long long n_keys = std::llround((p.Q - 1.0) / width) + 1;

  // Bottom-up levels below the root.
  std::vector<std::vector<LevelNode>> levels(1);
  for (double v : values) levels[0].push_back({v, v, 1.0, {}, {v}});
  for (int level = 1; level < depth; ++level) {
    const auto& prev = levels[level - 1];
    const int K = static_cast<int>(prev.size());
    check_size(binomial(K + N - 1, N), level);
    auto blocks = parallel_blocks<std::vector<LevelNode>>(
        static_cast<std::size_t>(K), [&](std::size_t begin, std::size_t end) {
          std::vector<LevelNode> out;
          for (std::size_t first = begin; first < end; ++first) {
            for_each_multiset(K, N, static_cast<int>(first), [&](const std::vector<int>& t) {
              double sum = 0.0, mn = prev[t[0]].min_value;
              for (int c : t) {
                sum += prev[c].average;
                mn = std::min(mn, prev[c].min_value);
              }
              const double avg = sum / N;
              double ratio = 0.0;
              for (int c : t) ratio = std::max({ratio, avg / prev[c].min_value, prev[c].ratio});
              if (ratio > q_cap) return;
              LevelNode node{avg, mn, ratio, t, {}};
              for (int c : t) {
                node.desc_leaves.insert(node.desc_leaves.end(), prev[c].desc_leaves.begin(),
                                        prev[c].desc_leaves.end());
              }
              std::sort(node.desc_leaves.begin(), node.desc_leaves.end(), std::greater<>());
              out.push_back(std::move(node));
            });
          }
          return out;
        });
    std::vector<LevelNode> merged;
    for (auto& b : blocks) std::move(b.begin(), b.end(), std::back_inserter(merged));
    levels.push_back(std::move(merged));
  }

  // Root level: only ess inf = 1 is kept, and each (x, y-key) keeps its best
  // value. Ties go to the first tuple in lexicographic order.
  const auto& top = levels.back();
  const int K = static_cast<int>(top.size());
  check_size(binomial(K + N - 1, N), depth);
  struct BlockResult {
    std::vector<Best> best;
    long long enumerated = 0;
    long long admissible = 0;
  };
  const std::size_t n_cells = static_cast<std::size_t>((J + 1) * n_keys);
  auto blocks = parallel_blocks<BlockResult>(
      static_cast<std::size_t>(K), [&](std::size_t begin, std::size_t end) {
        BlockResult r;
        r.best.resize(n_cells);
        std::vector<double> leaves;
        std::vector<double> prefix(L + 1);
        for (std::size_t first = begin; first < end; ++first) {
          for_each_multiset(K, N, static_cast<int>(first), [&](const std::vector<int>& t) {
            ++r.enumerated;
            double sum = 0.0, mn = top[t[0]].min_value;
            for (int c : t) {
              sum += top[c].average;
              mn = std::min(mn, top[c].min_value);
            }
            if (mn != 1.0) return;
            const double avg = sum / N;
            double ratio = 0.0;
            for (int c : t) ratio = std::max({ratio, avg / top[c].min_value, top[c].ratio});
            if (ratio > q_cap) return;
            ++r.admissible;
            leaves.clear();
            for (int c : t) {
              leaves.insert(leaves.end(), top[c].desc_leaves.begin(), top[c].desc_leaves.end());
            }
            std::sort(leaves.begin(), leaves.end(), std::greater<>());
            prefix[0] = 0.0;
            for (int i = 0; i < L; ++i) prefix[i + 1] = prefix[i] + leaves[i];
            const long long key = std::llround((avg - 1.0) / width);
            for (int j = 0; j <= J; ++j) {
              const double value = prefix[static_cast<std::size_t>(j) * s] / L;
              Best& b = r.best[static_cast<std::size_t>(j * n_keys + key)];
              if (value > b.value) b = Best{value, avg, t};
            }
          });
        }
        return r;
      });

  OracleTable table;
  table.params = p;
  table.depth = depth;
  table.grid = values;
  table.x_step = x_step;
  table.y_width = width;
  std::vector<Best> best(n_cells);
  for (const auto& b : blocks) {
    table.weights_enumerated += b.enumerated;
    table.weights_admissible += b.admissible;
    for (std::size_t i = 0; i < n_cells; ++i) {
      if (b.best[i].value > best[i].value) best[i] = b.best[i];
    }
  }

  // Witness reconstruction, sharing identical subtrees.
  std::map<std::pair<int, int>, DyadicWeight> memo;
  std::function<DyadicWeight(int, int)> weight_of = [&](int level, int idx) -> DyadicWeight {
    const auto key = std::make_pair(level, idx);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    const LevelNode& node = levels[level][idx];
    DyadicWeight w = [&] {
      if (level == 0) return DyadicWeight::leaf(N, node.average);
      std::vector<DyadicWeight> kids;
      for (int c : node.kids) kids.push_back(weight_of(level - 1, c));
      return DyadicWeight::internal(kids);
    }();
    memo.emplace(key, w);
    return w;
  };

  for (std::size_t cell = 0; cell < n_cells; ++cell) {
    const Best& b = best[cell];
    if (b.tuple.empty()) continue;
    const int j = static_cast<int>(cell / n_keys);
    const long long key = static_cast<long long>(cell % n_keys);
    std::vector<DyadicWeight> kids;
    for (int c : b.tuple) kids.push_back(weight_of(depth - 1, c));
    DyadicWeight w = DyadicWeight::internal(kids);

    // E: the j*s heaviest leaves, ties broken by depth-first position.
    std::vector<double> dfs;
    dfs.reserve(L);
    std::function<void(const DyadicWeight&)> walk = [&](const DyadicWeight& n) {
      if (n.is_leaf()) {
        dfs.push_back(n.value());
        return;
      }
      for (std::size_t i = 0; i < n.child_count(); ++i) walk(n.child(i));
    };
    walk(w);
    std::vector<int> order(L);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int c) { return dfs[a] > dfs[c]; });
    std::vector<char> chosen(L, 0);
    for (int i = 0; i < j * s; ++i) chosen[order[i]] = 1;
    int pos = 0;
    std::function<DyadicSet(int)> build_set = [&](int level) -> DyadicSet {
      if (level == depth) return chosen[pos++] ? DyadicSet::full(N) : DyadicSet::empty(N);
      std::vector<DyadicSet> sub;
      for (int i = 0; i < N; ++i) sub.push_back(build_set(level + 1));
      return DyadicSet::internal(sub);
    };
    DyadicSet E = build_set(0);

    OracleWitness wit{w, E, stats(w, E)};
    OracleBucket bucket;
    bucket.x = to_double(Rational(j) * x_step);
    bucket.y_key = key;
    bucket.y_mid = 1.0 + key * width;
    bucket.m = 1.0;
    bucket.value = wit.stats.value;
    bucket.witness_y = wit.stats.y;
    bucket.witness_id = static_cast<int>(table.witnesses.size());
    table.witnesses.push_back(std::move(wit));
    table.buckets.push_back(bucket);
  }
  return table;
}

CheckReport oracle_vs_closed_form(const OracleTable& table, const Params& p, double tol) {
  detail::Accumulator acc;
  std::uint64_t index = 0;
  auto record = [&](const char* check, double slack, const OracleBucket& b, double bound) {
    acc.record(index++, slack,
               {{"x", b.x}, {"y", b.witness_y}, {"value", b.value}, {"bound", bound}});
    ++acc.counters[check];
  };

  for (const auto& b : table.buckets) {
    // Upper direction: the supremum is never beaten.
    const double closed = eval_B(p, b.x, b.witness_y, 1.0);
    record("upper_bound", closed - b.value, b, closed);

    // Round trip: the witness reproduces its bucket.
    const OracleWitness& w = table.witnesses.at(b.witness_id);
    const WeightStats<double> s = stats(w.w, w.E);
    double err = std::max({std::abs(s.x - b.x), std::abs(s.value - b.value),
                           std::abs(s.y - b.witness_y), std::abs(s.m - 1.0)});
    if (std::llround((s.y - 1.0) / table.y_width) != b.y_key) err = std::max(err, 1.0);
    if (s.characteristic > p.Q + kCharSlack) err = std::max(err, s.characteristic - p.Q);
    record("round_trip", -err, b, 0.0);

    // With E = P the value is the average.
    if (b.x == 1.0) record("full_set", -std::abs(b.value - b.witness_y), b, b.witness_y);
  }

  // Lower direction at the corners (N^-k, Q). Corner k sits at leaf level
  // depth when the grid holds the leaf values of build_corner(k - 1).
  const long long q_key = std::llround((p.Q - 1.0) / table.y_width);
  std::set<double> grid(table.grid.begin(), table.grid.end());
  for (int k = 0; k <= table.depth; ++k) {
    Rational node(1);
    for (int i = 0; i < k; ++i) node /= p.N;
    // the corner abscissa must be one of the table's x values
    if (denominator(Rational(node / table.x_step)) != 1) continue;
    const ExtremalPair corner = build_corner(p, std::max(0, k - 1));
    bool representable = true;
    for (const auto& [v, mass] : value_distribution(corner.w)) {
      if (!grid.count(v)) representable = false;
    }
    if (!representable) {
      ++acc.counters["corner_not_representable"];
      continue;
    }
    const double x = std::ldexp(1.0, -p.d * k);
    const double target = p.Q * std::pow(p.eta, k);
    OracleBucket probe;
    probe.x = x;
    probe.witness_y = p.Q;
    auto it = std::find_if(table.buckets.begin(), table.buckets.end(), [&](const OracleBucket& b) {
      return b.x == x && b.y_key == q_key;
    });
    if (it == table.buckets.end()) {
      record("corner_lower_bound", -target, probe, target);
      continue;
    }
    record("corner_lower_bound", it->value - target, *it, target);
  }

  const long long n_x = std::llround(1.0 / to_double(table.x_step)) + 1;
  const long long n_keys = q_key + 1;
  acc.counters["empty_buckets"] = n_x * n_keys - static_cast<long long>(table.buckets.size());

  CheckReport r;
  r.suite = "oracle-vs-closed-form";
  r.samples = acc.samples;
  r.worst_slack = acc.worst;
  r.worst_witness = acc.witness;
  r.counters = acc.counters;
  r.tol = tol;
  r.finalize();
  return r;
}

}  // namespace a1bellman
