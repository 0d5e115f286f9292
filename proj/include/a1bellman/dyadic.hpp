#pragma once

// Piecewise-constant weights and sets on finite N-ary dyadic trees over the
// unit cube.
//
// Trees are immutable and share structure: a subtree may appear under many
// parents, so a tree is really a DAG. Every weight node caches its average,
// its minimum, and the A1 ratio restricted to its own subtree at construction
// time, which makes average/ess_inf/a1_characteristic O(1) even for
// extremizers whose expanded leaf count is astronomically large.

#include "a1bellman/errors.hpp"
#include "a1bellman/numeric.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace a1bellman {

/// Default cap on tree height (root-to-deepest-leaf edges).
inline constexpr int kDefaultMaxHeight = 128;

/// Upper limit on expanded leaves for operations that enumerate leaves.
inline constexpr double kMaxEnumeratedLeaves = 1 << 22;

template <class T>
class BasicWeight {
 public:
  struct Node {
    T average;
    T min_value;
    // max over leaves l below of (max over ancestors a of l, from this node
    // down to l itself, of <w>_a) / w(l)
    T ratio;
    int height = 0;
    double leaves = 1.0;
    std::vector<std::shared_ptr<const Node>> children;
  };
  using NodePtr = std::shared_ptr<const Node>;

  static BasicWeight leaf(int fanout, T value) {
    if (!(value > T(0)) || !is_finite_value(value)) {
      throw DomainError("weight leaf values must be positive and finite");
    }
    check_fanout(fanout);
    auto node = std::make_shared<Node>();
    node->average = value;
    node->min_value = value;
    node->ratio = T(1);
    node->height = 0;
    node->leaves = 1.0;
    return BasicWeight(fanout, std::move(node));
  }

  static BasicWeight internal(const std::vector<BasicWeight>& children,
                              int max_height = kDefaultMaxHeight) {
    if (children.empty()) throw DomainError("internal node needs children");
    const int fanout = children.front().fanout();
    if (static_cast<int>(children.size()) != fanout) {
      throw DomainError("internal node needs exactly N = " + std::to_string(fanout) +
                        " children, got " + std::to_string(children.size()));
    }
    auto node = std::make_shared<Node>();
    node->children.reserve(children.size());
    T sum(0);
    int height = 0;
    double leaves = 0.0;
    for (const auto& c : children) {
      if (c.fanout() != fanout) throw IncompatibleTreesError("children disagree on fan-out");
      sum += c.node_->average;
      height = std::max(height, c.node_->height + 1);
      leaves += c.node_->leaves;
      node->children.push_back(c.node_);
    }
    if (height > max_height) {
      throw DepthCapError("weight tree height " + std::to_string(height) + " exceeds cap " +
                          std::to_string(max_height));
    }
    node->average = sum / T(fanout);
    node->min_value = node->children.front()->min_value;
    for (const auto& c : node->children) node->min_value = std::min(node->min_value, c->min_value);
    // A leaf under child c sees the running maximum avg(this) from here;
    // (max(r, A) / v) maximized over leaves is max(r / min(c), ratio(c)).
    node->ratio = T(0);
    for (const auto& c : node->children) {
      const T from_here = node->average / c->min_value;
      node->ratio = std::max({node->ratio, from_here, c->ratio});
    }
    node->height = height;
    node->leaves = leaves;
    return BasicWeight(fanout, std::move(node));
  }

  /// Full tree of the given depth with N^depth leaves listed in DFS order.
  static BasicWeight from_leaves(int fanout, int depth, std::span<const T> leaves) {
    std::size_t expected = 1;
    for (int i = 0; i < depth; ++i) expected *= static_cast<std::size_t>(fanout);
    if (leaves.size() != expected) throw DomainError("from_leaves: wrong number of leaf values");
    std::size_t pos = 0;
    std::function<BasicWeight(int)> build = [&](int level) -> BasicWeight {
      if (level == depth) return leaf(fanout, leaves[pos++]);
      std::vector<BasicWeight> kids;
      kids.reserve(fanout);
      for (int i = 0; i < fanout; ++i) kids.push_back(build(level + 1));
      return internal(kids);
    };
    return build(0);
  }

  int fanout() const { return fanout_; }
  bool is_leaf() const { return node_->children.empty(); }
  /// Leaf value; for internal nodes this is the average.
  const T& value() const { return node_->average; }
  const T& average() const { return node_->average; }
  const T& min_value() const { return node_->min_value; }
  const T& subtree_ratio() const { return node_->ratio; }
  int height() const { return node_->height; }
  /// Expanded leaf count (as a double; may exceed 2^64 for shared trees).
  double leaf_count() const { return node_->leaves; }
  std::size_t child_count() const { return node_->children.size(); }
  BasicWeight child(std::size_t i) const { return BasicWeight(fanout_, node_->children.at(i)); }
  const Node* id() const { return node_.get(); }
  const NodePtr& node() const { return node_; }

  /// Copy with every leaf multiplied by c > 0. Shared subtrees stay shared.
  BasicWeight scaled(const T& c) const {
    if (!(c > T(0))) throw DomainError("scale factor must be positive");
    std::unordered_map<const Node*, BasicWeight> memo;
    std::function<BasicWeight(const BasicWeight&)> go = [&](const BasicWeight& w) -> BasicWeight {
      if (auto it = memo.find(w.id()); it != memo.end()) return it->second;
      BasicWeight out = w.is_leaf() ? leaf(fanout_, w.value() * c) : [&] {
        std::vector<BasicWeight> kids;
        kids.reserve(w.child_count());
        for (std::size_t i = 0; i < w.child_count(); ++i) kids.push_back(go(w.child(i)));
        return internal(kids);
      }();
      memo.emplace(w.id(), out);
      return out;
    };
    return go(*this);
  }

  /// Same tree with values converted to U (double <-> Rational).
  template <class U>
  BasicWeight<U> convert() const {
    std::unordered_map<const Node*, BasicWeight<U>> memo;
    std::function<BasicWeight<U>(const BasicWeight&)> go =
        [&](const BasicWeight& w) -> BasicWeight<U> {
      if (auto it = memo.find(w.id()); it != memo.end()) return it->second;
      BasicWeight<U> out = [&] {
        if (w.is_leaf()) {
          if constexpr (is_exact_v<U>) {
            return BasicWeight<U>::leaf(fanout_, from_double<U>(to_double(w.value())));
          } else {
            return BasicWeight<U>::leaf(fanout_, static_cast<U>(to_double(w.value())));
          }
        }
        std::vector<BasicWeight<U>> kids;
        for (std::size_t i = 0; i < w.child_count(); ++i) kids.push_back(go(w.child(i)));
        return BasicWeight<U>::internal(kids);
      }();
      memo.emplace(w.id(), out);
      return out;
    };
    return go(*this);
  }

 private:
  BasicWeight(int fanout, NodePtr node) : fanout_(fanout), node_(std::move(node)) {}

  static void check_fanout(int fanout) {
    if (fanout < 2 || (fanout & (fanout - 1)) != 0) {
      throw DomainError("fan-out must be a power of two >= 2");
    }
  }

  int fanout_ = 2;
  NodePtr node_;
};

using DyadicWeight = BasicWeight<double>;
using ExactWeight = BasicWeight<Rational>;

/// Measurable subset of the unit cube as a canonical tree of full, empty,
/// and mixed nodes. Internal nodes never have all-full or all-empty children.
class DyadicSet {
 public:
  enum class Kind { Empty, Full, Mixed };
  struct Node {
    Kind kind = Kind::Empty;
    double measure = 0.0;
    int height = 0;
    std::vector<std::shared_ptr<const Node>> children;
  };
  using NodePtr = std::shared_ptr<const Node>;

  static DyadicSet full(int fanout);
  static DyadicSet empty(int fanout);
  /// Collapses to full/empty when all children are.
  static DyadicSet internal(const std::vector<DyadicSet>& children,
                            int max_height = kDefaultMaxHeight);

  int fanout() const { return fanout_; }
  Kind kind() const { return node_->kind; }
  bool is_full() const { return node_->kind == Kind::Full; }
  bool is_empty() const { return node_->kind == Kind::Empty; }
  /// Lebesgue measure in double precision.
  double measure() const { return node_->measure; }
  int height() const { return node_->height; }
  std::size_t child_count() const { return node_->children.size(); }
  DyadicSet child(std::size_t i) const { return DyadicSet(fanout_, node_->children.at(i)); }
  const Node* id() const { return node_.get(); }

  DyadicSet complement() const;

 private:
  DyadicSet(int fanout, NodePtr node) : fanout_(fanout), node_(std::move(node)) {}
  int fanout_ = 2;
  NodePtr node_;
};

/// |E| computed in T (exact for Rational).
template <class T>
T measure_as(const DyadicSet& set) {
  std::unordered_map<const DyadicSet::Node*, T> memo;
  std::function<T(const DyadicSet&)> go = [&](const DyadicSet& e) -> T {
    if (e.is_full()) return T(1);
    if (e.is_empty()) return T(0);
    if (auto it = memo.find(e.id()); it != memo.end()) return it->second;
    T sum(0);
    for (std::size_t i = 0; i < e.child_count(); ++i) sum += go(e.child(i));
    T out = sum / T(e.fanout());
    memo.emplace(e.id(), out);
    return out;
  };
  return go(set);
}

inline double measure(const DyadicSet& set) { return set.measure(); }

template <class T>
T average(const BasicWeight<T>& w) {
  return w.average();
}

template <class T>
T ess_inf(const BasicWeight<T>& w) {
  return w.min_value();
}

/// [w]_{A1^d}: sup over leaves of the localized dyadic maximal function
/// divided by the leaf value.
template <class T>
T a1_characteristic(const BasicWeight<T>& w) {
  return w.subtree_ratio();
}

/// w(E) / |P| by exact recursive quadrature; constant nodes broadcast over
/// deeper parts of the other tree.
template <class T>
T weight_on_set(const BasicWeight<T>& w, const DyadicSet& set) {
  if (w.fanout() != set.fanout()) throw IncompatibleTreesError("weight and set fan-out differ");
  using Key = std::pair<const void*, const void*>;
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      return std::hash<const void*>()(k.first) * 31u ^ std::hash<const void*>()(k.second);
    }
  };
  std::unordered_map<Key, T, KeyHash> memo;
  std::function<T(const BasicWeight<T>&, const DyadicSet&)> go =
      [&](const BasicWeight<T>& wn, const DyadicSet& e) -> T {
    if (e.is_empty()) return T(0);
    if (e.is_full()) return wn.average();
    if (wn.is_leaf()) return wn.value() * measure_as<T>(e);
    const Key key{wn.id(), e.id()};
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    T sum(0);
    for (std::size_t i = 0; i < e.child_count(); ++i) sum += go(wn.child(i), e.child(i));
    T out = sum / T(wn.fanout());
    memo.emplace(key, out);
    return out;
  };
  return go(w, set);
}

/// Bundled statistics of a (weight, set) pair: x = |E|, y = <w>,
/// m = ess inf w, characteristic = [w]_{A1^d}, value = w(E)/|P|.
template <class T>
struct WeightStats {
  T x;
  T y;
  T m;
  T characteristic;
  T value;
};

template <class T>
WeightStats<T> stats(const BasicWeight<T>& w, const DyadicSet& set) {
  return WeightStats<T>{measure_as<T>(set), average(w), ess_inf(w), a1_characteristic(w),
                        weight_on_set(w, set)};
}

inline WeightStats<double> to_double(const WeightStats<Rational>& s) {
  return {to_double(s.x), to_double(s.y), to_double(s.m), to_double(s.characteristic),
          to_double(s.value)};
}
inline WeightStats<double> to_double(const WeightStats<double>& s) { return s; }

/// One leaf of the expanded tree with its dyadic maximal function value.
template <class T>
struct LeafMaximal {
  std::vector<int> path;  // child indices from the root
  T value;
  T maximal;
};

/// M^d_P w on each leaf: the largest average over the leaf's ancestors,
/// including the root and the leaf. Enumerates the expanded tree, so it
/// refuses trees with more than kMaxEnumeratedLeaves leaves.
template <class T>
std::vector<LeafMaximal<T>> maximal_function(const BasicWeight<T>& w) {
  if (w.leaf_count() > kMaxEnumeratedLeaves) {
    throw InfeasibleError("maximal_function: tree expands to too many leaves");
  }
  std::vector<LeafMaximal<T>> out;
  out.reserve(static_cast<std::size_t>(w.leaf_count()));
  std::vector<int> path;
  std::function<void(const BasicWeight<T>&, const T&)> go = [&](const BasicWeight<T>& n,
                                                               const T& running) {
    const T here = std::max(running, n.average());
    if (n.is_leaf()) {
      out.push_back({path, n.value(), here});
      return;
    }
    for (std::size_t i = 0; i < n.child_count(); ++i) {
      path.push_back(static_cast<int>(i));
      go(n.child(i), here);
      path.pop_back();
    }
  };
  go(w, w.average());
  return out;
}

/// Distribution of w: distinct leaf values with the measure they occupy,
/// sorted by value.
template <class T>
std::vector<std::pair<T, T>> value_distribution(const BasicWeight<T>& w) {
  using Dist = std::map<T, T>;
  std::unordered_map<const void*, Dist> memo;
  std::function<const Dist&(const BasicWeight<T>&)> go =
      [&](const BasicWeight<T>& n) -> const Dist& {
    if (auto it = memo.find(n.id()); it != memo.end()) return it->second;
    Dist d;
    if (n.is_leaf()) {
      d.emplace(n.value(), T(1));
    } else {
      for (std::size_t i = 0; i < n.child_count(); ++i) {
        for (const auto& [v, mass] : go(n.child(i))) d[v] += mass / T(n.fanout());
      }
    }
    return memo.emplace(n.id(), std::move(d)).first->second;
  };
  const Dist& d = go(w);
  return {d.begin(), d.end()};
}

}  // namespace a1bellman
