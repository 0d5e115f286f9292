#include "a1bellman/dyadic.hpp"

#include <unordered_map>

namespace a1bellman {
namespace {

void check_set_fanout(int fanout) {
  if (fanout < 2 || (fanout & (fanout - 1)) != 0) {
    throw DomainError("fan-out must be a power of two >= 2");
  }
}

}  // namespace

DyadicSet DyadicSet::full(int fanout) {
  check_set_fanout(fanout);
  static const auto node = [] {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Full;
    n->measure = 1.0;
    return n;
  }();
  return DyadicSet(fanout, node);
}

DyadicSet DyadicSet::empty(int fanout) {
  check_set_fanout(fanout);
  static const auto node = [] {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Empty;
    n->measure = 0.0;
    return n;
  }();
  return DyadicSet(fanout, node);
}

DyadicSet DyadicSet::internal(const std::vector<DyadicSet>& children, int max_height) {
  if (children.empty()) throw DomainError("internal set node needs children");
  const int fanout = children.front().fanout();
  if (static_cast<int>(children.size()) != fanout) {
    throw DomainError("internal set node needs exactly N children");
  }
  bool all_full = true;
  bool all_empty = true;
  for (const auto& c : children) {
    if (c.fanout() != fanout) throw IncompatibleTreesError("children disagree on fan-out");
    all_full = all_full && c.is_full();
    all_empty = all_empty && c.is_empty();
  }
  if (all_full) return full(fanout);
  if (all_empty) return empty(fanout);
  auto node = std::make_shared<Node>();
  node->kind = Kind::Mixed;
  double sum = 0.0;
  int height = 0;
  for (const auto& c : children) {
    sum += c.node_->measure;
    height = std::max(height, c.node_->height + 1);
    node->children.push_back(c.node_);
  }
  if (height > max_height) {
    throw DepthCapError("set tree height " + std::to_string(height) + " exceeds cap " +
                        std::to_string(max_height));
  }
  node->measure = sum / fanout;
  node->height = height;
  return DyadicSet(fanout, std::move(node));
}

DyadicSet DyadicSet::complement() const {
  std::unordered_map<const Node*, DyadicSet> memo;
  std::function<DyadicSet(const DyadicSet&)> go = [&](const DyadicSet& e) -> DyadicSet {
    if (e.is_full()) return empty(fanout_);
    if (e.is_empty()) return full(fanout_);
    if (auto it = memo.find(e.id()); it != memo.end()) return it->second;
    std::vector<DyadicSet> kids;
    kids.reserve(e.child_count());
    for (std::size_t i = 0; i < e.child_count(); ++i) kids.push_back(go(e.child(i)));
    DyadicSet out = internal(kids);
    memo.emplace(e.id(), out);
    return out;
  };
  return go(*this);
}

}  // namespace a1bellman
