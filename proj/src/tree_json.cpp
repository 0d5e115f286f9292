#include "a1bellman/tree_json.hpp"

#include "a1bellman/errors.hpp"
#include "a1bellman/params.hpp"

#include <cmath>
#include <unordered_map>

namespace a1bellman {
namespace {

using ojson = nlohmann::ordered_json;

// Counts how many child slots point at each internal node.
template <class Tree>
std::unordered_map<const void*, int> count_parents(const Tree& root) {
  std::unordered_map<const void*, int> parents;
  std::unordered_map<const void*, bool> seen;
  std::function<void(const Tree&)> go = [&](const Tree& t) {
    if (seen[t.id()]) return;
    seen[t.id()] = true;
    for (std::size_t i = 0; i < t.child_count(); ++i) {
      Tree c = t.child(i);
      if (c.child_count() > 0) ++parents[c.id()];
      go(c);
    }
  };
  go(root);
  return parents;
}

template <class Tree, class LeafFn>
ojson encode(const Tree& root, ojson& shared, LeafFn leaf_json) {
  const auto parents = count_parents(root);
  std::unordered_map<const void*, int> ids;
  std::function<ojson(const Tree&, bool)> go = [&](const Tree& t, bool allow_ref) -> ojson {
    if (t.child_count() == 0) return leaf_json(t);
    const auto it = parents.find(t.id());
    const bool is_shared = it != parents.end() && it->second > 1;
    if (allow_ref && is_shared) {
      if (auto found = ids.find(t.id()); found != ids.end()) return ojson{{"ref", found->second}};
      ojson body = go(t, false);
      const int id = static_cast<int>(shared.size());
      shared.push_back(std::move(body));
      ids.emplace(t.id(), id);
      return ojson{{"ref", id}};
    }
    ojson kids = ojson::array();
    for (std::size_t i = 0; i < t.child_count(); ++i) kids.push_back(go(t.child(i), true));
    return ojson{{"children", std::move(kids)}};
  };
  return go(root, true);
}

DyadicWeight decode_weight(const nlohmann::json& j, int fanout, int max_height,
                           const std::vector<DyadicWeight>& shared) {
  if (!j.is_object()) throw DomainError("weight node must be an object");
  if (j.contains("leaf")) {
    const auto& v = j.at("leaf");
    if (!v.is_number()) throw DomainError("leaf value must be a number");
    return DyadicWeight::leaf(fanout, v.get<double>());
  }
  if (j.contains("ref")) {
    if (!j.at("ref").is_number_integer()) throw DomainError("ref must be an integer");
    const auto idx = j.at("ref").get<long long>();
    if (idx < 0 || idx >= static_cast<long long>(shared.size())) {
      throw DomainError("weight ref out of range");
    }
    return shared[static_cast<std::size_t>(idx)];
  }
  if (j.contains("children")) {
    const auto& arr = j.at("children");
    if (!arr.is_array() || static_cast<int>(arr.size()) != fanout) {
      throw DomainError("weight node needs exactly N children");
    }
    std::vector<DyadicWeight> kids;
    kids.reserve(arr.size());
    for (const auto& c : arr) kids.push_back(decode_weight(c, fanout, max_height, shared));
    return DyadicWeight::internal(kids, max_height);
  }
  throw DomainError("weight node needs 'leaf', 'children', or 'ref'");
}

DyadicSet decode_set(const nlohmann::json& j, int fanout, int max_height,
                     const std::vector<DyadicSet>& shared) {
  if (!j.is_object()) throw DomainError("set node must be an object");
  if (j.contains("set")) {
    if (!j.at("set").is_string()) throw DomainError("set node value must be a string");
    const auto s = j.at("set").get<std::string>();
    if (s == "full") return DyadicSet::full(fanout);
    if (s == "empty") return DyadicSet::empty(fanout);
    throw DomainError("set node value must be 'full' or 'empty'");
  }
  if (j.contains("ref")) {
    if (!j.at("ref").is_number_integer()) throw DomainError("ref must be an integer");
    const auto idx = j.at("ref").get<long long>();
    if (idx < 0 || idx >= static_cast<long long>(shared.size())) {
      throw DomainError("set ref out of range");
    }
    return shared[static_cast<std::size_t>(idx)];
  }
  if (j.contains("children")) {
    const auto& arr = j.at("children");
    if (!arr.is_array() || static_cast<int>(arr.size()) != fanout) {
      throw DomainError("set node needs exactly N children");
    }
    std::vector<DyadicSet> kids;
    kids.reserve(arr.size());
    for (const auto& c : arr) kids.push_back(decode_set(c, fanout, max_height, shared));
    return DyadicSet::internal(kids, max_height);
  }
  throw DomainError("set node needs 'set', 'children', or 'ref'");
}

}  // namespace

nlohmann::ordered_json to_json(const TreeDocument& doc) {
  ojson shared_w = ojson::array();
  ojson shared_s = ojson::array();
  ojson weight = encode(doc.weight, shared_w,
                        [](const DyadicWeight& w) { return ojson{{"leaf", w.value()}}; });
  ojson set = encode(doc.set, shared_s, [](const DyadicSet& e) {
    return ojson{{"set", e.is_full() ? "full" : "empty"}};
  });
  ojson out;
  out["Q"] = doc.Q;
  out["d"] = doc.d;
  if (!shared_w.empty()) out["shared_weights"] = std::move(shared_w);
  out["weight"] = std::move(weight);
  if (!shared_s.empty()) out["shared_sets"] = std::move(shared_s);
  out["set"] = std::move(set);
  return out;
}

TreeDocument document_from_json(const nlohmann::json& j, int max_height) {
  if (!j.is_object()) throw DomainError("tree document must be a JSON object");
  if (!j.contains("d") || !j.at("d").is_number_integer()) {
    throw DomainError("tree document needs integer 'd'");
  }
  if (!j.contains("Q") || !j.at("Q").is_number()) throw DomainError("tree document needs 'Q'");
  TreeDocument doc;
  doc.Q = j.at("Q").get<double>();
  doc.d = j.at("d").get<int>();
  if (doc.d < 1 || doc.d > kMaxDimension) throw DomainError("'d' out of range");
  if (!j.contains("weight") || !j.contains("set")) {
    throw DomainError("tree document needs 'weight' and 'set'");
  }
  const int fanout = 1 << doc.d;

  std::vector<DyadicWeight> shared_w;
  if (j.contains("shared_weights")) {
    for (const auto& node : j.at("shared_weights")) {
      shared_w.push_back(decode_weight(node, fanout, max_height, shared_w));
    }
  }
  std::vector<DyadicSet> shared_s;
  if (j.contains("shared_sets")) {
    for (const auto& node : j.at("shared_sets")) {
      shared_s.push_back(decode_set(node, fanout, max_height, shared_s));
    }
  }
  doc.weight = decode_weight(j.at("weight"), fanout, max_height, shared_w);
  doc.set = decode_set(j.at("set"), fanout, max_height, shared_s);
  return doc;
}

std::string dump_document(const TreeDocument& doc) { return to_json(doc).dump(); }

TreeDocument parse_document(std::string_view text, int max_height) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DomainError(std::string("invalid JSON: ") + e.what());
  }
  return document_from_json(j, max_height);
}

}  // namespace a1bellman
