#pragma once

// JSON encoding of dyadic trees.
//
//   weight node: {"leaf": <number>} | {"children": [<node> x N]}
//   set node:    {"set": "full"} | {"set": "empty"} | {"children": [<node> x N]}
//   document:    {"Q": <number>, "d": <integer>, "weight": <node>, "set": <node>}
//
// Trees whose internal subtrees are referenced from more than one place
// (every concatenated extremizer) would expand exponentially. For those the
// document gains "shared_weights" / "shared_sets" arrays and such subtrees
// are written once and referenced as {"ref": <index>}. A tree without
// sharing is written in the plain form above with no extra keys.

#include "a1bellman/dyadic.hpp"

#include <json.hpp>

#include <string>
#include <string_view>

namespace a1bellman {

struct TreeDocument {
  double Q = 1.0;
  int d = 1;
  DyadicWeight weight = DyadicWeight::leaf(2, 1.0);
  DyadicSet set = DyadicSet::full(2);
};

/// Encodes the document; keys appear in the order Q, d, [shared_weights],
/// weight, [shared_sets], set.
nlohmann::ordered_json to_json(const TreeDocument& doc);

/// Decodes and validates (positive finite leaves, exactly N = 2^d children,
/// canonical sets are re-canonicalized, depth cap enforced).
TreeDocument document_from_json(const nlohmann::json& j, int max_height = kDefaultMaxHeight);

/// Compact single-line dump; parse(dump(doc)) reproduces the same bytes.
std::string dump_document(const TreeDocument& doc);
TreeDocument parse_document(std::string_view text, int max_height = kDefaultMaxHeight);

}  // namespace a1bellman
