#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "playful/pattern.hpp"
#include "playful/taxonomy.hpp"
#include "playful/text_features.hpp"

namespace playful {

struct LeafMatch {
  std::string leaf_id;
  std::string pattern_id;
  TokenRange span;

  auto operator<=>(const LeafMatch& o) const {
    if (auto c = leaf_id <=> o.leaf_id; c != 0) return c;
    if (auto c = pattern_id <=> o.pattern_id; c != 0) return c;
    if (auto c = span.begin <=> o.span.begin; c != 0) return c;
    return span.end <=> o.span.end;
  }
  bool operator==(const LeafMatch&) const = default;
};

// Every enabled rule that fires, one LeafMatch per rule, ordered by
// (leaf, rule). Rules pointing at leaves missing from `graph` are skipped.
std::vector<LeafMatch> classify_utterance(std::string_view text, const RuleSet& rules,
                                          const TaxonomyGraph& graph);

// Distinct leaf ids of a match list.
std::set<std::string> matched_leaves(const std::vector<LeafMatch>& matches);

}  // namespace playful
