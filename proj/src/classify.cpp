#include "playful/classify.hpp"

#include <algorithm>

namespace playful {

std::vector<LeafMatch> classify_utterance(std::string_view text, const RuleSet& rules,
                                          const TaxonomyGraph& graph) {
  const auto tokens = tokenize_words(text);
  std::vector<LeafMatch> out;
  for (const auto& rule : rules.rules()) {
    if (!rule.enabled || !graph.is_leaf(rule.leaf_id)) continue;
    if (auto span = match_pattern(rule.pattern, tokens, rule.anchored))
      out.push_back({rule.leaf_id, rule.id, *span});
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::set<std::string> matched_leaves(const std::vector<LeafMatch>& matches) {
  std::set<std::string> out;
  for (const auto& m : matches) out.insert(m.leaf_id);
  return out;
}

}  // namespace playful
