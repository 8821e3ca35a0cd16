#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "playful/taxonomy.hpp"
#include "playful/text_features.hpp"

namespace playful {

namespace pattern {

struct Literal {
  std::string token;
  bool operator==(const Literal&) const = default;
};

// Matches zero or more tokens.
struct Wildcard {
  bool operator==(const Wildcard&) const = default;
};

// One of several literal token sequences.
struct Alternation {
  std::vector<std::vector<std::string>> branches;
  bool operator==(const Alternation&) const = default;
};

// A literal token sequence that may be absent.
struct Optional {
  std::vector<std::string> tokens;
  bool operator==(const Optional&) const = default;
};

using Element = std::variant<Literal, Wildcard, Alternation, Optional>;

}  // namespace pattern

struct PatternAst {
  std::vector<pattern::Element> elements;
  bool operator==(const PatternAst&) const = default;
};

// Grammar, whitespace separated:
//   word      literal token (normalized with the utterance tokenizer)
//   *         zero or more tokens
//   (a|b c)   alternation of literal sequences
//   [a b]     optional literal sequence
// Groups do not nest and may not contain '*'. Throws ParseError with the
// column of the problem.
PatternAst parse_pattern(std::string_view source);

// Canonical text form; parse_pattern(render_pattern(ast)) == ast.
std::string render_pattern(const PatternAst& ast);

// Leftmost-shortest occurrence of the pattern as a contiguous run of `tokens`
// (case-insensitive). With `anchored`, the whole token list must match.
std::optional<TokenRange> match_pattern(const PatternAst& ast, std::span<const std::string> tokens,
                                        bool anchored = false);

struct Rule {
  std::string id;
  PatternAst pattern;
  std::string leaf_id;
  bool anchored = false;
  bool enabled = true;
};

class RuleSet {
 public:
  RuleSet() = default;
  explicit RuleSet(std::vector<Rule> rules);

  // Rules document: id<TAB>leafId<TAB>anchored<TAB>pattern[<TAB>enabled].
  // `anchored`/`enabled` are true|false. '#' starts a comment line.
  static RuleSet parse(std::string_view document, const TaxonomyGraph& graph);
  static RuleSet load(const std::filesystem::path& path, const TaxonomyGraph& graph);

  const std::vector<Rule>& rules() const { return rules_; }
  std::size_t size() const { return rules_.size(); }
  // Number of distinct leaves referenced.
  std::size_t category_count() const;

  // Copy without the rule `rule_id`.
  RuleSet without(std::string_view rule_id) const;

 private:
  std::vector<Rule> rules_;
};

}  // namespace playful
