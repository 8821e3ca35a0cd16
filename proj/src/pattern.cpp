#include "playful/pattern.hpp"

#include <algorithm>
#include <set>

#include "detail/io.hpp"
#include "playful/error.hpp"

namespace playful {

namespace {

enum class Tok { Word, Star, LParen, RParen, Pipe, LBracket, RBracket };

struct Lexeme {
  Tok kind;
  std::size_t column;
  std::string text;
};

bool is_special(char c) { return c == '*' || c == '(' || c == ')' || c == '|' || c == '[' || c == ']'; }
bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

std::vector<Lexeme> lex(std::string_view src) {
  std::vector<Lexeme> out;
  std::size_t i = 0;
  while (i < src.size()) {
    char c = src[i];
    if (is_space(c)) {
      ++i;
    } else if (is_special(c)) {
      Tok k = c == '*' ? Tok::Star : c == '(' ? Tok::LParen : c == ')' ? Tok::RParen
            : c == '|' ? Tok::Pipe : c == '[' ? Tok::LBracket : Tok::RBracket;
      out.push_back({k, i, {}});
      ++i;
    } else {
      std::size_t j = i;
      while (j < src.size() && !is_space(src[j]) && !is_special(src[j])) ++j;
      // One source word may normalize to several tokens ("a.m" -> a, m) or none ("?").
      for (auto& t : tokenize_words(src.substr(i, j - i))) out.push_back({Tok::Word, i, std::move(t)});
      i = j;
    }
  }
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src), lexemes_(lex(src)) {}

  PatternAst parse() {
    PatternAst ast;
    while (pos_ < lexemes_.size()) {
      const auto& l = lexemes_[pos_];
      switch (l.kind) {
        case Tok::Word:
          ast.elements.emplace_back(pattern::Literal{l.text});
          ++pos_;
          break;
        case Tok::Star:
          ast.elements.emplace_back(pattern::Wildcard{});
          ++pos_;
          break;
        case Tok::LParen:
          ast.elements.emplace_back(alternation());
          break;
        case Tok::LBracket:
          ast.elements.emplace_back(optional());
          break;
        case Tok::RParen:
        case Tok::RBracket:
          throw ParseError("unbalanced '" + std::string(1, src_[l.column]) + "'", 0, l.column);
        case Tok::Pipe:
          throw ParseError("'|' outside an alternation group", 0, l.column);
      }
    }
    if (ast.elements.empty()) throw ParseError("empty pattern", 0, 0);
    bool has_required = std::any_of(ast.elements.begin(), ast.elements.end(), [](const auto& e) {
      return std::holds_alternative<pattern::Literal>(e) || std::holds_alternative<pattern::Alternation>(e);
    });
    if (!has_required) {
      bool only_wildcards = std::all_of(ast.elements.begin(), ast.elements.end(), [](const auto& e) {
        return std::holds_alternative<pattern::Wildcard>(e);
      });
      throw ParseError(only_wildcards ? "pattern of only wildcards" : "pattern has no required token", 0, 0);
    }
    return ast;
  }

 private:
  // Reads literal words until `close` or '|'. Rejects nesting and wildcards.
  std::vector<std::string> sequence(Tok close, std::size_t open_col) {
    std::vector<std::string> seq;
    while (true) {
      if (pos_ >= lexemes_.size()) throw ParseError("unbalanced group: missing close delimiter", 0, open_col);
      const auto& l = lexemes_[pos_];
      if (l.kind == Tok::Word) {
        seq.push_back(l.text);
        ++pos_;
        continue;
      }
      if (l.kind == close || l.kind == Tok::Pipe) return seq;
      if (l.kind == Tok::LParen || l.kind == Tok::LBracket)
        throw ParseError("nested groups are not allowed", 0, l.column);
      if (l.kind == Tok::Star) throw ParseError("wildcard inside a group", 0, l.column);
      throw ParseError("mismatched group delimiter", 0, l.column);
    }
  }

  pattern::Alternation alternation() {
    const std::size_t open_col = lexemes_[pos_++].column;
    pattern::Alternation alt;
    while (true) {
      const std::size_t branch_col = pos_ < lexemes_.size() ? lexemes_[pos_].column : src_.size();
      auto seq = sequence(Tok::RParen, open_col);
      if (seq.empty()) throw ParseError("empty alternation branch", 0, branch_col);
      alt.branches.push_back(std::move(seq));
      if (lexemes_[pos_++].kind == Tok::RParen) return alt;
    }
  }

  pattern::Optional optional() {
    const std::size_t open_col = lexemes_[pos_++].column;
    auto seq = sequence(Tok::RBracket, open_col);
    if (lexemes_[pos_].kind == Tok::Pipe) throw ParseError("'|' inside an optional group", 0, lexemes_[pos_].column);
    ++pos_;
    if (seq.empty()) throw ParseError("empty optional group", 0, open_col);
    return {std::move(seq)};
  }

  std::string_view src_;
  std::vector<Lexeme> lexemes_;
  std::size_t pos_ = 0;
};

std::string join(const std::vector<std::string>& toks) {
  std::string out;
  for (const auto& t : toks) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

bool token_equals(std::string_view token, std::string_view literal) {
  if (token.size() != literal.size()) return false;
  for (std::size_t i = 0; i < token.size(); ++i) {
    char c = token[i];
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    if (c != literal[i]) return false;
  }
  return true;
}

bool sequence_at(std::span<const std::string> tokens, std::size_t at, const std::vector<std::string>& seq) {
  if (at + seq.size() > tokens.size()) return false;
  for (std::size_t k = 0; k < seq.size(); ++k)
    if (!token_equals(tokens[at + k], seq[k])) return false;
  return true;
}

// Positions reachable after matching every element, starting at `start`.
// reach[p] == true means a match can end at token index p.
std::vector<char> simulate(const PatternAst& ast, std::span<const std::string> tokens, std::size_t start) {
  const std::size_t n = tokens.size();
  std::vector<char> cur(n + 1, 0), next(n + 1, 0);
  cur[start] = 1;
  for (const auto& el : ast.elements) {
    std::fill(next.begin(), next.end(), 0);
    bool any = false;
    if (const auto* lit = std::get_if<pattern::Literal>(&el)) {
      for (std::size_t p = start; p < n; ++p)
        if (cur[p] && token_equals(tokens[p], lit->token)) next[p + 1] = any = 1;
    } else if (std::holds_alternative<pattern::Wildcard>(el)) {
      auto first = std::find(cur.begin(), cur.end(), 1);
      if (first != cur.end()) {
        std::fill(next.begin() + (first - cur.begin()), next.end(), 1);
        any = true;
      }
    } else if (const auto* alt = std::get_if<pattern::Alternation>(&el)) {
      for (std::size_t p = start; p <= n; ++p) {
        if (!cur[p]) continue;
        for (const auto& br : alt->branches)
          if (sequence_at(tokens, p, br)) next[p + br.size()] = any = 1;
      }
    } else {
      const auto& opt = std::get<pattern::Optional>(el);
      for (std::size_t p = start; p <= n; ++p) {
        if (!cur[p]) continue;
        next[p] = any = 1;
        if (sequence_at(tokens, p, opt.tokens)) next[p + opt.tokens.size()] = 1;
      }
    }
    if (!any) return {};
    std::swap(cur, next);
  }
  return cur;
}

bool parse_bool(const std::string& s, std::size_t line) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw ParseError("expected true or false, got '" + s + "'", line);
}

}  // namespace

PatternAst parse_pattern(std::string_view source) { return Parser(source).parse(); }

std::string render_pattern(const PatternAst& ast) {
  std::string out;
  for (const auto& el : ast.elements) {
    if (!out.empty()) out += ' ';
    if (const auto* lit = std::get_if<pattern::Literal>(&el)) {
      out += lit->token;
    } else if (std::holds_alternative<pattern::Wildcard>(el)) {
      out += '*';
    } else if (const auto* alt = std::get_if<pattern::Alternation>(&el)) {
      out += '(';
      for (std::size_t b = 0; b < alt->branches.size(); ++b) {
        if (b) out += '|';
        out += join(alt->branches[b]);
      }
      out += ')';
    } else {
      out += '[' + join(std::get<pattern::Optional>(el).tokens) + ']';
    }
  }
  return out;
}

std::optional<TokenRange> match_pattern(const PatternAst& ast, std::span<const std::string> tokens,
                                        bool anchored) {
  const std::size_t n = tokens.size();
  const std::size_t last_start = anchored ? 0 : n;
  for (std::size_t s = 0; s <= last_start; ++s) {
    auto reach = simulate(ast, tokens, s);
    if (reach.empty()) continue;
    if (anchored) {
      if (reach[n]) return TokenRange{0, n};
      return std::nullopt;
    }
    for (std::size_t e = s; e <= n; ++e)
      if (reach[e]) return TokenRange{s, e};
  }
  return std::nullopt;
}

RuleSet::RuleSet(std::vector<Rule> rules) : rules_(std::move(rules)) {
  std::set<std::string> ids;
  for (const auto& r : rules_)
    if (!ids.insert(r.id).second) throw ValidationError("duplicate rule id '" + r.id + "'");
}

RuleSet RuleSet::parse(std::string_view document, const TaxonomyGraph& graph) {
  std::vector<Rule> rules;
  std::set<std::string> ids;
  detail::for_each_record(document, [&](std::size_t line, const std::vector<std::string>& f) {
    if (f.size() != 4 && f.size() != 5)
      throw ParseError("expected id<TAB>leafId<TAB>anchored<TAB>pattern", line);
    Rule r;
    r.id = f[0];
    r.leaf_id = f[1];
    r.anchored = parse_bool(f[2], line);
    r.enabled = f.size() == 5 ? parse_bool(f[4], line) : true;
    if (r.id.empty()) throw ParseError("empty rule id", line);
    if (!ids.insert(r.id).second)
      throw ValidationError("duplicate rule id '" + r.id + "' (line " + std::to_string(line) + ")");
    if (!graph.is_leaf(r.leaf_id))
      throw ValidationError("rule '" + r.id + "' references unknown leaf '" + r.leaf_id + "' (line " +
                            std::to_string(line) + ")");
    try {
      r.pattern = parse_pattern(f[3]);
    } catch (const ParseError& e) {
      throw ParseError("rule '" + r.id + "': " + e.what(), line, e.column());
    }
    rules.push_back(std::move(r));
  });
  return RuleSet(std::move(rules));
}

RuleSet RuleSet::load(const std::filesystem::path& path, const TaxonomyGraph& graph) {
  return parse(detail::read_file(path), graph);
}

std::size_t RuleSet::category_count() const {
  std::set<std::string_view> leaves;
  for (const auto& r : rules_) leaves.insert(r.leaf_id);
  return leaves.size();
}

RuleSet RuleSet::without(std::string_view rule_id) const {
  std::vector<Rule> kept;
  for (const auto& r : rules_)
    if (r.id != rule_id) kept.push_back(r);
  return RuleSet(std::move(kept));
}

}  // namespace playful
