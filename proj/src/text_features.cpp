#include "playful/text_features.hpp"

#include <algorithm>
#include <cmath>

#include "detail/io.hpp"
#include "playful/error.hpp"

namespace playful {

namespace {

bool is_word_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

bool is_censor_symbol(char c) {
  return c == '#' || c == '%' || c == '$' || c == '@' || c == '&' || c == '*';
}

bool is_sentence_end(char c) { return c == '.' || c == '!' || c == '?'; }

// Length in bytes of an apostrophe at text[i] ("'" or U+2019), 0 if none.
std::size_t apostrophe_at(std::string_view text, std::size_t i) {
  if (text[i] == '\'') return 1;
  if (text.compare(i, 3, "\xE2\x80\x99") == 0) return 3;
  return 0;
}

char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

}  // namespace

TokenizedUtterance tokenize(std::string_view text) {
  TokenizedUtterance out;
  out.raw = std::string(text);
  std::string word;
  std::size_t sentence_begin = 0;

  auto flush_word = [&] {
    if (!word.empty()) out.tokens.push_back(std::move(word));
    word.clear();
  };
  auto close_sentence = [&] {
    flush_word();
    if (out.tokens.size() > sentence_begin) {
      out.sentences.push_back({sentence_begin, out.tokens.size()});
      sentence_begin = out.tokens.size();
    }
  };

  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (std::size_t len = apostrophe_at(text, i); len != 0) {
      // Internal apostrophes join ("don't" -> "dont"); elsewhere they separate.
      bool next_is_word = i + len < text.size() && is_word_byte(static_cast<unsigned char>(text[i + len]));
      if (!(word.size() > 0 && next_is_word)) flush_word();
      i += len;
      continue;
    }
    if (is_word_byte(c)) {
      word.push_back(ascii_lower(static_cast<char>(c)));
      ++i;
      continue;
    }
    if (is_censor_symbol(static_cast<char>(c))) {
      std::size_t j = i;
      while (j < text.size() && is_censor_symbol(text[j])) ++j;
      if (j - i >= 3) {
        flush_word();
        out.tokens.emplace_back("grawlix");
      } else {
        flush_word();
      }
      i = j;
      continue;
    }
    if (is_sentence_end(static_cast<char>(c))) {
      // "a.m." and "1.5" keep their sentence together.
      bool inside_word = c == '.' && !word.empty() && i + 1 < text.size() &&
                         is_word_byte(static_cast<unsigned char>(text[i + 1]));
      if (inside_word) {
        flush_word();
      } else {
        close_sentence();
      }
      ++i;
      continue;
    }
    flush_word();
    ++i;
  }
  close_sentence();
  return out;
}

std::vector<std::string> tokenize_words(std::string_view text) { return tokenize(text).tokens; }

Lexicons Lexicons::parse(std::string_view easy_words, std::string_view sentiment,
                         std::string_view modifiers) {
  Lexicons lex;
  detail::for_each_record(easy_words, [&](std::size_t line_no, const std::vector<std::string>& f) {
    if (f.size() != 1) throw ParseError("easy-word list: expected one word per line", line_no);
    std::string w = f[0];
    std::transform(w.begin(), w.end(), w.begin(), ascii_lower);
    lex.easy_words.insert(std::move(w));
  });
  detail::for_each_record(sentiment, [&](std::size_t line_no, const std::vector<std::string>& f) {
    if (f.size() != 3) throw ParseError("sentiment lexicon: expected word<TAB>polarity<TAB>subjectivity", line_no);
    SentimentEntry e{detail::parse_double(f[1], line_no), detail::parse_double(f[2], line_no)};
    if (e.polarity < -1.0 || e.polarity > 1.0 || e.subjectivity < 0.0 || e.subjectivity > 1.0)
      throw ValidationError("sentiment lexicon: value out of range at line " + std::to_string(line_no));
    lex.sentiment[f[0]] = e;
  });
  detail::for_each_record(modifiers, [&](std::size_t line_no, const std::vector<std::string>& f) {
    if (f.size() == 2 && f[0] == "negator") {
      lex.negators.insert(f[1]);
    } else if (f.size() == 3 && f[0] == "intensifier") {
      lex.intensifiers[f[1]] = detail::parse_double(f[2], line_no);
    } else {
      throw ParseError("modifiers: expected negator<TAB>word or intensifier<TAB>word<TAB>multiplier", line_no);
    }
  });
  return lex;
}

Lexicons Lexicons::load(const std::filesystem::path& easy_words,
                        const std::filesystem::path& sentiment,
                        const std::filesystem::path& modifiers) {
  return parse(detail::read_file(easy_words), detail::read_file(sentiment), detail::read_file(modifiers));
}

double dale_chall_score(std::size_t words, std::size_t sentences, std::size_t difficult) {
  if (words == 0 || sentences == 0) return 0.0;
  const double pct = 100.0 * static_cast<double>(difficult) / static_cast<double>(words);
  const double avg = static_cast<double>(words) / static_cast<double>(sentences);
  double score = 0.1579 * pct + 0.0496 * avg;
  if (pct > 5.0) score += 3.6365;
  return score;
}

ReadabilityScore dale_chall(const TokenizedUtterance& u, const Lexicons& lex) {
  ReadabilityScore r;
  if (u.tokens.empty() || u.sentences.empty()) {
    r.degenerate = true;
    return r;
  }
  r.difficult_words = static_cast<std::size_t>(std::count_if(
      u.tokens.begin(), u.tokens.end(), [&](const std::string& t) { return !lex.easy_words.contains(t); }));
  r.pct_difficult = 100.0 * static_cast<double>(r.difficult_words) / static_cast<double>(u.tokens.size());
  r.score = dale_chall_score(u.tokens.size(), u.sentences.size(), r.difficult_words);
  return r;
}

InterpersonalScore interpersonal(const TokenizedUtterance& u, const Lexicons& lex) {
  double pol_sum = 0.0, subj_sum = 0.0, sent_sum = 0.0;
  std::size_t matched = 0;
  for (std::size_t i = 0; i < u.tokens.size(); ++i) {
    const auto& tok = u.tokens[i];
    if (lex.negators.contains(tok) || lex.intensifiers.contains(tok)) continue;
    auto it = lex.sentiment.find(tok);
    if (it == lex.sentiment.end()) continue;

    double pol = it->second.polarity;
    double subj = it->second.subjectivity;
    double sent = pol;
    if (i > 0) {
      const auto& prev = u.tokens[i - 1];
      if (lex.negators.contains(prev)) {
        pol = -pol;
        sent = -sent;
      } else if (auto m = lex.intensifiers.find(prev); m != lex.intensifiers.end()) {
        pol *= m->second;
        subj *= m->second;
      }
    }
    pol_sum += pol;
    subj_sum += subj;
    sent_sum += sent;
    ++matched;
  }
  if (matched == 0) return {};
  const double n = static_cast<double>(matched);
  return {std::clamp(subj_sum / n, 0.0, 1.0), std::clamp(pol_sum / n, -1.0, 1.0),
          std::clamp(sent_sum / n, -1.0, 1.0)};
}

const std::array<const char*, kFeatureDim> kFeatureNames = {
    "word_count", "avg_sentence_length", "dale_chall",   "difficult_word_count",
    "pct_difficult_words", "subjectivity", "polarity", "sentiment"};

std::array<double, kFeatureDim> FeatureVector::to_array() const {
  return {word_count,          avg_sentence_length, dale_chall, difficult_word_count,
          pct_difficult_words, subjectivity,        polarity,   sentiment};
}

FeatureVector FeatureVector::from_array(const std::array<double, kFeatureDim>& a) {
  return {a[0], a[1], a[2], a[3], a[4], a[5], a[6], a[7]};
}

FeatureVector extract_features(std::string_view text, const Lexicons& lex) {
  const auto u = tokenize(text);
  FeatureVector f;
  if (u.tokens.empty()) return f;
  const auto dc = dale_chall(u, lex);
  const auto ip = interpersonal(u, lex);
  f.word_count = static_cast<double>(u.tokens.size());
  f.avg_sentence_length = f.word_count / static_cast<double>(u.sentences.size());
  f.dale_chall = dc.score;
  f.difficult_word_count = static_cast<double>(dc.difficult_words);
  f.pct_difficult_words = dc.pct_difficult;
  f.subjectivity = ip.subjectivity;
  f.polarity = ip.polarity;
  f.sentiment = ip.sentiment;
  return f;
}

}  // namespace playful
