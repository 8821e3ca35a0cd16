#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace playful {

struct TokenRange {
  std::size_t begin = 0;
  std::size_t end = 0;  // exclusive
  std::size_t size() const { return end - begin; }
  bool operator==(const TokenRange&) const = default;
};

// Lowercase word tokens plus sentence boundaries. Sentence ranges partition
// `tokens` in order.
struct TokenizedUtterance {
  std::string raw;
  std::vector<std::string> tokens;
  std::vector<TokenRange> sentences;
};

// Splits on whitespace and punctuation, lowercases ASCII, drops apostrophes
// inside words ("don't" -> "dont"). Sentences end at '.', '!' or '?'; a
// trailing run without a terminator is its own sentence. A run of three or
// more censoring symbols (#%$@&*) becomes the single token "grawlix".
// Bytes >= 0x80 are word characters, so UTF-8 text passes through intact.
TokenizedUtterance tokenize(std::string_view text);

// Tokens only, for callers that do not need sentence structure.
std::vector<std::string> tokenize_words(std::string_view text);

struct SentimentEntry {
  double polarity = 0.0;
  double subjectivity = 0.0;
};

struct Lexicons {
  std::unordered_set<std::string> easy_words;
  std::unordered_map<std::string, SentimentEntry> sentiment;
  std::unordered_set<std::string> negators;
  std::unordered_map<std::string, double> intensifiers;

  // Easy-word list: one word per line. Sentiment: word<TAB>polarity<TAB>subjectivity.
  // Modifiers: `negator<TAB>word` or `intensifier<TAB>word<TAB>multiplier`.
  // Blank lines and lines starting with '#' are ignored everywhere.
  static Lexicons load(const std::filesystem::path& easy_words,
                       const std::filesystem::path& sentiment,
                       const std::filesystem::path& modifiers);
  static Lexicons parse(std::string_view easy_words, std::string_view sentiment,
                        std::string_view modifiers);
};

struct ReadabilityScore {
  double score = 0.0;
  std::size_t difficult_words = 0;
  double pct_difficult = 0.0;
  bool degenerate = false;  // empty utterance, all fields zero
};

// Classical Dale-Chall: 0.1579 * pct + 0.0496 * words/sentence, plus 3.6365
// when more than 5% of the words are off the easy list.
ReadabilityScore dale_chall(const TokenizedUtterance& u, const Lexicons& lex);

// Formula only, exposed so callers can score counts without building text.
double dale_chall_score(std::size_t words, std::size_t sentences, std::size_t difficult);

struct InterpersonalScore {
  double subjectivity = 0.0;
  double polarity = 0.0;
  double sentiment = 0.0;
};

// Lexicon-average scoring. A negator immediately before a scored word flips its
// sign; an intensifier immediately before it scales polarity and subjectivity.
// `sentiment` is the negation-aware polarity without intensifier scaling.
InterpersonalScore interpersonal(const TokenizedUtterance& u, const Lexicons& lex);

inline constexpr std::size_t kFeatureDim = 8;

// Field order is part of the model file format; do not reorder.
struct FeatureVector {
  double word_count = 0.0;
  double avg_sentence_length = 0.0;
  double dale_chall = 0.0;
  double difficult_word_count = 0.0;
  double pct_difficult_words = 0.0;
  double subjectivity = 0.0;
  double polarity = 0.0;
  double sentiment = 0.0;

  std::array<double, kFeatureDim> to_array() const;
  static FeatureVector from_array(const std::array<double, kFeatureDim>& a);
  bool operator==(const FeatureVector&) const = default;
};

extern const std::array<const char*, kFeatureDim> kFeatureNames;

FeatureVector extract_features(std::string_view text, const Lexicons& lex);

}  // namespace playful
