#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "playful/error.hpp"

namespace playful {

enum class Label { Negative = 0, Positive = 1 };
enum class Source { SpeedDating, SampledTraffic, Synthetic };
enum class Split { Train, Validation, Test };

std::string_view to_string(Label l);
std::string_view to_string(Source s);
std::string_view to_string(Split s);
Label label_from_string(std::string_view s);
Source source_from_string(std::string_view s);
Split split_from_string(std::string_view s);

struct LabeledExample {
  std::string text;
  Label label = Label::Negative;
  Source source = Source::Synthetic;
  bool operator==(const LabeledExample&) const = default;
};

struct CorpusSettings {
  std::uint64_t seed = 0;
  double train_fraction = 0.8;
  double validation_fraction = 0.1;  // the rest is test
};

// Balanced positives/negatives with a split tag per example.
struct Corpus {
  std::vector<LabeledExample> examples;
  std::vector<Split> split;  // parallel to examples
  std::uint64_t seed = 0;

  std::vector<LabeledExample> subset(Split s) const;
  std::size_t count(Label l) const;
};

// Word count -> number of examples, using the utterance tokenizer.
std::map<std::size_t, std::size_t> word_count_histogram(std::span<const LabeledExample> examples);

// Thrown when the pool cannot cover the positives even after spilling.
// `deficits` maps word-count bucket -> examples still missing.
class InsufficientNegativesError : public ValidationError {
 public:
  explicit InsufficientNegativesError(std::map<std::size_t, std::size_t> deficits);
  const std::map<std::size_t, std::size_t>& deficits() const { return deficits_; }

 private:
  std::map<std::size_t, std::size_t> deficits_;
};

// Draws one negative per positive so the negatives' word-count histogram
// equals the positives'. A bucket short of pool items borrows from the
// nearest bucket with spare items, nearer first, the smaller count on ties.
// Buckets are served in ascending word count. Each class is then split
// train/validation/test independently. Deterministic for a given seed.
Corpus build_corpus(std::span<const LabeledExample> positives, std::span<const LabeledExample> negative_pool,
                    const CorpusSettings& settings);

// Line-delimited JSON: {"text": ..., "label": "positive"|"negative",
// "source": "speed-dating"|"sampled-traffic"|"synthetic"[, "split": ...]}.
std::vector<LabeledExample> parse_examples(std::string_view jsonl);
std::vector<LabeledExample> read_examples(const std::filesystem::path& path);
Corpus parse_corpus(std::string_view jsonl);
Corpus read_corpus(const std::filesystem::path& path);
std::string format_corpus(const Corpus& corpus);

}  // namespace playful
