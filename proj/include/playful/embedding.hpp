#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace playful {

struct NgramRange {
  std::size_t min = 2;
  std::size_t max = 4;
  bool operator==(const NgramRange&) const = default;
};

struct ProviderConfig {
  enum class Kind { Baseline, External };

  Kind kind = Kind::Baseline;
  std::size_t dim = 256;
  NgramRange ngram_range;
  // External encoder, e.g. "http://127.0.0.1:8081/embed".
  std::string endpoint;
  // Characters (code points) kept from the front of the text.
  std::size_t truncation = 128;

  // External client retry policy.
  int max_attempts = 3;
  std::chrono::milliseconds backoff{100};
  std::chrono::milliseconds timeout{5000};

  static ProviderConfig baseline(std::size_t dim = 256, NgramRange ngrams = {});
  static ProviderConfig external(std::string endpoint, std::size_t dim);
};

struct EmbeddingVector {
  std::vector<double> values;
  std::string provider_id;
  std::size_t dim() const { return values.size(); }
};

struct ProviderInfo {
  std::string provider_id;
  std::size_t dim = 0;
};

// Stable identity of a provider configuration. Baseline ids look like
// "baseline-ngram/v1-256"; non-default n-gram range or truncation adds a
// suffix so differently configured providers never share an id.
ProviderInfo provider_info(const ProviderConfig& cfg);

// Baseline: lowercase, truncate, signed-hash character n-grams into `dim`
// buckets, L2-normalize (empty input gives the zero vector).
// External: POST {"text": ...} to the endpoint, expect {"vector": [...]}.
// Throws TransportError after exhausting retries and ContractError when the
// returned vector has the wrong length or non-finite values.
EmbeddingVector embed(std::string_view text, const ProviderConfig& cfg);

// First `max_chars` code points of UTF-8 `text`.
std::string truncate_chars(std::string_view text, std::size_t max_chars);

// 64-bit FNV-1a; the baseline feature hash.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace playful
