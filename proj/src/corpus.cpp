#include "playful/corpus.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "detail/io.hpp"
#include "detail/rng.hpp"
#include "playful/text_features.hpp"

namespace playful {

std::string_view to_string(Label l) { return l == Label::Positive ? "positive" : "negative"; }

std::string_view to_string(Source s) {
  switch (s) {
    case Source::SpeedDating: return "speed-dating";
    case Source::SampledTraffic: return "sampled-traffic";
    case Source::Synthetic: return "synthetic";
  }
  return "?";
}

std::string_view to_string(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Validation: return "validation";
    case Split::Test: return "test";
  }
  return "?";
}

Label label_from_string(std::string_view s) {
  if (s == "positive") return Label::Positive;
  if (s == "negative") return Label::Negative;
  throw ParseError("unknown label '" + std::string(s) + "'");
}

Source source_from_string(std::string_view s) {
  if (s == "speed-dating") return Source::SpeedDating;
  if (s == "sampled-traffic") return Source::SampledTraffic;
  if (s == "synthetic") return Source::Synthetic;
  throw ParseError("unknown source '" + std::string(s) + "'");
}

Split split_from_string(std::string_view s) {
  if (s == "train") return Split::Train;
  if (s == "validation") return Split::Validation;
  if (s == "test") return Split::Test;
  throw ParseError("unknown split '" + std::string(s) + "'");
}

std::vector<LabeledExample> Corpus::subset(Split s) const {
  std::vector<LabeledExample> out;
  for (std::size_t i = 0; i < examples.size(); ++i)
    if (split[i] == s) out.push_back(examples[i]);
  return out;
}

std::size_t Corpus::count(Label l) const {
  return static_cast<std::size_t>(
      std::count_if(examples.begin(), examples.end(), [&](const auto& e) { return e.label == l; }));
}

std::map<std::size_t, std::size_t> word_count_histogram(std::span<const LabeledExample> examples) {
  std::map<std::size_t, std::size_t> h;
  for (const auto& e : examples) ++h[tokenize_words(e.text).size()];
  return h;
}

namespace {

std::string describe(const std::map<std::size_t, std::size_t>& deficits) {
  std::string out = "insufficient negatives after spilling; missing per word-count bucket:";
  for (auto [k, n] : deficits) out += " " + std::to_string(k) + "w:" + std::to_string(n);
  return out;
}

// Per-class split: shuffle, then cut at the configured fractions.
void assign_splits(std::vector<Split>& split, const std::vector<std::size_t>& members,
                   const CorpusSettings& s, detail::Rng& rng) {
  auto order = members;
  rng.shuffle(order);
  const auto n = static_cast<double>(order.size());
  const auto n_train = static_cast<std::size_t>(std::llround(n * s.train_fraction));
  const auto n_val = std::min(order.size() - n_train, static_cast<std::size_t>(std::llround(n * s.validation_fraction)));
  for (std::size_t i = 0; i < order.size(); ++i)
    split[order[i]] = i < n_train ? Split::Train : i < n_train + n_val ? Split::Validation : Split::Test;
}

}  // namespace

InsufficientNegativesError::InsufficientNegativesError(std::map<std::size_t, std::size_t> deficits)
    : ValidationError(describe(deficits)), deficits_(std::move(deficits)) {}

Corpus build_corpus(std::span<const LabeledExample> positives, std::span<const LabeledExample> negative_pool,
                    const CorpusSettings& settings) {
  if (positives.empty()) throw ContractError("build_corpus: no positive examples");
  if (settings.train_fraction < 0 || settings.validation_fraction < 0 ||
      settings.train_fraction + settings.validation_fraction > 1.0)
    throw ContractError("build_corpus: split fractions must be non-negative and sum to at most 1");
  for (const auto& e : positives)
    if (e.text.empty()) throw ContractError("build_corpus: empty positive text");

  detail::Rng rng(settings.seed);

  const auto demand = word_count_histogram(positives);
  std::map<std::size_t, std::vector<std::size_t>> buckets;  // word count -> pool indices
  for (std::size_t i = 0; i < negative_pool.size(); ++i) {
    if (negative_pool[i].text.empty()) continue;
    buckets[tokenize_words(negative_pool[i].text).size()].push_back(i);
  }
  for (auto& [k, idx] : buckets) rng.shuffle(idx);

  std::map<std::size_t, std::size_t> next;  // next unused position per bucket
  auto spare = [&](std::size_t k) {
    auto it = buckets.find(k);
    return it == buckets.end() ? std::size_t{0} : it->second.size() - next[k];
  };
  auto take = [&](std::size_t k) { return buckets[k][next[k]++]; };

  std::vector<std::size_t> chosen;
  std::map<std::size_t, std::size_t> shortfall;
  for (auto [k, want] : demand) {
    const std::size_t own = std::min(want, spare(k));
    for (std::size_t i = 0; i < own; ++i) chosen.push_back(take(k));
    if (own < want) shortfall[k] = want - own;
  }

  const std::size_t max_k = buckets.empty() ? 0 : buckets.rbegin()->first;
  std::map<std::size_t, std::size_t> deficits;
  for (auto [k, missing] : shortfall) {
    for (std::size_t unit = 0; unit < missing; ++unit) {
      bool found = false;
      for (std::size_t d = 1; !found && (d <= k || k + d <= max_k); ++d) {
        if (d <= k && spare(k - d) > 0) {
          chosen.push_back(take(k - d));
          found = true;
        } else if (k + d <= max_k && spare(k + d) > 0) {
          chosen.push_back(take(k + d));
          found = true;
        }
      }
      if (!found) ++deficits[k];
    }
  }
  if (!deficits.empty()) throw InsufficientNegativesError(std::move(deficits));

  Corpus c;
  c.seed = settings.seed;
  std::vector<std::size_t> pos_idx, neg_idx;
  for (const auto& p : positives) {
    pos_idx.push_back(c.examples.size());
    c.examples.push_back({p.text, Label::Positive, p.source});
  }
  for (std::size_t i : chosen) {
    neg_idx.push_back(c.examples.size());
    c.examples.push_back({negative_pool[i].text, Label::Negative, negative_pool[i].source});
  }
  c.split.assign(c.examples.size(), Split::Train);
  assign_splits(c.split, pos_idx, settings, rng);
  assign_splits(c.split, neg_idx, settings, rng);
  return c;
}

namespace {

LabeledExample example_from_json(const nlohmann::json& j, std::size_t line) {
  try {
    LabeledExample e;
    e.text = j.at("text").get<std::string>();
    e.label = label_from_string(j.at("label").get<std::string>());
    e.source = j.contains("source") ? source_from_string(j["source"].get<std::string>()) : Source::Synthetic;
    if (e.text.empty()) throw ParseError("empty text", line);
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("bad example record: ") + ex.what(), line);
  } catch (const ParseError& ex) {
    if (ex.line() != 0) throw;
    throw ParseError(ex.what(), line);
  }
}

nlohmann::json parse_json_line(std::string_view text, std::size_t line) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("invalid JSON: ") + ex.what(), line);
  }
}

}  // namespace

std::vector<LabeledExample> parse_examples(std::string_view jsonl) {
  std::vector<LabeledExample> out;
  detail::for_each_line(jsonl, [&](std::size_t line, std::string_view text) {
    auto j = parse_json_line(text, line);
    if (j.contains("meta")) return;
    out.push_back(example_from_json(j, line));
  });
  return out;
}

std::vector<LabeledExample> read_examples(const std::filesystem::path& path) {
  return parse_examples(detail::read_file(path));
}

Corpus parse_corpus(std::string_view jsonl) {
  Corpus c;
  detail::for_each_line(jsonl, [&](std::size_t line, std::string_view text) {
    auto j = parse_json_line(text, line);
    if (j.contains("meta")) {
      c.seed = j["meta"].value("seed", std::uint64_t{0});
      return;
    }
    c.examples.push_back(example_from_json(j, line));
    c.split.push_back(j.contains("split") ? split_from_string(j["split"].get<std::string>()) : Split::Train);
  });
  return c;
}

Corpus read_corpus(const std::filesystem::path& path) { return parse_corpus(detail::read_file(path)); }

std::string format_corpus(const Corpus& corpus) {
  std::string out = nlohmann::json{{"meta", {{"seed", corpus.seed}, {"version", 1}}}}.dump() + "\n";
  for (std::size_t i = 0; i < corpus.examples.size(); ++i) {
    const auto& e = corpus.examples[i];
    nlohmann::json j{{"text", e.text},
                     {"label", to_string(e.label)},
                     {"source", to_string(e.source)},
                     {"split", to_string(corpus.split[i])}};
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace playful
