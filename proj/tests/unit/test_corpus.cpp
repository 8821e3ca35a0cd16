#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "corpus_oracle.hpp"
#include "helpers.hpp"
#include "playful/corpus.hpp"
#include "playful/error.hpp"

using namespace playful;

namespace {

LabeledExample pos(std::string text) { return {std::move(text), Label::Positive, Source::SpeedDating}; }
LabeledExample neg(std::string text) { return {std::move(text), Label::Negative, Source::SampledTraffic}; }

std::map<std::size_t, std::size_t> negative_histogram(const Corpus& c) {
  std::vector<LabeledExample> n;
  for (const auto& e : c.examples)
    if (e.label == Label::Negative) n.push_back(e);
  return word_count_histogram(n);
}

}  // namespace

TEST_CASE("exact histogram match when the pool suffices") {
  std::vector<LabeledExample> p{pos("do you dream"), pos("what is your favorite color"), pos("are you happy")};
  std::vector<LabeledExample> pool{neg("play jazz now"), neg("turn on the kitchen light"), neg("set a timer"),
                                   neg("stop"), neg("what is the weather like today")};
  auto c = build_corpus(p, pool, {.seed = 1});
  CHECK(c.count(Label::Positive) == 3);
  CHECK(c.count(Label::Negative) == 3);
  CHECK(negative_histogram(c) == word_count_histogram(p));
}

TEST_CASE("short buckets spill to the nearest bucket, lower first on ties") {
  std::vector<LabeledExample> p{pos("a b c"), pos("a b c")};
  std::vector<LabeledExample> pool{neg("one two three"), neg("one two"), neg("one two three four")};
  auto c = build_corpus(p, pool, {.seed = 3});
  CHECK(negative_histogram(c) == std::map<std::size_t, std::size_t>{{2, 1}, {3, 1}});
}

TEST_CASE("insufficient pool reports deficits per bucket") {
  std::vector<LabeledExample> p{pos("a b"), pos("a b"), pos("a b c d")};
  std::vector<LabeledExample> pool{neg("x y")};
  try {
    build_corpus(p, pool, {});
    FAIL("expected InsufficientNegativesError");
  } catch (const InsufficientNegativesError& e) {
    CHECK(e.deficits() == std::map<std::size_t, std::size_t>{{2, 1}, {4, 1}});
  }
}

TEST_CASE("random pools agree with the count-level spill oracle") {
  std::mt19937_64 rng(42);
  int covered = 0;
  for (int round = 0; round < 200; ++round) {
    auto r = testing::random_pool(rng);
    auto expected = testing::expected_spill(word_count_histogram(r.positives), word_count_histogram(r.pool));
    if (!expected.deficits.empty()) {
      try {
        build_corpus(r.positives, r.pool, {.seed = static_cast<std::uint64_t>(round)});
        FAIL("expected InsufficientNegativesError");
      } catch (const InsufficientNegativesError& e) {
        CHECK(e.deficits() == expected.deficits);
      }
      continue;
    }
    ++covered;
    auto c = build_corpus(r.positives, r.pool, {.seed = static_cast<std::uint64_t>(round)});
    CHECK(c.count(Label::Positive) == r.positives.size());
    CHECK(c.count(Label::Negative) == r.positives.size());
    CHECK(negative_histogram(c) == expected.negatives);

    // Every negative comes from the pool, at most once.
    std::vector<std::string> pool_texts, used;
    for (const auto& e : r.pool) pool_texts.push_back(e.text);
    for (const auto& e : c.examples)
      if (e.label == Label::Negative) used.push_back(e.text);
    std::sort(pool_texts.begin(), pool_texts.end());
    std::sort(used.begin(), used.end());
    CHECK(std::includes(pool_texts.begin(), pool_texts.end(), used.begin(), used.end()));
    CHECK(std::adjacent_find(used.begin(), used.end()) == used.end());
  }
  CHECK(covered > 100);
}

TEST_CASE("splits are stratified and deterministic") {
  std::vector<LabeledExample> p, pool;
  for (int i = 0; i < 50; ++i) p.push_back(pos(testing::words(1 + i % 5, "p", i)));
  for (int i = 0; i < 80; ++i) pool.push_back(neg(testing::words(1 + i % 6, "n", i)));
  CorpusSettings s{.seed = 9, .train_fraction = 0.8, .validation_fraction = 0.1};
  auto a = build_corpus(p, pool, s);
  auto b = build_corpus(p, pool, s);
  CHECK(a.examples == b.examples);
  CHECK(a.split == b.split);

  for (Label label : {Label::Positive, Label::Negative}) {
    std::map<Split, int> counts;
    for (std::size_t i = 0; i < a.examples.size(); ++i)
      if (a.examples[i].label == label) ++counts[a.split[i]];
    CHECK(counts[Split::Train] == 40);
    CHECK(counts[Split::Validation] == 5);
    CHECK(counts[Split::Test] == 5);
  }

  s.seed = 10;
  CHECK(build_corpus(p, pool, s).split != a.split);
}

TEST_CASE("corpus JSONL round trip") {
  std::vector<LabeledExample> p{pos("do you dream"), pos("are you \"happy\"")};
  std::vector<LabeledExample> pool{neg("play jazz now"), neg("set a timer"), neg("hi")};
  auto c = build_corpus(p, pool, {.seed = 4});
  auto back = parse_corpus(format_corpus(c));
  CHECK(back.examples == c.examples);
  CHECK(back.split == c.split);
}

TEST_CASE("bad inputs") {
  std::vector<LabeledExample> none;
  std::vector<LabeledExample> one{pos("hi")};
  CHECK_THROWS_AS(build_corpus(none, one, {}), ContractError);
  CHECK_THROWS_AS(build_corpus(one, one, {.train_fraction = 0.9, .validation_fraction = 0.2}), ContractError);
  CHECK_THROWS_AS(parse_examples("{\"text\":\"x\",\"label\":\"maybe\"}\n"), ParseError);
  CHECK_THROWS_AS(parse_examples("not json\n"), ParseError);
  CHECK_THROWS_AS(parse_examples("{\"label\":\"positive\"}\n"), ParseError);
  CHECK(parse_examples("\n{\"text\":\"x\",\"label\":\"positive\"}\n\n").size() == 1);
}

TEST_CASE("bundled corpus is balanced and length matched") {
  auto c = read_corpus(testing::asset("corpus/corpus.v1.jsonl"));
  auto positives = read_examples(testing::asset("corpus/positives.jsonl"));
  auto pool = read_examples(testing::asset("corpus/negative_pool.jsonl"));
  CHECK(c.count(Label::Positive) >= 400);
  CHECK(c.count(Label::Positive) == positives.size());
  CHECK(c.count(Label::Positive) == c.count(Label::Negative));
  auto expected = testing::expected_spill(word_count_histogram(positives), word_count_histogram(pool));
  CHECK(expected.deficits.empty());
  CHECK(negative_histogram(c) == expected.negatives);
}
