// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

#include "corpus_oracle.hpp"
#include "dispatch_harness.hpp"
#include "gradient_check.hpp"
#include "playful/classifier.hpp"
#include "playful/classify.hpp"
#include "playful/report.hpp"
#include "playful/stats.hpp"
#include "table3_fixture.hpp"

using namespace playful;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = PLAYFUL_FIXTURE_DIR;
const fs::path kAssets = PLAYFUL_ASSET_DIR;

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void criterion(const char* name, double time_limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& ex) {
    o = {false, std::string("threw: ") + ex.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (time_limit_s > 0 && secs >= time_limit_s) {
    o.pass = false;
    o.detail += " (over the " + std::to_string(static_cast<int>(time_limit_s)) + " s limit)";
  }
  if (!o.pass) ++failures;
  std::printf("%s  %-28s %6.2fs  %s\n", o.pass ? "PASS" : "FAIL", name, secs, o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

Outcome table3() {
  ReportInputs in;
  in.survey = parse_survey(testing::table3_survey_jsonl());
  auto r = experiment_report(in);
  Outcome o;
  if (r.survey.size() != testing::table3_rows().size()) return {false, "wrong number of survey rows"};
  for (std::size_t i = 0; i < r.survey.size(); ++i) {
    const auto& want = testing::table3_rows()[i];
    const auto& got = r.survey[i].result;
    const bool ok = r.survey[i].variable == want.variable && std::abs(got.mean_a - want.control_mean) <= 1e-12 &&
                    std::abs(got.mean_b - want.treatment_mean) <= 1e-12 &&
                    std::abs(got.effect_size - want.effect) <= 1e-12 &&
                    fmt(got.effect_size, 2) == fmt(want.effect, 2);
    o.pass = o.pass && ok;
    o.detail += std::string(want.variable) + " " + fmt(got.mean_a, 2) + "/" + fmt(got.mean_b, 2) + " -> " +
                fmt(got.effect_size, 2) + "; ";
  }
  return o;
}

Outcome detector_metrics() {
  auto pr = precision_recall({.tp = 49, .fp = 1, .tn = 0, .fn = 8});
  if (!pr.precision || !pr.recall) return {false, "undefined ratio"};
  const bool ok = std::abs(*pr.precision - 0.98) <= 1e-12 && std::abs(*pr.recall - 0.86) <= 0.005;
  return {ok, "precision " + fmt(*pr.precision, 12) + ", recall " + fmt(*pr.recall, 4)};
}

Outcome likert() {
  bool ok = true;
  for (int raw = 1; raw <= 7; ++raw) {
    ok = ok && normalize_likert(raw) == static_cast<double>(raw - 1) / 6.0;
    if (raw < 7) ok = ok && normalize_likert(raw) < normalize_likert(raw + 1);
  }
  for (int bad : {0, 8, -3}) {
    try {
      normalize_likert(bad);
      ok = false;
    } catch (const ContractError&) {
    }
  }
  return {ok, "7 exact values, strictly increasing, out-of-range rejected"};
}

Outcome ttest() {
  std::ifstream in(kFixtures / "ttest_oracle.json");
  auto o = nlohmann::json::parse(in);
  double worst_t = 0.0, worst_p = 0.0;
  std::size_t n = 0;
  for (const auto& c : o["cases"]) {
    auto r = students_t_test(c["a"].get<std::vector<double>>(), c["b"].get<std::vector<double>>());
    worst_t = std::max(worst_t, std::abs(r.t - c["pooled"]["t"].get<double>()));
    worst_p = std::max(worst_p, std::abs(r.p - c["pooled"]["p"].get<double>()));
    ++n;
  }
  auto same = o["identical"]["a"].get<std::vector<double>>();
  auto id = students_t_test(same, same);
  const bool ok = n == 20 && worst_t <= 1e-9 && worst_p <= 1e-8 && id.t == 0.0 && id.p == 1.0;
  std::ostringstream d;
  d << n << " pairs, max |dt| " << worst_t << ", max |dp| " << worst_p << "; identical t=" << id.t << " p=" << id.p;
  return {ok, d.str()};
}

Outcome dale_chall_fixtures() {
  struct Case {
    std::size_t words, sentences, difficult;
    double expected;
  };
  // 0.1579 * pct + 0.0496 * words/sentence (+ 3.6365 when pct > 5), by hand.
  const Case cases[] = {{100, 10, 6, 5.0799}, {100, 5, 3, 1.4657}, {20, 2, 1, 1.2855},
                        {50, 5, 5, 5.7115},   {200, 8, 30, 7.2450}};
  auto lex = Lexicons::parse("the\n", "", "");
  double worst = 0.0;
  for (const auto& c : cases) {
    worst = std::max(worst, std::abs(dale_chall_score(c.words, c.sentences, c.difficult) - c.expected));
    // Same counts through the tokenizer: "the" is easy, "zebra" is not.
    std::string text;
    std::size_t placed = 0;
    for (std::size_t s = 0; s < c.sentences; ++s) {
      const std::size_t len = c.words / c.sentences;
      for (std::size_t w = 0; w < len; ++w) text += (placed++ < c.difficult ? "zebra " : "the ");
      text += ". ";
    }
    worst = std::max(worst, std::abs(dale_chall(tokenize(text), lex).score - c.expected));
  }
  return {worst <= 1e-6, "5 fixtures, max |error| " + fmt(worst, 9)};
}

Outcome figure2() {
  std::size_t checked = 0, wrong = 0, control_tasks = 0, control_detector_calls = 0;
  for (const auto& c : testing::all_path_cases()) {
    auto out = testing::run_path(c);
    ++checked;
    if (out.source != testing::expected_source(c)) ++wrong;
    if (c.arm == Arm::Control) {
      control_tasks += out.tasks_created;
      control_detector_calls += static_cast<std::size_t>(out.detector_calls);
    }
  }
  std::ostringstream d;
  d << checked << " combinations, " << wrong << " misrouted, control tasks " << control_tasks
    << ", control detector calls " << control_detector_calls;
  return {checked == 16 && wrong == 0 && control_tasks == 0 && control_detector_calls == 0, d.str()};
}

Outcome classifier() {
  auto corpus = read_corpus(kAssets / "corpus" / "corpus.v1.jsonl");
  auto lex = Lexicons::load(kAssets / "easy_words.v1.txt", kAssets / "sentiment.v1.tsv", kAssets / "modifiers.v1.tsv");
  TrainingConfig cfg;  // 3 epochs, lr 5e-5, batch 32
  cfg.seed = 7;
  TrainOptions opts;
  opts.trained_at_ms = 0;
  const auto provider = ProviderConfig::baseline();
  auto a = train(corpus, cfg, provider, lex, opts);
  auto b = train(corpus, cfg, provider, lex, opts);
  const bool identical = save_model(a) == save_model(b);
  auto test = corpus.subset(Split::Test);
  auto c = evaluate(a, test, provider, lex);
  const double acc = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
  const auto f1 = f1_score(c);
  const bool ok = corpus.count(Label::Positive) >= 400 && identical && acc >= 0.90 && f1 && *f1 >= 0.90;
  return {ok, std::to_string(test.size()) + " held-out, accuracy " + fmt(acc, 4) + ", F1 " +
                  (f1 ? fmt(*f1, 4) : std::string("undefined")) + (identical ? ", bit-identical" : ", DIFFERENT")};
}

Outcome corpus_builder() {
  std::mt19937_64 rng(2024);
  int covered = 0, short_pools = 0, bad = 0;
  while (covered < 100) {
    auto r = testing::random_pool(rng);
    auto expected = testing::expected_spill(word_count_histogram(r.positives), word_count_histogram(r.pool));
    const auto seed = rng();
    if (!expected.deficits.empty()) {
      ++short_pools;
      try {
        build_corpus(r.positives, r.pool, {.seed = seed});
        ++bad;
      } catch (const InsufficientNegativesError& e) {
        if (e.deficits() != expected.deficits) ++bad;
      }
      continue;
    }
    ++covered;
    auto c = build_corpus(r.positives, r.pool, {.seed = seed});
    std::vector<LabeledExample> negatives;
    for (const auto& e : c.examples)
      if (e.label == Label::Negative) negatives.push_back(e);
    if (c.count(Label::Positive) != r.positives.size() || negatives.size() != r.positives.size() ||
        word_count_histogram(negatives) != expected.negatives)
      ++bad;
  }
  return {bad == 0, std::to_string(covered) + " pools recounted, " + std::to_string(short_pools) +
                        " short pools checked for deficits, " + std::to_string(bad) + " mismatches"};
}

Outcome gradient() {
  std::mt19937_64 rng(99);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) worst = std::max(worst, testing::max_relative_gradient_error(testing::random_instance(rng)));
  std::ostringstream d;
  d << "50 instances, max relative error " << worst;
  return {worst <= 1e-5, d.str()};
}

Outcome table1() {
  auto graph = TaxonomyGraph::load(kAssets / "taxonomy.v1");
  auto rules = RuleSet::load(kAssets / "rules.v1.tsv", graph);
  std::ifstream in(kFixtures / "table1_golden.tsv");
  std::string line;
  int rows = 0, hits = 0;
  std::string misses;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    const auto text = line.substr(0, tab), leaf = line.substr(tab + 1);
    ++rows;
    if (matched_leaves(classify_utterance(text, rules, graph)).contains(leaf)) ++hits;
    else misses += " [" + text + "]";
  }
  return {rows == 22 && hits == rows, std::to_string(hits) + "/" + std::to_string(rows) + " rows" + misses};
}

Outcome replay() {
  int sequences = 0, mismatched = 0;
  std::size_t events = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    testing::Rig rig;
    std::mt19937_64 rng(seed);
    testing::random_operations(rig, rng, 1000);
    std::string log;
    for (const auto& e : rig.events) log += format_event(e) + "\n";
    const auto live = rig.dispatcher->snapshot();
    if (ExperimentState::replay(parse_event_log(log)) != live) ++mismatched;
    events += rig.events.size();
    ++sequences;
  }
  return {mismatched == 0, std::to_string(sequences) + " sequences of 1000 operations (" + std::to_string(events) +
                               " events), " + std::to_string(mismatched) + " mismatched"};
}

}  // namespace

int main() {
  criterion("table3-effect-sizes", 1, table3);
  criterion("detector-precision-recall", 1, detector_metrics);
  criterion("likert-normalization", 0, likert);
  criterion("students-t-oracle", 0, ttest);
  criterion("dale-chall-fixtures", 0, dale_chall_fixtures);
  criterion("dispatch-state-machine", 5, figure2);
  criterion("classifier-desk-scale", 60, classifier);
  criterion("corpus-builder", 0, corpus_builder);
  criterion("gradient-check", 0, gradient);
  criterion("table1-golden", 0, table1);
  criterion("event-replay", 0, replay);
  std::printf("%d failed\n", failures);
  return failures == 0 ? 0 : 1;
}
