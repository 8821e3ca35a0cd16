#include <doctest.h>

#include <cmath>

#include "gradient_check.hpp"
#include "helpers.hpp"
#include "playful/classifier.hpp"
#include "playful/error.hpp"

using namespace playful;

namespace {

Corpus small_corpus() {
  std::vector<LabeledExample> p, pool;
  const char* people[] = {"what do you do for fun", "are you afraid of the dark", "do you have a family",
                          "what is your favorite food", "do you ever get lonely", "where did you grow up",
                          "do you like to dance", "what makes you happy"};
  const char* tasks[] = {"set a timer for ten minutes", "play the news", "turn off the kitchen lights",
                         "what is the weather tomorrow", "add milk to my list", "call mom",
                         "set an alarm for six", "play some jazz music", "remind me to water plants",
                         "how long to boil eggs", "volume up", "stop the music"};
  for (int r = 0; r < 4; ++r)
    for (auto* s : people) p.push_back({std::string(s) + (r ? " " + std::to_string(r) : ""), Label::Positive,
                                        Source::Synthetic});
  for (int r = 0; r < 4; ++r)
    for (auto* s : tasks) pool.push_back({std::string(s) + (r ? " " + std::to_string(r) : ""), Label::Negative,
                                          Source::Synthetic});
  return build_corpus(p, pool, {.seed = 2, .train_fraction = 0.75, .validation_fraction = 0.0});
}

ProviderConfig small_provider() { return ProviderConfig::baseline(64); }

TrainingConfig small_config() {
  TrainingConfig cfg;
  cfg.batch_size = 8;
  cfg.seed = 3;
  return cfg;
}

}  // namespace

TEST_CASE("sigmoid and score") {
  CHECK(head::sigmoid(0.0) == 0.5);
  CHECK(head::sigmoid(800.0) == doctest::Approx(1.0));
  CHECK(head::sigmoid(-800.0) == doctest::Approx(0.0));
  CHECK(std::isfinite(head::sigmoid(-800.0)));
  std::vector<double> w{1.0, -2.0}, x{3.0, 0.5};
  CHECK(head::score(w, 0.25, x) == doctest::Approx(2.25));
}

TEST_CASE("loss at zero weights is log 2") {
  std::vector<double> w(3, 0.0);
  std::vector<std::vector<double>> xs{{1, 2, 3}, {0, -1, 4}};
  std::vector<int> ys{1, 0};
  auto lg = head::loss_and_gradient(w, 0.0, xs, ys);
  CHECK(lg.loss == doctest::Approx(std::log(2.0)));
  // d/dw = mean((p - y) x) with p = 0.5.
  CHECK(lg.d_weights[0] == doctest::Approx((-0.5 * 1 + 0.5 * 0) / 2));
  CHECK(lg.d_weights[2] == doctest::Approx((-0.5 * 3 + 0.5 * 4) / 2));
  CHECK(lg.d_bias == doctest::Approx(0.0));
}

TEST_CASE("analytic gradient matches central differences") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 100; ++i) CHECK(testing::max_relative_gradient_error(testing::random_instance(rng)) <= 1e-5);
}

TEST_CASE("training is bit-identical for a fixed seed and learns the toy task") {
  const auto corpus = small_corpus();
  const auto& lex = testing::shipped_lexicons();
  TrainOptions opts;
  opts.trained_at_ms = 1;
  auto cfg = small_config();
  cfg.epochs = 30;
  cfg.learning_rate = 1e-3;
  auto a = train(corpus, cfg, small_provider(), lex, opts);
  auto b = train(corpus, cfg, small_provider(), lex, opts);
  CHECK(save_model(a) == save_model(b));
  CHECK(a.provider_id == "baseline-ngram/v1-64");
  CHECK(a.weights.size() == 64 + kFeatureDim);
  CHECK(a.embedding_means.size() == 64);

  auto held_out = corpus.subset(Split::Test);
  REQUIRE(!held_out.empty());
  auto c = evaluate(a, held_out, small_provider(), lex);
  CHECK(c.total() == held_out.size());
  CHECK(static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total()) >= 0.8);

  cfg.seed = 4;
  CHECK(save_model(train(corpus, cfg, small_provider(), lex, opts)) != save_model(a));
}

TEST_CASE("epoch callback reports every epoch") {
  std::vector<int> epochs;
  TrainOptions opts;
  opts.on_epoch = [&](int e, double loss) {
    epochs.push_back(e);
    CHECK(std::isfinite(loss));
  };
  train(small_corpus(), small_config(), small_provider(), testing::shipped_lexicons(), opts);
  CHECK(epochs == std::vector<int>{1, 2, 3});
}

TEST_CASE("model file round trip and integrity checks") {
  TrainOptions opts;
  opts.trained_at_ms = 1234;
  auto m = train(small_corpus(), small_config(), small_provider(), testing::shipped_lexicons(), opts);
  auto bytes = save_model(m);
  CHECK(load_model(bytes) == m);

  auto flipped = bytes;
  flipped[bytes.size() / 2] ^= 0x01;
  CHECK_THROWS_AS(load_model(flipped), ValidationError);
  CHECK_THROWS_AS(load_model(bytes.substr(0, bytes.size() / 2)), Error);
  CHECK_THROWS_AS(load_model(""), Error);

  testing::TempDir dir;
  save_model_file(m, dir.path() / "m.bin");
  CHECK(load_model_file(dir.path() / "m.bin") == m);
  CHECK_THROWS_AS(load_model_file(dir.path() / "missing.bin"), Error);
}

TEST_CASE("prediction guards") {
  TrainOptions opts;
  opts.trained_at_ms = 0;
  auto m = train(small_corpus(), small_config(), small_provider(), testing::shipped_lexicons(), opts);
  const auto& lex = testing::shipped_lexicons();
  CHECK_THROWS_AS(predict(m, "hello", ProviderConfig::baseline(128), lex), ContractError);
  auto p = predict(m, "", small_provider(), lex);
  CHECK(std::isfinite(p.probability));
  CHECK(p.threshold == 0.5);
  CHECK(p.is_personifying == (p.probability >= 0.5));
  std::vector<LabeledExample> none;
  CHECK_THROWS_AS(evaluate(m, none, small_provider(), lex), ContractError);
}

TEST_CASE("training config validation") {
  TrainingConfig bad;
  bad.epochs = 0;
  CHECK_THROWS_AS(bad.validate(), ContractError);
  bad = {};
  bad.learning_rate = -1;
  CHECK_THROWS_AS(bad.validate(), ContractError);
  bad = {};
  bad.batch_size = 0;
  CHECK_THROWS_AS(bad.validate(), ContractError);
  bad = {};
  bad.threshold = 1.5;
  CHECK_THROWS_AS(bad.validate(), ContractError);
  CHECK_NOTHROW(TrainingConfig{}.validate());
}

TEST_CASE("shipped model predicts with the default provider") {
  auto m = load_model_file(testing::asset("model.v1.bin"));
  const auto& lex = testing::shipped_lexicons();
  CHECK(m.provider_id == provider_info(ProviderConfig::baseline()).provider_id);
  CHECK(predict(m, "what do you do for fun", ProviderConfig::baseline(), lex).is_personifying);
  CHECK(!predict(m, "set a timer for ten minutes", ProviderConfig::baseline(), lex).is_personifying);
}
