#include <doctest.h>

#include <fstream>
#include <json.hpp>

#include "helpers.hpp"
#include "playful/config.hpp"
#include "playful/error.hpp"

using namespace playful;

TEST_CASE("defaults point at the asset directory") {
  auto c = AppConfig::defaults(testing::asset(""));
  CHECK(c.rules.filename() == "rules.v1.tsv");
  CHECK(c.port == 8080);
  CHECK(c.dispatch.wizard_deadline_ms == 150'000);
  CHECK(c.dispatch.session_budget_ms == 1'800'000);
  CHECK(c.dispatch.treatment_ratio == 0.5);
  CHECK(!c.operator_token);
  CHECK_NOTHROW(c.check_assets());
}

TEST_CASE("parse resolves relative paths and overrides fields") {
  auto c = AppConfig::parse(R"({
    "assetDir": "assets", "eventLog": "logs/events.jsonl", "model": "/abs/model.bin",
    "provider": {"kind": "baseline", "dim": 128, "ngramMin": 1, "ngramMax": 3},
    "dispatch": {"treatmentRatio": 0.25, "wizardDeadlineMs": 90000, "fallbackText": "Hmm."},
    "port": 0, "seed": 11, "operatorToken": "secret"})",
                            "/srv/playful");
  CHECK(c.taxonomy == std::filesystem::path("/srv/playful/assets/taxonomy.v1"));
  CHECK(c.event_log == std::filesystem::path("/srv/playful/logs/events.jsonl"));
  CHECK(c.model == std::filesystem::path("/abs/model.bin"));
  CHECK(c.provider.dim == 128);
  CHECK(c.provider.ngram_range == NgramRange{1, 3});
  CHECK(c.dispatch.treatment_ratio == 0.25);
  CHECK(c.dispatch.wizard_deadline_ms == 90'000);
  CHECK(c.dispatch.fallback_text == "Hmm.");
  CHECK(c.dispatch.seed == 11);
  CHECK(c.port == 0);
  CHECK(c.operator_token == "secret");
}

TEST_CASE("config JSON round trip") {
  auto c = AppConfig::parse(R"({"port": 9000, "operatorToken": "t", "provider": {"dim": 64}})", "/x");
  auto back = AppConfig::parse(config_to_json(c), "/elsewhere");
  CHECK(back.rules == c.rules);
  CHECK(back.event_log == c.event_log);
  CHECK(back.port == 9000);
  CHECK(back.provider.dim == 64);
  CHECK(back.operator_token == "t");
}

TEST_CASE("bad configs") {
  CHECK_THROWS_AS(AppConfig::parse("[1,2]", "/x"), ParseError);
  CHECK_THROWS_AS(AppConfig::parse("{", "/x"), ParseError);
  CHECK_THROWS_AS(AppConfig::parse(R"({"port": "eighty"})", "/x"), ParseError);
  CHECK_THROWS_AS(AppConfig::parse(R"({"port": 70000})", "/x"), ValidationError);
  CHECK_THROWS_AS(AppConfig::parse(R"({"provider": {"kind": "quantum"}})", "/x"), ValidationError);
  auto missing = AppConfig::defaults("/nonexistent/assets");
  CHECK_THROWS_AS(missing.check_assets(), ValidationError);
}

TEST_CASE("shipped example config loads") {
  auto c = AppConfig::load(testing::asset("config.example.json"));
  CHECK_NOTHROW(c.check_assets());
  CHECK(c.seed == 7);
}
