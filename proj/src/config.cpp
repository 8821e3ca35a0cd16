#include "playful/config.hpp"

#include <json.hpp>

#include "detail/io.hpp"
#include "playful/error.hpp"

namespace playful {

using nlohmann::json;

AppConfig AppConfig::defaults(const std::filesystem::path& asset_dir) {
  AppConfig c;
  c.taxonomy = asset_dir / "taxonomy.v1";
  c.rules = asset_dir / "rules.v1.tsv";
  c.easy_words = asset_dir / "easy_words.v1.txt";
  c.sentiment = asset_dir / "sentiment.v1.tsv";
  c.modifiers = asset_dir / "modifiers.v1.tsv";
  c.canned = asset_dir / "canned.v1.tsv";
  c.model = asset_dir / "model.v1.bin";
  c.guidelines = asset_dir / "guidelines.txt";
  c.event_log = "playful-events.jsonl";
  return c;
}

AppConfig AppConfig::parse(std::string_view json_text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& ex) {
    throw ParseError(std::string("invalid config json: ") + ex.what());
  }
  if (!j.is_object()) throw ParseError("config must be a JSON object");
  AppConfig c = defaults(base_dir / "assets");
  auto path = [&](const char* key, std::filesystem::path& out) {
    if (!j.contains(key)) return;
    std::filesystem::path p = j[key].get<std::string>();
    out = p.is_absolute() ? p : base_dir / p;
  };
  try {
    if (j.contains("assetDir")) {
      std::filesystem::path a = j["assetDir"].get<std::string>();
      c = defaults(a.is_absolute() ? a : base_dir / a);
    }
    path("taxonomy", c.taxonomy);
    path("rules", c.rules);
    path("easyWords", c.easy_words);
    path("sentiment", c.sentiment);
    path("modifiers", c.modifiers);
    path("canned", c.canned);
    path("model", c.model);
    path("guidelines", c.guidelines);
    path("eventLog", c.event_log);
    if (!j.contains("eventLog")) c.event_log = base_dir / c.event_log;

    if (j.contains("provider")) {
      const auto& p = j["provider"];
      const auto kind = p.value("kind", std::string("baseline"));
      if (kind == "baseline") c.provider.kind = ProviderConfig::Kind::Baseline;
      else if (kind == "external") c.provider.kind = ProviderConfig::Kind::External;
      else throw ValidationError("unknown provider kind: " + kind);
      c.provider.dim = p.value("dim", c.provider.dim);
      c.provider.ngram_range.min = p.value("ngramMin", c.provider.ngram_range.min);
      c.provider.ngram_range.max = p.value("ngramMax", c.provider.ngram_range.max);
      c.provider.truncation = p.value("truncation", c.provider.truncation);
      c.provider.endpoint = p.value("endpoint", c.provider.endpoint);
      c.provider.max_attempts = p.value("maxAttempts", c.provider.max_attempts);
      c.provider.backoff = std::chrono::milliseconds(p.value("backoffMs", c.provider.backoff.count()));
      c.provider.timeout = std::chrono::milliseconds(p.value("timeoutMs", c.provider.timeout.count()));
    }
    if (j.contains("dispatch")) {
      const auto& d = j["dispatch"];
      c.dispatch.treatment_ratio = d.value("treatmentRatio", c.dispatch.treatment_ratio);
      c.dispatch.wizard_deadline_ms = d.value("wizardDeadlineMs", c.dispatch.wizard_deadline_ms);
      c.dispatch.fallback_text = d.value("fallbackText", c.dispatch.fallback_text);
      c.dispatch.session_budget_ms = d.value("sessionBudgetMs", c.dispatch.session_budget_ms);
    }
    c.host = j.value("host", c.host);
    c.port = j.value("port", c.port);
    c.seed = j.value("seed", c.seed);
    if (j.contains("operatorToken") && !j["operatorToken"].is_null())
      c.operator_token = j["operatorToken"].get<std::string>();
  } catch (const json::exception& ex) {
    throw ParseError(std::string("bad config value: ") + ex.what());
  }
  c.dispatch.seed = c.seed;
  if (c.port < 0 || c.port > 65535) throw ValidationError("port out of range");
  return c;
}

AppConfig AppConfig::load(const std::filesystem::path& path) {
  auto base = std::filesystem::absolute(path).parent_path();
  return parse(detail::read_file(path), base);
}

void AppConfig::check_assets() const {
  std::string missing;
  for (const auto* p : {&taxonomy, &rules, &easy_words, &sentiment, &modifiers, &canned, &model, &guidelines})
    if (!std::filesystem::is_regular_file(*p)) missing += " " + p->string();
  if (!missing.empty()) throw ValidationError("missing asset files:" + missing);
}

std::string config_to_json(const AppConfig& c) {
  json j{{"taxonomy", c.taxonomy.string()},
         {"rules", c.rules.string()},
         {"easyWords", c.easy_words.string()},
         {"sentiment", c.sentiment.string()},
         {"modifiers", c.modifiers.string()},
         {"canned", c.canned.string()},
         {"model", c.model.string()},
         {"guidelines", c.guidelines.string()},
         {"eventLog", c.event_log.string()},
         {"provider",
          {{"kind", c.provider.kind == ProviderConfig::Kind::Baseline ? "baseline" : "external"},
           {"dim", c.provider.dim},
           {"ngramMin", c.provider.ngram_range.min},
           {"ngramMax", c.provider.ngram_range.max},
           {"truncation", c.provider.truncation},
           {"endpoint", c.provider.endpoint},
           {"maxAttempts", c.provider.max_attempts},
           {"backoffMs", c.provider.backoff.count()},
           {"timeoutMs", c.provider.timeout.count()}}},
         {"dispatch",
          {{"treatmentRatio", c.dispatch.treatment_ratio},
           {"wizardDeadlineMs", c.dispatch.wizard_deadline_ms},
           {"fallbackText", c.dispatch.fallback_text},
           {"sessionBudgetMs", c.dispatch.session_budget_ms}}},
         {"host", c.host},
         {"port", c.port},
         {"seed", c.seed}};
  if (c.operator_token) j["operatorToken"] = *c.operator_token;
  return j.dump(2);
}

}  // namespace playful
