// playful: command-line front end.
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "playful/classifier.hpp"
#include "playful/classify.hpp"
#include "playful/config.hpp"
#include "playful/corpus.hpp"
#include "playful/error.hpp"
#include "playful/pattern.hpp"
#include "playful/report.hpp"
#include "playful/service.hpp"
#include "playful/taxonomy.hpp"

#ifndef PLAYFUL_DEFAULT_ASSET_DIR
#define PLAYFUL_DEFAULT_ASSET_DIR "assets"
#endif

namespace fs = std::filesystem;
using namespace playful;

namespace {

struct ProviderFlags {
  std::size_t dim = 256;
  std::size_t ngram_min = 2;
  std::size_t ngram_max = 4;
  std::size_t truncation = 128;
  std::string endpoint;

  void add(CLI::App* cmd) {
    cmd->add_option("--dim", dim, "Embedding dimension")->capture_default_str();
    cmd->add_option("--ngram-min", ngram_min, "Smallest character n-gram")->capture_default_str();
    cmd->add_option("--ngram-max", ngram_max, "Largest character n-gram")->capture_default_str();
    cmd->add_option("--truncation", truncation, "Characters embedded")->capture_default_str();
    cmd->add_option("--endpoint", endpoint, "External encoder URL (switches to the external provider)");
  }

  ProviderConfig config() const {
    ProviderConfig p = endpoint.empty() ? ProviderConfig::baseline(dim, {ngram_min, ngram_max})
                                        : ProviderConfig::external(endpoint, dim);
    p.truncation = truncation;
    return p;
  }
};

Lexicons load_lexicons(const fs::path& assets) {
  return Lexicons::load(assets / "easy_words.v1.txt", assets / "sentiment.v1.tsv", assets / "modifiers.v1.tsv");
}

std::string fmt(double v, int digits = 4) {
  std::ostringstream ss;
  ss.setf(std::ios::fixed);
  ss.precision(digits);
  ss << v;
  return ss.str();
}

Service* g_service = nullptr;

void on_signal(int) {
  if (g_service) g_service->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Playful utterance detection and experiment tooling"};
  app.require_subcommand(1);
  std::string asset_dir = PLAYFUL_DEFAULT_ASSET_DIR;
  app.add_option("--assets", asset_dir, "Asset directory")->capture_default_str();

  // serve
  auto* serve = app.add_subcommand("serve", "Run the experiment service");
  std::string config_path;
  int port_override = -1;
  std::string host_override;
  serve->add_option("--config", config_path, "AppConfig JSON (default: $PLAYFUL_CONFIG)");
  serve->add_option("--port", port_override, "Listen port (0 picks a free port)");
  serve->add_option("--host", host_override, "Listen address");

  // classify
  auto* classify = app.add_subcommand("classify", "Taxonomy leaves matched by the rule set");
  std::string classify_text;
  bool classify_json = false;
  classify->add_option("text", classify_text, "Utterance")->required();
  classify->add_flag("--json", classify_json, "Print matches as JSON");

  // detect / predict
  std::string detect_text;
  std::string model_path;
  ProviderFlags detect_provider;
  std::vector<CLI::App*> detect_cmds;
  for (const char* name : {"detect", "predict"}) {
    auto* cmd = app.add_subcommand(name, "Personification probability for a text");
    cmd->add_option("text", detect_text, "Utterance")->required();
    cmd->add_option("--model", model_path, "Model file (default: <assets>/model.v1.bin)");
    detect_provider.add(cmd);
    detect_cmds.push_back(cmd);
  }

  // train
  auto* train_cmd = app.add_subcommand("train", "Train the personification head");
  std::string corpus_path, out_path;
  TrainingConfig tcfg;
  ProviderFlags train_provider;
  bool quiet = false;
  train_cmd->add_option("--corpus", corpus_path, "Corpus JSONL with split tags")->required();
  train_cmd->add_option("--out", out_path, "Model output path")->required();
  train_cmd->add_option("--epochs", tcfg.epochs)->capture_default_str();
  train_cmd->add_option("--learning-rate", tcfg.learning_rate)->capture_default_str();
  train_cmd->add_option("--batch-size", tcfg.batch_size)->capture_default_str();
  train_cmd->add_option("--max-chars", tcfg.max_chars)->capture_default_str();
  train_cmd->add_option("--threshold", tcfg.threshold)->capture_default_str();
  train_cmd->add_option("--seed", tcfg.seed)->capture_default_str();
  train_cmd->add_flag("--quiet", quiet, "No per-epoch output");
  train_provider.add(train_cmd);

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "Confusion counts on a corpus split");
  std::string eval_corpus, eval_split = "test";
  std::string eval_model;
  ProviderFlags eval_provider;
  eval_cmd->add_option("--corpus", eval_corpus, "Corpus JSONL with split tags")->required();
  eval_cmd->add_option("--model", eval_model, "Model file (default: <assets>/model.v1.bin)");
  eval_cmd->add_option("--split", eval_split, "train | validation | test | all")->capture_default_str();
  eval_provider.add(eval_cmd);

  // build-corpus
  auto* build_cmd = app.add_subcommand("build-corpus", "Length-matched balanced corpus");
  std::string pos_path, pool_path, corpus_out;
  CorpusSettings csettings;
  build_cmd->add_option("--positives", pos_path, "Positive examples JSONL")->required();
  build_cmd->add_option("--pool", pool_path, "Negative pool JSONL")->required();
  build_cmd->add_option("--out", corpus_out, "Corpus output path")->required();
  build_cmd->add_option("--seed", csettings.seed)->capture_default_str();
  build_cmd->add_option("--train-fraction", csettings.train_fraction)->capture_default_str();
  build_cmd->add_option("--validation-fraction", csettings.validation_fraction)->capture_default_str();

  // report
  auto* report_cmd = app.add_subcommand("report", "Experiment statistics");
  std::string survey_path, expert_path, labels_path;
  std::vector<std::string> event_paths;
  bool report_json = false, welch = false;
  report_cmd->add_option("--survey", survey_path, "Participant questionnaire JSONL");
  report_cmd->add_option("--expert", expert_path, "Expert ratings JSONL");
  report_cmd->add_option("--events", event_paths, "Service event logs");
  report_cmd->add_option("--labels", labels_path, "Ground-truth labels JSONL for logged utterances");
  report_cmd->add_flag("--json", report_json, "Print JSON instead of the text table");
  report_cmd->add_flag("--welch", welch, "Welch variance instead of pooled");

  CLI11_PARSE(app, argc, argv);

  try {
    const fs::path assets = asset_dir;

    if (*serve) {
      if (config_path.empty())
        if (const char* env = std::getenv("PLAYFUL_CONFIG")) config_path = env;
      AppConfig cfg = config_path.empty() ? AppConfig::defaults(assets) : AppConfig::load(config_path);
      if (port_override >= 0) cfg.port = port_override;
      if (!host_override.empty()) cfg.host = host_override;
      Service service(cfg, ServiceAssets::load(cfg));
      g_service = &service;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      const int port = service.start();
      std::cerr << "listening on " << cfg.host << ":" << port << "\n";
      service.run();
      g_service = nullptr;
      return 0;
    }

    if (*classify) {
      auto graph = TaxonomyGraph::load(assets / "taxonomy.v1");
      auto rules = RuleSet::load(assets / "rules.v1.tsv", graph);
      auto matches = classify_utterance(classify_text, rules, graph);
      if (classify_json) {
        nlohmann::json out = nlohmann::json::array();
        for (const auto& m : matches)
          out.push_back({{"leaf", m.leaf_id}, {"rule", m.pattern_id}, {"span", {m.span.begin, m.span.end}}});
        std::cout << out.dump(2) << "\n";
      } else {
        for (const auto& leaf : matched_leaves(matches)) std::cout << leaf << "\n";
      }
      return 0;
    }

    for (auto* cmd : detect_cmds) {
      if (!*cmd) continue;
      auto lex = load_lexicons(assets);
      auto model = load_model_file(model_path.empty() ? assets / "model.v1.bin" : fs::path(model_path));
      auto p = predict(model, detect_text, detect_provider.config(), lex);
      std::cout << "probability " << fmt(p.probability, 6) << "\n"
                << "personifying " << (p.is_personifying ? "yes" : "no") << "\n";
      return 0;
    }

    if (*train_cmd) {
      auto corpus = read_corpus(corpus_path);
      auto lex = load_lexicons(assets);
      TrainOptions opts;
      if (!quiet)
        opts.on_epoch = [](int epoch, double loss) {
          std::cerr << "epoch " << epoch << " loss " << fmt(loss, 6) << "\n";
        };
      auto model = train(corpus, tcfg, train_provider.config(), lex, opts);
      save_model_file(model, out_path);
      auto held_out = corpus.subset(Split::Test);
      if (!held_out.empty()) {
        auto c = evaluate(model, held_out, train_provider.config(), lex);
        std::cerr << "test accuracy " << fmt(static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total()))
                  << " f1 " << (f1_score(c) ? fmt(*f1_score(c)) : std::string("undefined")) << "\n";
      }
      std::cout << out_path << "\n";
      return 0;
    }

    if (*eval_cmd) {
      auto corpus = read_corpus(eval_corpus);
      auto lex = load_lexicons(assets);
      auto model = load_model_file(eval_model.empty() ? assets / "model.v1.bin" : fs::path(eval_model));
      std::vector<LabeledExample> set =
          eval_split == "all" ? corpus.examples : corpus.subset(split_from_string(eval_split));
      auto c = evaluate(model, set, eval_provider.config(), lex);
      auto pr = precision_recall(c);
      auto show = [](const std::optional<double>& v) { return v ? fmt(*v) : std::string("undefined"); };
      std::cout << "tp " << c.tp << "\nfp " << c.fp << "\ntn " << c.tn << "\nfn " << c.fn << "\n"
                << "accuracy " << fmt(static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total())) << "\n"
                << "precision " << show(pr.precision) << "\nrecall " << show(pr.recall) << "\n"
                << "f1 " << show(f1_score(c)) << "\n";
      return 0;
    }

    if (*build_cmd) {
      auto pos = read_examples(pos_path);
      auto pool = read_examples(pool_path);
      auto corpus = build_corpus(pos, pool, csettings);
      std::ofstream out(corpus_out, std::ios::binary | std::ios::trunc);
      if (!out) throw Error("cannot write " + corpus_out);
      out << format_corpus(corpus);
      std::cout << corpus.count(Label::Positive) << " positives, " << corpus.count(Label::Negative)
                << " negatives -> " << corpus_out << "\n";
      return 0;
    }

    if (*report_cmd) {
      ReportInputs in;
      in.variance = welch ? VarianceModel::Welch : VarianceModel::Pooled;
      if (!survey_path.empty()) in.survey = read_survey(survey_path);
      if (!expert_path.empty()) in.expert = read_expert(expert_path);
      if (!labels_path.empty()) in.labels = read_examples(labels_path);
      for (const auto& p : event_paths) {
        auto sessions = sessions_from_events(read_event_log(p));
        in.sessions.insert(in.sessions.end(), sessions.begin(), sessions.end());
      }
      auto r = experiment_report(in);
      std::cout << (report_json ? report_to_json(r) + "\n" : format_report_table(r));
      return 0;
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
