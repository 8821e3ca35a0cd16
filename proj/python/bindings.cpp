#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "playful/classifier.hpp"
#include "playful/classify.hpp"
#include "playful/corpus.hpp"
#include "playful/dispatch.hpp"
#include "playful/embedding.hpp"
#include "playful/error.hpp"
#include "playful/pattern.hpp"
#include "playful/report.hpp"
#include "playful/stats.hpp"
#include "playful/taxonomy.hpp"
#include "playful/text_features.hpp"

namespace py = pybind11;
using namespace playful;

namespace {

py::dict test_result(const TestResult& r) {
  py::dict d;
  d["mean_a"] = r.mean_a;
  d["mean_b"] = r.mean_b;
  d["t"] = r.t;
  d["df"] = r.df;
  d["p"] = r.p;
  d["effect_size"] = r.effect_size;
  return d;
}

py::dict features_dict(const FeatureVector& f) {
  py::dict d;
  const auto values = f.to_array();
  for (std::size_t i = 0; i < kFeatureDim; ++i) d[kFeatureNames[i]] = values[i];
  return d;
}

ProviderConfig baseline(std::size_t dim, std::size_t ngram_min, std::size_t ngram_max, std::size_t truncation) {
  auto p = ProviderConfig::baseline(dim, {ngram_min, ngram_max});
  p.truncation = truncation;
  return p;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Playful utterance detection and experiment statistics";

  auto base = py::register_exception<Error>(m, "PlayfulError", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<ContractError>(m, "ContractError", base.ptr());
  py::register_exception<TransportError>(m, "TransportError", base.ptr());
  py::register_exception<NotFoundError>(m, "NotFoundError", base.ptr());
  py::register_exception<ConflictError>(m, "ConflictError", base.ptr());
  py::register_exception<ExpiredError>(m, "ExpiredError", base.ptr());

  // text features
  m.def("tokenize_words", &tokenize_words, py::arg("text"));
  m.def(
      "sentences",
      [](std::string_view text) {
        auto u = tokenize(text);
        std::vector<std::vector<std::string>> out;
        for (const auto& r : u.sentences)
          out.emplace_back(u.tokens.begin() + static_cast<std::ptrdiff_t>(r.begin),
                           u.tokens.begin() + static_cast<std::ptrdiff_t>(r.end));
        return out;
      },
      py::arg("text"), "Tokens grouped by sentence.");
  m.def("dale_chall_score", &dale_chall_score, py::arg("words"), py::arg("sentences"), py::arg("difficult"));

  py::class_<Lexicons, std::shared_ptr<Lexicons>>(m, "Lexicons")
      .def_static("load", &Lexicons::load, py::arg("easy_words"), py::arg("sentiment"), py::arg("modifiers"))
      .def_static("parse", &Lexicons::parse, py::arg("easy_words"), py::arg("sentiment"), py::arg("modifiers"))
      .def_property_readonly("easy_word_count", [](const Lexicons& l) { return l.easy_words.size(); });
  m.def(
      "extract_features", [](std::string_view text, const Lexicons& lex) { return features_dict(extract_features(text, lex)); },
      py::arg("text"), py::arg("lexicons"));

  // taxonomy and patterns
  py::class_<TaxonomyGraph>(m, "TaxonomyGraph")
      .def_static("load", &TaxonomyGraph::load, py::arg("path"))
      .def_static("parse", &TaxonomyGraph::parse, py::arg("document"))
      .def("roots", &TaxonomyGraph::roots)
      .def("leaves", &TaxonomyGraph::leaves)
      .def("is_leaf", &TaxonomyGraph::is_leaf, py::arg("id"))
      .def(
          "theory_ancestors",
          [](const TaxonomyGraph& g, std::string_view leaf) {
            std::vector<std::string> out;
            for (auto t : g.theory_ancestors(leaf)) out.emplace_back(to_string(t));
            return out;
          },
          py::arg("leaf_id"));

  py::class_<RuleSet>(m, "RuleSet")
      .def_static("load", &RuleSet::load, py::arg("path"), py::arg("graph"))
      .def_static("parse", &RuleSet::parse, py::arg("document"), py::arg("graph"))
      .def("__len__", &RuleSet::size)
      .def_property_readonly("category_count", &RuleSet::category_count)
      .def("without", &RuleSet::without, py::arg("rule_id"));

  m.def(
      "classify",
      [](std::string_view text, const RuleSet& rules, const TaxonomyGraph& graph) {
        std::vector<std::tuple<std::string, std::string, std::size_t, std::size_t>> out;
        for (const auto& x : classify_utterance(text, rules, graph))
          out.emplace_back(x.leaf_id, x.pattern_id, x.span.begin, x.span.end);
        return out;
      },
      py::arg("text"), py::arg("rules"), py::arg("graph"), "(leaf, rule, begin, end) for every rule that fires.");

  m.def(
      "render_pattern", [](std::string_view s) { return render_pattern(parse_pattern(s)); }, py::arg("pattern"),
      "Canonical form of a pattern.");
  m.def(
      "match_pattern",
      [](std::string_view pattern, const std::vector<std::string>& tokens, bool anchored) -> std::optional<std::pair<std::size_t, std::size_t>> {
        auto r = match_pattern(parse_pattern(pattern), tokens, anchored);
        if (!r) return std::nullopt;
        return std::pair{r->begin, r->end};
      },
      py::arg("pattern"), py::arg("tokens"), py::arg("anchored") = false);

  // embedding and classifier
  m.def(
      "embed",
      [](std::string_view text, std::size_t dim, std::size_t ngram_min, std::size_t ngram_max, std::size_t truncation) {
        return embed(text, baseline(dim, ngram_min, ngram_max, truncation)).values;
      },
      py::arg("text"), py::arg("dim") = 256, py::arg("ngram_min") = 2, py::arg("ngram_max") = 4,
      py::arg("truncation") = 128);
  m.def("fnv1a64", &fnv1a64, py::arg("data"));

  py::class_<Model, std::shared_ptr<Model>>(m, "Model")
      .def_static("load", &load_model_file, py::arg("path"))
      .def("save", [](const Model& model, const std::filesystem::path& p) { save_model_file(model, p); }, py::arg("path"))
      .def("to_bytes", [](const Model& model) { return py::bytes(save_model(model)); })
      .def_static("from_bytes", [](const py::bytes& b) { return load_model(std::string(b)); }, py::arg("data"))
      .def_readonly("provider_id", &Model::provider_id)
      .def_readonly("bias", &Model::bias)
      .def_readonly("weights", &Model::weights)
      .def_readonly("trained_at_ms", &Model::trained_at_ms)
      .def("__eq__", [](const Model& a, const Model& b) { return a == b; });

  m.def(
      "train",
      [](const std::filesystem::path& corpus, const Lexicons& lex, int epochs, double learning_rate,
         std::size_t batch_size, std::uint64_t seed, std::size_t dim, std::size_t ngram_min, std::size_t ngram_max,
         std::optional<std::int64_t> trained_at_ms) {
        TrainingConfig cfg;
        cfg.epochs = epochs;
        cfg.learning_rate = learning_rate;
        cfg.batch_size = batch_size;
        cfg.seed = seed;
        TrainOptions opts;
        opts.trained_at_ms = trained_at_ms;
        py::gil_scoped_release release;
        return train(read_corpus(corpus), cfg, baseline(dim, ngram_min, ngram_max, 128), lex, opts);
      },
      py::arg("corpus"), py::arg("lexicons"), py::arg("epochs") = 3, py::arg("learning_rate") = 5e-5,
      py::arg("batch_size") = 32, py::arg("seed") = 0, py::arg("dim") = 256, py::arg("ngram_min") = 2,
      py::arg("ngram_max") = 4, py::arg("trained_at_ms") = py::none());

  m.def(
      "predict",
      [](const Model& model, std::string_view text, const Lexicons& lex, std::size_t dim, std::size_t ngram_min,
         std::size_t ngram_max) {
        auto p = predict(model, text, baseline(dim, ngram_min, ngram_max, 128), lex);
        return std::pair{p.probability, p.is_personifying};
      },
      py::arg("model"), py::arg("text"), py::arg("lexicons"), py::arg("dim") = 256, py::arg("ngram_min") = 2,
      py::arg("ngram_max") = 4, "(probability, is_personifying)");

  m.def(
      "evaluate",
      [](const Model& model, const std::filesystem::path& corpus, const std::string& split, const Lexicons& lex,
         std::size_t dim, std::size_t ngram_min, std::size_t ngram_max) {
        auto c = read_corpus(corpus);
        auto set = split == "all" ? c.examples : c.subset(split_from_string(split));
        auto counts = evaluate(model, set, baseline(dim, ngram_min, ngram_max, 128), lex);
        py::dict d;
        d["tp"] = counts.tp;
        d["fp"] = counts.fp;
        d["tn"] = counts.tn;
        d["fn"] = counts.fn;
        return d;
      },
      py::arg("model"), py::arg("corpus"), py::arg("split"), py::arg("lexicons"), py::arg("dim") = 256,
      py::arg("ngram_min") = 2, py::arg("ngram_max") = 4);

  // statistics
  m.def(
      "precision_recall",
      [](std::uint64_t tp, std::uint64_t fp, std::uint64_t tn, std::uint64_t fn) {
        auto pr = precision_recall({tp, fp, tn, fn});
        return std::pair{pr.precision, pr.recall};
      },
      py::arg("tp"), py::arg("fp"), py::arg("tn") = 0, py::arg("fn") = 0, "None marks an undefined ratio.");
  m.def("normalize_likert", &normalize_likert, py::arg("raw"));
  m.def(
      "t_test",
      [](const std::vector<double>& a, const std::vector<double>& b, bool welch) {
        return test_result(students_t_test(a, b, welch ? VarianceModel::Welch : VarianceModel::Pooled));
      },
      py::arg("a"), py::arg("b"), py::arg("welch") = false);
  m.def("student_t_two_sided_p", &student_t_two_sided_p, py::arg("t"), py::arg("df"));

  // experiment
  m.def(
      "assign_arm",
      [](std::string_view participant, double ratio, std::uint64_t seed) {
        return std::string(to_string(assign_arm(participant, ratio, seed)));
      },
      py::arg("participant_id"), py::arg("ratio") = 0.5, py::arg("seed") = 0);
  m.def(
      "experiment_report",
      [](const std::string& survey, const std::string& expert, const std::vector<std::string>& event_logs, bool welch) {
        ReportInputs in;
        in.variance = welch ? VarianceModel::Welch : VarianceModel::Pooled;
        in.survey = parse_survey(survey);
        in.expert = parse_expert(expert);
        for (const auto& log : event_logs) {
          auto s = sessions_from_events(parse_event_log(log));
          in.sessions.insert(in.sessions.end(), s.begin(), s.end());
        }
        return report_to_json(experiment_report(in));
      },
      py::arg("survey") = "", py::arg("expert") = "", py::arg("event_logs") = std::vector<std::string>{},
      py::arg("welch") = false, "Report JSON from JSONL survey, expert ratings and event logs.");
}
