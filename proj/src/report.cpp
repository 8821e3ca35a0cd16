#include "playful/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include <json.hpp>

#include "detail/io.hpp"
#include "playful/error.hpp"

namespace playful {

using nlohmann::json;

namespace {

json parse_line(std::string_view text, std::size_t line) {
  try {
    return json::parse(text);
  } catch (const json::exception& ex) {
    throw ParseError(std::string("invalid json: ") + ex.what(), line);
  }
}

template <class Fn>
auto with_line(std::size_t line, Fn&& fn) {
  try {
    return fn();
  } catch (const json::exception& ex) {
    throw ParseError(std::string("malformed record: ") + ex.what(), line);
  } catch (const ContractError& ex) {
    throw ValidationError(std::string(ex.what()) + " (line " + std::to_string(line) + ")");
  }
}

const std::vector<std::string> kSurveyOrder{"satisfaction", "enjoyment", "recommend"};

std::vector<std::string> ordered_variables(const std::set<std::string>& seen) {
  std::vector<std::string> out;
  for (const auto& v : kSurveyOrder)
    if (seen.count(v)) out.push_back(v);
  for (const auto& v : seen)
    if (std::find(kSurveyOrder.begin(), kSurveyOrder.end(), v) == kSurveyOrder.end()) out.push_back(v);
  return out;
}

}  // namespace

std::vector<SurveyResponse> parse_survey(std::string_view jsonl) {
  std::vector<SurveyResponse> out;
  std::set<std::pair<std::string, std::string>> seen;
  detail::for_each_line(jsonl, [&](std::size_t line, std::string_view text) {
    auto j = parse_line(text, line);
    out.push_back(with_line(line, [&] {
      SurveyResponse r;
      r.participant_id = j.at("participantId").get<std::string>();
      r.arm = arm_from_string(j.at("arm").get<std::string>());
      r.variable = j.at("variable").get<std::string>();
      r.raw = j.at("raw").get<int>();
      normalize_likert(r.raw);
      return r;
    }));
    if (!seen.emplace(out.back().participant_id, out.back().variable).second)
      throw ValidationError("duplicate answer for participant " + out.back().participant_id + " variable " +
                            out.back().variable + " (line " + std::to_string(line) + ")");
  });
  return out;
}

std::vector<SurveyResponse> read_survey(const std::filesystem::path& path) {
  return parse_survey(detail::read_file(path));
}

std::vector<ExpertScore> parse_expert(std::string_view jsonl) {
  std::vector<ExpertScore> out;
  detail::for_each_line(jsonl, [&](std::size_t line, std::string_view text) {
    auto j = parse_line(text, line);
    out.push_back(with_line(line, [&] {
      ExpertScore s;
      s.conversation_id = j.at("conversationId").get<std::string>();
      s.annotator_id = j.at("annotatorId").get<std::string>();
      s.variable = j.at("variable").get<std::string>();
      s.score = j.at("score").get<double>();
      if (!(s.score >= 0.0 && s.score <= 1.0)) throw ContractError("expert score outside [0, 1]");
      if (j.contains("arm")) s.arm = arm_from_string(j["arm"].get<std::string>());
      return s;
    }));
  });
  return out;
}

std::vector<ExpertScore> read_expert(const std::filesystem::path& path) {
  return parse_expert(detail::read_file(path));
}

std::vector<Session> sessions_from_events(const std::vector<Event>& events) {
  auto state = ExperimentState::replay(events);
  std::vector<Session> out;
  for (auto& [id, s] : state.sessions) out.push_back(std::move(s));
  return out;
}

Report experiment_report(const ReportInputs& in) {
  Report r;

  // Sessions and exclusions.
  std::map<std::string, Arm> session_arm;
  std::map<std::string, Arm> qualified_participants;
  std::map<Arm, std::map<ResponseSource, std::size_t>> source_counts;
  std::map<Arm, std::size_t> arm_sessions_seen;
  for (const auto& s : in.sessions) {
    session_arm[s.session_id] = s.arm;
    if (!s.closed) {
      ++r.open_sessions_ignored;
      continue;
    }
    ++arm_sessions_seen[s.arm];
    auto& arm = r.sources[s.arm];
    if (summarize(s).excluded) {
      ++arm.excluded_sessions;
      continue;
    }
    ++arm.sessions;
    arm.utterances += s.log.size();
    for (const auto& e : s.log) ++source_counts[s.arm][e.decision.source];
    auto [it, inserted] = qualified_participants.emplace(s.participant_id, s.arm);
    if (!inserted && it->second != s.arm)
      throw ValidationError("participant " + s.participant_id + " appears in both arms");
  }
  for (const auto& [arm, seen] : arm_sessions_seen)
    if (seen > 0 && r.sources[arm].sessions == 0)
      throw ValidationError(std::string("empty arm after exclusions: ") + std::string(to_string(arm)));
  for (auto& [arm, src] : r.sources)
    for (const auto& [source, n] : source_counts[arm])
      src.distribution[source] = static_cast<double>(n) / static_cast<double>(src.utterances);

  // Survey rows.
  if (!in.survey.empty()) {
    const bool filter = !in.sessions.empty();
    std::set<std::string> variables;
    std::map<std::string, std::map<Arm, std::vector<double>>> groups;
    for (const auto& resp : in.survey) {
      variables.insert(resp.variable);
      if (filter) {
        auto it = qualified_participants.find(resp.participant_id);
        if (it == qualified_participants.end()) continue;
        if (it->second != resp.arm)
          throw ValidationError("participant " + resp.participant_id + " survey arm disagrees with session arm");
      }
      groups[resp.variable][resp.arm].push_back(normalize_likert(resp.raw));
    }
    for (const auto& var : ordered_variables(variables)) {
      auto& g = groups[var];
      for (Arm arm : {Arm::Control, Arm::Treatment})
        if (g[arm].empty())
          throw ValidationError("empty arm after exclusions: " + std::string(to_string(arm)) + " for " + var);
      SurveyRow row;
      row.variable = var;
      row.n_control = g[Arm::Control].size();
      row.n_treatment = g[Arm::Treatment].size();
      row.result = students_t_test(g[Arm::Control], g[Arm::Treatment], in.variance);
      r.survey.push_back(row);
    }
  }

  // Detector counts against labeled utterances.
  if (!in.labels.empty()) {
    std::map<std::string, Label> truth;
    for (const auto& ex : in.labels) truth[ex.text] = ex.label;
    ConfusionCounts c;
    for (const auto& s : in.sessions) {
      for (const auto& e : s.log) {
        if (!e.decision.detected) continue;
        auto it = truth.find(e.utterance);
        if (it == truth.end()) continue;
        const bool predicted = *e.decision.detected;
        const bool actual = it->second == Label::Positive;
        if (predicted && actual) ++c.tp;
        else if (predicted) ++c.fp;
        else if (actual) ++c.fn;
        else ++c.tn;
      }
    }
    r.detector = c;
  }

  // Expert ratings.
  std::map<std::string, std::map<std::string, std::vector<std::pair<std::string, double>>>> by_var;
  std::map<std::string, std::optional<Arm>> conv_arm;
  for (const auto& s : in.expert) {
    by_var[s.variable][s.conversation_id].emplace_back(s.annotator_id, s.score);
    auto& arm = conv_arm[s.conversation_id];
    if (s.arm) arm = s.arm;
    else if (!arm) {
      auto it = session_arm.find(s.conversation_id);
      if (it != session_arm.end()) arm = it->second;
    }
  }
  for (const auto& [var, items] : by_var) {
    try {
      r.agreement[var] = inter_rater_agreement(items);
    } catch (const ContractError&) {
      // every conversation had a single annotator
    }
    std::map<Arm, std::vector<double>> per_arm;
    for (const auto& [conv, scores] : items) {
      const auto& arm = conv_arm[conv];
      if (!arm) continue;
      double sum = 0.0;
      for (const auto& [who, v] : scores) sum += v;
      per_arm[*arm].push_back(sum / static_cast<double>(scores.size()));
    }
    for (const auto& [arm, vals] : per_arm) r.expert_bars.push_back({var, arm, mean_variance(vals)});
  }
  return r;
}

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json("undefined"); }

}  // namespace

std::string report_to_json(const Report& r, int indent) {
  json j;
  j["sources"] = json::object();
  for (const auto& [arm, src] : r.sources) {
    json dist = json::object();
    for (const auto& [s, f] : src.distribution) dist[std::string(to_string(s))] = f;
    j["sources"][std::string(to_string(arm))] = {{"sessions", src.sessions},
                                                  {"excludedSessions", src.excluded_sessions},
                                                  {"utterances", src.utterances},
                                                  {"distribution", dist}};
  }
  j["openSessionsIgnored"] = r.open_sessions_ignored;
  j["survey"] = json::array();
  for (const auto& row : r.survey) {
    j["survey"].push_back({{"variable", row.variable},
                           {"controlMean", row.result.mean_a},
                           {"treatmentMean", row.result.mean_b},
                           {"effectSize", row.result.effect_size},
                           {"t", row.result.t},
                           {"df", row.result.df},
                           {"p", row.result.p},
                           {"nControl", row.n_control},
                           {"nTreatment", row.n_treatment}});
  }
  if (r.detector) {
    const auto pr = precision_recall(*r.detector);
    j["detector"] = {{"tp", r.detector->tp},
                     {"fp", r.detector->fp},
                     {"tn", r.detector->tn},
                     {"fn", r.detector->fn},
                     {"precision", optional_number(pr.precision)},
                     {"recall", optional_number(pr.recall)}};
  }
  j["agreement"] = json::object();
  for (const auto& [var, a] : r.agreement)
    j["agreement"][var] = {{"meanAbsDiff", a.mean_abs_diff},
                           {"itemsCounted", a.items_counted},
                           {"singleAnnotatorItems", a.single_annotator_items}};
  j["expert"] = json::array();
  for (const auto& b : r.expert_bars)
    j["expert"].push_back({{"variable", b.variable},
                           {"arm", to_string(b.arm)},
                           {"mean", b.stats.mean},
                           {"variance", b.stats.variance},
                           {"n", b.stats.n}});
  return j.dump(indent);
}

std::string format_report_table(const Report& r) {
  std::string out;
  char buf[256];
  if (!r.survey.empty()) {
    out += "Participant questionnaire (normalized 0-1 average)\n";
    std::snprintf(buf, sizeof buf, "%-16s %8s %10s %8s %8s\n", "variable", "control", "treatment", "effect",
                  "p");
    out += buf;
    for (const auto& row : r.survey) {
      std::snprintf(buf, sizeof buf, "%-16s %8.2f %10.2f %8.2f %8.3f\n", row.variable.c_str(), row.result.mean_a,
                    row.result.mean_b, row.result.effect_size, row.result.p);
      out += buf;
    }
    out += '\n';
  }
  if (!r.sources.empty()) {
    out += "Answer sources\n";
    for (const auto& [arm, src] : r.sources) {
      std::snprintf(buf, sizeof buf, "%-10s sessions=%zu excluded=%zu utterances=%zu", std::string(to_string(arm)).c_str(),
                    src.sessions, src.excluded_sessions, src.utterances);
      out += buf;
      for (const auto& [s, f] : src.distribution) {
        std::snprintf(buf, sizeof buf, " %s=%.0f%%", std::string(to_string(s)).c_str(), f * 100.0);
        out += buf;
      }
      out += '\n';
    }
    out += '\n';
  }
  if (r.detector) {
    const auto pr = precision_recall(*r.detector);
    auto fmt = [](const std::optional<double>& v) {
      if (!v) return std::string("undefined");
      char b[32];
      std::snprintf(b, sizeof b, "%.3f", *v);
      return std::string(b);
    };
    std::snprintf(buf, sizeof buf, "Detector tp=%llu fp=%llu tn=%llu fn=%llu precision=%s recall=%s\n\n",
                  static_cast<unsigned long long>(r.detector->tp), static_cast<unsigned long long>(r.detector->fp),
                  static_cast<unsigned long long>(r.detector->tn), static_cast<unsigned long long>(r.detector->fn),
                  fmt(pr.precision).c_str(), fmt(pr.recall).c_str());
    out += buf;
  }
  if (!r.expert_bars.empty() || !r.agreement.empty()) {
    out += "Expert ratings (normalized mean / variance)\n";
    for (const auto& b : r.expert_bars) {
      std::snprintf(buf, sizeof buf, "%-16s %-10s %6.3f %8.4f n=%zu\n", b.variable.c_str(),
                    std::string(to_string(b.arm)).c_str(), b.stats.mean, b.stats.variance, b.stats.n);
      out += buf;
    }
    for (const auto& [var, a] : r.agreement) {
      std::snprintf(buf, sizeof buf, "agreement %-16s %.3f over %zu items (%zu single-annotator)\n", var.c_str(),
                    a.mean_abs_diff, a.items_counted, a.single_annotator_items);
      out += buf;
    }
  }
  return out;
}

}  // namespace playful
