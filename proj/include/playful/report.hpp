#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "playful/corpus.hpp"
#include "playful/dispatch.hpp"
#include "playful/stats.hpp"

namespace playful {

// Participant questionnaire answer, 1..7.
struct SurveyResponse {
  std::string participant_id;
  Arm arm = Arm::Control;
  std::string variable;  // satisfaction, enjoyment, recommend, ...
  int raw = 1;
};

// Expert rating of one conversation, already normalized to [0, 1].
struct ExpertScore {
  std::string conversation_id;
  std::string annotator_id;
  std::string variable;
  double score = 0.0;
  std::optional<Arm> arm;  // falls back to the session with the same id
};

// JSONL: {"participantId","arm","variable","raw"}
std::vector<SurveyResponse> parse_survey(std::string_view jsonl);
std::vector<SurveyResponse> read_survey(const std::filesystem::path& path);
// JSONL: {"conversationId","annotatorId","variable","score"[,"arm"]}
std::vector<ExpertScore> parse_expert(std::string_view jsonl);
std::vector<ExpertScore> read_expert(const std::filesystem::path& path);

struct ReportInputs {
  std::vector<Session> sessions;
  std::vector<SurveyResponse> survey;
  std::vector<ExpertScore> expert;
  // Ground truth keyed by utterance text; scores logged detector decisions.
  std::vector<LabeledExample> labels;
  VarianceModel variance = VarianceModel::Pooled;
};

struct SurveyRow {
  std::string variable;
  TestResult result;  // a = control, b = treatment
  std::size_t n_control = 0;
  std::size_t n_treatment = 0;
};

struct ArmSources {
  std::size_t sessions = 0;
  std::size_t excluded_sessions = 0;
  std::size_t utterances = 0;
  std::map<ResponseSource, double> distribution;
};

struct ExpertBar {
  std::string variable;
  Arm arm = Arm::Control;
  MeanVariance stats;  // over per-conversation mean scores
};

struct Report {
  std::map<Arm, ArmSources> sources;
  std::size_t open_sessions_ignored = 0;
  std::vector<SurveyRow> survey;
  std::optional<ConfusionCounts> detector;
  std::map<std::string, AgreementReport> agreement;  // per expert variable
  std::vector<ExpertBar> expert_bars;
};

// Sessions with fewer than four utterances are excluded, and so are the
// survey answers of their participants. When sessions are supplied, survey
// participants without a qualifying session are dropped too. Throws
// ValidationError when an arm ends up empty.
Report experiment_report(const ReportInputs& in);

std::string report_to_json(const Report& r, int indent = 2);
// Fixed-width plain text, Table-3 layout for the survey rows.
std::string format_report_table(const Report& r);

// Closed and open sessions folded from one or more event logs.
std::vector<Session> sessions_from_events(const std::vector<Event>& events);

}  // namespace playful
