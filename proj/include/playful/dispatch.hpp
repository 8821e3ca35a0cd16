#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "playful/classifier.hpp"

namespace playful {

// ---- time ----

class Clock {
 public:
  virtual ~Clock() = default;
  // Milliseconds since the Unix epoch.
  virtual std::int64_t now_ms() const = 0;
};

class SystemClock : public Clock {
 public:
  std::int64_t now_ms() const override;
};

// Test clock; only moves when told to.
class ManualClock : public Clock {
 public:
  explicit ManualClock(std::int64_t start_ms = 0) : now_(start_ms) {}
  std::int64_t now_ms() const override { return now_.load(); }
  void set(std::int64_t ms) { now_.store(ms); }
  void advance(std::int64_t ms) { now_.fetch_add(ms); }

 private:
  std::atomic<std::int64_t> now_;
};

// ---- domain types ----

enum class Arm { Control, Treatment };
enum class ResponseSource { Automated, Canned, Wizard, Fallback };
enum class TaskState { Pending, Claimed, Answered, Expired };

std::string_view to_string(Arm a);
std::string_view to_string(ResponseSource s);
std::string_view to_string(TaskState s);
Arm arm_from_string(std::string_view s);
ResponseSource response_source_from_string(std::string_view s);
TaskState task_state_from_string(std::string_view s);

// Deterministic arm for a participant: hash of (seed, participant) compared
// against `treatment_ratio`. Throws ContractError unless 0 < ratio < 1.
Arm assign_arm(std::string_view participant_id, double treatment_ratio, std::uint64_t seed);

struct ResponseDecision {
  ResponseSource source = ResponseSource::Automated;
  std::string response_text;
  std::optional<double> detector_probability;
  std::optional<bool> detected;
  std::int64_t latency_ms = 0;
  std::optional<std::string> task_id;  // set for wizard and deadline fallbacks
  std::optional<std::string> error;    // adapter failure that forced a fallback
  bool operator==(const ResponseDecision&) const = default;
};

struct LogEntry {
  std::string utterance;
  ResponseDecision decision;
  std::int64_t received_at_ms = 0;
  std::int64_t decided_at_ms = 0;
  bool operator==(const LogEntry&) const = default;
};

struct InFlight {
  std::string utterance;
  std::int64_t received_at_ms = 0;
  std::optional<double> detector_probability;
  std::optional<bool> detected;
  std::optional<std::string> task_id;
  bool operator==(const InFlight&) const = default;
};

struct Session {
  std::string session_id;
  std::string participant_id;
  Arm arm = Arm::Control;
  std::int64_t started_at_ms = 0;
  std::int64_t duration_budget_ms = 30 * 60 * 1000;
  bool closed = false;
  std::vector<LogEntry> log;
  std::optional<InFlight> in_flight;

  std::size_t utterance_count() const { return log.size(); }
  bool operator==(const Session&) const = default;
};

struct WizardTask {
  std::string task_id;
  std::string session_id;
  std::string utterance;
  std::int64_t enqueued_at_ms = 0;
  std::int64_t deadline_ms = 0;
  TaskState state = TaskState::Pending;
  std::optional<std::string> answer;
  std::optional<std::string> operator_id;
  // Answers that arrived after expiry are kept but never delivered.
  std::vector<std::string> late_answers;
  bool operator==(const WizardTask&) const = default;
};

// ---- canned responses ----

// Curated replies keyed by normalized utterance: tokenized, lowercase,
// punctuation removed, leading wake words stripped.
class CannedStore {
 public:
  static const std::vector<std::string>& default_wake_words();

  explicit CannedStore(std::vector<std::string> wake_words = default_wake_words());

  // `key<TAB>response` lines. Throws ValidationError on keys that collide
  // after normalization.
  static CannedStore parse(std::string_view document, std::vector<std::string> wake_words = default_wake_words());
  static CannedStore load(const std::filesystem::path& path,
                          std::vector<std::string> wake_words = default_wake_words());

  void add(std::string_view key, std::string response);
  std::string normalize(std::string_view utterance) const;
  std::optional<std::string> lookup(std::string_view utterance) const;
  // Keys closest to `utterance` by token overlap, best first.
  std::vector<std::pair<std::string, std::string>> nearest(std::string_view utterance, std::size_t k) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<std::string> wake_words_;
  std::map<std::string, std::string> entries_;
};

// ---- adapters ----

class BaseAssistant {
 public:
  virtual ~BaseAssistant() = default;
  virtual std::string answer(std::string_view utterance) = 0;
};

// Stand-in for the commercial assistant: always the same configured answer.
class StubAssistant : public BaseAssistant {
 public:
  explicit StubAssistant(std::string default_answer = "Sorry, I don't know that.")
      : default_answer_(std::move(default_answer)) {}
  std::string answer(std::string_view) override { return default_answer_; }

 private:
  std::string default_answer_;
};

class Detector {
 public:
  virtual ~Detector() = default;
  virtual Prediction detect(std::string_view utterance) = 0;
};

class ModelDetector : public Detector {
 public:
  ModelDetector(std::shared_ptr<const Model> model, ProviderConfig provider, std::shared_ptr<const Lexicons> lex);
  Prediction detect(std::string_view utterance) override;

 private:
  std::shared_ptr<const Model> model_;
  ProviderConfig provider_;
  std::shared_ptr<const Lexicons> lex_;
};

// ---- events ----

namespace event {

struct SessionCreated {
  std::string session_id, participant_id;
  Arm arm;
  std::int64_t budget_ms;
};
struct UtteranceReceived {
  std::string session_id, text;
};
struct Detection {
  std::string session_id;
  double probability;
  bool detected;
};
struct TaskEnqueued {
  std::string task_id, session_id, utterance;
  std::int64_t deadline_ms;
};
struct TaskClaimed {
  std::string task_id, operator_id;
};
struct TaskAnswered {
  std::string task_id, operator_id, answer;
};
struct TaskExpired {
  std::string task_id;
};
struct LateAnswer {
  std::string task_id, operator_id, answer;
};
struct DecisionMade {
  std::string session_id;
  ResponseDecision decision;
};
struct SessionClosed {
  std::string session_id;
};

}  // namespace event

using EventBody = std::variant<event::SessionCreated, event::UtteranceReceived, event::Detection,
                               event::TaskEnqueued, event::TaskClaimed, event::TaskAnswered, event::TaskExpired,
                               event::LateAnswer, event::DecisionMade, event::SessionClosed>;

struct Event {
  std::uint64_t seq = 0;
  std::int64_t at_ms = 0;
  EventBody body;
};

inline constexpr int kEventSchemaVersion = 1;

// One JSON object per line: {"v":1,"seq":..,"t":..,"type":..,...}.
std::string format_event(const Event& e);
Event parse_event(std::string_view line);
std::vector<Event> parse_event_log(std::string_view jsonl);
std::vector<Event> read_event_log(const std::filesystem::path& path);

// Everything the dispatcher knows, rebuilt by folding events in order.
struct ExperimentState {
  std::map<std::string, Session> sessions;
  std::map<std::string, WizardTask> tasks;
  std::uint64_t next_seq = 1;
  std::uint64_t session_counter = 0;
  std::uint64_t task_counter = 0;

  // Throws ValidationError on an event that does not fit the current state.
  void apply(const Event& e);
  static ExperimentState replay(const std::vector<Event>& events);
  bool operator==(const ExperimentState&) const = default;
};

// Append-only JSONL file of events; flushed per event.
class EventLogFile {
 public:
  explicit EventLogFile(const std::filesystem::path& path);
  void append(const Event& e);

 private:
  std::mutex mutex_;
  std::ofstream out_;
};

// ---- dispatcher ----

struct DispatchSettings {
  double treatment_ratio = 0.5;
  std::int64_t wizard_deadline_ms = 150'000;
  std::string fallback_text = "Sorry, I don't know that.";
  std::int64_t session_budget_ms = 30 * 60 * 1000;
  std::uint64_t seed = 0;
};

struct SessionSummary {
  std::size_t utterance_count = 0;
  std::map<ResponseSource, double> source_distribution;  // fractions, sums to 1 when non-empty
  bool excluded = false;  // fewer than kMinUtterances
};

inline constexpr std::size_t kMinUtterances = 4;

SessionSummary summarize(const Session& s);

// Submitting an utterance either settles immediately or opens a wizard task.
struct Submission {
  std::optional<ResponseDecision> decision;
  std::optional<std::string> task_id;
};

// Routes utterances per experiment arm:
//   control   -> base assistant (automated), detector untouched
//   treatment -> detector; not personifying -> automated;
//                personifying + canned entry -> canned;
//                otherwise a wizard task, answered -> wizard, deadline -> fallback.
// All state changes are events, so a log replay reproduces the state exactly.
// Thread-safe. One utterance may be in flight per session.
class Dispatcher {
 public:
  using EventSink = std::function<void(const Event&)>;

  Dispatcher(DispatchSettings settings, std::shared_ptr<const CannedStore> canned,
             std::shared_ptr<Detector> detector, std::shared_ptr<BaseAssistant> base,
             std::shared_ptr<const Clock> clock, EventSink sink = {});

  // Rebuilds state from `events` and settles anything the restart orphaned:
  // overdue tasks expire, in-flight utterances without a task fall back.
  void restore(const std::vector<Event>& events);

  struct Created {
    std::string session_id;
    Arm arm;
  };
  Created create_session(const std::string& participant_id);

  Submission submit_utterance(const std::string& session_id, const std::string& text);
  // Blocks until the task settles or its deadline passes.
  ResponseDecision await_decision(const std::string& task_id);
  ResponseDecision handle_utterance(const std::string& session_id, const std::string& text);

  WizardTask claim_task(const std::string& task_id, const std::string& operator_id);
  WizardTask submit_answer(const std::string& task_id, const std::string& operator_id, const std::string& text);
  // Pending/claimed tasks at or past their deadline become expired. Idempotent.
  std::vector<WizardTask> expire_overdue();

  // Pending and claimed tasks, earliest deadline first.
  std::vector<WizardTask> open_tasks() const;
  std::optional<WizardTask> task(const std::string& task_id) const;
  std::optional<Session> session(const std::string& session_id) const;

  SessionSummary close_session(const std::string& session_id);
  // Throws ConflictError while the session is open.
  SessionSummary session_summary(const std::string& session_id) const;

  ExperimentState snapshot() const;
  const DispatchSettings& settings() const { return settings_; }
  const CannedStore& canned() const { return *canned_; }

 private:
  void emit(EventBody body);  // requires mutex_
  void expire_locked(WizardTask& task);
  Session& session_locked(const std::string& id);
  WizardTask& task_locked(const std::string& id);

  DispatchSettings settings_;
  std::shared_ptr<const CannedStore> canned_;
  std::shared_ptr<Detector> detector_;
  std::shared_ptr<BaseAssistant> base_;
  std::shared_ptr<const Clock> clock_;
  EventSink sink_;

  mutable std::mutex mutex_;
  std::condition_variable settled_;
  ExperimentState state_;
};

}  // namespace playful
