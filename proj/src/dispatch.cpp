#include "playful/dispatch.hpp"

#include <algorithm>
#include <chrono>
#include <set>

#include <json.hpp>

#include "detail/io.hpp"
#include "playful/error.hpp"
#include "playful/text_features.hpp"

namespace playful {

using nlohmann::json;

std::int64_t SystemClock::now_ms() const {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

// ---- enums ----

std::string_view to_string(Arm a) { return a == Arm::Control ? "control" : "treatment"; }

std::string_view to_string(ResponseSource s) {
  switch (s) {
    case ResponseSource::Automated: return "automated";
    case ResponseSource::Canned: return "canned";
    case ResponseSource::Wizard: return "wizard";
    case ResponseSource::Fallback: return "fallback";
  }
  return "?";
}

std::string_view to_string(TaskState s) {
  switch (s) {
    case TaskState::Pending: return "pending";
    case TaskState::Claimed: return "claimed";
    case TaskState::Answered: return "answered";
    case TaskState::Expired: return "expired";
  }
  return "?";
}

Arm arm_from_string(std::string_view s) {
  if (s == "control") return Arm::Control;
  if (s == "treatment") return Arm::Treatment;
  throw ParseError("unknown arm: " + std::string(s));
}

ResponseSource response_source_from_string(std::string_view s) {
  for (auto v : {ResponseSource::Automated, ResponseSource::Canned, ResponseSource::Wizard, ResponseSource::Fallback})
    if (to_string(v) == s) return v;
  throw ParseError("unknown response source: " + std::string(s));
}

TaskState task_state_from_string(std::string_view s) {
  for (auto v : {TaskState::Pending, TaskState::Claimed, TaskState::Answered, TaskState::Expired})
    if (to_string(v) == s) return v;
  throw ParseError("unknown task state: " + std::string(s));
}

Arm assign_arm(std::string_view participant_id, double treatment_ratio, std::uint64_t seed) {
  if (!(treatment_ratio > 0.0 && treatment_ratio < 1.0))
    throw ContractError("treatment ratio must be strictly between 0 and 1");
  std::uint64_t h = fnv1a64(std::to_string(seed) + ":" + std::string(participant_id));
  // splitmix64 finalizer
  h ^= h >> 30;
  h *= 0xbf58476d1ce4e5b9ULL;
  h ^= h >> 27;
  h *= 0x94d049bb133111ebULL;
  h ^= h >> 31;
  const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
  return u < treatment_ratio ? Arm::Treatment : Arm::Control;
}

// ---- canned store ----

const std::vector<std::string>& CannedStore::default_wake_words() {
  static const std::vector<std::string> words{"alexa", "shirley", "echo", "computer", "hey", "ok", "okay"};
  return words;
}

CannedStore::CannedStore(std::vector<std::string> wake_words) : wake_words_(std::move(wake_words)) {
  for (auto& w : wake_words_) {
    auto toks = tokenize_words(w);
    w = toks.empty() ? std::string() : toks.front();
  }
}

std::string CannedStore::normalize(std::string_view utterance) const {
  auto words = tokenize_words(utterance);
  std::size_t i = 0;
  while (i < words.size() && std::find(wake_words_.begin(), wake_words_.end(), words[i]) != wake_words_.end()) ++i;
  std::string out;
  for (; i < words.size(); ++i) {
    if (!out.empty()) out += ' ';
    out += words[i];
  }
  return out;
}

void CannedStore::add(std::string_view key, std::string response) {
  auto norm = normalize(key);
  if (norm.empty()) throw ValidationError("canned key normalizes to nothing: " + std::string(key));
  if (detail::trim(response).empty()) throw ValidationError("empty canned response for: " + std::string(key));
  if (!entries_.emplace(norm, std::move(response)).second)
    throw ValidationError("duplicate canned key after normalization: " + norm);
}

CannedStore CannedStore::parse(std::string_view document, std::vector<std::string> wake_words) {
  CannedStore store(std::move(wake_words));
  detail::for_each_line(document, [&](std::size_t line, std::string_view text) {
    auto tab = text.find('\t');
    if (tab == std::string_view::npos) throw ParseError("expected key<TAB>response", line);
    try {
      store.add(text.substr(0, tab), std::string(detail::trim(text.substr(tab + 1))));
    } catch (const ValidationError& ex) {
      throw ValidationError(std::string(ex.what()) + " (line " + std::to_string(line) + ")");
    }
  });
  return store;
}

CannedStore CannedStore::load(const std::filesystem::path& path, std::vector<std::string> wake_words) {
  return parse(detail::read_file(path), std::move(wake_words));
}

std::optional<std::string> CannedStore::lookup(std::string_view utterance) const {
  auto it = entries_.find(normalize(utterance));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::pair<std::string, std::string>> CannedStore::nearest(std::string_view utterance,
                                                                      std::size_t k) const {
  auto q = detail::split(normalize(utterance), ' ');
  std::set<std::string> qs(q.begin(), q.end());
  qs.erase("");
  std::vector<std::pair<double, const std::pair<const std::string, std::string>*>> scored;
  for (const auto& e : entries_) {
    auto kw = detail::split(e.first, ' ');
    std::set<std::string> ks(kw.begin(), kw.end());
    std::size_t inter = 0;
    for (const auto& w : ks) inter += qs.count(w);
    const std::size_t uni = qs.size() + ks.size() - inter;
    if (inter == 0) continue;
    scored.emplace_back(static_cast<double>(inter) / static_cast<double>(uni), &e);
  }
  std::stable_sort(scored.begin(), scored.end(), [](auto& a, auto& b) { return a.first > b.first; });
  std::vector<std::pair<std::string, std::string>> out;
  for (std::size_t i = 0; i < scored.size() && i < k; ++i) out.emplace_back(*scored[i].second);
  return out;
}

// ---- detector ----

ModelDetector::ModelDetector(std::shared_ptr<const Model> model, ProviderConfig provider,
                             std::shared_ptr<const Lexicons> lex)
    : model_(std::move(model)), provider_(std::move(provider)), lex_(std::move(lex)) {
  if (!model_ || !lex_) throw ContractError("detector needs a model and lexicons");
  if (provider_info(provider_).provider_id != model_->provider_id)
    throw ContractError("model was trained with provider " + model_->provider_id + ", configured provider is " +
                        provider_info(provider_).provider_id);
}

Prediction ModelDetector::detect(std::string_view utterance) {
  return predict(*model_, utterance, provider_, *lex_);
}

// ---- event encoding ----

namespace {

json decision_to_json(const ResponseDecision& d) {
  json j{{"source", to_string(d.source)}, {"text", d.response_text}, {"latency_ms", d.latency_ms}};
  if (d.detector_probability) j["probability"] = *d.detector_probability;
  if (d.detected) j["detected"] = *d.detected;
  if (d.task_id) j["task"] = *d.task_id;
  if (d.error) j["error"] = *d.error;
  return j;
}

ResponseDecision decision_from_json(const json& j) {
  ResponseDecision d;
  d.source = response_source_from_string(j.at("source").get<std::string>());
  d.response_text = j.at("text").get<std::string>();
  d.latency_ms = j.at("latency_ms").get<std::int64_t>();
  if (j.contains("probability")) d.detector_probability = j["probability"].get<double>();
  if (j.contains("detected")) d.detected = j["detected"].get<bool>();
  if (j.contains("task")) d.task_id = j["task"].get<std::string>();
  if (j.contains("error")) d.error = j["error"].get<std::string>();
  return d;
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

std::string format_event(const Event& e) {
  json j{{"v", kEventSchemaVersion}, {"seq", e.seq}, {"t", e.at_ms}};
  std::visit(overloaded{
                 [&](const event::SessionCreated& b) {
                   j["type"] = "session_created";
                   j["session"] = b.session_id;
                   j["participant"] = b.participant_id;
                   j["arm"] = to_string(b.arm);
                   j["budget_ms"] = b.budget_ms;
                 },
                 [&](const event::UtteranceReceived& b) {
                   j["type"] = "utterance_received";
                   j["session"] = b.session_id;
                   j["text"] = b.text;
                 },
                 [&](const event::Detection& b) {
                   j["type"] = "detection";
                   j["session"] = b.session_id;
                   j["probability"] = b.probability;
                   j["detected"] = b.detected;
                 },
                 [&](const event::TaskEnqueued& b) {
                   j["type"] = "task_enqueued";
                   j["task"] = b.task_id;
                   j["session"] = b.session_id;
                   j["text"] = b.utterance;
                   j["deadline_ms"] = b.deadline_ms;
                 },
                 [&](const event::TaskClaimed& b) {
                   j["type"] = "task_claimed";
                   j["task"] = b.task_id;
                   j["operator"] = b.operator_id;
                 },
                 [&](const event::TaskAnswered& b) {
                   j["type"] = "task_answered";
                   j["task"] = b.task_id;
                   j["operator"] = b.operator_id;
                   j["answer"] = b.answer;
                 },
                 [&](const event::TaskExpired& b) {
                   j["type"] = "task_expired";
                   j["task"] = b.task_id;
                 },
                 [&](const event::LateAnswer& b) {
                   j["type"] = "late_answer";
                   j["task"] = b.task_id;
                   j["operator"] = b.operator_id;
                   j["answer"] = b.answer;
                 },
                 [&](const event::DecisionMade& b) {
                   j["type"] = "decision";
                   j["session"] = b.session_id;
                   j["decision"] = decision_to_json(b.decision);
                 },
                 [&](const event::SessionClosed& b) {
                   j["type"] = "session_closed";
                   j["session"] = b.session_id;
                 },
             },
             e.body);
  return j.dump();
}

Event parse_event(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& ex) {
    throw ParseError(std::string("invalid event json: ") + ex.what());
  }
  try {
    const int v = j.at("v").get<int>();
    if (v != kEventSchemaVersion) throw ParseError("unsupported event schema version " + std::to_string(v));
    Event e;
    e.seq = j.at("seq").get<std::uint64_t>();
    e.at_ms = j.at("t").get<std::int64_t>();
    const auto type = j.at("type").get<std::string>();
    auto str = [&](const char* k) { return j.at(k).get<std::string>(); };
    if (type == "session_created")
      e.body = event::SessionCreated{str("session"), str("participant"), arm_from_string(str("arm")),
                                     j.at("budget_ms").get<std::int64_t>()};
    else if (type == "utterance_received")
      e.body = event::UtteranceReceived{str("session"), str("text")};
    else if (type == "detection")
      e.body = event::Detection{str("session"), j.at("probability").get<double>(), j.at("detected").get<bool>()};
    else if (type == "task_enqueued")
      e.body = event::TaskEnqueued{str("task"), str("session"), str("text"), j.at("deadline_ms").get<std::int64_t>()};
    else if (type == "task_claimed")
      e.body = event::TaskClaimed{str("task"), str("operator")};
    else if (type == "task_answered")
      e.body = event::TaskAnswered{str("task"), str("operator"), str("answer")};
    else if (type == "task_expired")
      e.body = event::TaskExpired{str("task")};
    else if (type == "late_answer")
      e.body = event::LateAnswer{str("task"), str("operator"), str("answer")};
    else if (type == "decision")
      e.body = event::DecisionMade{str("session"), decision_from_json(j.at("decision"))};
    else if (type == "session_closed")
      e.body = event::SessionClosed{str("session")};
    else
      throw ParseError("unknown event type: " + type);
    return e;
  } catch (const json::exception& ex) {
    throw ParseError(std::string("malformed event: ") + ex.what());
  }
}

std::vector<Event> parse_event_log(std::string_view jsonl) {
  std::vector<Event> out;
  detail::for_each_line(jsonl, [&](std::size_t line, std::string_view text) {
    try {
      out.push_back(parse_event(text));
    } catch (const ParseError& ex) {
      throw ParseError(ex.what(), line);
    }
  });
  return out;
}

std::vector<Event> read_event_log(const std::filesystem::path& path) {
  return parse_event_log(detail::read_file(path));
}

EventLogFile::EventLogFile(const std::filesystem::path& path) : out_(path, std::ios::app | std::ios::binary) {
  if (!out_) throw Error("cannot open event log: " + path.string());
}

void EventLogFile::append(const Event& e) {
  std::lock_guard lk(mutex_);
  out_ << format_event(e) << '\n';
  out_.flush();
  if (!out_) throw Error("event log write failed");
}

// ---- state fold ----

namespace {

Session& need_session(ExperimentState& s, const std::string& id) {
  auto it = s.sessions.find(id);
  if (it == s.sessions.end()) throw ValidationError("event references unknown session " + id);
  return it->second;
}

WizardTask& need_task(ExperimentState& s, const std::string& id) {
  auto it = s.tasks.find(id);
  if (it == s.tasks.end()) throw ValidationError("event references unknown task " + id);
  return it->second;
}

bool task_open(const WizardTask& t) { return t.state == TaskState::Pending || t.state == TaskState::Claimed; }

}  // namespace

void ExperimentState::apply(const Event& e) {
  if (e.seq != next_seq)
    throw ValidationError("event sequence gap: expected " + std::to_string(next_seq) + ", got " +
                          std::to_string(e.seq));
  std::visit(overloaded{
                 [&](const event::SessionCreated& b) {
                   if (sessions.count(b.session_id)) throw ValidationError("duplicate session " + b.session_id);
                   Session s;
                   s.session_id = b.session_id;
                   s.participant_id = b.participant_id;
                   s.arm = b.arm;
                   s.started_at_ms = e.at_ms;
                   s.duration_budget_ms = b.budget_ms;
                   sessions.emplace(b.session_id, std::move(s));
                   ++session_counter;
                 },
                 [&](const event::UtteranceReceived& b) {
                   auto& s = need_session(*this, b.session_id);
                   if (s.closed) throw ValidationError("utterance on closed session " + b.session_id);
                   if (s.in_flight) throw ValidationError("session already has an utterance in flight");
                   s.in_flight = InFlight{b.text, e.at_ms, std::nullopt, std::nullopt, std::nullopt};
                 },
                 [&](const event::Detection& b) {
                   auto& s = need_session(*this, b.session_id);
                   if (!s.in_flight) throw ValidationError("detection without an utterance");
                   s.in_flight->detector_probability = b.probability;
                   s.in_flight->detected = b.detected;
                 },
                 [&](const event::TaskEnqueued& b) {
                   auto& s = need_session(*this, b.session_id);
                   if (!s.in_flight || s.in_flight->task_id) throw ValidationError("task without a waiting utterance");
                   if (tasks.count(b.task_id)) throw ValidationError("duplicate task " + b.task_id);
                   WizardTask t;
                   t.task_id = b.task_id;
                   t.session_id = b.session_id;
                   t.utterance = b.utterance;
                   t.enqueued_at_ms = e.at_ms;
                   t.deadline_ms = b.deadline_ms;
                   tasks.emplace(b.task_id, std::move(t));
                   s.in_flight->task_id = b.task_id;
                   ++task_counter;
                 },
                 [&](const event::TaskClaimed& b) {
                   auto& t = need_task(*this, b.task_id);
                   if (t.state != TaskState::Pending) throw ValidationError("claim of non-pending task " + b.task_id);
                   t.state = TaskState::Claimed;
                   t.operator_id = b.operator_id;
                 },
                 [&](const event::TaskAnswered& b) {
                   auto& t = need_task(*this, b.task_id);
                   if (t.state != TaskState::Claimed) throw ValidationError("answer to unclaimed task " + b.task_id);
                   t.state = TaskState::Answered;
                   t.answer = b.answer;
                 },
                 [&](const event::TaskExpired& b) {
                   auto& t = need_task(*this, b.task_id);
                   if (!task_open(t)) throw ValidationError("expiry of settled task " + b.task_id);
                   t.state = TaskState::Expired;
                 },
                 [&](const event::LateAnswer& b) {
                   auto& t = need_task(*this, b.task_id);
                   if (t.state != TaskState::Expired) throw ValidationError("late answer to live task " + b.task_id);
                   t.late_answers.push_back(b.answer);
                 },
                 [&](const event::DecisionMade& b) {
                   auto& s = need_session(*this, b.session_id);
                   if (!s.in_flight) throw ValidationError("decision without an utterance");
                   LogEntry entry;
                   entry.utterance = s.in_flight->utterance;
                   entry.decision = b.decision;
                   entry.received_at_ms = s.in_flight->received_at_ms;
                   entry.decided_at_ms = e.at_ms;
                   s.log.push_back(std::move(entry));
                   s.in_flight.reset();
                 },
                 [&](const event::SessionClosed& b) {
                   auto& s = need_session(*this, b.session_id);
                   if (s.in_flight) throw ValidationError("close with utterance in flight");
                   s.closed = true;
                 },
             },
             e.body);
  next_seq = e.seq + 1;
}

ExperimentState ExperimentState::replay(const std::vector<Event>& events) {
  ExperimentState s;
  for (const auto& e : events) s.apply(e);
  return s;
}

SessionSummary summarize(const Session& s) {
  SessionSummary out;
  out.utterance_count = s.log.size();
  out.excluded = out.utterance_count < kMinUtterances;
  if (s.log.empty()) return out;
  std::map<ResponseSource, std::size_t> counts;
  for (const auto& e : s.log) ++counts[e.decision.source];
  for (const auto& [src, n] : counts)
    out.source_distribution[src] = static_cast<double>(n) / static_cast<double>(s.log.size());
  return out;
}

// ---- dispatcher ----

Dispatcher::Dispatcher(DispatchSettings settings, std::shared_ptr<const CannedStore> canned,
                       std::shared_ptr<Detector> detector, std::shared_ptr<BaseAssistant> base,
                       std::shared_ptr<const Clock> clock, EventSink sink)
    : settings_(std::move(settings)),
      canned_(std::move(canned)),
      detector_(std::move(detector)),
      base_(std::move(base)),
      clock_(std::move(clock)),
      sink_(std::move(sink)) {
  if (!canned_ || !detector_ || !base_ || !clock_) throw ContractError("dispatcher needs all adapters");
  if (!(settings_.treatment_ratio > 0.0 && settings_.treatment_ratio < 1.0))
    throw ContractError("treatment ratio must be strictly between 0 and 1");
  if (settings_.wizard_deadline_ms <= 0) throw ContractError("wizard deadline must be positive");
  if (settings_.session_budget_ms <= 0) throw ContractError("session budget must be positive");
}

void Dispatcher::emit(EventBody body) {
  Event e{state_.next_seq, clock_->now_ms(), std::move(body)};
  if (sink_) sink_(e);
  state_.apply(e);
}

Session& Dispatcher::session_locked(const std::string& id) {
  auto it = state_.sessions.find(id);
  if (it == state_.sessions.end()) throw NotFoundError("unknown session " + id);
  return it->second;
}

WizardTask& Dispatcher::task_locked(const std::string& id) {
  auto it = state_.tasks.find(id);
  if (it == state_.tasks.end()) throw NotFoundError("unknown task " + id);
  return it->second;
}

void Dispatcher::expire_locked(WizardTask& task) {
  const std::string task_id = task.task_id;
  const std::string session_id = task.session_id;
  emit(event::TaskExpired{task_id});
  const auto& s = session_locked(session_id);
  ResponseDecision d;
  d.source = ResponseSource::Fallback;
  d.response_text = settings_.fallback_text;
  d.task_id = task_id;
  if (s.in_flight) {
    d.detector_probability = s.in_flight->detector_probability;
    d.detected = s.in_flight->detected;
    d.latency_ms = clock_->now_ms() - s.in_flight->received_at_ms;
  }
  emit(event::DecisionMade{session_id, std::move(d)});
  settled_.notify_all();
}

void Dispatcher::restore(const std::vector<Event>& events) {
  std::lock_guard lk(mutex_);
  state_ = ExperimentState::replay(events);
  for (auto& [id, s] : state_.sessions) {
    if (!s.in_flight || s.in_flight->task_id) continue;
    ResponseDecision d;
    d.source = ResponseSource::Fallback;
    d.response_text = settings_.fallback_text;
    d.detector_probability = s.in_flight->detector_probability;
    d.detected = s.in_flight->detected;
    d.latency_ms = clock_->now_ms() - s.in_flight->received_at_ms;
    d.error = "interrupted by restart";
    emit(event::DecisionMade{id, std::move(d)});
  }
  const auto now = clock_->now_ms();
  for (auto& [id, t] : state_.tasks)
    if (task_open(t) && now >= t.deadline_ms) expire_locked(t);
}

Dispatcher::Created Dispatcher::create_session(const std::string& participant_id) {
  if (detail::trim(participant_id).empty()) throw ContractError("participant id is required");
  const Arm arm = assign_arm(participant_id, settings_.treatment_ratio, settings_.seed);
  std::lock_guard lk(mutex_);
  std::string id = "s" + std::to_string(state_.session_counter + 1);
  emit(event::SessionCreated{id, participant_id, arm, settings_.session_budget_ms});
  return {id, arm};
}

Submission Dispatcher::submit_utterance(const std::string& session_id, const std::string& text) {
  if (detail::trim(text).empty()) throw ContractError("utterance is empty");
  Arm arm;
  {
    std::lock_guard lk(mutex_);
    auto& s = session_locked(session_id);
    if (s.closed) throw ConflictError("session " + session_id + " is closed");
    if (s.in_flight) throw ConflictError("session " + session_id + " is busy");
    if (clock_->now_ms() - s.started_at_ms >= s.duration_budget_ms)
      throw ExpiredError("session " + session_id + " exceeded its time budget");
    emit(event::UtteranceReceived{session_id, text});
    arm = s.arm;
  }

  // Adapters run without the lock; the in-flight marker keeps the session exclusive.
  ResponseDecision d;
  std::optional<Prediction> pred;
  bool need_wizard = false;
  auto ask_base = [&] {
    try {
      d.source = ResponseSource::Automated;
      d.response_text = base_->answer(text);
    } catch (const std::exception& ex) {
      d.source = ResponseSource::Fallback;
      d.response_text = settings_.fallback_text;
      d.error = std::string("base assistant: ") + ex.what();
    }
  };
  if (arm == Arm::Control) {
    ask_base();
  } else {
    try {
      pred = detector_->detect(text);
    } catch (const std::exception& ex) {
      d.source = ResponseSource::Fallback;
      d.response_text = settings_.fallback_text;
      d.error = std::string("detector: ") + ex.what();
    }
    if (pred) {
      d.detector_probability = pred->probability;
      d.detected = pred->is_personifying;
      if (!pred->is_personifying) {
        ask_base();
      } else if (auto reply = canned_->lookup(text)) {
        d.source = ResponseSource::Canned;
        d.response_text = *reply;
      } else {
        need_wizard = true;
      }
    }
  }

  std::lock_guard lk(mutex_);
  auto& s = session_locked(session_id);
  if (pred) emit(event::Detection{session_id, pred->probability, pred->is_personifying});
  if (need_wizard) {
    std::string task_id = "t" + std::to_string(state_.task_counter + 1);
    emit(event::TaskEnqueued{task_id, session_id, text, clock_->now_ms() + settings_.wizard_deadline_ms});
    return {std::nullopt, task_id};
  }
  d.latency_ms = clock_->now_ms() - s.in_flight->received_at_ms;
  emit(event::DecisionMade{session_id, d});
  settled_.notify_all();
  return {d, std::nullopt};
}

ResponseDecision Dispatcher::await_decision(const std::string& task_id) {
  std::unique_lock lk(mutex_);
  while (true) {
    auto& t = task_locked(task_id);
    if (!task_open(t)) {
      const auto& s = session_locked(t.session_id);
      for (auto it = s.log.rbegin(); it != s.log.rend(); ++it)
        if (it->decision.task_id == task_id) return it->decision;
      throw Error("settled task " + task_id + " has no decision");
    }
    const auto now = clock_->now_ms();
    if (now >= t.deadline_ms) {
      expire_locked(t);
      continue;
    }
    // Poll in short slices so a manual clock can move the deadline closer.
    const auto wait = std::min<std::int64_t>(t.deadline_ms - now, 20);
    settled_.wait_for(lk, std::chrono::milliseconds(wait));
  }
}

ResponseDecision Dispatcher::handle_utterance(const std::string& session_id, const std::string& text) {
  auto sub = submit_utterance(session_id, text);
  if (sub.decision) return *sub.decision;
  return await_decision(*sub.task_id);
}

WizardTask Dispatcher::claim_task(const std::string& task_id, const std::string& operator_id) {
  if (detail::trim(operator_id).empty()) throw ContractError("operator id is required");
  std::lock_guard lk(mutex_);
  auto& t = task_locked(task_id);
  if (task_open(t) && clock_->now_ms() >= t.deadline_ms) expire_locked(t);
  switch (t.state) {
    case TaskState::Expired: throw ExpiredError("task " + task_id + " expired");
    case TaskState::Answered: throw ConflictError("task " + task_id + " already answered");
    case TaskState::Claimed:
      if (t.operator_id == operator_id) return t;
      throw ConflictError("task " + task_id + " already claimed by " + t.operator_id.value_or("?"));
    case TaskState::Pending: break;
  }
  emit(event::TaskClaimed{task_id, operator_id});
  return t;
}

WizardTask Dispatcher::submit_answer(const std::string& task_id, const std::string& operator_id,
                                     const std::string& text) {
  if (detail::trim(text).empty()) throw ContractError("answer is empty");
  std::lock_guard lk(mutex_);
  auto& t = task_locked(task_id);
  if (task_open(t) && clock_->now_ms() >= t.deadline_ms) expire_locked(t);
  switch (t.state) {
    case TaskState::Expired:
      emit(event::LateAnswer{task_id, operator_id, text});
      throw ExpiredError("task " + task_id + " expired; answer recorded but not delivered");
    case TaskState::Answered: throw ConflictError("task " + task_id + " already answered");
    case TaskState::Pending: throw ConflictError("task " + task_id + " must be claimed first");
    case TaskState::Claimed:
      if (t.operator_id != operator_id)
        throw ConflictError("task " + task_id + " is claimed by " + t.operator_id.value_or("?"));
      break;
  }
  emit(event::TaskAnswered{task_id, operator_id, text});
  const auto& s = session_locked(t.session_id);
  ResponseDecision d;
  d.source = ResponseSource::Wizard;
  d.response_text = text;
  d.task_id = task_id;
  d.detector_probability = s.in_flight->detector_probability;
  d.detected = s.in_flight->detected;
  d.latency_ms = clock_->now_ms() - s.in_flight->received_at_ms;
  emit(event::DecisionMade{t.session_id, std::move(d)});
  settled_.notify_all();
  return t;
}

std::vector<WizardTask> Dispatcher::expire_overdue() {
  std::lock_guard lk(mutex_);
  std::vector<WizardTask> out;
  const auto now = clock_->now_ms();
  for (auto& [id, t] : state_.tasks) {
    if (task_open(t) && now >= t.deadline_ms) {
      expire_locked(t);
      out.push_back(t);
    }
  }
  return out;
}

std::vector<WizardTask> Dispatcher::open_tasks() const {
  std::lock_guard lk(mutex_);
  std::vector<WizardTask> out;
  for (const auto& [id, t] : state_.tasks)
    if (task_open(t)) out.push_back(t);
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.deadline_ms < b.deadline_ms; });
  return out;
}

std::optional<WizardTask> Dispatcher::task(const std::string& task_id) const {
  std::lock_guard lk(mutex_);
  auto it = state_.tasks.find(task_id);
  if (it == state_.tasks.end()) return std::nullopt;
  return it->second;
}

std::optional<Session> Dispatcher::session(const std::string& session_id) const {
  std::lock_guard lk(mutex_);
  auto it = state_.sessions.find(session_id);
  if (it == state_.sessions.end()) return std::nullopt;
  return it->second;
}

SessionSummary Dispatcher::close_session(const std::string& session_id) {
  std::lock_guard lk(mutex_);
  auto& s = session_locked(session_id);
  if (s.closed) return summarize(s);
  if (s.in_flight) {
    if (!s.in_flight->task_id) throw ConflictError("session " + session_id + " is busy");
    expire_locked(task_locked(*s.in_flight->task_id));
  }
  emit(event::SessionClosed{session_id});
  return summarize(s);
}

SessionSummary Dispatcher::session_summary(const std::string& session_id) const {
  std::lock_guard lk(mutex_);
  auto it = state_.sessions.find(session_id);
  if (it == state_.sessions.end()) throw NotFoundError("unknown session " + session_id);
  if (!it->second.closed) throw ConflictError("session " + session_id + " is still open");
  return summarize(it->second);
}

ExperimentState Dispatcher::snapshot() const {
  std::lock_guard lk(mutex_);
  return state_;
}

}  // namespace playful
