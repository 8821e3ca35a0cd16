#include "playful/service.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "detail/io.hpp"
#include "playful/error.hpp"
#include "playful/report.hpp"

namespace playful {

using nlohmann::json;

ServiceAssets ServiceAssets::load(const AppConfig& cfg) {
  cfg.check_assets();
  ServiceAssets a;
  a.taxonomy = TaxonomyGraph::load(cfg.taxonomy);
  a.rules = RuleSet::load(cfg.rules, a.taxonomy);
  a.lexicons = std::make_shared<const Lexicons>(Lexicons::load(cfg.easy_words, cfg.sentiment, cfg.modifiers));
  a.canned = std::make_shared<const CannedStore>(CannedStore::load(cfg.canned));
  a.model = std::make_shared<const Model>(load_model_file(cfg.model));
  a.guidelines = detail::read_file(cfg.guidelines);
  const auto id = provider_info(cfg.provider).provider_id;
  if (id != a.model->provider_id)
    throw ValidationError("model was trained with provider " + a.model->provider_id + ", config selects " + id);
  return a;
}

namespace {

json decision_json(const ResponseDecision& d) {
  json j{{"source", to_string(d.source)}, {"text", d.response_text}, {"latencyMs", d.latency_ms}};
  j["probability"] = d.detector_probability ? json(*d.detector_probability) : json(nullptr);
  j["detected"] = d.detected ? json(*d.detected) : json(nullptr);
  if (d.task_id) j["taskId"] = *d.task_id;
  if (d.error) j["error"] = *d.error;
  return j;
}

json task_json(const WizardTask& t, std::int64_t now) {
  json j{{"taskId", t.task_id},
         {"sessionId", t.session_id},
         {"utterance", t.utterance},
         {"enqueuedAt", t.enqueued_at_ms},
         {"deadline", t.deadline_ms},
         {"remainingMs", std::max<std::int64_t>(0, t.deadline_ms - now)},
         {"state", to_string(t.state)}};
  j["answer"] = t.answer ? json(*t.answer) : json(nullptr);
  j["operatorId"] = t.operator_id ? json(*t.operator_id) : json(nullptr);
  return j;
}

json summary_json(const SessionSummary& s) {
  json dist = json::object();
  for (const auto& [src, f] : s.source_distribution) dist[std::string(to_string(src))] = f;
  return {{"utteranceCount", s.utterance_count}, {"excluded", s.excluded}, {"sourceDistribution", dist}};
}

json session_json(const Session& s) {
  json log = json::array();
  for (const auto& e : s.log)
    log.push_back({{"utterance", e.utterance},
                   {"receivedAt", e.received_at_ms},
                   {"decidedAt", e.decided_at_ms},
                   {"decision", decision_json(e.decision)}});
  return {{"sessionId", s.session_id},
          {"participantId", s.participant_id},
          {"arm", to_string(s.arm)},
          {"startedAt", s.started_at_ms},
          {"budgetMs", s.duration_budget_ms},
          {"closed", s.closed},
          {"busy", s.in_flight.has_value()},
          {"log", log}};
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view kind, std::string_view message) {
  send_json(res, status, {{"error", kind}, {"message", message}});
}

json body_json(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    auto j = json::parse(req.body);
    if (!j.is_object()) throw ParseError("request body must be a JSON object");
    return j;
  } catch (const json::exception& ex) {
    throw ParseError(std::string("invalid request body: ") + ex.what());
  }
}

std::string required_string(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string()) throw ContractError(std::string("missing string field: ") + key);
  return j[key].get<std::string>();
}

}  // namespace

struct Service::Impl {
  AppConfig cfg;
  ServiceAssets assets;
  std::shared_ptr<const Clock> clock;
  std::unique_ptr<EventLogFile> log_file;
  mutable std::mutex events_mutex;
  std::vector<Event> events;
  std::unique_ptr<Dispatcher> dispatcher;
  httplib::Server server;
  std::thread server_thread;
  std::thread expiry_thread;
  std::mutex stop_mutex;
  std::condition_variable stop_cv;
  bool stopping = false;
  bool run_expiry = true;

  void record(const Event& e) {
    if (log_file) log_file->append(e);
    std::lock_guard lk(events_mutex);
    events.push_back(e);
  }

  bool authorized(const httplib::Request& req, httplib::Response& res) const {
    if (!cfg.operator_token) return true;
    const auto header = req.get_header_value("Authorization");
    if (header == "Bearer " + *cfg.operator_token) return true;
    send_error(res, 401, "unauthorized", "operator token required");
    return false;
  }

  // Maps library errors onto HTTP statuses.
  template <class Fn>
  void guarded(httplib::Response& res, Fn&& fn) {
    try {
      fn();
    } catch (const NotFoundError& ex) {
      send_error(res, 404, "not-found", ex.what());
    } catch (const ConflictError& ex) {
      send_error(res, 409, "conflict", ex.what());
    } catch (const ExpiredError& ex) {
      send_error(res, 410, "expired", ex.what());
    } catch (const TransportError& ex) {
      send_error(res, 502, "transport", ex.what());
    } catch (const ParseError& ex) {
      send_error(res, 400, "bad-request", ex.what());
    } catch (const ContractError& ex) {
      send_error(res, 400, "bad-request", ex.what());
    } catch (const ValidationError& ex) {
      send_error(res, 422, "invalid", ex.what());
    } catch (const std::exception& ex) {
      send_error(res, 500, "internal", ex.what());
    }
  }

  void routes() {
    auto& d = *dispatcher;
    server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, {{"status", "ok"}});
    });

    server.Post("/sessions", [this, &d](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        auto body = body_json(req);
        auto created = d.create_session(required_string(body, "participantId"));
        send_json(res, 201, {{"sessionId", created.session_id}, {"arm", to_string(created.arm)}});
      });
    });

    server.Get(R"(/sessions/([^/]+))", [this, &d](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        auto s = d.session(req.matches[1]);
        if (!s) throw NotFoundError("unknown session " + std::string(req.matches[1]));
        send_json(res, 200, session_json(*s));
      });
    });

    server.Post(R"(/sessions/([^/]+)/utterances)", [this, &d](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        auto body = body_json(req);
        auto decision = d.handle_utterance(req.matches[1], required_string(body, "text"));
        send_json(res, 200, decision_json(decision));
      });
    });

    server.Post(R"(/sessions/([^/]+)/close)", [this, &d](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { send_json(res, 200, summary_json(d.close_session(req.matches[1]))); });
    });

    server.Get("/wizard/tasks", [this, &d](const httplib::Request& req, httplib::Response& res) {
      if (!authorized(req, res)) return;
      guarded(res, [&] {
        const auto now = clock->now_ms();
        json tasks = json::array();
        for (const auto& t : d.open_tasks()) {
          auto j = task_json(t, now);
          json suggestions = json::array();
          for (const auto& [key, reply] : d.canned().nearest(t.utterance, 3))
            suggestions.push_back({{"key", key}, {"response", reply}});
          j["suggestions"] = suggestions;
          tasks.push_back(j);
        }
        send_json(res, 200, {{"now", now}, {"tasks", tasks}});
      });
    });

    server.Get("/wizard/guidelines", [this](const httplib::Request& req, httplib::Response& res) {
      if (!authorized(req, res)) return;
      res.set_content(assets.guidelines, "text/plain; charset=utf-8");
    });

    server.Get(R"(/wizard/tasks/([^/]+))", [this, &d](const httplib::Request& req, httplib::Response& res) {
      if (!authorized(req, res)) return;
      guarded(res, [&] {
        auto t = d.task(req.matches[1]);
        if (!t) throw NotFoundError("unknown task " + std::string(req.matches[1]));
        send_json(res, 200, task_json(*t, clock->now_ms()));
      });
    });

    server.Post(R"(/wizard/tasks/([^/]+)/claim)", [this, &d](const httplib::Request& req, httplib::Response& res) {
      if (!authorized(req, res)) return;
      guarded(res, [&] {
        auto body = body_json(req);
        auto t = d.claim_task(req.matches[1], required_string(body, "operatorId"));
        send_json(res, 200, task_json(t, clock->now_ms()));
      });
    });

    server.Post(R"(/wizard/tasks/([^/]+)/answer)", [this, &d](const httplib::Request& req, httplib::Response& res) {
      if (!authorized(req, res)) return;
      guarded(res, [&] {
        auto body = body_json(req);
        auto t = d.submit_answer(req.matches[1], required_string(body, "operatorId"), required_string(body, "text"));
        send_json(res, 200, task_json(t, clock->now_ms()));
      });
    });

    auto report = [this, &d](const httplib::Request& req, httplib::Response& res) {
      if (!authorized(req, res)) return;
      guarded(res, [&] {
        ReportInputs in;
        for (auto& [id, s] : d.snapshot().sessions) in.sessions.push_back(std::move(s));
        if (req.method == "POST") {
          auto body = body_json(req);
          std::string survey, expert;
          if (body.contains("survey"))
            for (const auto& r : body["survey"]) survey += r.dump() + "\n";
          if (body.contains("expert"))
            for (const auto& r : body["expert"]) expert += r.dump() + "\n";
          in.survey = parse_survey(survey);
          in.expert = parse_expert(expert);
        }
        auto r = experiment_report(in);
        auto j = json::parse(report_to_json(r, -1));
        j["table"] = format_report_table(r);
        send_json(res, 200, j);
      });
    };
    server.Get("/report", report);
    server.Post("/report", report);

    server.Get("/logs", [this](const httplib::Request& req, httplib::Response& res) {
      if (!authorized(req, res)) return;
      std::string out;
      {
        std::lock_guard lk(events_mutex);
        for (const auto& e : events) out += format_event(e) + "\n";
      }
      res.set_content(out, "application/x-ndjson");
    });
  }
};

Service::Service(AppConfig cfg, ServiceAssets assets, ServiceOverrides overrides) : impl_(std::make_unique<Impl>()) {
  auto& m = *impl_;
  m.cfg = std::move(cfg);
  m.assets = std::move(assets);
  m.clock = overrides.clock ? overrides.clock : std::make_shared<SystemClock>();
  m.run_expiry = overrides.expiry_thread;
  auto base = overrides.base ? overrides.base : std::make_shared<StubAssistant>(m.cfg.dispatch.fallback_text);
  auto detector = overrides.detector
                      ? overrides.detector
                      : std::make_shared<ModelDetector>(m.assets.model, m.cfg.provider, m.assets.lexicons);

  std::vector<Event> prior;
  if (!m.cfg.event_log.empty()) {
    if (std::filesystem::exists(m.cfg.event_log)) prior = read_event_log(m.cfg.event_log);
    m.log_file = std::make_unique<EventLogFile>(m.cfg.event_log);
  }
  m.events = prior;
  m.dispatcher = std::make_unique<Dispatcher>(m.cfg.dispatch, m.assets.canned, detector, base, m.clock,
                                              [this](const Event& e) { impl_->record(e); });
  m.dispatcher->restore(prior);
  m.server.new_task_queue = [] { return new httplib::ThreadPool(64); };
  m.routes();
}

Service::~Service() { stop(); }

int Service::start() {
  auto& m = *impl_;
  int port = m.cfg.port;
  if (port == 0) {
    port = m.server.bind_to_any_port(m.cfg.host);
  } else if (!m.server.bind_to_port(m.cfg.host, port)) {
    port = -1;
  }
  if (port < 0) throw Error("cannot bind " + m.cfg.host + ":" + std::to_string(m.cfg.port));
  m.server_thread = std::thread([&m] { m.server.listen_after_bind(); });
  if (m.run_expiry) {
    m.expiry_thread = std::thread([&m] {
      std::unique_lock lk(m.stop_mutex);
      while (!m.stopping) {
        m.stop_cv.wait_for(lk, std::chrono::milliseconds(250));
        if (m.stopping) break;
        lk.unlock();
        try {
          m.dispatcher->expire_overdue();
        } catch (...) {
        }
        lk.lock();
      }
    });
  }
  m.server.wait_until_ready();
  return port;
}

void Service::run() {
  if (!impl_->server_thread.joinable()) start();
  impl_->server_thread.join();
}

void Service::stop() {
  if (!impl_) return;
  auto& m = *impl_;
  {
    std::lock_guard lk(m.stop_mutex);
    m.stopping = true;
  }
  m.stop_cv.notify_all();
  m.server.stop();
  if (m.server_thread.joinable()) m.server_thread.join();
  if (m.expiry_thread.joinable()) m.expiry_thread.join();
}

Dispatcher& Service::dispatcher() { return *impl_->dispatcher; }

std::vector<Event> Service::events() const {
  std::lock_guard lk(impl_->events_mutex);
  return impl_->events;
}

}  // namespace playful
