#pragma once

#include <memory>
#include <string>
#include <vector>

#include "playful/classifier.hpp"
#include "playful/config.hpp"
#include "playful/dispatch.hpp"
#include "playful/pattern.hpp"
#include "playful/taxonomy.hpp"

namespace playful {

// Everything the service reads from disk, validated.
struct ServiceAssets {
  TaxonomyGraph taxonomy;
  RuleSet rules;
  std::shared_ptr<const Lexicons> lexicons;
  std::shared_ptr<const CannedStore> canned;
  std::shared_ptr<const Model> model;
  std::string guidelines;

  // Throws ValidationError listing missing files, or the first load error.
  static ServiceAssets load(const AppConfig& cfg);
};

struct ServiceOverrides {
  std::shared_ptr<const Clock> clock;       // default SystemClock
  std::shared_ptr<BaseAssistant> base;      // default StubAssistant with the fallback text
  std::shared_ptr<Detector> detector;       // default ModelDetector over the model asset
  bool expiry_thread = true;                // periodic expire_overdue
};

// HTTP front end over a Dispatcher. Events are appended to the configured log
// and replayed on construction, so a restart resumes or expires open tasks.
//
//   GET  /healthz
//   POST /sessions                        {"participantId"}
//   GET  /sessions/{id}
//   POST /sessions/{id}/utterances        {"text"}  long-polls while a wizard task is open
//   POST /sessions/{id}/close
//   GET  /wizard/tasks                    open tasks, earliest deadline first
//   GET  /wizard/tasks/{id}
//   POST /wizard/tasks/{id}/claim         {"operatorId"}
//   POST /wizard/tasks/{id}/answer        {"operatorId","text"}
//   GET  /wizard/guidelines
//   GET|POST /report                      optional {"survey":[..],"expert":[..]}
//   GET  /logs                            event log as JSONL
//
// With an operator token configured, /wizard, /report and /logs require
// `Authorization: Bearer <token>`.
class Service {
 public:
  Service(AppConfig cfg, ServiceAssets assets, ServiceOverrides overrides = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Binds the configured host/port (port 0 picks a free one) and serves on a
  // background thread. Returns the bound port. Throws Error on bind failure.
  int start();
  // Starts if needed, then blocks until stop().
  void run();
  void stop();

  Dispatcher& dispatcher();
  std::vector<Event> events() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace playful
