#pragma once

#include <atomic>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <vector>

#include "playful/dispatch.hpp"
#include "playful/error.hpp"

namespace testing {

// Flags an utterance as personifying iff it contains "you".
class ScriptedDetector : public playful::Detector {
 public:
  playful::Prediction detect(std::string_view text) override {
    ++calls;
    if (fail) throw playful::TransportError("encoder down");
    const bool hit = text.find("you") != std::string_view::npos;
    return {hit ? 0.9 : 0.1, hit, 0.5};
  }
  std::atomic<int> calls{0};
  std::atomic<bool> fail{false};
};

class CountingAssistant : public playful::BaseAssistant {
 public:
  std::string answer(std::string_view) override {
    ++calls;
    if (fail) throw std::runtime_error("assistant offline");
    return "base answer";
  }
  std::atomic<int> calls{0};
  std::atomic<bool> fail{false};
};

struct Rig {
  std::shared_ptr<playful::ManualClock> clock = std::make_shared<playful::ManualClock>(1'000'000);
  std::shared_ptr<ScriptedDetector> detector = std::make_shared<ScriptedDetector>();
  std::shared_ptr<CountingAssistant> base = std::make_shared<CountingAssistant>();
  std::shared_ptr<playful::CannedStore> canned = std::make_shared<playful::CannedStore>();
  std::mutex events_mutex;
  std::vector<playful::Event> events;
  std::unique_ptr<playful::Dispatcher> dispatcher;

  explicit Rig(playful::DispatchSettings settings = {}) {
    canned->add("what do you do for fun", "My favorite hobby is singing.");
    canned->add("do you dream", "Only in binary.");
    dispatcher = std::make_unique<playful::Dispatcher>(settings, canned, detector, base, clock,
                                                       [this](const playful::Event& e) {
                                                         std::lock_guard lk(events_mutex);
                                                         events.push_back(e);
                                                       });
  }

  // Participant id landing in the requested arm under the rig's settings.
  std::string participant_in(playful::Arm arm) const {
    const auto& s = dispatcher->settings();
    for (int i = 0;; ++i) {
      std::string id = "p" + std::to_string(i);
      if (playful::assign_arm(id, s.treatment_ratio, s.seed) == arm) return id;
    }
  }
};

struct PathCase {
  playful::Arm arm;
  bool detected;
  bool canned;
  bool answered_in_time;
};

struct PathOutcome {
  playful::ResponseSource source;
  std::size_t tasks_created;
  int detector_calls;
  int base_calls;
};

inline playful::ResponseSource expected_source(const PathCase& c) {
  using playful::ResponseSource;
  if (c.arm == playful::Arm::Control || !c.detected) return ResponseSource::Automated;
  if (c.canned) return ResponseSource::Canned;
  return c.answered_in_time ? ResponseSource::Wizard : ResponseSource::Fallback;
}

// Drives one utterance through a fresh dispatcher for the given combination.
inline PathOutcome run_path(const PathCase& c) {
  Rig rig;
  auto session = rig.dispatcher->create_session(rig.participant_in(c.arm)).session_id;
  std::string text = c.detected ? (c.canned ? "Alexa, what do you do for fun?" : "do you like pancakes")
                                : (c.canned ? "what is the capital of peru" : "set a timer");
  if (!c.detected && c.canned) rig.canned->add("what is the capital of peru", "Lima.");

  auto sub = rig.dispatcher->submit_utterance(session, text);
  playful::ResponseDecision decision;
  if (sub.decision) {
    decision = *sub.decision;
  } else {
    if (c.answered_in_time) {
      rig.clock->advance(rig.dispatcher->settings().wizard_deadline_ms - 1);
      rig.dispatcher->claim_task(*sub.task_id, "op1");
      rig.dispatcher->submit_answer(*sub.task_id, "op1", "I both can and can't.");
    } else {
      rig.clock->advance(rig.dispatcher->settings().wizard_deadline_ms);
    }
    decision = rig.dispatcher->await_decision(*sub.task_id);
  }
  return {decision.source, rig.dispatcher->snapshot().tasks.size(), rig.detector->calls.load(),
          rig.base->calls.load()};
}

inline std::vector<PathCase> all_path_cases() {
  std::vector<PathCase> out;
  for (auto arm : {playful::Arm::Control, playful::Arm::Treatment})
    for (bool detected : {false, true})
      for (bool canned : {false, true})
        for (bool answered : {false, true}) out.push_back({arm, detected, canned, answered});
  return out;
}

// Random API traffic against a manual-clock dispatcher. Every call is legal
// or illegal at random; errors are expected and swallowed. Never blocks.
inline void random_operations(Rig& rig, std::mt19937_64& rng, int operations) {
  static const std::vector<std::string> texts{"what do you do for fun", "do you like pancakes", "set a timer",
                                              "do you dream", "play jazz", "are you afraid of the dark",
                                              "what is the weather", "will you marry me"};
  std::vector<std::string> sessions;
  std::vector<std::string> tasks;
  auto& d = *rig.dispatcher;
  for (int i = 0; i < operations; ++i) {
    try {
      switch (rng() % 9) {
        case 0:
          sessions.push_back(d.create_session("p" + std::to_string(rng() % 40)).session_id);
          break;
        case 1:
        case 2:
          if (!sessions.empty()) {
            auto sub = d.submit_utterance(sessions[rng() % sessions.size()], texts[rng() % texts.size()]);
            if (sub.task_id) tasks.push_back(*sub.task_id);
          }
          break;
        case 3:
          if (!tasks.empty()) d.claim_task(tasks[rng() % tasks.size()], "op" + std::to_string(rng() % 3));
          break;
        case 4:
          if (!tasks.empty())
            d.submit_answer(tasks[rng() % tasks.size()], "op" + std::to_string(rng() % 3), "answer " + std::to_string(i));
          break;
        case 5:
          rig.clock->advance(static_cast<std::int64_t>(rng() % 60'000));
          break;
        case 6:
          d.expire_overdue();
          break;
        case 7:
          if (!sessions.empty() && rng() % 4 == 0) d.close_session(sessions[rng() % sessions.size()]);
          break;
        default:
          if (!tasks.empty()) {
            auto t = d.task(tasks[rng() % tasks.size()]);
            if (t && (t->state == playful::TaskState::Answered || t->state == playful::TaskState::Expired))
              d.await_decision(t->task_id);
          }
      }
    } catch (const playful::Error&) {
    }
  }
}

}  // namespace testing
