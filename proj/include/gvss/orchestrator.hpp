#pragma once

#include <cstdint>
#include <functional>
#include <future>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "gvss/audit.hpp"
#include "gvss/clock.hpp"
#include "gvss/notify.hpp"
#include "gvss/sensor.hpp"

namespace gvss {

// Argument vectors run without a shell. Empty means no hook.
struct LockHooks {
  std::vector<std::string> lock_command;
  std::vector<std::string> unlock_command;
};

// Runs argv, waits for it, returns the exit status (127 if it could not be
// started).
int run_command(const std::vector<std::string>& argv);

// Software stand-in for disabling the workstation's keyboard and mouse: a
// lock flag with LOCK/UNLOCK audit lines and optional platform hooks.
class InputLock {
 public:
  InputLock(AuditLog& audit, LockHooks hooks = {});

  // Engages the guard. Returns false (and does nothing) if already engaged.
  bool lock_input(std::uint64_t episode);
  // Releases the guard. Returns false if it was not engaged.
  bool release(std::uint64_t episode, const std::string& detail);
  bool active() const;

 private:
  void run_hook(const std::vector<std::string>& argv, std::uint64_t episode,
                const char* what);

  AuditLog& audit_;
  LockHooks hooks_;
  mutable std::mutex mu_;
  bool active_ = false;
};

enum class Mode { Disarmed, Armed, Breached, LockedStreaming };

const char* to_string(Mode m);

struct IntrusionState {
  Mode mode = Mode::Armed;
  std::uint64_t episode_id = 0;
  WallTime entered_at{};

  bool operator==(const IntrusionState&) const = default;
};

struct BreachActions {
  bool lock_engaged = false;
  std::optional<std::string> notification_receipt;
  bool stream_enabled = false;

  bool operator==(const BreachActions&) const = default;
};

struct OrchestratorSnapshot {
  IntrusionState state;
  BreachActions actions;
};

// Sends the breach notification for one episode.
using BreachNotifier = std::function<DeliveryReceipt(std::uint64_t episode, WallTime at)>;

// Owns the intrusion state machine:
//   Disarmed <-> Armed       operator
//   Armed -> Breached        sensor obstruction
//   Breached -> LockedStreaming once the lock is engaged
//   Breached/LockedStreaming -> Armed on unlock
// All mutations go through one mutex; breach sub-actions run as child tasks.
class Orchestrator {
 public:
  enum class BreachStep { LockEngaged };

  Orchestrator(AuditLog& audit, InputLock& lock, BreachNotifier notifier,
               const Clock& clock, Mode initial = Mode::Armed);
  ~Orchestrator();

  Orchestrator(const Orchestrator&) = delete;
  Orchestrator& operator=(const Orchestrator&) = delete;

  IntrusionState handle_transition(const BeamTransition& t);
  void record_health(const HealthChange& h);

  // Throws Error(NotLocked) unless Breached or LockedStreaming.
  IntrusionState unlock(const std::string& reason, const std::string& actor = "operator");
  // Throw Error(IllegalTransition) outside Disarmed<->Armed.
  IntrusionState arm(const std::string& actor = "operator");
  IntrusionState disarm(const std::string& actor = "operator");

  IntrusionState state() const;
  BreachActions actions() const;
  OrchestratorSnapshot snapshot() const;

  std::size_t notifications_dispatched() const;
  // Blocks until every in-flight notification has finished.
  void drain();

  // Test seam: called between lock confirmation and promotion to
  // LockedStreaming, without the state mutex held.
  void set_step_hook(std::function<void(BreachStep, std::uint64_t episode)> hook);

 private:
  void enter(Mode m);

  AuditLog& audit_;
  InputLock& lock_;
  BreachNotifier notifier_;
  const Clock& clock_;

  mutable std::mutex mu_;
  IntrusionState state_;
  BreachActions actions_;
  std::size_t dispatched_ = 0;
  std::function<void(BreachStep, std::uint64_t)> step_hook_;

  std::mutex pending_mu_;
  std::vector<std::future<void>> pending_;
};

}  // namespace gvss
