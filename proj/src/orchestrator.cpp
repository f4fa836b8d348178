#include "gvss/orchestrator.hpp"

#include <spawn.h>
#include <sys/wait.h>

#include "gvss/error.hpp"

extern char** environ;

namespace gvss {

int run_command(const std::vector<std::string>& argv) {
  if (argv.empty()) return 0;
  std::vector<char*> args;
  args.reserve(argv.size() + 1);
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);
  pid_t pid = 0;
  if (posix_spawnp(&pid, args[0], nullptr, nullptr, args.data(), environ) != 0) return 127;
  int status = 0;
  if (waitpid(pid, &status, 0) < 0) return 127;
  return WIFEXITED(status) ? WEXITSTATUS(status) : 128;
}

InputLock::InputLock(AuditLog& audit, LockHooks hooks)
    : audit_(audit), hooks_(std::move(hooks)) {}

bool InputLock::lock_input(std::uint64_t episode) {
  std::lock_guard lock(mu_);
  if (active_) return false;
  active_ = true;
  audit_.append(AuditEvent::Lock, episode, "input lock engaged");
  run_hook(hooks_.lock_command, episode, "lock");
  return true;
}

bool InputLock::release(std::uint64_t episode, const std::string& detail) {
  std::lock_guard lock(mu_);
  if (!active_) return false;
  active_ = false;
  audit_.append(AuditEvent::Unlock, episode, detail);
  run_hook(hooks_.unlock_command, episode, "unlock");
  return true;
}

bool InputLock::active() const {
  std::lock_guard lock(mu_);
  return active_;
}

void InputLock::run_hook(const std::vector<std::string>& argv, std::uint64_t episode,
                         const char* what) {
  if (argv.empty()) return;
  const int rc = run_command(argv);
  if (rc != 0) {
    audit_.append(AuditEvent::Health, episode,
                  std::string(what) + " hook '" + argv[0] + "' exited " + std::to_string(rc));
  }
}

const char* to_string(Mode m) {
  switch (m) {
    case Mode::Disarmed: return "Disarmed";
    case Mode::Armed: return "Armed";
    case Mode::Breached: return "Breached";
    case Mode::LockedStreaming: return "LockedStreaming";
  }
  return "Disarmed";
}

Orchestrator::Orchestrator(AuditLog& audit, InputLock& lock, BreachNotifier notifier,
                           const Clock& clock, Mode initial)
    : audit_(audit), lock_(lock), notifier_(std::move(notifier)), clock_(clock) {
  if (initial != Mode::Armed && initial != Mode::Disarmed) {
    throw Error(ErrorCode::IllegalTransition, "initial mode must be Armed or Disarmed");
  }
  state_.mode = initial;
  state_.entered_at = clock_.now();
  audit_.append(initial == Mode::Armed ? AuditEvent::Arm : AuditEvent::Disarm, 0, "startup");
}

Orchestrator::~Orchestrator() { drain(); }

void Orchestrator::enter(Mode m) {
  state_.mode = m;
  state_.entered_at = clock_.now();
}

IntrusionState Orchestrator::handle_transition(const BeamTransition& t) {
  std::uint64_t episode = 0;
  WallTime breached_at;
  {
    std::lock_guard lock(mu_);
    if (t.to == BeamStatus::Clear) return state_;
    switch (state_.mode) {
      case Mode::Disarmed:
        audit_.append(AuditEvent::Disarm, state_.episode_id, "obstruction ignored while disarmed");
        return state_;
      case Mode::Breached:
      case Mode::LockedStreaming:
        return state_;
      case Mode::Armed:
        break;
    }
    episode = ++state_.episode_id;
    enter(Mode::Breached);
    breached_at = state_.entered_at;
    actions_ = BreachActions{};
    ++dispatched_;
    audit_.append(AuditEvent::Breach, episode, "beam obstructed");
  }

  auto notify_task = std::async(std::launch::async, [this, episode, breached_at] {
    DeliveryReceipt receipt;
    try {
      receipt = notifier_(episode, breached_at);
    } catch (const std::exception& e) {
      receipt.status = DeliveryReceipt::Status::Failed;
      receipt.detail = e.what();
      audit_.append(AuditEvent::NotifyFail, episode, receipt.detail);
    }
    std::lock_guard lock(mu_);
    if (state_.episode_id == episode && !receipt.receipt_id.empty()) {
      actions_.notification_receipt = receipt.receipt_id;
    }
  });
  {
    std::lock_guard lock(pending_mu_);
    std::erase_if(pending_, [](const std::future<void>& f) {
      return f.wait_for(std::chrono::seconds(0)) == std::future_status::ready;
    });
    pending_.push_back(std::move(notify_task));
  }

  auto lock_task = std::async(std::launch::async, [this, episode] { lock_.lock_input(episode); });
  lock_task.get();

  std::function<void(BreachStep, std::uint64_t)> hook;
  {
    std::lock_guard lock(mu_);
    hook = step_hook_;
  }
  if (hook) hook(BreachStep::LockEngaged, episode);

  std::lock_guard lock(mu_);
  if (state_.mode == Mode::Breached && state_.episode_id == episode) {
    actions_.lock_engaged = lock_.active();
    actions_.stream_enabled = true;
    enter(Mode::LockedStreaming);
  } else if (state_.mode != Mode::Breached && state_.mode != Mode::LockedStreaming) {
    // Unlocked while the lock action was in flight.
    lock_.release(episode, "breach actions cancelled by unlock");
    actions_.lock_engaged = false;
  }
  return state_;
}

void Orchestrator::record_health(const HealthChange& h) {
  std::lock_guard lock(mu_);
  audit_.append(AuditEvent::Health, state_.episode_id,
                std::string("beam ") + to_string(h.health) + ": " + h.detail);
}

IntrusionState Orchestrator::unlock(const std::string& reason, const std::string& actor) {
  std::lock_guard lock(mu_);
  if (state_.mode != Mode::Breached && state_.mode != Mode::LockedStreaming) {
    throw Error(ErrorCode::NotLocked,
                std::string("not locked (mode ") + to_string(state_.mode) + ")");
  }
  lock_.release(state_.episode_id, "actor=" + actor + " reason=" + reason);
  actions_.lock_engaged = false;
  enter(Mode::Armed);
  audit_.append(AuditEvent::Arm, state_.episode_id, "re-armed after unlock by " + actor);
  return state_;
}

IntrusionState Orchestrator::arm(const std::string& actor) {
  std::lock_guard lock(mu_);
  if (state_.mode != Mode::Disarmed) {
    throw Error(ErrorCode::IllegalTransition,
                std::string("cannot arm from ") + to_string(state_.mode));
  }
  enter(Mode::Armed);
  audit_.append(AuditEvent::Arm, state_.episode_id, "armed by " + actor);
  return state_;
}

IntrusionState Orchestrator::disarm(const std::string& actor) {
  std::lock_guard lock(mu_);
  if (state_.mode != Mode::Armed) {
    throw Error(ErrorCode::IllegalTransition,
                std::string("cannot disarm from ") + to_string(state_.mode));
  }
  enter(Mode::Disarmed);
  audit_.append(AuditEvent::Disarm, state_.episode_id, "disarmed by " + actor);
  return state_;
}

IntrusionState Orchestrator::state() const {
  std::lock_guard lock(mu_);
  return state_;
}

BreachActions Orchestrator::actions() const {
  std::lock_guard lock(mu_);
  return actions_;
}

OrchestratorSnapshot Orchestrator::snapshot() const {
  std::lock_guard lock(mu_);
  return {state_, actions_};
}

std::size_t Orchestrator::notifications_dispatched() const {
  std::lock_guard lock(mu_);
  return dispatched_;
}

void Orchestrator::drain() {
  std::vector<std::future<void>> pending;
  {
    std::lock_guard lock(pending_mu_);
    pending.swap(pending_);
  }
  for (auto& f : pending) f.wait();
}

void Orchestrator::set_step_hook(std::function<void(BreachStep, std::uint64_t)> hook) {
  std::lock_guard lock(mu_);
  step_hook_ = std::move(hook);
}

}  // namespace gvss
