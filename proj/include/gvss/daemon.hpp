#pragma once

#include <iostream>
#include <memory>

#include "gvss/audit.hpp"
#include "gvss/auth.hpp"
#include "gvss/camera.hpp"
#include "gvss/clock.hpp"
#include "gvss/config.hpp"
#include "gvss/notify.hpp"
#include "gvss/orchestrator.hpp"
#include "gvss/sensor.hpp"
#include "gvss/service.hpp"
#include "gvss/store.hpp"

namespace gvss {

struct DaemonOptions {
  const Clock* clock = nullptr;       // defaults to the system clock
  std::istream* beam_feed = &std::cin;
  std::ostream* notify_stream = &std::cout;
  // Replaces the configured transport (tests use this for failing stubs).
  std::unique_ptr<Transport> transport_override;
};

std::unique_ptr<Transport> make_transport(const NotifierSettings& settings, std::ostream& out);
std::unique_ptr<BeamSource> make_beam_source(const SensorSettings& settings, std::istream& feed);

// The whole server side: sensor loop, state machine, cameras, notifier,
// snapshot store and HTTP service, wired from one config.
class Daemon {
 public:
  // Throws Error(ConfigError) / Error(IoError) if the config cannot be
  // realised (missing directories, unusable camera sources, ...).
  explicit Daemon(DaemonConfig config, DaemonOptions options = {});
  ~Daemon();

  Daemon(const Daemon&) = delete;
  Daemon& operator=(const Daemon&) = delete;

  // Binds the configured address; false if the port is taken.
  bool bind();
  void start();
  // Stops every loop, releases an engaged lock guard and flushes the audit
  // log. Safe to call more than once.
  void stop();

  int port() const { return service_->port(); }
  const DaemonConfig& config() const { return config_; }

  AuditLog& audit() { return *audit_; }
  InputLock& lock() { return *lock_; }
  Orchestrator& orchestrator() { return *orchestrator_; }
  CameraRegistry& cameras() { return cameras_; }
  SnapshotStore& store() { return *store_; }
  SessionManager& sessions() { return *sessions_; }
  SensorMonitor& sensor() { return *sensor_; }
  Service& service() { return *service_; }
  Notifier& notifier() { return *notifier_; }

 private:
  DaemonConfig config_;
  SystemClock system_clock_;
  const Clock& clock_;
  std::unique_ptr<AuditLog> audit_;
  std::unique_ptr<InputLock> lock_;
  std::unique_ptr<Notifier> notifier_;
  std::unique_ptr<Orchestrator> orchestrator_;
  CameraRegistry cameras_;
  std::unique_ptr<SnapshotStore> store_;
  std::unique_ptr<Authenticator> auth_;
  std::unique_ptr<SessionManager> sessions_;
  std::unique_ptr<SensorMonitor> sensor_;
  std::unique_ptr<Service> service_;
  bool started_ = false;
  bool stopped_ = false;
};

}  // namespace gvss
