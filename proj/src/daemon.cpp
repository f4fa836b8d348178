#include "gvss/daemon.hpp"

#include "gvss/error.hpp"

namespace gvss {

std::unique_ptr<Transport> make_transport(const NotifierSettings& s, std::ostream& out) {
  switch (s.kind) {
    case NotifierSettings::Kind::File:
      return std::make_unique<FileTransport>(s.path);
    case NotifierSettings::Kind::Webhook:
      return std::make_unique<WebhookTransport>(s.url, std::chrono::milliseconds(s.timeout_ms));
    case NotifierSettings::Kind::Stdout:
      return std::make_unique<StreamTransport>(out);
  }
  return std::make_unique<StreamTransport>(out);
}

std::unique_ptr<BeamSource> make_beam_source(const SensorSettings& s, std::istream& feed) {
  switch (s.beam.kind) {
    case BeamSourceConfig::Kind::SimulatedFile:
      return std::make_unique<FileBeamSource>(s.path);
    case BeamSourceConfig::Kind::StandardInputFeed:
      return std::make_unique<StreamBeamSource>(feed);
    case BeamSourceConfig::Kind::ScriptedSequence:
      return std::make_unique<ScriptedBeamSource>(s.script);
  }
  throw Error(ErrorCode::ConfigError, "unknown sensor kind");
}

Daemon::Daemon(DaemonConfig config, DaemonOptions options)
    : config_(std::move(config)),
      clock_(options.clock ? *options.clock : static_cast<const Clock&>(system_clock_)) {
  audit_ = std::make_unique<AuditLog>(clock_, config_.audit_log);
  lock_ = std::make_unique<InputLock>(*audit_, config_.hooks);
  notifier_ = std::make_unique<Notifier>(
      options.transport_override ? std::move(options.transport_override)
                                 : make_transport(config_.notifier, *options.notify_stream),
      *audit_);

  for (const auto& cam : config_.cameras) cameras_.add(make_camera(cam, clock_));
  const std::string alarm_camera = config_.cameras.front().id;
  const std::string recipient = config_.notifier.recipient;

  orchestrator_ = std::make_unique<Orchestrator>(
      *audit_, *lock_,
      [this, alarm_camera, recipient](std::uint64_t episode, WallTime at) {
        return notifier_->notify(format_breach_message(episode, alarm_camera, at, recipient));
      },
      clock_);

  store_ = std::make_unique<SnapshotStore>(config_.snapshot_dir, clock_);
  auth_ = std::make_unique<Authenticator>(config_.users);
  sessions_ = std::make_unique<SessionManager>(clock_);

  sensor_ = std::make_unique<SensorMonitor>(
      make_beam_source(config_.sensor, *options.beam_feed), config_.sensor.beam,
      [this](const SensorEvent& ev) {
        if (const auto* t = std::get_if<BeamTransition>(&ev)) {
          orchestrator_->handle_transition(*t);
        } else {
          orchestrator_->record_health(std::get<HealthChange>(ev));
        }
      });

  service_ = std::make_unique<Service>(ServiceContext{
      *orchestrator_, *lock_, cameras_, *store_, *auth_, *sessions_, clock_,
      [this] { return sensor_->health(); }});
}

Daemon::~Daemon() { stop(); }

bool Daemon::bind() { return service_->bind(config_.bind, config_.port); }

void Daemon::start() {
  if (started_) return;
  started_ = true;
  if (service_->port() == 0 && !bind()) {
    throw Error(ErrorCode::IoError,
                "cannot bind " + config_.bind + ":" + std::to_string(config_.port));
  }
  cameras_.start_all();
  sensor_->start();
  service_->start();
}

void Daemon::stop() {
  if (stopped_) return;
  stopped_ = true;
  service_->stop();
  sensor_->stop();
  cameras_.stop_all();
  orchestrator_->drain();
  lock_->release(orchestrator_->state().episode_id, "daemon shutdown");
  audit_->flush();
}

}  // namespace gvss
