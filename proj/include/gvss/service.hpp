#pragma once

#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "gvss/auth.hpp"
#include "gvss/camera.hpp"
#include "gvss/orchestrator.hpp"
#include "gvss/pipeline.hpp"
#include "gvss/sensor.hpp"
#include "gvss/store.hpp"

namespace httplib {
class Server;
}

namespace gvss {

inline constexpr const char* kTokenHeader = "X-GVSS-Token";
inline constexpr const char* kSequenceHeader = "X-Frame-Sequence";

struct Route {
  std::string method;
  std::string path;  // concrete example path
  bool requires_session;
};

// Every route the service registers, with a concrete path for each.
const std::vector<Route>& service_routes();

nlohmann::json to_json(const CameraDescriptor& d);
nlohmann::json to_json(const SnapshotRecord& r);
nlohmann::json state_document(const OrchestratorSnapshot& snap, bool lock_engaged,
                              BeamHealth health);

// Builds RenderSettings from request parameters (w, h, constrain, enc, time,
// font). Absent values take the defaults: normal resolution, constrain on,
// jpeg, time on, medium font. Throws Error(InvalidSettings).
RenderSettings parse_render_settings(const std::multimap<std::string, std::string>& params);

struct ServiceContext {
  Orchestrator& orchestrator;
  InputLock& lock;
  CameraRegistry& cameras;
  SnapshotStore& store;
  const Authenticator& auth;
  SessionManager& sessions;
  const Clock& clock;
  std::function<BeamHealth()> beam_health;
};

// HTTP API over the daemon's modules. Owns the httplib server.
class Service {
 public:
  explicit Service(ServiceContext ctx);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Port 0 picks a free port. Returns false if the address cannot be bound.
  bool bind(const std::string& host, int port);
  int port() const { return port_; }
  // Serves on a background thread until stop().
  void start();
  void stop();

  std::uint64_t renders() const { return renders_.load(); }

 private:
  void install_routes();

  ServiceContext ctx_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<std::uint64_t> renders_{0};
};

}  // namespace gvss
