#include "gvss/service.hpp"

#include <httplib.h>

#include "gvss/error.hpp"

namespace gvss {

using nlohmann::json;

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message,
                const std::string& code = {}) {
  json body{{"error", message}};
  if (!code.empty()) body["code"] = code;
  send_json(res, status, body);
}

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownCamera:
    case ErrorCode::NotFound:
      return 404;
    case ErrorCode::NoFrameYet:
      return 503;
    case ErrorCode::InvalidSettings:
    case ErrorCode::InvalidMessage:
      return 400;
    case ErrorCode::NotLocked:
    case ErrorCode::IllegalTransition:
      return 409;
    case ErrorCode::IoError:
    case ErrorCode::StorageFull:
      return 507;
    default:
      return 500;
  }
}

// Runs a handler body, mapping library errors onto HTTP statuses.
template <typename F>
void guarded(httplib::Response& res, F&& body) {
  try {
    body();
  } catch (const Error& e) {
    send_error(res, status_for(e.code()), e.what(), to_string(e.code()));
  } catch (const std::exception& e) {
    send_error(res, 500, e.what());
  }
}

std::optional<bool> parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  return std::nullopt;
}

int parse_dim(const std::string& name, const std::string& v) {
  std::size_t used = 0;
  int n = 0;
  try {
    n = std::stoi(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) {
    throw Error(ErrorCode::InvalidSettings, name + " must be an integer");
  }
  return n;
}

const std::string* param(const std::multimap<std::string, std::string>& params,
                         const std::string& key) {
  const auto it = params.find(key);
  return it == params.end() ? nullptr : &it->second;
}

}  // namespace

const std::vector<Route>& service_routes() {
  static const std::vector<Route> kRoutes = {
      {"POST", "/login", false},
      {"GET", "/cameras", true},
      {"GET", "/frame", true},
      {"POST", "/control", true},
      {"GET", "/state", true},
      {"POST", "/arm", true},
      {"POST", "/disarm", true},
      {"POST", "/snapshots", true},
      {"GET", "/snapshots", true},
      {"GET", "/snapshots/0000000000000-000000", true},
      {"DELETE", "/snapshots/0000000000000-000000", true},
  };
  return kRoutes;
}

json to_json(const CameraDescriptor& d) {
  return {{"camera_id", d.camera_id},
          {"name", d.name},
          {"kind", to_string(d.kind)},
          {"native_width", d.native_width},
          {"native_height", d.native_height},
          {"normal_width", kNormalWidth},
          {"normal_height", kNormalHeight},
          {"high_width", d.native_width},
          {"high_height", d.native_height}};
}

json to_json(const SnapshotRecord& r) {
  return {{"snapshot_id", r.snapshot_id},
          {"camera_id", r.camera_id},
          {"captured_at", iso8601_millis(r.captured_at)},
          {"encoding", to_string(r.encoding)},
          {"byte_length", r.byte_length},
          {"media_type", r.media_type}};
}

json state_document(const OrchestratorSnapshot& snap, bool lock_engaged, BeamHealth health) {
  json doc{{"mode", to_string(snap.state.mode)},
           {"episode_id", snap.state.episode_id},
           {"lock_engaged", lock_engaged},
           {"beam_health", to_string(health)},
           {"stream_enabled", snap.actions.stream_enabled},
           {"entered_at", iso8601_millis(snap.state.entered_at)}};
  doc["notification_receipt"] =
      snap.actions.notification_receipt ? json(*snap.actions.notification_receipt) : json(nullptr);
  return doc;
}

RenderSettings parse_render_settings(const std::multimap<std::string, std::string>& params) {
  RenderSettings s;
  s.target_width = kNormalWidth;
  s.target_height = kNormalHeight;
  if (const auto* v = param(params, "w")) s.target_width = parse_dim("w", *v);
  if (const auto* v = param(params, "h")) s.target_height = parse_dim("h", *v);
  if (const auto* v = param(params, "constrain")) {
    const auto b = parse_bool(*v);
    if (!b) throw Error(ErrorCode::InvalidSettings, "constrain must be true or false");
    s.constrain = *b;
  }
  if (const auto* v = param(params, "enc")) {
    const auto e = parse_encoding(*v);
    if (!e) throw Error(ErrorCode::InvalidSettings, "enc must be jpeg, png24, png8 or pnggray");
    s.encoding = *e;
  }
  if (const auto* v = param(params, "time")) {
    const auto b = parse_bool(*v);
    if (!b) throw Error(ErrorCode::InvalidSettings, "time must be true or false");
    s.show_time = *b;
  }
  if (const auto* v = param(params, "font")) {
    if (*v == "1" || *v == "small") s.font_size = FontSize::Small;
    else if (*v == "2" || *v == "medium") s.font_size = FontSize::Medium;
    else if (*v == "3" || *v == "large") s.font_size = FontSize::Large;
    else throw Error(ErrorCode::InvalidSettings, "font must be 1, 2 or 3");
  }
  s.validate();
  return s;
}

Service::Service(ServiceContext ctx)
    : ctx_(std::move(ctx)), server_(std::make_unique<httplib::Server>()) {
  // httplib's default adds SO_REUSEPORT, which would let a second daemon share the port
  server_->set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  install_routes();
}

Service::~Service() { stop(); }

bool Service::bind(const std::string& host, int port) {
  if (port == 0) {
    port_ = server_->bind_to_any_port(host);
    return port_ > 0;
  }
  if (!server_->bind_to_port(host, port)) return false;
  port_ = port;
  return true;
}

void Service::start() {
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

void Service::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

void Service::install_routes() {
  auto& srv = *server_;

  srv.set_pre_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
    if (req.path == "/login") return httplib::Server::HandlerResponse::Unhandled;
    const auto token = req.get_header_value(kTokenHeader);
    if (token.empty() || !ctx_.sessions.validate(token)) {
      send_error(res, 401, "unauthorized");
      return httplib::Server::HandlerResponse::Handled;
    }
    return httplib::Server::HandlerResponse::Unhandled;
  });

  auto username_of = [this](const httplib::Request& req) {
    const auto s = ctx_.sessions.validate(req.get_header_value(kTokenHeader));
    return s ? s->username : std::string("unknown");
  };

  auto resolve_camera = [this](const httplib::Request& req) {
    return req.has_param("cam") ? req.get_param_value("cam") : ctx_.cameras.first_id();
  };

  // Rendering from the live feed is refused while the system is disarmed.
  auto require_streamable = [this]() {
    if (ctx_.orchestrator.state().mode == Mode::Disarmed) {
      throw Error(ErrorCode::IllegalTransition, "system is disarmed; live feed unavailable");
    }
  };

  srv.Post("/login", [this](const httplib::Request& req, httplib::Response& res) {
    std::string user;
    std::string pass;
    bool ok = false;
    const json body = json::parse(req.body, nullptr, false);
    if (!body.is_discarded() && body.is_object() && body.contains("username") &&
        body.contains("password") && body["username"].is_string() &&
        body["password"].is_string()) {
      user = body["username"].get<std::string>();
      pass = body["password"].get<std::string>();
      ok = true;
    } else if (req.has_param("username") && req.has_param("password")) {
      user = req.get_param_value("username");
      pass = req.get_param_value("password");
      ok = true;
    }
    if (!ok) return send_error(res, 400, "username and password are required");
    if (!ctx_.auth.authenticate(user, pass)) return send_error(res, 401, "invalid credentials");
    const Session s = ctx_.sessions.create(user);
    json cams = json::array();
    for (const auto& d : ctx_.cameras.descriptors()) cams.push_back(to_json(d));
    send_json(res, 200,
              {{"token", s.token}, {"expires_at", iso8601(s.expires_at)}, {"cameras", cams}});
  });

  srv.Get("/cameras", [this](const httplib::Request&, httplib::Response& res) {
    json cams = json::array();
    for (const auto& d : ctx_.cameras.descriptors()) cams.push_back(to_json(d));
    send_json(res, 200, cams);
  });

  srv.Get("/frame", [=, this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const std::string cam = resolve_camera(req);
      const RenderSettings settings = parse_render_settings(req.params);
      const auto frame = ctx_.cameras.capture_latest(cam);
      require_streamable();
      ++renders_;
      const EncodedImage img = render(*frame, settings, ctx_.clock.now());
      res.status = 200;
      res.set_header(kSequenceHeader, std::to_string(frame->sequence()));
      res.set_header("X-Frame-Width", std::to_string(img.width));
      res.set_header("X-Frame-Height", std::to_string(img.height));
      res.set_header("Cache-Control", "no-store");
      res.set_content(std::string(img.bytes.begin(), img.bytes.end()), img.media_type);
    });
  });

  srv.Post("/control", [=, this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const std::string type = req.has_param("Type") ? req.get_param_value("Type") : "";
      if (type != "Kill") {
        return send_error(res, 400, "unsupported control Type '" + type + "'");
      }
      ctx_.orchestrator.unlock("remote Kill command", username_of(req));
      send_json(res, 200,
                state_document(ctx_.orchestrator.snapshot(), ctx_.lock.active(), ctx_.beam_health()));
    });
  });

  srv.Get("/state", [this](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200,
              state_document(ctx_.orchestrator.snapshot(), ctx_.lock.active(), ctx_.beam_health()));
  });

  srv.Post("/arm", [=, this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      ctx_.orchestrator.arm(username_of(req));
      send_json(res, 200,
                state_document(ctx_.orchestrator.snapshot(), ctx_.lock.active(), ctx_.beam_health()));
    });
  });

  srv.Post("/disarm", [=, this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      ctx_.orchestrator.disarm(username_of(req));
      send_json(res, 200,
                state_document(ctx_.orchestrator.snapshot(), ctx_.lock.active(), ctx_.beam_health()));
    });
  });

  srv.Post("/snapshots", [=, this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const std::string cam = resolve_camera(req);
      const RenderSettings settings = parse_render_settings(req.params);
      const auto frame = ctx_.cameras.capture_latest(cam);
      require_streamable();
      ++renders_;
      const EncodedImage img = render(*frame, settings, ctx_.clock.now());
      const SnapshotRecord rec = ctx_.store.save(img, cam, frame->captured_at());
      send_json(res, 201, to_json(rec));
    });
  });

  srv.Get("/snapshots", [this](const httplib::Request&, httplib::Response& res) {
    json list = json::array();
    for (const auto& r : ctx_.store.list()) list.push_back(to_json(r));
    send_json(res, 200, list);
  });

  srv.Get("/snapshots/:id", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const EncodedImage img = ctx_.store.fetch(req.path_params.at("id"));
      res.status = 200;
      res.set_content(std::string(img.bytes.begin(), img.bytes.end()), img.media_type);
    });
  });

  srv.Delete("/snapshots/:id", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const std::string id = req.path_params.at("id");
      ctx_.store.remove(id);
      send_json(res, 200, {{"deleted", id}});
    });
  });
}

}  // namespace gvss
