// gvss: the surveillance daemon and a scripted client for it.

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "gvss/auth.hpp"
#include "gvss/client.hpp"
#include "gvss/config.hpp"
#include "gvss/daemon.hpp"
#include "gvss/error.hpp"

namespace {

// Exit codes shared with shell scripts.
enum Exit : int {
  kOk = 0,
  kClientError = 1,
  kConfigError = 2,
  kPortInUse = 3,
  kNoStateChange = 4,
  kServerError = 5,
  kNetworkError = 6,
};

std::string config_path_or_env(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("GVSS_CONFIG"); env && *env) return env;
  return {};
}

void print_result(const gvss::HttpResult& r) {
  if (r.status == 0) {
    std::cerr << "network error: " << r.network_error << "\n";
    return;
  }
  if (r.status >= 300) {
    std::cerr << "HTTP " << r.status << ": " << r.body << "\n";
  } else if (r.content_type.rfind("application/json", 0) == 0) {
    std::cout << r.body << "\n";
  }
}

int write_out(const gvss::HttpResult& r, const std::string& out) {
  if (exit_code_for(r) != kOk) {
    print_result(r);
    return exit_code_for(r);
  }
  if (out.empty() || out == "-") {
    std::cout.write(r.body.data(), static_cast<std::streamsize>(r.body.size()));
    return kOk;
  }
  std::ofstream f(out, std::ios::binary);
  f.write(r.body.data(), static_cast<std::streamsize>(r.body.size()));
  if (!f) {
    std::cerr << "cannot write " << out << "\n";
    return kClientError;
  }
  const auto seq = r.header(gvss::kSequenceHeader);
  nlohmann::json doc{{"path", out}, {"bytes", r.body.size()}, {"media_type", r.content_type}};
  if (!seq.empty()) doc["sequence"] = std::stoull(seq);
  std::cout << doc.dump() << "\n";
  return kOk;
}

struct ClientOptions {
  std::string server;
  std::string session_file;
};

gvss::Client make_client(const ClientOptions& o) {
  const auto path = o.session_file.empty() ? gvss::session_file_path()
                                           : std::filesystem::path(o.session_file);
  const auto cached = gvss::load_session(path);
  std::string server = o.server;
  if (server.empty() && cached) server = cached->server;
  if (server.empty()) server = "http://127.0.0.1:8686";
  return gvss::Client(server, cached ? cached->token : std::string());
}

int run_serve(const std::string& config_flag, int port, const std::string& bind,
              const std::string& log_level) {
  const std::string path = config_path_or_env(config_flag);
  if (path.empty()) {
    std::cerr << "no config: pass --config or set GVSS_CONFIG\n";
    return kConfigError;
  }
  gvss::DaemonConfig cfg;
  try {
    cfg = gvss::load_config(path);
  } catch (const gvss::Error& e) {
    std::cerr << e.what() << "\n";
    return kConfigError;
  }
  if (port >= 0) cfg.port = port;
  if (!bind.empty()) cfg.bind = bind;
  if (!log_level.empty()) cfg.log_level = log_level;
  spdlog::set_level(spdlog::level::from_str(cfg.log_level));

  // Block termination signals before any thread starts; a dedicated waiter
  // thread turns them into an orderly stop.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGTERM);
  sigaddset(&signals, SIGINT);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  std::unique_ptr<gvss::Daemon> daemon;
  try {
    daemon = std::make_unique<gvss::Daemon>(cfg);
  } catch (const std::exception& e) {
    std::cerr << path << ": " << e.what() << "\n";
    return kConfigError;
  }
  if (!daemon->bind()) {
    std::cerr << "cannot bind " << cfg.bind << ":" << cfg.port << " (address in use?)\n";
    return kPortInUse;
  }
  daemon->start();

  std::string ids;
  for (const auto& d : daemon->cameras().descriptors()) ids += (ids.empty() ? "" : ",") + d.camera_id;
  std::cout << "gvss listening on http://" << cfg.bind << ":" << daemon->port()
            << " cameras=" << ids << std::endl;
  spdlog::info("sensor polling every {} ms, debounce {}", cfg.sensor.beam.poll_interval.count(),
               cfg.sensor.beam.debounce_count);

  int sig = 0;
  sigwait(&signals, &sig);
  spdlog::info("signal {} received, shutting down", sig);
  daemon->stop();
  return kOk;
}

int run_simulate_breach(const std::string& config_flag, const ClientOptions& opts,
                        const std::string& user, const std::string& password) {
  const std::string path = config_path_or_env(config_flag);
  gvss::DaemonConfig cfg;
  try {
    if (path.empty()) throw gvss::Error(gvss::ErrorCode::ConfigError, "no config: pass --config");
    cfg = gvss::load_config(path);
  } catch (const gvss::Error& e) {
    std::cerr << e.what() << "\n";
    return kConfigError;
  }
  if (cfg.sensor.beam.kind != gvss::BeamSourceConfig::Kind::SimulatedFile) {
    std::cerr << "simulate-breach needs [sensor] kind = file; this daemon reads its beam "
                 "from another source\n";
    return kConfigError;
  }

  ClientOptions o = opts;
  if (o.server.empty()) {
    o.server = "http://" + cfg.bind + ":" + std::to_string(cfg.port);
  }
  gvss::Client client = make_client(o);
  if (!user.empty()) {
    const auto r = client.login(user, password);
    if (exit_code_for(r) != kOk) {
      print_result(r);
      return exit_code_for(r);
    }
  }
  const auto before = client.state();
  if (exit_code_for(before) != kOk) {
    print_result(before);
    return exit_code_for(before);
  }
  const auto episode_before = before.json().value("episode_id", std::uint64_t{0});

  auto write_token = [&](const char* token) {
    const auto tmp = cfg.sensor.path.string() + ".tmp";
    {
      std::ofstream f(tmp, std::ios::trunc);
      f << token << "\n";
    }
    std::filesystem::rename(tmp, cfg.sensor.path);
  };
  const auto window = cfg.sensor.beam.poll_interval * (cfg.sensor.beam.debounce_count + 1);
  // Re-clear first so the debouncer sees a fresh edge even if the file was
  // left obstructed by an earlier episode.
  write_token("CLEAR");
  std::this_thread::sleep_for(window);
  write_token("OBSTRUCTED");
  std::this_thread::sleep_for(window);

  const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(5);
  gvss::HttpResult last;
  while (std::chrono::steady_clock::now() < deadline) {
    last = client.state();
    if (exit_code_for(last) != kOk) {
      print_result(last);
      return exit_code_for(last);
    }
    const auto doc = last.json();
    const std::string mode = doc.value("mode", "");
    if (doc.value("episode_id", std::uint64_t{0}) > episode_before &&
        (mode == "Breached" || mode == "LockedStreaming")) {
      std::cout << last.body << "\n";
      return kOk;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
  std::cerr << "state did not change within 5 s\n";
  std::cout << last.body << "\n";
  return kNoStateChange;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gvss - intrusion-triggered camera surveillance daemon and client"};
  app.require_subcommand(1);
  // -h would clash with the --h height option
  app.set_help_flag("--help", "Print this help message and exit");

  ClientOptions client_opts;
  auto add_client_flags = [&](CLI::App* sub) {
    sub->add_option("--server", client_opts.server, "Daemon URL, e.g. http://127.0.0.1:8686");
    sub->add_option("--session-file", client_opts.session_file,
                    "Session cache (default $GVSS_SESSION_FILE or ~/.gvss-session)");
  };

  // serve
  std::string config_path;
  int port = -1;
  std::string bind_addr;
  std::string log_level;
  auto* serve = app.add_subcommand("serve", "Run the daemon");
  serve->add_option("--config", config_path, "Config file (fallback: $GVSS_CONFIG)");
  serve->add_option("--port", port, "Listen port (default 8686)");
  serve->add_option("--bind", bind_addr, "Listen address (default 127.0.0.1)");
  serve->add_option("--log-level", log_level, "trace|debug|info|warn|error");

  // login
  std::string user;
  std::string password;
  auto* login = app.add_subcommand("login", "Log in and cache the session token");
  add_client_flags(login);
  login->add_option("--user", user)->required();
  login->add_option("--password", password)->required();

  auto* cameras = app.add_subcommand("cameras", "List cameras");
  add_client_flags(cameras);

  // frame / snapshot save share the render parameters
  std::map<std::string, std::string> render;
  std::string out_path;
  auto add_render_flags = [&](CLI::App* sub) {
    for (const char* key : {"cam", "w", "h", "constrain", "enc", "time", "font"}) {
      sub->add_option_function<std::string>(
          std::string("--") + key, [&render, key](const std::string& v) { render[key] = v; });
    }
  };
  auto* frame = app.add_subcommand("frame", "Fetch the current frame");
  add_client_flags(frame);
  add_render_flags(frame);
  frame->add_option("--out", out_path, "Write image bytes here (default stdout)");

  auto* snapshot = app.add_subcommand("snapshot", "Save, list, fetch or delete snapshots");
  snapshot->require_subcommand(1);
  auto* snap_save = snapshot->add_subcommand("save", "Save the current frame");
  add_client_flags(snap_save);
  add_render_flags(snap_save);
  auto* snap_list = snapshot->add_subcommand("list", "List snapshots, newest first");
  add_client_flags(snap_list);
  std::string snapshot_id;
  auto* snap_get = snapshot->add_subcommand("get", "Download a snapshot");
  add_client_flags(snap_get);
  snap_get->add_option("id", snapshot_id)->required();
  snap_get->add_option("--out", out_path);
  auto* snap_delete = snapshot->add_subcommand("delete", "Delete a snapshot");
  add_client_flags(snap_delete);
  snap_delete->add_option("id", snapshot_id)->required();

  std::string kill_type = "Kill";
  auto* kill = app.add_subcommand("kill", "Send the Kill control command (unlock)");
  add_client_flags(kill);
  kill->add_option("--type", kill_type, "Raw Type parameter (default Kill)");

  auto* state = app.add_subcommand("state", "Show the protection state");
  add_client_flags(state);
  auto* arm = app.add_subcommand("arm", "Arm the system");
  add_client_flags(arm);
  auto* disarm = app.add_subcommand("disarm", "Disarm the system");
  add_client_flags(disarm);

  auto* breach = app.add_subcommand("simulate-breach", "Obstruct the simulated beam");
  add_client_flags(breach);
  breach->add_option("--config", config_path, "Daemon config (fallback: $GVSS_CONFIG)");
  breach->add_option("--user", user, "Log in first with these credentials");
  breach->add_option("--password", password);

  int iterations = gvss::kDefaultPbkdf2Iterations;
  auto* hash = app.add_subcommand("hash-password", "Print a password_hash value for a config");
  hash->add_option("--password", password)->required();
  hash->add_option("--iterations", iterations)->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;
  }

  try {
    if (serve->parsed()) return run_serve(config_path, port, bind_addr, log_level);
    if (breach->parsed()) return run_simulate_breach(config_path, client_opts, user, password);
    if (hash->parsed()) {
      std::cout << gvss::hash_password(password, iterations) << "\n";
      return kOk;
    }

    gvss::Client client = make_client(client_opts);
    gvss::HttpResult r;
    if (login->parsed()) {
      r = client.login(user, password);
      if (r.status == 200) {
        const auto path = client_opts.session_file.empty()
                              ? gvss::session_file_path()
                              : std::filesystem::path(client_opts.session_file);
        gvss::save_session(path, {client.server_url(), client.token()});
      }
    } else if (cameras->parsed()) {
      r = client.cameras();
    } else if (frame->parsed()) {
      return write_out(client.frame(render), out_path);
    } else if (snap_save->parsed()) {
      r = client.snapshot_save(render);
    } else if (snap_list->parsed()) {
      r = client.snapshot_list();
    } else if (snap_get->parsed()) {
      return write_out(client.snapshot_get(snapshot_id), out_path);
    } else if (snap_delete->parsed()) {
      r = client.snapshot_delete(snapshot_id);
    } else if (kill->parsed()) {
      r = client.control(kill_type);
    } else if (state->parsed()) {
      r = client.state();
    } else if (arm->parsed()) {
      r = client.arm();
    } else if (disarm->parsed()) {
      r = client.disarm();
    }
    print_result(r);
    return exit_code_for(r);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kClientError;
  }
}
