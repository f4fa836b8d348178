#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "gvss/camera.hpp"
#include "gvss/orchestrator.hpp"
#include "gvss/sensor.hpp"

namespace gvss {

struct SensorSettings {
  BeamSourceConfig beam;
  std::filesystem::path path;                        // SimulatedFile
  std::vector<std::optional<BeamStatus>> script;     // ScriptedSequence
};

struct NotifierSettings {
  enum class Kind { File, Webhook, Stdout };
  Kind kind = Kind::Stdout;
  std::string recipient = "owner";
  std::filesystem::path path;  // File
  std::string url;             // Webhook
  int timeout_ms = 3000;
};

struct UserEntry {
  std::string username;
  std::string password_hash;  // pbkdf2-sha256$<iter>$<salt-hex>$<hash-hex>
};

struct DaemonConfig {
  std::string bind = "127.0.0.1";
  int port = 8686;
  std::optional<std::filesystem::path> audit_log;
  LockHooks hooks;
  std::string log_level = "info";

  SensorSettings sensor;
  std::vector<CameraConfig> cameras;
  std::vector<UserEntry> users;
  NotifierSettings notifier;
  std::filesystem::path snapshot_dir;
};

// Line-oriented "key = value" with [server], [sensor], [camera <id>],
// [user <name>], [notifier] and [storage] sections; '#' starts a comment.
// Throws Error(ConfigError) with "<source>:<line>: ..." on the first problem.
DaemonConfig parse_config(std::istream& in, const std::string& source_name);
DaemonConfig load_config(const std::filesystem::path& path);

// Splits a command line on whitespace, honouring double quotes. No shell.
std::vector<std::string> split_command(const std::string& text);

}  // namespace gvss
