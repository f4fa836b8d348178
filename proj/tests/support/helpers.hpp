#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace gvss::testing {

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

void write_file(const std::filesystem::path& p, const std::string& text);
std::string read_file(const std::filesystem::path& p);
std::vector<std::string> read_lines(const std::filesystem::path& p);

// A port that was free a moment ago.
int free_port();

bool wait_until(const std::function<bool()>& pred, std::chrono::milliseconds timeout,
                std::chrono::milliseconds step = std::chrono::milliseconds(10));

inline constexpr const char* kTestUser = "owner";
inline constexpr const char* kTestPassword = "s3cret";
// hash of kTestPassword with a low iteration count, computed once.
const std::string& test_password_hash();

struct ConfigOptions {
  int port = 0;
  std::string sensor_kind = "file";
  std::string sensor_extra;  // extra [sensor] lines, e.g. script = ...
  int poll_ms = 100;
  int debounce = 2;
  std::string notifier = "file";  // file | webhook | stdout
  std::string webhook_url;
  int cadence_ms = 1000;
  int cam_width = 640;
  int cam_height = 480;
  bool include_snapshot_dir = true;
  std::string server_extra;  // extra [server] lines
};

// Writes <dir>/gvss.conf (plus sensor file "beam" containing CLEAR) and
// returns the config path. Notification file: <dir>/sms.log; audit:
// <dir>/audit.log; snapshots: <dir>/snapshots.
std::filesystem::path write_config(const TempDir& dir, const ConfigOptions& o);

struct ProcessResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

// Runs argv to completion, capturing stdout/stderr. extra_env entries are
// added to the current environment.
ProcessResult run_process(const std::vector<std::string>& argv,
                          const std::map<std::string, std::string>& extra_env = {},
                          std::chrono::milliseconds timeout = std::chrono::seconds(30));

// A long-running child (the daemon).
class ChildProcess {
 public:
  ChildProcess(const std::vector<std::string>& argv, const std::filesystem::path& log_dir,
               const std::map<std::string, std::string>& extra_env = {});
  ~ChildProcess();

  bool running();
  // Sends the signal and waits; returns the exit code (or 128+signal).
  int terminate(int sig, std::chrono::milliseconds timeout = std::chrono::seconds(10));
  std::string stdout_text() const;
  std::string stderr_text() const;

 private:
  int pid_ = -1;
  int status_ = -1;
  std::filesystem::path out_;
  std::filesystem::path err_;
};

}  // namespace gvss::testing
