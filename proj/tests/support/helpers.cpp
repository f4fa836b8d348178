#include "helpers.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netinet/in.h>
#include <signal.h>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "gvss/auth.hpp"

extern char** environ;

namespace gvss::testing {

TempDir::TempDir() {
  std::string tmpl = (std::filesystem::temp_directory_path() / "gvss-test-XXXXXX").string();
  if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
  path_ = tmpl;
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::permissions(path_, std::filesystem::perms::owner_all,
                               std::filesystem::perm_options::add, ec);
  std::filesystem::remove_all(path_, ec);
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::string> read_lines(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

int free_port() {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  ::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr));
  socklen_t len = sizeof(addr);
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  ::close(fd);
  return ntohs(addr.sin_port);
}

bool wait_until(const std::function<bool()>& pred, std::chrono::milliseconds timeout,
                std::chrono::milliseconds step) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  while (std::chrono::steady_clock::now() < deadline) {
    if (pred()) return true;
    std::this_thread::sleep_for(step);
  }
  return pred();
}

const std::string& test_password_hash() {
  static const std::string hash = hash_password(kTestPassword, 1000);
  return hash;
}

std::filesystem::path write_config(const TempDir& dir, const ConfigOptions& o) {
  write_file(dir / "beam", "CLEAR\n");
  std::ostringstream c;
  c << "# generated by the test suite\n"
    << "[server]\n"
    << "bind = 127.0.0.1\n"
    << "port = " << o.port << "\n"
    << "audit_log = " << (dir / "audit.log").string() << "\n"
    << o.server_extra << "\n"
    << "[sensor]\n"
    << "kind = " << o.sensor_kind << "\n"
    << "path = " << (dir / "beam").string() << "\n"
    << "poll_interval_ms = " << o.poll_ms << "\n"
    << "debounce_count = " << o.debounce << "\n"
    << o.sensor_extra << "\n"
    << "[camera cam0]\n"
    << "name = Test camera\n"
    << "kind = synthetic\n"
    << "width = " << o.cam_width << "\n"
    << "height = " << o.cam_height << "\n"
    << "cadence_ms = " << o.cadence_ms << "\n\n"
    << "[user " << kTestUser << "]\n"
    << "password_hash = " << test_password_hash() << "\n\n"
    << "[notifier]\n"
    << "transport = " << o.notifier << "\n"
    << "recipient = +15550100\n";
  if (o.notifier == "file") c << "path = " << (dir / "sms.log").string() << "\n";
  if (o.notifier == "webhook") c << "url = " << o.webhook_url << "\ntimeout_ms = 1000\n";
  c << "\n[storage]\n";
  if (o.include_snapshot_dir) c << "snapshot_dir = " << (dir / "snapshots").string() << "\n";
  const auto path = dir / "gvss.conf";
  write_file(path, c.str());
  return path;
}

namespace {

std::vector<std::string> merged_env(const std::map<std::string, std::string>& extra) {
  std::map<std::string, std::string> env;
  for (char** e = environ; *e; ++e) {
    const std::string kv = *e;
    const auto eq = kv.find('=');
    if (eq != std::string::npos) env[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  for (const auto& [k, v] : extra) env[k] = v;
  std::vector<std::string> out;
  for (const auto& [k, v] : env) out.push_back(k + "=" + v);
  return out;
}

int spawn(const std::vector<std::string>& argv, const std::map<std::string, std::string>& extra,
          const std::filesystem::path& out, const std::filesystem::path& err) {
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, 0, "/dev/null", O_RDONLY, 0);
  posix_spawn_file_actions_addopen(&actions, 1, out.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  posix_spawn_file_actions_addopen(&actions, 2, err.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  std::vector<char*> args;
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);
  const auto env_strings = merged_env(extra);
  std::vector<char*> envp;
  for (const auto& e : env_strings) envp.push_back(const_cast<char*>(e.c_str()));
  envp.push_back(nullptr);
  pid_t pid = -1;
  const int rc = posix_spawn(&pid, args[0], &actions, nullptr, args.data(), envp.data());
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) throw std::runtime_error("cannot spawn " + argv[0]);
  return pid;
}

int decode_status(int status) {
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  if (WIFSIGNALED(status)) return 128 + WTERMSIG(status);
  return -1;
}

}  // namespace

ProcessResult run_process(const std::vector<std::string>& argv,
                          const std::map<std::string, std::string>& extra_env,
                          std::chrono::milliseconds timeout) {
  TempDir io;
  const int pid = spawn(argv, extra_env, io / "out", io / "err");
  ProcessResult r;
  int status = 0;
  const bool done = wait_until(
      [&] { return ::waitpid(pid, &status, WNOHANG) == pid; }, timeout,
      std::chrono::milliseconds(5));
  if (!done) {
    ::kill(pid, SIGKILL);
    ::waitpid(pid, &status, 0);
    r.exit_code = -1;
  } else {
    r.exit_code = decode_status(status);
  }
  r.out = read_file(io / "out");
  r.err = read_file(io / "err");
  return r;
}

ChildProcess::ChildProcess(const std::vector<std::string>& argv,
                           const std::filesystem::path& log_dir,
                           const std::map<std::string, std::string>& extra_env)
    : out_(log_dir / "child.out"), err_(log_dir / "child.err") {
  pid_ = spawn(argv, extra_env, out_, err_);
}

ChildProcess::~ChildProcess() {
  if (running()) terminate(SIGKILL, std::chrono::seconds(5));
}

bool ChildProcess::running() {
  if (status_ >= 0) return false;
  int status = 0;
  if (::waitpid(pid_, &status, WNOHANG) == pid_) {
    status_ = decode_status(status);
    return false;
  }
  return true;
}

int ChildProcess::terminate(int sig, std::chrono::milliseconds timeout) {
  if (!running()) return status_;
  ::kill(pid_, sig);
  int status = 0;
  if (!wait_until([&] { return ::waitpid(pid_, &status, WNOHANG) == pid_; }, timeout,
                  std::chrono::milliseconds(5))) {
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, &status, 0);
  }
  status_ = decode_status(status);
  return status_;
}

std::string ChildProcess::stdout_text() const { return read_file(out_); }
std::string ChildProcess::stderr_text() const { return read_file(err_); }

}  // namespace gvss::testing
