#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

namespace gvss {

struct HttpResult {
  int status = 0;  // 0 when the request never got a response
  std::string body;
  std::string content_type;
  std::map<std::string, std::string> headers;
  std::string network_error;

  nlohmann::json json() const;
  std::string header(const std::string& name) const;
};

// CLI exit code for an HTTP outcome: 0 for 2xx, 1 for 4xx, 5 for 5xx,
// 6 when no response arrived.
int exit_code_for(const HttpResult& r);

using Params = std::map<std::string, std::string>;

// Thin blocking client for the daemon's HTTP API.
class Client {
 public:
  explicit Client(std::string server_url, std::string token = {});

  void set_token(std::string token) { token_ = std::move(token); }
  const std::string& token() const { return token_; }
  const std::string& server_url() const { return server_; }

  HttpResult login(const std::string& username, const std::string& password);
  HttpResult cameras();
  HttpResult frame(const Params& params);
  HttpResult control(const std::string& type);
  HttpResult state();
  HttpResult arm();
  HttpResult disarm();
  HttpResult snapshot_save(const Params& params);
  HttpResult snapshot_list();
  HttpResult snapshot_get(const std::string& id);
  HttpResult snapshot_delete(const std::string& id);

  // Arbitrary request, used by route-table checks.
  HttpResult request(const std::string& method, const std::string& path,
                     const Params& params = {}, bool with_token = true);

 private:
  std::string server_;
  std::string token_;
};

struct SessionFile {
  std::string server;
  std::string token;
};

// $GVSS_SESSION_FILE, else ~/.gvss-session.
std::filesystem::path session_file_path();
std::optional<SessionFile> load_session(const std::filesystem::path& path);
// Written with mode 0600.
void save_session(const std::filesystem::path& path, const SessionFile& session);

}  // namespace gvss
