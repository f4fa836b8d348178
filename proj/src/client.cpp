#include "gvss/client.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <iterator>

#include <httplib.h>

#include "gvss/error.hpp"
#include "gvss/service.hpp"

namespace gvss {

nlohmann::json HttpResult::json() const {
  return nlohmann::json::parse(body, nullptr, false);
}

std::string HttpResult::header(const std::string& name) const {
  const auto it = headers.find(name);
  return it == headers.end() ? std::string() : it->second;
}

int exit_code_for(const HttpResult& r) {
  if (r.status == 0) return 6;
  if (r.status >= 200 && r.status < 300) return 0;
  if (r.status >= 500) return 5;
  return 1;
}

Client::Client(std::string server_url, std::string token)
    : server_(std::move(server_url)), token_(std::move(token)) {
  while (!server_.empty() && server_.back() == '/') server_.pop_back();
}

HttpResult Client::request(const std::string& method, const std::string& path,
                           const Params& params, bool with_token) {
  httplib::Client cli(server_);
  cli.set_connection_timeout(3, 0);
  cli.set_read_timeout(10, 0);
  httplib::Headers headers;
  if (with_token && !token_.empty()) headers.emplace(kTokenHeader, token_);

  httplib::Params query(params.begin(), params.end());
  const std::string target = query.empty() ? path : httplib::append_query_params(path, query);

  httplib::Result res;
  if (method == "GET") res = cli.Get(target, headers);
  else if (method == "POST") res = cli.Post(target, headers, "", "application/x-www-form-urlencoded");
  else if (method == "DELETE") res = cli.Delete(target, headers);
  else throw Error(ErrorCode::InvalidMessage, "unsupported method " + method);

  HttpResult out;
  if (!res) {
    out.network_error = httplib::to_string(res.error());
    return out;
  }
  out.status = res->status;
  out.body = res->body;
  out.content_type = res->get_header_value("Content-Type");
  for (const auto& [k, v] : res->headers) out.headers[k] = v;
  return out;
}

HttpResult Client::login(const std::string& username, const std::string& password) {
  httplib::Client cli(server_);
  cli.set_connection_timeout(3, 0);
  cli.set_read_timeout(10, 0);
  const nlohmann::json body{{"username", username}, {"password", password}};
  auto res = cli.Post("/login", body.dump(), "application/json");
  HttpResult out;
  if (!res) {
    out.network_error = httplib::to_string(res.error());
    return out;
  }
  out.status = res->status;
  out.body = res->body;
  out.content_type = res->get_header_value("Content-Type");
  for (const auto& [k, v] : res->headers) out.headers[k] = v;
  if (out.status == 200) {
    const auto doc = out.json();
    if (doc.is_object() && doc.contains("token")) token_ = doc["token"].get<std::string>();
  }
  return out;
}

HttpResult Client::cameras() { return request("GET", "/cameras"); }
HttpResult Client::frame(const Params& params) { return request("GET", "/frame", params); }
HttpResult Client::control(const std::string& type) {
  return request("POST", "/control", {{"Type", type}});
}
HttpResult Client::state() { return request("GET", "/state"); }
HttpResult Client::arm() { return request("POST", "/arm"); }
HttpResult Client::disarm() { return request("POST", "/disarm"); }
HttpResult Client::snapshot_save(const Params& params) {
  return request("POST", "/snapshots", params);
}
HttpResult Client::snapshot_list() { return request("GET", "/snapshots"); }
HttpResult Client::snapshot_get(const std::string& id) {
  return request("GET", "/snapshots/" + id);
}
HttpResult Client::snapshot_delete(const std::string& id) {
  return request("DELETE", "/snapshots/" + id);
}

std::filesystem::path session_file_path() {
  if (const char* env = std::getenv("GVSS_SESSION_FILE"); env && *env) return env;
  const char* home = std::getenv("HOME");
  return std::filesystem::path(home && *home ? home : ".") / ".gvss-session";
}

std::optional<SessionFile> load_session(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto doc = nlohmann::json::parse(text, nullptr, false);
  if (!doc.is_object() || !doc.contains("token") || !doc["token"].is_string()) return std::nullopt;
  SessionFile s;
  s.token = doc["token"].get<std::string>();
  if (doc.contains("server") && doc["server"].is_string()) s.server = doc["server"].get<std::string>();
  return s;
}

void save_session(const std::filesystem::path& path, const SessionFile& session) {
  const std::string text =
      nlohmann::json{{"server", session.server}, {"token", session.token}}.dump() + "\n";
  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0600);
  if (fd < 0) throw Error(ErrorCode::IoError, "cannot write session file " + path.string());
  ::fchmod(fd, 0600);
  const bool ok = ::write(fd, text.data(), text.size()) == static_cast<ssize_t>(text.size());
  ::close(fd);
  if (!ok) throw Error(ErrorCode::IoError, "cannot write session file " + path.string());
}

}  // namespace gvss
