#include "gvss/config.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "gvss/error.hpp"

namespace gvss {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

class Parser {
 public:
  explicit Parser(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(int line, const std::string& msg) const {
    throw Error(ErrorCode::ConfigError, source_ + ":" + std::to_string(line) + ": " + msg);
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::ConfigError, source_ + ": " + msg);
  }

  int to_int(int line, const std::string& key, const std::string& v, int lo, int hi) const {
    std::size_t used = 0;
    long long n = 0;
    try {
      n = std::stoll(v, &used);
    } catch (const std::exception&) {
      fail(line, "'" + key + "' expects an integer, got '" + v + "'");
    }
    if (used != v.size()) fail(line, "'" + key + "' expects an integer, got '" + v + "'");
    if (n < lo || n > hi) {
      fail(line, "'" + key + "' must be within " + std::to_string(lo) + ".." + std::to_string(hi));
    }
    return static_cast<int>(n);
  }

 private:
  std::string source_;
};

}  // namespace

std::vector<std::string> split_command(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  bool have = false;
  for (char c : text) {
    if (c == '"') {
      quoted = !quoted;
      have = true;
    } else if (!quoted && (c == ' ' || c == '\t')) {
      if (have) out.push_back(cur);
      cur.clear();
      have = false;
    } else {
      cur += c;
      have = true;
    }
  }
  if (have) out.push_back(cur);
  return out;
}

DaemonConfig parse_config(std::istream& in, const std::string& source_name) {
  Parser p(source_name);
  DaemonConfig cfg;
  std::string section;
  std::string section_arg;
  bool saw_storage_dir = false;
  bool saw_sensor = false;
  std::set<std::string> seen_keys;

  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') p.fail(line_no, "unterminated section header");
      std::istringstream hdr(line.substr(1, line.size() - 2));
      section.clear();
      section_arg.clear();
      hdr >> section >> section_arg;
      seen_keys.clear();
      if (section == "camera") {
        if (section_arg.empty()) p.fail(line_no, "[camera] needs an id, e.g. [camera cam0]");
        CameraConfig cam;
        cam.id = section_arg;
        for (const auto& c : cfg.cameras) {
          if (c.id == cam.id) p.fail(line_no, "duplicate camera id '" + cam.id + "'");
        }
        cfg.cameras.push_back(cam);
      } else if (section == "user") {
        if (section_arg.empty()) p.fail(line_no, "[user] needs a name, e.g. [user admin]");
        for (const auto& u : cfg.users) {
          if (u.username == section_arg) p.fail(line_no, "duplicate user '" + section_arg + "'");
        }
        cfg.users.push_back({section_arg, {}});
      } else if (section == "sensor") {
        saw_sensor = true;
      } else if (section != "server" && section != "notifier" && section != "storage") {
        p.fail(line_no, "unknown section [" + section + "]");
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) p.fail(line_no, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) p.fail(line_no, "'" + key + "' appears before any [section]");
    if (!seen_keys.insert(key).second) p.fail(line_no, "duplicate key '" + key + "'");
    auto unknown = [&] { p.fail(line_no, "unknown key '" + key + "' in [" + section + "]"); };

    if (section == "server") {
      if (key == "port") cfg.port = p.to_int(line_no, key, value, 0, 65535);
      else if (key == "bind") cfg.bind = value;
      else if (key == "audit_log") cfg.audit_log = value;
      else if (key == "lock_command") cfg.hooks.lock_command = split_command(value);
      else if (key == "unlock_command") cfg.hooks.unlock_command = split_command(value);
      else if (key == "log_level") cfg.log_level = value;
      else unknown();
    } else if (section == "sensor") {
      auto& s = cfg.sensor;
      if (key == "kind") {
        if (value == "file") s.beam.kind = BeamSourceConfig::Kind::SimulatedFile;
        else if (value == "stdin") s.beam.kind = BeamSourceConfig::Kind::StandardInputFeed;
        else if (value == "scripted") s.beam.kind = BeamSourceConfig::Kind::ScriptedSequence;
        else p.fail(line_no, "sensor kind must be file, stdin or scripted");
      } else if (key == "path") {
        s.path = value;
      } else if (key == "poll_interval_ms") {
        s.beam.poll_interval = std::chrono::milliseconds(p.to_int(line_no, key, value, 10, 60000));
      } else if (key == "debounce_count") {
        s.beam.debounce_count = p.to_int(line_no, key, value, 1, 1000);
      } else if (key == "script") {
        std::istringstream words(value);
        std::string w;
        while (words >> w) {
          if (w == "FAIL") {
            s.script.emplace_back(std::nullopt);
          } else if (auto st = parse_beam_token(w)) {
            s.script.emplace_back(*st);
          } else {
            p.fail(line_no, "script tokens are CLEAR, OBSTRUCTED or FAIL, got '" + w + "'");
          }
        }
      } else {
        unknown();
      }
    } else if (section == "camera") {
      auto& c = cfg.cameras.back();
      if (key == "name") c.name = value;
      else if (key == "kind") {
        if (value == "synthetic") c.kind = CameraKind::SyntheticPattern;
        else if (value == "files") c.kind = CameraKind::FileSequence;
        else p.fail(line_no, "camera kind must be synthetic or files");
      } else if (key == "cadence_ms") {
        c.cadence = std::chrono::milliseconds(p.to_int(line_no, key, value, 10, 3600000));
      } else if (key == "width") {
        c.width = p.to_int(line_no, key, value, 1, 8192);
      } else if (key == "height") {
        c.height = p.to_int(line_no, key, value, 1, 8192);
      } else if (key == "path") {
        c.path = value;
      } else {
        unknown();
      }
    } else if (section == "user") {
      if (key == "password_hash") cfg.users.back().password_hash = value;
      else unknown();
    } else if (section == "notifier") {
      auto& n = cfg.notifier;
      if (key == "transport") {
        if (value == "file") n.kind = NotifierSettings::Kind::File;
        else if (value == "webhook") n.kind = NotifierSettings::Kind::Webhook;
        else if (value == "stdout") n.kind = NotifierSettings::Kind::Stdout;
        else p.fail(line_no, "notifier transport must be file, webhook or stdout");
      } else if (key == "recipient") {
        n.recipient = value;
      } else if (key == "path") {
        n.path = value;
      } else if (key == "url") {
        n.url = value;
      } else if (key == "timeout_ms") {
        n.timeout_ms = p.to_int(line_no, key, value, 1, 60000);
      } else {
        unknown();
      }
    } else if (section == "storage") {
      if (key == "snapshot_dir") {
        if (value.empty()) p.fail(line_no, "snapshot_dir must not be empty");
        cfg.snapshot_dir = value;
        saw_storage_dir = true;
      } else {
        unknown();
      }
    }
  }

  if (!saw_storage_dir) p.fail("missing required key 'snapshot_dir' in [storage]");
  if (cfg.cameras.empty()) p.fail("at least one [camera <id>] section is required");
  if (cfg.users.empty()) p.fail("at least one [user <name>] section is required");
  for (const auto& u : cfg.users) {
    if (u.password_hash.empty()) {
      p.fail("missing required key 'password_hash' in [user " + u.username + "]");
    }
  }
  for (const auto& c : cfg.cameras) {
    if (c.kind == CameraKind::FileSequence && c.path.empty()) {
      p.fail("missing required key 'path' in [camera " + c.id + "]");
    }
  }
  if (!saw_sensor) p.fail("missing [sensor] section");
  if (cfg.sensor.beam.kind == BeamSourceConfig::Kind::SimulatedFile && cfg.sensor.path.empty()) {
    p.fail("missing required key 'path' in [sensor] (kind = file)");
  }
  if (cfg.sensor.beam.kind == BeamSourceConfig::Kind::ScriptedSequence && cfg.sensor.script.empty()) {
    p.fail("missing required key 'script' in [sensor] (kind = scripted)");
  }
  if (cfg.notifier.kind == NotifierSettings::Kind::File && cfg.notifier.path.empty()) {
    p.fail("missing required key 'path' in [notifier] (transport = file)");
  }
  if (cfg.notifier.kind == NotifierSettings::Kind::Webhook && cfg.notifier.url.empty()) {
    p.fail("missing required key 'url' in [notifier] (transport = webhook)");
  }
  return cfg;
}

DaemonConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, path.string() + ": cannot open config file");
  return parse_config(in, path.string());
}

}  // namespace gvss
