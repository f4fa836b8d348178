#include <sstream>

#include <gtest/gtest.h>

#include "gvss/config.hpp"
#include "gvss/error.hpp"
#include "helpers.hpp"

using namespace gvss;

namespace {

const char* kValid = R"(# home server
[server]
port = 9000
bind = 0.0.0.0
audit_log = /var/log/gvss/audit.log
lock_command = xlock -mode "blank screen"

[sensor]
kind = file
path = /run/gvss/beam
poll_interval_ms = 50
debounce_count = 3

[camera front]
name = Front door
kind = synthetic
width = 320
height = 200
cadence_ms = 500

[camera porch]
kind = files
path = /srv/stills

[user owner]
password_hash = pbkdf2-sha256$1000$00$00

[notifier]
transport = webhook
url = http://127.0.0.1:9/sms
recipient = +15550100

[storage]
snapshot_dir = /var/lib/gvss
)";

std::string error_of(const std::string& text) {
  std::istringstream in(text);
  try {
    parse_config(in, "test.conf");
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigError);
    return e.what();
  }
  return "";
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto pos = s.find(from);
  EXPECT_NE(pos, std::string::npos) << from;
  return s.replace(pos, from.size(), to);
}

}  // namespace

TEST(Config, ParsesEverySection) {
  std::istringstream in(kValid);
  const auto c = parse_config(in, "test.conf");
  EXPECT_EQ(c.port, 9000);
  EXPECT_EQ(c.bind, "0.0.0.0");
  ASSERT_TRUE(c.audit_log);
  EXPECT_EQ(*c.audit_log, "/var/log/gvss/audit.log");
  EXPECT_EQ(c.hooks.lock_command, (std::vector<std::string>{"xlock", "-mode", "blank screen"}));
  EXPECT_TRUE(c.hooks.unlock_command.empty());
  EXPECT_EQ(c.sensor.beam.kind, BeamSourceConfig::Kind::SimulatedFile);
  EXPECT_EQ(c.sensor.path, "/run/gvss/beam");
  EXPECT_EQ(c.sensor.beam.poll_interval, std::chrono::milliseconds(50));
  EXPECT_EQ(c.sensor.beam.debounce_count, 3);
  ASSERT_EQ(c.cameras.size(), 2u);
  EXPECT_EQ(c.cameras[0].id, "front");
  EXPECT_EQ(c.cameras[0].name, "Front door");
  EXPECT_EQ(c.cameras[0].width, 320);
  EXPECT_EQ(c.cameras[0].cadence, std::chrono::milliseconds(500));
  EXPECT_EQ(c.cameras[1].kind, CameraKind::FileSequence);
  EXPECT_EQ(c.cameras[1].cadence, std::chrono::milliseconds(1000));
  ASSERT_EQ(c.users.size(), 1u);
  EXPECT_EQ(c.users[0].username, "owner");
  EXPECT_EQ(c.notifier.kind, NotifierSettings::Kind::Webhook);
  EXPECT_EQ(c.notifier.recipient, "+15550100");
  EXPECT_EQ(c.snapshot_dir, "/var/lib/gvss");
}

TEST(Config, Defaults) {
  const std::string minimal = R"([sensor]
kind = scripted
script = CLEAR OBSTRUCTED FAIL
[camera c]
[user u]
password_hash = x
[storage]
snapshot_dir = /tmp/s
)";
  std::istringstream in(minimal);
  const auto c = parse_config(in, "m.conf");
  EXPECT_EQ(c.port, 8686);
  EXPECT_EQ(c.bind, "127.0.0.1");
  EXPECT_EQ(c.sensor.beam.poll_interval, std::chrono::milliseconds(100));
  EXPECT_EQ(c.sensor.beam.debounce_count, 2);
  ASSERT_EQ(c.sensor.script.size(), 3u);
  EXPECT_EQ(c.sensor.script[1], BeamStatus::Obstructed);
  EXPECT_FALSE(c.sensor.script[2]);
  EXPECT_EQ(c.notifier.kind, NotifierSettings::Kind::Stdout);
  EXPECT_EQ(c.cameras[0].width, 640);
  EXPECT_EQ(c.cameras[0].height, 480);
}

TEST(Config, MissingSnapshotDirNamesTheKey) {
  const auto msg = error_of(replace(kValid, "snapshot_dir = /var/lib/gvss\n", ""));
  EXPECT_NE(msg.find("snapshot_dir"), std::string::npos) << msg;
}

TEST(Config, ErrorsCarryLineNumbers) {
  EXPECT_EQ(error_of(replace(kValid, "port = 9000", "port = ninety")).rfind("test.conf:3: ", 0), 0u);
  EXPECT_EQ(error_of(replace(kValid, "debounce_count = 3", "debounce = 3")).rfind("test.conf:12: ", 0),
            0u);
  EXPECT_EQ(error_of(replace(kValid, "[notifier]", "[pager]")).rfind("test.conf:28: ", 0), 0u);
  EXPECT_EQ(error_of(replace(kValid, "kind = synthetic", "kind = webcam")).rfind("test.conf:16: ", 0),
            0u);
  EXPECT_NE(error_of(replace(kValid, "port = 9000", "port = 70000")).find("0..65535"),
            std::string::npos);
}

TEST(Config, RejectsStructuralProblems) {
  EXPECT_NE(error_of("port = 1\n").find("before any [section]"), std::string::npos);
  EXPECT_NE(error_of(replace(kValid, "[camera porch]", "[camera front]")), "");
  EXPECT_NE(error_of(replace(kValid, "[user owner]\npassword_hash = pbkdf2-sha256$1000$00$00\n", "")),
            "");
  EXPECT_NE(error_of(replace(kValid, "path = /run/gvss/beam\n", "")).find("'path'"),
            std::string::npos);
  EXPECT_NE(error_of(replace(kValid, "url = http://127.0.0.1:9/sms\n", "")).find("'url'"),
            std::string::npos);
  EXPECT_NE(error_of(replace(kValid, "debounce_count = 3", "debounce_count = 0")), "");
}

TEST(Config, LoadFromFile) {
  gvss::testing::TempDir dir;
  gvss::testing::write_file(dir / "a.conf", kValid);
  EXPECT_EQ(load_config(dir / "a.conf").port, 9000);
  EXPECT_THROW(load_config(dir / "missing.conf"), Error);
}

TEST(SplitCommand, QuotesAndWhitespace) {
  EXPECT_EQ(split_command("  a  b\t\"c d\" e"), (std::vector<std::string>{"a", "b", "c d", "e"}));
  EXPECT_TRUE(split_command("   ").empty());
}
