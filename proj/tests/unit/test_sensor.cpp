#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <fstream>
#include <mutex>
#include <random>

#include <gtest/gtest.h>

#include "gvss/error.hpp"
#include "gvss/sensor.hpp"
#include "helpers.hpp"

using namespace gvss;
using gvss::testing::TempDir;
using Emissions = std::vector<std::pair<std::size_t, BeamStatus>>;

namespace {

constexpr auto C = BeamStatus::Clear;
constexpr auto O = BeamStatus::Obstructed;

// Brute force over windows: emit at i when the last k readings all equal s
// and s differs from the most recent emission (initially Clear).
Emissions window_oracle(const std::vector<BeamStatus>& r, int k) {
  Emissions out;
  BeamStatus last = C;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (i + 1 < static_cast<std::size_t>(k)) continue;
    bool all_same = true;
    for (std::size_t j = i + 1 - k; j <= i; ++j) all_same = all_same && r[j] == r[i];
    if (all_same && r[i] != last) {
      out.emplace_back(i, r[i]);
      last = r[i];
    }
  }
  return out;
}

std::vector<BeamStatus> random_readings(std::mt19937_64& rng, std::size_t n) {
  std::bernoulli_distribution coin(0.5);
  std::vector<BeamStatus> r(n);
  for (auto& v : r) v = coin(rng) ? O : C;
  return r;
}

struct Recorder {
  std::mutex mu;
  std::vector<SensorEvent> events;
  void operator()(const SensorEvent& e) {
    std::lock_guard lock(mu);
    events.push_back(e);
  }
  std::vector<SensorEvent> copy() {
    std::lock_guard lock(mu);
    return events;
  }
};

}  // namespace

TEST(BeamToken, ExactSpellingOnly) {
  EXPECT_EQ(parse_beam_token("CLEAR"), C);
  EXPECT_EQ(parse_beam_token("OBSTRUCTED"), O);
  EXPECT_FALSE(parse_beam_token("clear"));
  EXPECT_FALSE(parse_beam_token("Obstructed"));
  EXPECT_FALSE(parse_beam_token(""));
}

TEST(Debouncer, NeedsConsecutiveReadings) {
  EXPECT_EQ(debounce_sequence({C, O, O}, 2), (Emissions{{2, O}}));
  EXPECT_EQ(debounce_sequence({O, C, O, C}, 2), Emissions{});
  EXPECT_EQ(debounce_sequence({O, O, O, C, C}, 2), (Emissions{{1, O}, {4, C}}));
  EXPECT_EQ(debounce_sequence({O, C}, 1), (Emissions{{0, O}, {1, C}}));
  // Clear streaks at start never emit because Clear is the initial state.
  EXPECT_EQ(debounce_sequence({C, C, C}, 1), Emissions{});
}

TEST(Debouncer, MatchesWindowOracle) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> k_dist(1, 6);
  std::uniform_int_distribution<std::size_t> n_dist(0, 400);
  for (int trial = 0; trial < 500; ++trial) {
    const auto r = random_readings(rng, n_dist(rng));
    const int k = k_dist(rng);
    ASSERT_EQ(debounce_sequence(r, k), window_oracle(r, k)) << "trial " << trial;
  }
}

TEST(Debouncer, EmissionsAlternateAndArePrecededByStreak) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 1 + trial % 5;
    const auto r = random_readings(rng, 300);
    const auto out = debounce_sequence(r, k);
    BeamStatus prev = C;
    for (const auto& [i, s] : out) {
      EXPECT_NE(s, prev);
      prev = s;
      ASSERT_GE(i + 1, static_cast<std::size_t>(k));
      for (std::size_t j = i + 1 - k; j <= i; ++j) EXPECT_EQ(r[j], s);
    }
  }
}

TEST(Debouncer, RejectsBadCount) {
  BeamSourceConfig c;
  c.debounce_count = 0;
  EXPECT_THROW(c.validate(), Error);
  c.debounce_count = 2;
  c.poll_interval = std::chrono::milliseconds(5);
  EXPECT_THROW(c.validate(), Error);
}

TEST(FileBeamSource, ReadsFirstToken) {
  TempDir dir;
  FileBeamSource src(dir / "beam");
  gvss::testing::write_file(dir / "beam", "  OBSTRUCTED\nCLEAR\n");
  EXPECT_EQ(src.check_status().status, O);
  gvss::testing::write_file(dir / "beam", "CLEAR");
  EXPECT_EQ(src.check_status().status, C);
}

TEST(FileBeamSource, FaultsAreNeverObstructed) {
  TempDir dir;
  FileBeamSource src(dir / "missing");
  try {
    src.check_status();
    FAIL() << "expected SourceUnavailable";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SourceUnavailable);
  }
  gvss::testing::write_file(dir / "missing", "blocked");
  EXPECT_THROW(src.check_status(), Error);
}

TEST(StreamBeamSource, TracksLatestLineThenFaultsOnClose) {
  TempDir dir;
  const auto fifo = dir / "feed";
  ASSERT_EQ(::mkfifo(fifo.c_str(), 0600), 0);
  const int wfd = ::open(fifo.c_str(), O_RDWR);
  ASSERT_GE(wfd, 0);
  std::ifstream in(fifo);
  StreamBeamSource src(in);
  EXPECT_THROW(src.check_status(), Error);  // nothing read yet
  const std::string text = "CLEAR\n\nOBSTRUCTED\n";
  ASSERT_EQ(::write(wfd, text.data(), text.size()), static_cast<ssize_t>(text.size()));
  EXPECT_TRUE(gvss::testing::wait_until(
      [&] {
        try {
          return src.check_status().status == O;
        } catch (const Error&) {
          return false;
        }
      },
      std::chrono::seconds(2)));
  ::close(wfd);
  EXPECT_TRUE(gvss::testing::wait_until(
      [&] {
        try {
          src.check_status();
          return false;
        } catch (const Error&) {
          return true;
        }
      },
      std::chrono::seconds(2)));
}

TEST(PollLoop, DegradesAfterThreeFailuresAndRecovers) {
  using S = std::optional<BeamStatus>;
  auto* script = new ScriptedBeamSource(
      {S{C}, std::nullopt, std::nullopt, std::nullopt, std::nullopt, S{O}, S{O}});
  Recorder rec;
  BeamSourceConfig cfg;
  cfg.poll_interval = std::chrono::milliseconds(10);
  cfg.debounce_count = 2;
  SensorMonitor mon(std::unique_ptr<BeamSource>(script), cfg, std::ref(rec));
  mon.start();
  ASSERT_TRUE(gvss::testing::wait_until([&] { return script->polls() >= 10; },
                                        std::chrono::seconds(3)));
  mon.stop();
  const auto events = rec.copy();
  ASSERT_EQ(events.size(), 3u);
  const auto* degraded = std::get_if<HealthChange>(&events[0]);
  ASSERT_TRUE(degraded);
  EXPECT_EQ(degraded->health, BeamHealth::Degraded);
  const auto* ok = std::get_if<HealthChange>(&events[1]);
  ASSERT_TRUE(ok);
  EXPECT_EQ(ok->health, BeamHealth::Ok);
  const auto* t = std::get_if<BeamTransition>(&events[2]);
  ASSERT_TRUE(t);
  EXPECT_EQ(t->to, O);
  EXPECT_EQ(mon.health(), BeamHealth::Ok);
}

TEST(PollLoop, TwoFailuresStayHealthy) {
  using S = std::optional<BeamStatus>;
  auto* script = new ScriptedBeamSource({S{C}, std::nullopt, std::nullopt, S{C}});
  Recorder rec;
  BeamSourceConfig cfg;
  cfg.poll_interval = std::chrono::milliseconds(10);
  SensorMonitor mon(std::unique_ptr<BeamSource>(script), cfg, std::ref(rec));
  mon.start();
  ASSERT_TRUE(gvss::testing::wait_until([&] { return script->polls() >= 6; },
                                        std::chrono::seconds(3)));
  mon.stop();
  EXPECT_TRUE(rec.copy().empty());
}

TEST(PollLoop, DetectionLatencyIsAboutDebounceTimesPoll) {
  auto* script = new ScriptedBeamSource({BeamStatus::Obstructed});
  std::mutex mu;
  std::optional<std::chrono::steady_clock::time_point> seen;
  BeamSourceConfig cfg;
  cfg.poll_interval = std::chrono::milliseconds(50);
  cfg.debounce_count = 3;
  SensorMonitor mon(std::unique_ptr<BeamSource>(script), cfg, [&](const SensorEvent& e) {
    if (std::holds_alternative<BeamTransition>(e)) {
      std::lock_guard lock(mu);
      if (!seen) seen = std::chrono::steady_clock::now();
    }
  });
  const auto t0 = std::chrono::steady_clock::now();
  mon.start();
  ASSERT_TRUE(gvss::testing::wait_until(
      [&] {
        std::lock_guard lock(mu);
        return seen.has_value();
      },
      std::chrono::seconds(3)));
  mon.stop();
  const auto latency = std::chrono::duration_cast<std::chrono::milliseconds>(*seen - t0);
  // Third poll happens at 2 * 50 ms; allow scheduling slack up to k * poll + 100.
  EXPECT_GE(latency.count(), 90);
  EXPECT_LE(latency.count(), 250);
}
