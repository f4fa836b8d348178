#include "gvss/sensor.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "gvss/clock.hpp"
#include "gvss/error.hpp"

namespace gvss {

const char* to_string(BeamStatus s) {
  return s == BeamStatus::Clear ? "CLEAR" : "OBSTRUCTED";
}

const char* to_string(BeamHealth h) {
  return h == BeamHealth::Ok ? "Ok" : "Degraded";
}

std::optional<BeamStatus> parse_beam_token(std::string_view token) {
  if (token == "CLEAR") return BeamStatus::Clear;
  if (token == "OBSTRUCTED") return BeamStatus::Obstructed;
  return std::nullopt;
}

void BeamSourceConfig::validate() const {
  if (poll_interval < std::chrono::milliseconds(10)) {
    throw Error(ErrorCode::ConfigError, "poll_interval_ms must be >= 10");
  }
  if (debounce_count < 1) {
    throw Error(ErrorCode::ConfigError, "debounce_count must be >= 1");
  }
}

FileBeamSource::FileBeamSource(std::filesystem::path path) : path_(std::move(path)) {}

BeamReading FileBeamSource::check_status() {
  std::ifstream in(path_);
  if (!in) {
    throw Error(ErrorCode::SourceUnavailable, "cannot read " + path_.string());
  }
  std::string token;
  in >> token;
  const auto status = parse_beam_token(token);
  if (!status) {
    throw Error(ErrorCode::SourceUnavailable,
                "unrecognised beam token '" + token + "' in " + path_.string());
  }
  return {*status, monotonic_millis()};
}

StreamBeamSource::StreamBeamSource(std::istream& in)
    : feed_(std::make_shared<Feed>()) {
  // The reader may stay parked in getline after this object is gone, so it
  // only touches the shared feed state.
  std::thread([feed = feed_, &in] {
    std::string line;
    while (std::getline(in, line)) {
      std::istringstream words(line);
      std::string token;
      words >> token;
      if (token.empty()) continue;
      std::lock_guard lock(feed->mu);
      feed->latest = parse_beam_token(token);
      feed->faulted = !feed->latest;
    }
    std::lock_guard lock(feed->mu);
    feed->faulted = true;
  }).detach();
}

BeamReading StreamBeamSource::check_status() {
  std::lock_guard lock(feed_->mu);
  if (feed_->faulted || !feed_->latest) {
    throw Error(ErrorCode::SourceUnavailable,
                feed_->faulted ? "beam feed closed or invalid" : "no beam reading yet");
  }
  return {*feed_->latest, monotonic_millis()};
}

ScriptedBeamSource::ScriptedBeamSource(std::vector<std::optional<BeamStatus>> script)
    : script_(std::move(script)) {}

BeamReading ScriptedBeamSource::check_status() {
  std::lock_guard lock(mu_);
  if (script_.empty()) throw Error(ErrorCode::SourceUnavailable, "empty script");
  const std::size_t i = next_ < script_.size() ? next_ : script_.size() - 1;
  ++next_;
  if (!script_[i]) throw Error(ErrorCode::SourceUnavailable, "scripted fault");
  return {*script_[i], monotonic_millis()};
}

std::size_t ScriptedBeamSource::polls() const {
  std::lock_guard lock(mu_);
  return next_;
}

Debouncer::Debouncer(int debounce_count, BeamStatus initial)
    : debounce_count_(debounce_count), state_(initial) {
  if (debounce_count < 1) {
    throw Error(ErrorCode::ConfigError, "debounce_count must be >= 1");
  }
}

std::optional<BeamStatus> Debouncer::feed(BeamStatus reading) {
  if (reading == state_) {
    streak_ = 0;
    return std::nullopt;
  }
  if (++streak_ < debounce_count_) return std::nullopt;
  state_ = reading;
  streak_ = 0;
  return state_;
}

std::vector<std::pair<std::size_t, BeamStatus>> debounce_sequence(
    const std::vector<BeamStatus>& readings, int debounce_count) {
  Debouncer d(debounce_count);
  std::vector<std::pair<std::size_t, BeamStatus>> out;
  for (std::size_t i = 0; i < readings.size(); ++i) {
    if (auto t = d.feed(readings[i])) out.emplace_back(i, *t);
  }
  return out;
}

namespace {

// Sleeps until the deadline or until stop is requested.
bool sleep_until(std::chrono::steady_clock::time_point deadline,
                 const std::stop_token& stop) {
  std::mutex m;
  std::condition_variable_any cv;
  std::unique_lock lock(m);
  cv.wait_until(lock, stop, deadline, [] { return false; });
  return !stop.stop_requested();
}

}  // namespace

void poll_loop(BeamSource& source, const BeamSourceConfig& config,
               const SensorSink& sink, std::stop_token stop) {
  config.validate();
  Debouncer debouncer(config.debounce_count);
  int failures = 0;
  bool degraded = false;
  auto next = std::chrono::steady_clock::now();
  while (!stop.stop_requested()) {
    try {
      const BeamReading r = source.check_status();
      failures = 0;
      if (degraded) {
        degraded = false;
        sink(HealthChange{BeamHealth::Ok, "beam source readable again"});
      }
      if (auto to = debouncer.feed(r.status)) {
        sink(BeamTransition{*to, r.observed_at});
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SourceUnavailable) throw;
      if (++failures >= kFailuresBeforeDegraded && !degraded) {
        degraded = true;
        sink(HealthChange{BeamHealth::Degraded, e.what()});
      }
    }
    next += config.poll_interval;
    const auto now = std::chrono::steady_clock::now();
    if (next < now) next = now;  // fell behind; do not burst
    if (!sleep_until(next, stop)) break;
  }
}

SensorMonitor::SensorMonitor(std::unique_ptr<BeamSource> source,
                             BeamSourceConfig config, SensorSink sink)
    : source_(std::move(source)), config_(config), sink_(std::move(sink)) {
  config_.validate();
}

SensorMonitor::~SensorMonitor() { stop(); }

void SensorMonitor::start() {
  if (thread_.joinable()) return;
  thread_ = std::jthread([this](std::stop_token st) {
    poll_loop(*source_, config_,
              [this](const SensorEvent& ev) {
                if (const auto* h = std::get_if<HealthChange>(&ev)) {
                  std::lock_guard lock(mu_);
                  health_ = h->health;
                }
                sink_(ev);
              },
              st);
  });
}

void SensorMonitor::stop() {
  if (!thread_.joinable()) return;
  thread_.request_stop();
  thread_.join();
}

BeamHealth SensorMonitor::health() const {
  std::lock_guard lock(mu_);
  return health_;
}

}  // namespace gvss
