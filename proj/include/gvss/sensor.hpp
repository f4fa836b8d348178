#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <istream>
#include <memory>
#include <mutex>
#include <optional>
#include <stop_token>
#include <string>
#include <string_view>
#include <thread>
#include <variant>
#include <vector>

namespace gvss {

enum class BeamStatus { Clear, Obstructed };

const char* to_string(BeamStatus s);
// Accepts exactly "CLEAR" or "OBSTRUCTED".
std::optional<BeamStatus> parse_beam_token(std::string_view token);

struct BeamReading {
  BeamStatus status;
  std::int64_t observed_at;  // monotonic milliseconds
};

struct BeamTransition {
  BeamStatus to;
  std::int64_t observed_at;
};

enum class BeamHealth { Ok, Degraded };

const char* to_string(BeamHealth h);

struct HealthChange {
  BeamHealth health;
  std::string detail;
};

using SensorEvent = std::variant<BeamTransition, HealthChange>;

struct BeamSourceConfig {
  enum class Kind { SimulatedFile, StandardInputFeed, ScriptedSequence };

  Kind kind = Kind::SimulatedFile;
  std::chrono::milliseconds poll_interval{100};
  int debounce_count = 2;

  // Throws Error(ConfigError) unless poll_interval >= 10 ms and debounce >= 1.
  void validate() const;
};

// The IR transmitter/receiver pair. check_status() returns the instantaneous
// state or throws Error(SourceUnavailable); a read fault is never reported as
// Obstructed.
class BeamSource {
 public:
  virtual ~BeamSource() = default;
  virtual BeamReading check_status() = 0;
};

// A text file whose first non-whitespace token is CLEAR or OBSTRUCTED,
// re-read on every poll.
class FileBeamSource final : public BeamSource {
 public:
  explicit FileBeamSource(std::filesystem::path path);
  BeamReading check_status() override;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Line-delimited tokens from a stream (normally stdin). A background reader
// keeps the most recent token so check_status() never blocks on input.
class StreamBeamSource final : public BeamSource {
 public:
  explicit StreamBeamSource(std::istream& in);
  BeamReading check_status() override;

 private:
  struct Feed {
    std::mutex mu;
    std::optional<BeamStatus> latest;
    bool faulted = false;
  };
  std::shared_ptr<Feed> feed_;
};

// Replays a fixed script, one entry per poll; std::nullopt entries simulate a
// read failure. After the script is exhausted the last entry repeats.
class ScriptedBeamSource final : public BeamSource {
 public:
  explicit ScriptedBeamSource(std::vector<std::optional<BeamStatus>> script);
  BeamReading check_status() override;

  std::size_t polls() const;

 private:
  mutable std::mutex mu_;
  std::vector<std::optional<BeamStatus>> script_;
  std::size_t next_ = 0;
};

// Debounce rule: a transition to state S is emitted once debounce_count
// consecutive readings equal S and S differs from the last emitted state.
// The initial emitted state is Clear.
class Debouncer {
 public:
  explicit Debouncer(int debounce_count, BeamStatus initial = BeamStatus::Clear);

  std::optional<BeamStatus> feed(BeamStatus reading);
  BeamStatus state() const { return state_; }

 private:
  int debounce_count_;
  BeamStatus state_;
  int streak_ = 0;
};

// Folds a whole reading sequence, returning (index, new state) per emission.
std::vector<std::pair<std::size_t, BeamStatus>> debounce_sequence(
    const std::vector<BeamStatus>& readings, int debounce_count);

using SensorSink = std::function<void(const SensorEvent&)>;

// Number of consecutive read failures before HealthDegraded is raised.
inline constexpr int kFailuresBeforeDegraded = 3;

// Polls a source until the stop token fires. Emits debounced transitions and
// health changes to the sink from this single producer.
void poll_loop(BeamSource& source, const BeamSourceConfig& config,
               const SensorSink& sink, std::stop_token stop);

// Owns the poll thread.
class SensorMonitor {
 public:
  SensorMonitor(std::unique_ptr<BeamSource> source, BeamSourceConfig config,
                SensorSink sink);
  ~SensorMonitor();

  void start();
  void stop();

  BeamHealth health() const;
  BeamSource& source() { return *source_; }

 private:
  std::unique_ptr<BeamSource> source_;
  BeamSourceConfig config_;
  SensorSink sink_;
  mutable std::mutex mu_;
  BeamHealth health_ = BeamHealth::Ok;
  std::jthread thread_;
};

}  // namespace gvss
