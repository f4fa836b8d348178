#pragma once

#include <chrono>
#include <cstdint>
#include <mutex>
#include <string>

namespace gvss {

using WallTime = std::chrono::system_clock::time_point;

// Source of wall-clock time. Injected wherever expiry or timestamps matter so
// tests can move time without sleeping.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual WallTime now() const = 0;
};

class SystemClock final : public Clock {
 public:
  WallTime now() const override { return std::chrono::system_clock::now(); }
};

class ManualClock final : public Clock {
 public:
  explicit ManualClock(WallTime start = WallTime{}) : now_(start) {}

  WallTime now() const override {
    std::lock_guard lock(mu_);
    return now_;
  }

  void advance(std::chrono::milliseconds by) {
    std::lock_guard lock(mu_);
    now_ += by;
  }

  void set(WallTime t) {
    std::lock_guard lock(mu_);
    now_ = t;
  }

 private:
  mutable std::mutex mu_;
  WallTime now_;
};

// Milliseconds on the steady clock; used for sensor reading timestamps.
std::int64_t monotonic_millis();

// "2009-01-01T00:00:00Z"
std::string iso8601(WallTime t);
// "2009-01-01T00:00:00.123Z"
std::string iso8601_millis(WallTime t);
// "2009-01-01 00:00:00" (UTC), the overlay format.
std::string overlay_time_text(WallTime t);
// Parses either of the iso8601 forms above. Throws Error(InvalidMessage).
WallTime parse_iso8601(const std::string& text);

std::int64_t epoch_millis(WallTime t);
WallTime from_epoch_millis(std::int64_t ms);

}  // namespace gvss
