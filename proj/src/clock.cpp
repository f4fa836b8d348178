#include "gvss/clock.hpp"

#include <cstdio>
#include <ctime>

#include "gvss/error.hpp"

namespace gvss {

namespace {

std::tm utc_fields(WallTime t) {
  const std::time_t secs = std::chrono::system_clock::to_time_t(
      std::chrono::floor<std::chrono::seconds>(t));
  std::tm fields{};
  gmtime_r(&secs, &fields);
  return fields;
}

std::string format_fields(WallTime t, const char* pattern) {
  const std::tm f = utc_fields(t);
  char buf[32];
  std::snprintf(buf, sizeof(buf), pattern, f.tm_year + 1900, f.tm_mon + 1,
                f.tm_mday, f.tm_hour, f.tm_min, f.tm_sec);
  return buf;
}

}  // namespace

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SourceUnavailable: return "SourceUnavailable";
    case ErrorCode::NotLocked: return "NotLocked";
    case ErrorCode::IllegalTransition: return "IllegalTransition";
    case ErrorCode::UnknownCamera: return "UnknownCamera";
    case ErrorCode::NoFrameYet: return "NoFrameYet";
    case ErrorCode::InvalidSettings: return "InvalidSettings";
    case ErrorCode::InvalidMessage: return "InvalidMessage";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::StorageFull: return "StorageFull";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

std::int64_t monotonic_millis() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::string iso8601(WallTime t) {
  return format_fields(t, "%04d-%02d-%02dT%02d:%02d:%02dZ");
}

std::string iso8601_millis(WallTime t) {
  const auto ms = epoch_millis(t);
  const auto frac = ((ms % 1000) + 1000) % 1000;
  std::string s = format_fields(t, "%04d-%02d-%02dT%02d:%02d:%02d");
  char buf[8];
  std::snprintf(buf, sizeof(buf), ".%03lldZ", static_cast<long long>(frac));
  return s + buf;
}

std::string overlay_time_text(WallTime t) {
  return format_fields(t, "%04d-%02d-%02d %02d:%02d:%02d");
}

WallTime parse_iso8601(const std::string& text) {
  std::tm f{};
  int millis = 0;
  int consumed = 0;
  if (std::sscanf(text.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%n", &f.tm_year,
                  &f.tm_mon, &f.tm_mday, &f.tm_hour, &f.tm_min, &f.tm_sec,
                  &consumed) != 6) {
    throw Error(ErrorCode::InvalidMessage, "bad timestamp: " + text);
  }
  std::string rest = text.substr(static_cast<std::size_t>(consumed));
  if (!rest.empty() && rest[0] == '.') {
    int n = 0;
    if (std::sscanf(rest.c_str(), ".%3d%n", &millis, &n) != 1) {
      throw Error(ErrorCode::InvalidMessage, "bad timestamp: " + text);
    }
    rest = rest.substr(static_cast<std::size_t>(n));
  }
  if (rest != "Z") throw Error(ErrorCode::InvalidMessage, "bad timestamp: " + text);
  f.tm_year -= 1900;
  f.tm_mon -= 1;
  const std::time_t secs = timegm(&f);
  return std::chrono::system_clock::from_time_t(secs) +
         std::chrono::milliseconds(millis);
}

std::int64_t epoch_millis(WallTime t) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(t.time_since_epoch())
      .count();
}

WallTime from_epoch_millis(std::int64_t ms) {
  return WallTime{std::chrono::duration_cast<WallTime::duration>(
      std::chrono::milliseconds(ms))};
}

}  // namespace gvss
