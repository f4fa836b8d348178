#pragma once

#include <stdexcept>
#include <string>

namespace gvss {

enum class ErrorCode {
  SourceUnavailable,
  NotLocked,
  IllegalTransition,
  UnknownCamera,
  NoFrameYet,
  InvalidSettings,
  InvalidMessage,
  NotFound,
  IoError,
  StorageFull,
  ConfigError,
};

const char* to_string(ErrorCode code);

// Every recoverable failure in the library is reported as an Error carrying a
// code; callers branch on code(), never on the message text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace gvss
