#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "gvss/clock.hpp"

namespace gvss {

enum class AuditEvent { Arm, Disarm, Breach, Lock, Unlock, NotifyOk, NotifyFail, Health };

const char* to_string(AuditEvent e);

// Append-only audit trail. Each line is
//   <ISO-8601 timestamp> <EVENT> <episode_id> <detail>
// and is written through to the backing file (if any) before append returns.
class AuditLog {
 public:
  explicit AuditLog(const Clock& clock,
                    std::optional<std::filesystem::path> file = std::nullopt);

  void append(AuditEvent event, std::uint64_t episode, const std::string& detail);

  std::vector<std::string> lines() const;
  std::size_t count(AuditEvent event) const;
  void flush();

 private:
  const Clock& clock_;
  mutable std::mutex mu_;
  std::vector<std::string> lines_;
  std::vector<AuditEvent> events_;
  std::ofstream out_;
};

}  // namespace gvss
