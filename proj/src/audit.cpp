#include "gvss/audit.hpp"

#include <algorithm>

#include "gvss/error.hpp"

namespace gvss {

const char* to_string(AuditEvent e) {
  switch (e) {
    case AuditEvent::Arm: return "ARM";
    case AuditEvent::Disarm: return "DISARM";
    case AuditEvent::Breach: return "BREACH";
    case AuditEvent::Lock: return "LOCK";
    case AuditEvent::Unlock: return "UNLOCK";
    case AuditEvent::NotifyOk: return "NOTIFY_OK";
    case AuditEvent::NotifyFail: return "NOTIFY_FAIL";
    case AuditEvent::Health: return "HEALTH";
  }
  return "HEALTH";
}

AuditLog::AuditLog(const Clock& clock, std::optional<std::filesystem::path> file)
    : clock_(clock) {
  if (file) {
    out_.open(*file, std::ios::app);
    if (!out_) throw Error(ErrorCode::IoError, "cannot open audit log " + file->string());
  }
}

void AuditLog::append(AuditEvent event, std::uint64_t episode, const std::string& detail) {
  std::string clean = detail;
  std::replace(clean.begin(), clean.end(), '\n', ' ');
  std::replace(clean.begin(), clean.end(), '\r', ' ');
  std::string line = iso8601_millis(clock_.now()) + " " + to_string(event) + " " +
                     std::to_string(episode) + " " + clean;
  std::lock_guard lock(mu_);
  if (out_.is_open()) {
    out_ << line << '\n';
    out_.flush();
  }
  lines_.push_back(std::move(line));
  events_.push_back(event);
}

std::vector<std::string> AuditLog::lines() const {
  std::lock_guard lock(mu_);
  return lines_;
}

std::size_t AuditLog::count(AuditEvent event) const {
  std::lock_guard lock(mu_);
  return static_cast<std::size_t>(std::count(events_.begin(), events_.end(), event));
}

void AuditLog::flush() {
  std::lock_guard lock(mu_);
  if (out_.is_open()) out_.flush();
}

}  // namespace gvss
