#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <ostream>
#include <string>
#include <string_view>

#include "gvss/audit.hpp"
#include "gvss/clock.hpp"

namespace gvss {

inline constexpr std::size_t kMaxMessageChars = 160;

// Number of Unicode code points in a UTF-8 string.
std::size_t utf8_length(std::string_view s);

class NotificationMessage {
 public:
  // Throws Error(InvalidMessage) when body is empty or longer than 160
  // characters.
  NotificationMessage(std::string recipient, std::string body,
                      std::uint64_t episode_id, WallTime created_at);

  const std::string& recipient() const { return recipient_; }
  const std::string& body() const { return body_; }
  std::uint64_t episode_id() const { return episode_id_; }
  WallTime created_at() const { return created_at_; }

 private:
  std::string recipient_;
  std::string body_;
  std::uint64_t episode_id_;
  WallTime created_at_;
};

// Body: "INTRUSION ep=<id> cam=<camera_id> at=<ISO-8601>". An over-long
// camera id is cut and suffixed with U+2026 so the body stays within 160
// characters.
NotificationMessage format_breach_message(std::uint64_t episode_id,
                                          std::string_view camera_id, WallTime at,
                                          std::string recipient = {});

struct DeliveryReceipt {
  enum class Status { Sent, Failed };

  std::string receipt_id;
  std::string transport;
  Status status = Status::Failed;
  std::string detail;
};

class Transport {
 public:
  virtual ~Transport() = default;
  virtual std::string name() const = 0;
  // Performs one delivery attempt. May throw; Notifier converts any
  // exception into a Failed receipt.
  virtual void deliver(const NotificationMessage& message) = 0;
};

// Appends one line per message.
class FileTransport final : public Transport {
 public:
  explicit FileTransport(std::filesystem::path path);
  std::string name() const override { return "file"; }
  void deliver(const NotificationMessage& message) override;

 private:
  std::filesystem::path path_;
};

class StreamTransport final : public Transport {
 public:
  explicit StreamTransport(std::ostream& out) : out_(out) {}
  std::string name() const override { return "stdout"; }
  void deliver(const NotificationMessage& message) override;

 private:
  std::ostream& out_;
};

// POSTs recipient=<r>&body=<urlencoded> to an SMS-gateway style URL;
// any non-2xx response is a failure.
class WebhookTransport final : public Transport {
 public:
  explicit WebhookTransport(std::string url,
                            std::chrono::milliseconds timeout = std::chrono::seconds(3));
  std::string name() const override { return "webhook"; }
  void deliver(const NotificationMessage& message) override;

 private:
  std::string origin_;
  std::string path_;
  std::chrono::milliseconds timeout_;
};

std::string form_urlencode(std::string_view s);

// One attempt per call, no retries; outcome is written to the audit log as
// NOTIFY_OK or NOTIFY_FAIL.
class Notifier {
 public:
  Notifier(std::unique_ptr<Transport> transport, AuditLog& audit);

  DeliveryReceipt notify(const NotificationMessage& message) noexcept;

  std::size_t attempts() const { return attempts_.load(); }

 private:
  std::unique_ptr<Transport> transport_;
  AuditLog& audit_;
  std::mutex mu_;
  std::atomic<std::size_t> attempts_{0};
};

}  // namespace gvss
