#include "gvss/notify.hpp"

#include <cctype>
#include <fstream>

#include <httplib.h>

#include "gvss/error.hpp"

namespace gvss {

namespace {

std::atomic<std::uint64_t> g_receipt_counter{0};

// Byte length of the first n code points of s.
std::size_t utf8_prefix_bytes(std::string_view s, std::size_t n) {
  std::size_t i = 0;
  std::size_t seen = 0;
  while (i < s.size() && seen < n) {
    ++i;
    while (i < s.size() && (static_cast<unsigned char>(s[i]) & 0xC0) == 0x80) ++i;
    ++seen;
  }
  return i;
}

}  // namespace

std::size_t utf8_length(std::string_view s) {
  std::size_t n = 0;
  for (unsigned char c : s) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

NotificationMessage::NotificationMessage(std::string recipient, std::string body,
                                         std::uint64_t episode_id, WallTime created_at)
    : recipient_(std::move(recipient)),
      body_(std::move(body)),
      episode_id_(episode_id),
      created_at_(created_at) {
  if (body_.empty()) throw Error(ErrorCode::InvalidMessage, "empty notification body");
  if (utf8_length(body_) > kMaxMessageChars) {
    throw Error(ErrorCode::InvalidMessage,
                "notification body exceeds " + std::to_string(kMaxMessageChars) +
                    " characters");
  }
}

NotificationMessage format_breach_message(std::uint64_t episode_id,
                                          std::string_view camera_id, WallTime at,
                                          std::string recipient) {
  const std::string head = "INTRUSION ep=" + std::to_string(episode_id) + " cam=";
  const std::string tail = " at=" + iso8601(at);
  std::string cam(camera_id);
  const std::size_t fixed = utf8_length(head) + utf8_length(tail);
  if (fixed + utf8_length(cam) > kMaxMessageChars) {
    const std::size_t room = kMaxMessageChars - fixed - 1;  // one for the ellipsis
    cam = cam.substr(0, utf8_prefix_bytes(cam, room)) + "\xE2\x80\xA6";
  }
  return NotificationMessage(std::move(recipient), head + cam + tail, episode_id, at);
}

FileTransport::FileTransport(std::filesystem::path path) : path_(std::move(path)) {}

void FileTransport::deliver(const NotificationMessage& m) {
  std::ofstream out(path_, std::ios::app);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path_.string());
  out << iso8601(m.created_at()) << " episode_id=" << m.episode_id()
      << " recipient=" << m.recipient() << " body=" << m.body() << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "write failed on " + path_.string());
}

void StreamTransport::deliver(const NotificationMessage& m) {
  out_ << "SMS to " << m.recipient() << " episode_id=" << m.episode_id() << ": "
       << m.body() << std::endl;
}

std::string form_urlencode(std::string_view s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out += static_cast<char>(c);
    } else if (c == ' ') {
      out += '+';
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 0x0F];
    }
  }
  return out;
}

WebhookTransport::WebhookTransport(std::string url, std::chrono::milliseconds timeout)
    : timeout_(timeout) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos || url.substr(0, scheme_end) != "http") {
    throw Error(ErrorCode::ConfigError, "webhook url must be http://host[:port]/path: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  origin_ = url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : url.substr(path_start);
}

void WebhookTransport::deliver(const NotificationMessage& m) {
  httplib::Client client(origin_);
  const auto secs = timeout_.count() / 1000;
  const auto usecs = (timeout_.count() % 1000) * 1000;
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  const std::string form =
      "recipient=" + form_urlencode(m.recipient()) + "&body=" + form_urlencode(m.body());
  auto res = client.Post(path_, form, "application/x-www-form-urlencoded");
  if (!res) {
    throw Error(ErrorCode::IoError, "webhook unreachable: " + httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    throw Error(ErrorCode::IoError, "webhook returned HTTP " + std::to_string(res->status));
  }
}

Notifier::Notifier(std::unique_ptr<Transport> transport, AuditLog& audit)
    : transport_(std::move(transport)), audit_(audit) {}

DeliveryReceipt Notifier::notify(const NotificationMessage& message) noexcept {
  DeliveryReceipt receipt;
  try {
    receipt.receipt_id = "rcpt-" + std::to_string(++g_receipt_counter);
    receipt.transport = transport_->name();
  } catch (...) {
    // allocation failure; leave the receipt as a bare failure
  }
  ++attempts_;
  try {
    std::lock_guard lock(mu_);
    transport_->deliver(message);
    receipt.status = DeliveryReceipt::Status::Sent;
    receipt.detail = "delivered";
  } catch (const std::exception& e) {
    receipt.status = DeliveryReceipt::Status::Failed;
    receipt.detail = e.what();
  } catch (...) {
    receipt.status = DeliveryReceipt::Status::Failed;
    receipt.detail = "unknown transport failure";
  }
  try {
    const bool ok = receipt.status == DeliveryReceipt::Status::Sent;
    audit_.append(ok ? AuditEvent::NotifyOk : AuditEvent::NotifyFail, message.episode_id(),
                  "receipt=" + receipt.receipt_id + " transport=" + receipt.transport +
                      " recipient=" + message.recipient() + " detail=" + receipt.detail);
  } catch (...) {
  }
  return receipt;
}

}  // namespace gvss
