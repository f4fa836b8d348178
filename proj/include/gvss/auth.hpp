#pragma once

#include <chrono>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gvss/clock.hpp"
#include "gvss/config.hpp"

namespace gvss {

inline constexpr int kDefaultPbkdf2Iterations = 100000;
inline constexpr std::chrono::minutes kSessionTtl{30};

// "pbkdf2-sha256$<iterations>$<salt-hex>$<hash-hex>" with a random 16-byte salt.
std::string hash_password(std::string_view password, int iterations = kDefaultPbkdf2Iterations);
// Constant-time comparison; malformed hashes never verify.
bool verify_password(std::string_view password, std::string_view encoded);

// 32 lowercase hex characters from 16 bytes of CSPRNG output.
std::string random_token();

class Authenticator {
 public:
  explicit Authenticator(const std::vector<UserEntry>& users);
  // Unknown users still pay for one hash so timing does not reveal them.
  bool authenticate(const std::string& username, std::string_view password) const;

 private:
  std::map<std::string, std::string> hashes_;
  std::string dummy_hash_;
};

struct Session {
  std::string token;
  std::string username;
  WallTime issued_at;
  WallTime expires_at;
};

// Sliding-expiry sessions: every successful lookup pushes expires_at out by
// the TTL. Expired sessions are indistinguishable from unknown tokens.
class SessionManager {
 public:
  explicit SessionManager(const Clock& clock, std::chrono::milliseconds ttl = kSessionTtl);

  Session create(const std::string& username);
  std::optional<Session> validate(const std::string& token);
  std::size_t active_count() const;

 private:
  const Clock& clock_;
  std::chrono::milliseconds ttl_;
  mutable std::mutex mu_;
  std::map<std::string, Session> sessions_;
};

}  // namespace gvss
