#include "gvss/auth.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/rand.h>

#include <sstream>

#include "gvss/error.hpp"

namespace gvss {

namespace {

constexpr std::size_t kSaltBytes = 16;
constexpr std::size_t kHashBytes = 32;

std::string to_hex(const unsigned char* data, std::size_t n) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(n * 2);
  for (std::size_t i = 0; i < n; ++i) {
    out += kHex[data[i] >> 4];
    out += kHex[data[i] & 0x0F];
  }
  return out;
}

std::optional<std::vector<unsigned char>> from_hex(std::string_view s) {
  if (s.size() % 2 != 0) return std::nullopt;
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  std::vector<unsigned char> out;
  for (std::size_t i = 0; i < s.size(); i += 2) {
    const int hi = nibble(s[i]);
    const int lo = nibble(s[i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    out.push_back(static_cast<unsigned char>((hi << 4) | lo));
  }
  return out;
}

std::vector<unsigned char> random_bytes(std::size_t n) {
  std::vector<unsigned char> out(n);
  if (RAND_bytes(out.data(), static_cast<int>(n)) != 1) {
    throw Error(ErrorCode::IoError, "CSPRNG failure");
  }
  return out;
}

std::vector<unsigned char> pbkdf2(std::string_view password,
                                  const std::vector<unsigned char>& salt, int iterations) {
  std::vector<unsigned char> out(kHashBytes);
  if (PKCS5_PBKDF2_HMAC(password.data(), static_cast<int>(password.size()), salt.data(),
                        static_cast<int>(salt.size()), iterations, EVP_sha256(),
                        static_cast<int>(out.size()), out.data()) != 1) {
    throw Error(ErrorCode::IoError, "PBKDF2 failure");
  }
  return out;
}

}  // namespace

std::string hash_password(std::string_view password, int iterations) {
  if (iterations < 1) throw Error(ErrorCode::ConfigError, "iterations must be >= 1");
  const auto salt = random_bytes(kSaltBytes);
  const auto hash = pbkdf2(password, salt, iterations);
  return "pbkdf2-sha256$" + std::to_string(iterations) + "$" + to_hex(salt.data(), salt.size()) +
         "$" + to_hex(hash.data(), hash.size());
}

bool verify_password(std::string_view password, std::string_view encoded) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream ss{std::string(encoded)};
  while (std::getline(ss, part, '$')) parts.push_back(part);
  if (parts.size() != 4 || parts[0] != "pbkdf2-sha256") return false;
  int iterations = 0;
  try {
    iterations = std::stoi(parts[1]);
  } catch (const std::exception&) {
    return false;
  }
  const auto salt = from_hex(parts[2]);
  const auto expected = from_hex(parts[3]);
  if (iterations < 1 || !salt || !expected || expected->size() != kHashBytes) return false;
  const auto actual = pbkdf2(password, *salt, iterations);
  return CRYPTO_memcmp(actual.data(), expected->data(), kHashBytes) == 0;
}

std::string random_token() {
  const auto bytes = random_bytes(16);
  return to_hex(bytes.data(), bytes.size());
}

Authenticator::Authenticator(const std::vector<UserEntry>& users) {
  int iterations = kDefaultPbkdf2Iterations;
  for (const auto& u : users) {
    hashes_[u.username] = u.password_hash;
    // Match the configured cost for the dummy comparison.
    const auto first = u.password_hash.find('$');
    const auto second = u.password_hash.find('$', first + 1);
    if (first != std::string::npos && second != std::string::npos) {
      try {
        iterations = std::stoi(u.password_hash.substr(first + 1, second - first - 1));
      } catch (const std::exception&) {
      }
    }
  }
  dummy_hash_ = hash_password(random_token(), iterations);
}

bool Authenticator::authenticate(const std::string& username, std::string_view password) const {
  const auto it = hashes_.find(username);
  if (it == hashes_.end()) {
    (void)verify_password(password, dummy_hash_);
    return false;
  }
  return verify_password(password, it->second);
}

SessionManager::SessionManager(const Clock& clock, std::chrono::milliseconds ttl)
    : clock_(clock), ttl_(ttl) {}

Session SessionManager::create(const std::string& username) {
  Session s;
  s.username = username;
  s.issued_at = clock_.now();
  s.expires_at = s.issued_at + ttl_;
  std::lock_guard lock(mu_);
  do {
    s.token = random_token();
  } while (sessions_.count(s.token));
  sessions_[s.token] = s;
  return s;
}

std::optional<Session> SessionManager::validate(const std::string& token) {
  const WallTime now = clock_.now();
  std::lock_guard lock(mu_);
  // Drop anything expired so stale tokens do not accumulate.
  std::erase_if(sessions_, [now](const auto& kv) { return kv.second.expires_at <= now; });
  const auto it = sessions_.find(token);
  if (it == sessions_.end()) return std::nullopt;
  it->second.expires_at = now + ttl_;
  return it->second;
}

std::size_t SessionManager::active_count() const {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

}  // namespace gvss
