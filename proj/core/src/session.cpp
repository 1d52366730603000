#include "wapshop/session.hpp"

#include <sodium.h>

#include <array>
#include <stdexcept>

namespace wapshop::session {

std::string random_token() {
  if (sodium_init() < 0) throw std::runtime_error("libsodium initialisation failed");
  std::array<unsigned char, 8> bytes{};
  randombytes_buf(bytes.data(), bytes.size());
  static constexpr char kHex[] = "0123456789abcdef";
  std::string token;
  token.reserve(16);
  for (const auto b : bytes) {
    token.push_back(kHex[b >> 4]);
    token.push_back(kHex[b & 0x0F]);
  }
  return token;
}

SessionRegistry::SessionRegistry(std::chrono::milliseconds idle_ttl) : idle_ttl_(idle_ttl) {}

Session SessionRegistry::create(Principal principal, Timestamp now) {
  std::lock_guard lock(mutex_);
  std::erase_if(sessions_, [&](const auto& entry) {
    return now - entry.second.last_access > 2 * entry.second.idle_ttl;
  });
  std::string token;
  do {
    token = random_token();
  } while (sessions_.count(token));
  Session s{token, std::move(principal), now, idle_ttl_};
  sessions_.emplace(token, s);
  return s;
}

Resolution SessionRegistry::resolve(std::string_view token, Timestamp now) {
  std::lock_guard lock(mutex_);
  const auto it = sessions_.find(token);
  if (it == sessions_.end()) return Unknown{};
  if (now - it->second.last_access > it->second.idle_ttl) return Expired{};
  it->second.last_access = now;
  return it->second.principal;
}

std::size_t SessionRegistry::live_count() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

}  // namespace wapshop::session
