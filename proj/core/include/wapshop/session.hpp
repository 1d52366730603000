// Cookieless sessions: a random token travels in every URL ("s" parameter)
// and in a hidden postfield of every form.
#pragma once

#include "wapshop/shop.hpp"

#include <chrono>
#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <variant>

namespace wapshop::session {

using shop::Timestamp;

struct CustomerPrincipal {
  std::string username;
  bool operator==(const CustomerPrincipal&) const = default;
};

struct AdminPrincipal {
  std::string username;
  bool operator==(const AdminPrincipal&) const = default;
};

using Principal = std::variant<CustomerPrincipal, AdminPrincipal>;

struct Session {
  std::string token;  // 16 lowercase hex characters
  Principal principal;
  Timestamp last_access;
  std::chrono::milliseconds idle_ttl{std::chrono::minutes(30)};
};

struct Expired {
  bool operator==(const Expired&) const = default;
};
struct Unknown {
  bool operator==(const Unknown&) const = default;
};

using Resolution = std::variant<Principal, Expired, Unknown>;

/// 8 bytes from the system CSPRNG, hex encoded.
std::string random_token();

class SessionRegistry {
 public:
  explicit SessionRegistry(std::chrono::milliseconds idle_ttl = std::chrono::minutes(30));

  Session create(Principal principal, Timestamp now);

  /// Sliding expiry: a successful resolve refreshes last_access. Sessions
  /// idle for more than twice their TTL are forgotten on the next create()
  /// and then resolve as Unknown.
  Resolution resolve(std::string_view token, Timestamp now);

  std::size_t live_count() const;

 private:
  std::chrono::milliseconds idle_ttl_;
  mutable std::mutex mutex_;
  std::map<std::string, Session, std::less<>> sessions_;
};

}  // namespace wapshop::session
