#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace wapshop::storefront {

enum class Page {
  intro,
  menu,
  login,
  register_,
  new_arrivals,
  categories,
  list,
  product,
  cart,
  cart_add,
  order_confirm,
  order_done,
  search,
  results,
  help,
  orders,
  admin_login,
  admin_menu,
  admin_insert,
  admin_update,
};

/// URL path segment of a page ("new" for new_arrivals, "cart-add", ...).
std::string_view path_name(Page page);
std::optional<Page> page_from_path(std::string_view path);

using Params = std::map<std::string, std::string, std::less<>>;

class RouteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::string_view kSessionParam = "s";

struct Route {
  Page page = Page::menu;
  Params params;

  /// Accepts "/product?id=p3", "product?id=p3" or a full http URL.
  static Route parse(std::string_view url);

  /// Path plus parameters sorted by name, percent-encoded.
  std::string url() const;
  /// Same, without the session parameter (stable across sessions).
  std::string display() const;

  const std::string* param(std::string_view name) const;
  Route with(std::string name, std::string value) const;
  Route without(std::string_view name) const;

  bool operator==(const Route&) const = default;
};

std::string percent_encode(std::string_view s);
std::string percent_decode(std::string_view s);
/// application/x-www-form-urlencoded body or query string.
Params parse_query(std::string_view query);

}  // namespace wapshop::storefront
