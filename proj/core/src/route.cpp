#include "wapshop/route.hpp"

#include <array>
#include <utility>

namespace wapshop::storefront {

namespace {

constexpr std::array<std::pair<Page, std::string_view>, 20> kPaths{{
    {Page::intro, "intro"},
    {Page::menu, "menu"},
    {Page::login, "login"},
    {Page::register_, "register"},
    {Page::new_arrivals, "new"},
    {Page::categories, "categories"},
    {Page::list, "list"},
    {Page::product, "product"},
    {Page::cart, "cart"},
    {Page::cart_add, "cart-add"},
    {Page::order_confirm, "order-confirm"},
    {Page::order_done, "order-done"},
    {Page::search, "search"},
    {Page::results, "results"},
    {Page::help, "help"},
    {Page::orders, "orders"},
    {Page::admin_login, "admin-login"},
    {Page::admin_menu, "admin-menu"},
    {Page::admin_insert, "admin-insert"},
    {Page::admin_update, "admin-update"},
}};

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::string_view path_name(Page page) {
  for (const auto& [p, name] : kPaths) {
    if (p == page) return name;
  }
  return "menu";
}

std::optional<Page> page_from_path(std::string_view path) {
  for (const auto& [p, name] : kPaths) {
    if (name == path) return p;
  }
  return std::nullopt;
}

std::string percent_encode(std::string_view s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (const char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_' ||
        c == '.' || c == '~') {
      out.push_back(ch);
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 0x0F]);
    }
  }
  return out;
}

std::string percent_decode(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '+') {
      out.push_back(' ');
    } else if (s[i] == '%' && i + 2 < s.size() && hex_value(s[i + 1]) >= 0 && hex_value(s[i + 2]) >= 0) {
      out.push_back(static_cast<char>(hex_value(s[i + 1]) * 16 + hex_value(s[i + 2])));
      i += 2;
    } else {
      out.push_back(s[i]);
    }
  }
  return out;
}

Params parse_query(std::string_view query) {
  Params params;
  while (!query.empty()) {
    const auto amp = query.find('&');
    const auto part = query.substr(0, amp);
    if (!part.empty()) {
      const auto eq = part.find('=');
      auto key = percent_decode(part.substr(0, eq));
      auto value = eq == std::string_view::npos ? std::string{} : percent_decode(part.substr(eq + 1));
      params.insert_or_assign(std::move(key), std::move(value));
    }
    if (amp == std::string_view::npos) break;
    query.remove_prefix(amp + 1);
  }
  return params;
}

Route Route::parse(std::string_view url) {
  if (const auto scheme = url.find("://"); scheme != std::string_view::npos) {
    const auto slash = url.find('/', scheme + 3);
    url = slash == std::string_view::npos ? std::string_view("/") : url.substr(slash);
  }
  url = url.substr(0, url.find('#'));
  const auto q = url.find('?');
  auto path = url.substr(0, q);
  while (!path.empty() && path.front() == '/') path.remove_prefix(1);
  if (path.empty()) path = "intro";
  const auto page = page_from_path(path);
  if (!page) throw RouteError("unknown route '/" + std::string(path) + "'");
  Route route{*page, {}};
  if (q != std::string_view::npos) route.params = parse_query(url.substr(q + 1));
  return route;
}

std::string Route::url() const {
  std::string out = "/" + std::string(path_name(page));
  bool first = true;
  for (const auto& [key, value] : params) {
    out += first ? "?" : "&";
    first = false;
    out += percent_encode(key) + "=" + percent_encode(value);
  }
  return out;
}

std::string Route::display() const { return without(kSessionParam).url(); }

const std::string* Route::param(std::string_view name) const {
  const auto it = params.find(name);
  return it == params.end() ? nullptr : &it->second;
}

Route Route::with(std::string name, std::string value) const {
  Route copy = *this;
  copy.params.insert_or_assign(std::move(name), std::move(value));
  return copy;
}

Route Route::without(std::string_view name) const {
  Route copy = *this;
  if (const auto it = copy.params.find(name); it != copy.params.end()) copy.params.erase(it);
  return copy;
}

}  // namespace wapshop::storefront
