// Deck generation for the shop's navigation map, form handling, a minimal
// HTML channel of the same content, and the origin-server request dispatch.
#pragma once

#include "wapshop/lint.hpp"
#include "wapshop/route.hpp"
#include "wapshop/session.hpp"
#include "wapshop/shop.hpp"
#include "wapshop/wml.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wapshop::storefront {

using shop::Timestamp;

struct AdminAccount {
  std::string username;
  std::string credential;  // digest_password() output
};

/// Configured administrator principals (they are not self-registered).
class AdminDirectory {
 public:
  AdminDirectory() = default;
  explicit AdminDirectory(std::vector<AdminAccount> accounts) : accounts_(std::move(accounts)) {}

  /// [{"username": ..., "credential": ...}, ...]
  static AdminDirectory from_json(std::string_view json_text);

  bool verify(std::string_view username, std::string_view password) const;
  bool empty() const { return accounts_.empty(); }

 private:
  std::vector<AdminAccount> accounts_;
};

struct FormOutcome {
  std::string effect;  // what happened, e.g. "login", "cart-add", "order"
  Route redirect;
  std::optional<std::string> error;  // set when a domain error was raised
};

struct HtmlAsset {
  std::string src;
  std::size_t bytes = 0;
};

struct HtmlPage {
  std::string html;
  std::vector<HtmlAsset> assets;

  std::size_t total_bytes() const;
};

inline constexpr std::size_t kLogoBytes = 900;
inline constexpr std::string_view kLogoSrc = "/img/logo.wbmp";

/// Line width used when wrapping generated text; matches the default lint policy.
inline constexpr std::size_t kLineWidth = 20;

class Storefront {
 public:
  Storefront(shop::Store& store, session::SessionRegistry& sessions, AdminDirectory admins = {});

  shop::Store& store() { return store_; }
  session::SessionRegistry& sessions() { return sessions_; }

  /// Resolves the route's "s" parameter, if any.
  session::Resolution resolve(const Route& route, Timestamp now);

  wml::Deck render_page(const Route& route, Timestamp now);
  FormOutcome handle_form(const Route& route, const Params& fields, Timestamp now);
  /// handle_form followed by rendering the redirect (or an error card).
  wml::Deck submit(const Route& route, const Params& fields, Timestamp now);

  /// Routes: menu, list, product, cart, order-confirm. Others throw RouteError.
  HtmlPage render_html_page(const Route& route, Timestamp now);

  /// Weight of every image the WML channel references.
  lint::ImageWeights image_weights() const;
  std::optional<std::size_t> image_weight(std::string_view src) const;
  std::optional<std::size_t> html_asset_weight(std::string_view src) const;

 private:
  shop::Store& store_;
  session::SessionRegistry& sessions_;
  AdminDirectory admins_;
};

/// Anonymous crawl from the main menu plus the intro page and the
/// login-or-register choice page, all linted against `policy`.
lint::CrawlResult lint_storefront(Storefront& front, const lint::LintPolicy& policy, Timestamp now);

/// Word-wraps text into Text / Break nodes no wider than `width` code points.
std::vector<wml::Node> wrap_text(std::string_view text, std::size_t width = kLineWidth);

struct OriginRequest {
  std::string method = "GET";
  std::string url;
  std::string body;  // application/x-www-form-urlencoded for POST
};

struct OriginResponse {
  int status = 200;
  std::string content_type;
  std::string body;
};

inline constexpr std::string_view kWmlContentType = "text/vnd.wap.wml";
inline constexpr std::string_view kHtmlContentType = "text/html; charset=utf-8";

/// Origin web server behaviour: WML pages, form posts, image bytes and the
/// /html/... channel.
OriginResponse serve_origin(Storefront& front, const OriginRequest& request, Timestamp now);

}  // namespace wapshop::storefront
