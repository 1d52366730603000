// The wired-web channel: the same shop content as plain HTML pages with the
// catalog imagery a desktop browser would load.
#include "wapshop/storefront.hpp"

#include <sstream>

namespace wapshop::storefront {

namespace {

std::string escape(std::string_view s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

constexpr std::string_view kStyle =
    "body{font-family:Verdana,Arial,sans-serif;font-size:13px;margin:0;background:#fff}"
    "#header{background:#5b3a1a;color:#fff;padding:8px 16px}"
    "#nav{float:left;width:180px;padding:8px;border-right:1px solid #ccc}"
    "#content{margin-left:210px;padding:8px}"
    "table.products td{padding:4px 8px;border-bottom:1px solid #eee}"
    ".price{font-weight:bold;color:#900}"
    "#footer{clear:both;font-size:11px;color:#666;padding:8px 16px;border-top:1px solid #ccc}";

class PageWriter {
 public:
  PageWriter(std::string title, std::optional<std::string> token) : title_(std::move(title)), token_(std::move(token)) {}

  std::string href(Route route) const {
    if (token_) route = route.with(std::string(kSessionParam), *token_);
    return "/html" + route.url();
  }

  std::ostringstream& body() { return body_; }

  void asset(std::string src, std::size_t bytes) { assets_.push_back({std::move(src), bytes}); }

  HtmlPage finish(bool customer) {
    std::ostringstream out;
    out << "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>Museum Shop - "
        << escape(title_) << "</title>\n<style>" << kStyle << "</style>\n</head>\n<body>\n"
        << "<div id=\"header\"><h1>Museum Shop</h1></div>\n<div id=\"nav\">\n<ul>\n";
    if (customer) {
      out << "<li><a href=\"" << href({Page::cart, {}}) << "\">My cart</a></li>\n";
      out << "<li><a href=\"" << href({Page::orders, {}}) << "\">My orders</a></li>\n";
    } else {
      out << "<li><a href=\"" << href({Page::login, {}}) << "\">Login</a></li>\n";
      out << "<li><a href=\"" << href({Page::register_, {}}) << "\">Register</a></li>\n";
    }
    out << "<li><a href=\"" << href({Page::new_arrivals, {}}) << "\">New arrivals</a></li>\n";
    for (const auto c : shop::kCategories) {
      out << "<li><a href=\"" << href({Page::list, {{"category", std::string(shop::to_string(c))}}}) << "\">"
          << shop::to_string(c) << "</a></li>\n";
    }
    out << "<li><a href=\"" << href({Page::help, {}}) << "\">Help</a></li>\n</ul>\n"
        << "<form action=\"/html/search\" method=\"post\"><input type=\"text\" name=\"q\">"
        << "<input type=\"submit\" value=\"Search\"></form>\n</div>\n<div id=\"content\">\n<h2>" << escape(title_)
        << "</h2>\n"
        << body_.str() << "</div>\n<div id=\"footer\">Payment by snail mail or courier.</div>\n</body>\n</html>\n";
    return {out.str(), std::move(assets_)};
  }

 private:
  std::string title_;
  std::optional<std::string> token_;
  std::ostringstream body_;
  std::vector<HtmlAsset> assets_;
};

std::string euro(shop::Cents c) { return "&euro;" + shop::format_euros(c); }

}  // namespace

HtmlPage Storefront::render_html_page(const Route& route, Timestamp now) {
  switch (route.page) {
    case Page::menu:
    case Page::list:
    case Page::product:
    case Page::cart:
    case Page::order_confirm:
      break;
    default:
      throw RouteError("no HTML rendering for '/" + std::string(path_name(route.page)) + "'");
  }

  std::optional<std::string> token;
  std::optional<std::string> customer;
  if (const auto* s = route.param(kSessionParam)) {
    const auto resolution = sessions_.resolve(*s, now);
    if (const auto* p = std::get_if<session::Principal>(&resolution)) {
      token = *s;
      if (const auto* c = std::get_if<session::CustomerPrincipal>(p)) customer = c->username;
    }
  }

  const auto error_page = [&](std::string_view message) {
    PageWriter w("Error", token);
    w.body() << "<p>" << escape(message) << "</p>\n";
    return w.finish(customer.has_value());
  };
  const auto login_page = [&] {
    PageWriter w("Log in", token);
    w.body() << "<p>Please <a href=\"" << w.href({Page::login, {}}) << "\">log in</a> or <a href=\""
             << w.href({Page::register_, {}}) << "\">register</a> to shop.</p>\n";
    return w.finish(false);
  };

  switch (route.page) {
    case Page::menu: {
      PageWriter w("Welcome", token);
      w.body() << "<p>Books, posters, souvenirs and cards from the museum collections.</p>\n<ul>\n";
      for (const auto& p : store_.last_five()) {
        w.body() << "<li><a href=\"" << w.href({Page::product, {{"id", p.id}}}) << "\">" << escape(p.name)
                 << "</a></li>\n";
      }
      w.body() << "</ul>\n";
      return w.finish(customer.has_value());
    }
    case Page::list: {
      const auto* name = route.param("category");
      const auto category = name ? shop::parse_category(*name) : std::nullopt;
      if (!category) return error_page("Unknown category.");
      PageWriter w(std::string(shop::to_string(*category)), token);
      w.body() << "<table class=\"products\">\n";
      for (const auto& p : store_.list_by_category(*category)) {
        const auto thumb = "/html/img/" + p.id + "-thumb.jpg";
        w.body() << "<tr><td><img src=\"" << thumb << "\" alt=\"" << escape(p.name) << "\"></td><td><a href=\""
                 << w.href({Page::product, {{"id", p.id}}}) << "\">" << escape(p.name)
                 << "</a></td><td class=\"price\">" << euro(p.price) << "</td></tr>\n";
        w.asset(thumb, p.thumb_bytes);
      }
      w.body() << "</table>\n";
      return w.finish(customer.has_value());
    }
    case Page::product: {
      const auto* id = route.param("id");
      const auto product = id ? store_.find_product(*id) : std::nullopt;
      if (!product) return error_page("Product not found.");
      PageWriter w(product->name, token);
      const auto thumb = "/html/img/" + product->id + "-thumb.jpg";
      const auto photo = "/html/img/" + product->id + "-photo.jpg";
      w.body() << "<p><a href=\"" << photo << "\"><img src=\"" << thumb << "\" alt=\"" << escape(product->name)
               << "\"></a></p>\n<p>" << escape(product->description) << "</p>\n<p class=\"price\">"
               << euro(product->price) << "</p>\n<form action=\"/html/cart-add\" method=\"post\">"
               << "<input type=\"hidden\" name=\"id\" value=\"" << escape(product->id) << "\">";
      if (token) w.body() << "<input type=\"hidden\" name=\"s\" value=\"" << *token << "\">";
      w.body() << "Quantity <input type=\"text\" name=\"qty\" value=\"1\" size=\"3\">"
               << "<input type=\"submit\" value=\"Add to cart\"></form>\n";
      w.asset(thumb, product->thumb_bytes);
      return w.finish(customer.has_value());
    }
    case Page::cart:
    case Page::order_confirm: {
      if (!customer) return login_page();
      const bool confirm = route.page == Page::order_confirm;
      PageWriter w(confirm ? "Confirm order" : "Shopping cart", token);
      const auto cart = store_.cart(*customer);
      if (cart.lines.empty()) {
        w.body() << "<p>Your cart is empty.</p>\n";
        return w.finish(true);
      }
      if (confirm) {
        if (const auto c = store_.find_customer(*customer)) {
          w.body() << "<p>Deliver to: " << escape(c->name) << " " << escape(c->surname) << ", "
                   << escape(c->address) << "</p>\n";
        }
      }
      w.body() << "<table class=\"products\">\n<tr><th>Item</th><th>Qty</th><th>Price</th></tr>\n";
      shop::Cents total;
      for (const auto& line : cart.lines) {
        const auto p = store_.find_product(line.product_id);
        if (!p) continue;
        total += p->price * line.quantity;
        w.body() << "<tr><td>" << escape(p->name) << "</td><td>" << line.quantity << "</td><td class=\"price\">"
                 << euro(p->price * line.quantity) << "</td></tr>\n";
      }
      w.body() << "<tr><td colspan=\"2\">Total</td><td class=\"price\">" << euro(total) << "</td></tr>\n</table>\n";
      if (confirm) {
        w.body() << "<form action=\"/html/order-confirm\" method=\"post\"><input type=\"hidden\" name=\"s\" value=\""
                 << *token << "\"><select name=\"payment\"><option value=\"snail_mail\">Snail mail</option>"
                 << "<option value=\"courier\">Courier</option></select><input type=\"submit\" value=\"Order\">"
                 << "</form>\n";
      } else {
        w.body() << "<p><a href=\"" << w.href({Page::order_confirm, {}}) << "\">Proceed to checkout</a></p>\n";
      }
      return w.finish(true);
    }
    default:
      break;
  }
  return error_page("Page not found.");
}

}  // namespace wapshop::storefront
