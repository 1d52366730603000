#include "test_support.hpp"
#include "wapshop/storefront.hpp"
#include "wapshop/wbxml.hpp"

#include <doctest.h>

#include <algorithm>

using namespace wapshop;
using namespace wapshop::storefront;
using wapshop::testing::at;

namespace {

struct Shop {
  shop::Store store = shop::Store::from_fixture(testing::kSeedCatalog);
  session::SessionRegistry sessions;
  Storefront front;

  Shop() : front(store, sessions, AdminDirectory({{"root", shop::digest_password("admin-pw")}})) {
    store.register_customer("kz", "pw", "Kappa", "Zeta", "Odos 1");
  }

  std::string login(std::int64_t t = 0) {
    const auto out = front.handle_form(Route::parse("/login"), {{"username", "kz"}, {"password", "pw"}}, at(t));
    REQUIRE(out.effect == "login");
    return *out.redirect.param("s");
  }

  std::string admin_login() {
    const auto out =
        front.handle_form(Route::parse("/admin-login"), {{"username", "root"}, {"password", "admin-pw"}}, at(0));
    REQUIRE(out.effect == "admin-login");
    return *out.redirect.param("s");
  }

  wml::Deck page(const std::string& url, std::int64_t t = 0) { return front.render_page(Route::parse(url), at(t)); }
};

void collect(const std::vector<wml::Node>& nodes, std::vector<const wml::Node*>& out) {
  for (const auto& n : nodes) {
    out.push_back(&n);
    if (const auto* p = n.get_if<wml::Paragraph>()) collect(p->children, out);
  }
}

std::vector<const wml::Node*> nodes_of(const wml::Deck& d) {
  std::vector<const wml::Node*> out;
  for (const auto& c : d.cards) collect(c.content, out);
  return out;
}

std::vector<wml::Anchor> anchors(const wml::Deck& d) {
  std::vector<wml::Anchor> out;
  for (const auto* n : nodes_of(d)) {
    if (const auto* a = n->get_if<wml::Anchor>()) out.push_back(*a);
  }
  return out;
}

std::string words(const wml::Deck& d) {
  std::string out;
  for (const auto* n : nodes_of(d)) {
    if (const auto* t = n->get_if<wml::Text>()) out += t->text + " ";
    if (const auto* a = n->get_if<wml::Anchor>()) out += a->label + " ";
  }
  return out;
}

bool has_prev(const wml::Card& c) {
  return std::any_of(c.content.begin(), c.content.end(), [](const wml::Node& n) {
    const auto* d = n.get_if<wml::Do>();
    return d && d->kind == wml::DoKind::prev;
  });
}

bool mentions(const wml::Deck& d, const std::string& s) { return words(d).find(s) != std::string::npos; }

}  // namespace

TEST_CASE("anonymous main menu is six numbered entries with Back") {
  Shop s;
  const auto menu = s.page("/menu");
  REQUIRE(menu.cards.size() == 1);
  const auto as = anchors(menu);
  REQUIRE(as.size() == 6);
  for (std::size_t i = 0; i < as.size(); ++i) CHECK(as[i].label.rfind(std::to_string(i + 1) + ". ", 0) == 0);
  CHECK(as[0].href == "/login");
  CHECK(has_prev(menu.cards[0]));
}

TEST_CASE("an unknown product renders an error card that can go back") {
  Shop s;
  const auto d = s.page("/product?id=nope");
  REQUIRE(d.cards.size() == 1);
  CHECK(d.cards[0].id == "error");
  CHECK(has_prev(d.cards[0]));
  CHECK(mentions(d, "not found"));
}

TEST_CASE("adding to the cart needs a live customer session") {
  Shop s;
  const auto anon = s.page("/cart-add?id=p3");
  CHECK(mentions(anon, "1. Log in"));
  CHECK(mentions(anon, "2. Register"));
  CHECK(s.page("/cart-add?id=p3&s=deadbeefdeadbeef") == anon);

  const auto token = s.login(0);
  CHECK(s.page("/cart-add?id=p3&s=" + token, 31 * 60) == anon);

  const auto fresh = s.login(40 * 60);
  const auto out = s.front.handle_form(Route::parse("/cart-add"), {{"id", "p3"}, {"s", fresh}}, at(40 * 60));
  CHECK(out.effect == "cart-add");
  CHECK(s.store.cart("kz").quantity_of("p3") == 1);
  CHECK(mentions(s.front.render_page(out.redirect, at(40 * 60)), "in your cart"));
}

TEST_CASE("an anonymous cart-add redirects without touching any cart") {
  Shop s;
  const auto out = s.front.handle_form(Route::parse("/cart-add"), {{"id", "p3"}}, at(0));
  CHECK(out.effect == "login-required");
  CHECK(out.redirect.param("s") == nullptr);
  CHECK(s.store.cart("kz").lines.empty());
}

TEST_CASE("login carries the token, failure does not") {
  Shop s;
  const auto token = s.login();
  CHECK(token.size() == 16);
  const auto bad = s.front.handle_form(Route::parse("/login"), {{"username", "kz"}, {"password", "x"}}, at(0));
  CHECK(bad.effect == "error");
  CHECK(bad.error.has_value());
  CHECK(bad.redirect.param("s") == nullptr);
  const auto deck = s.front.submit(Route::parse("/login"), {{"username", "kz"}, {"password", "x"}}, at(0));
  CHECK(deck.cards[0].id == "error");
}

TEST_CASE("ordering through the forms totals the brute-force sum") {
  Shop s;
  const auto token = s.login();
  const std::vector<std::pair<std::string, int>> picks{{"p3", 2}, {"p7", 1}, {"p12", 3}};
  std::int64_t expected = 0;
  for (const auto& [id, qty] : picks) {
    s.front.handle_form(Route::parse("/cart-add"), {{"id", id}, {"qty", std::to_string(qty)}, {"s", token}}, at(1));
    expected += s.store.find_product(id)->price.value * qty;
  }
  const auto out = s.front.handle_form(Route::parse("/order-confirm"), {{"payment", "courier"}, {"s", token}}, at(2));
  REQUIRE(out.effect == "order");
  REQUIRE(out.redirect.page == Page::order_done);
  const auto order = s.store.find_order(*out.redirect.param("id"));
  REQUIRE(order);
  CHECK(order->total.value == expected);
  const auto done = s.front.render_page(out.redirect, at(3));
  CHECK(mentions(done, "Total: EUR " + shop::format_euros(order->total)));
  CHECK(s.store.cart("kz").lines.empty());
}

TEST_CASE("admin insert rejects an unknown category and changes nothing") {
  Shop s;
  const auto token = s.admin_login();
  const auto before = s.store.to_json();
  const auto out = s.front.handle_form(
      Route::parse("/admin-insert"),
      {{"name", "Atlas"}, {"category", "maps"}, {"price", "1000"}, {"description", "d"}, {"s", token}}, at(1));
  CHECK(out.effect == "error");
  CHECK(s.store.to_json() == before);

  const auto ok = s.front.handle_form(
      Route::parse("/admin-insert"),
      {{"name", "Atlas"}, {"category", "books"}, {"price", "1000"}, {"description", "d"}, {"s", token}}, at(1));
  REQUIRE(ok.effect == "insert");
  const auto id = *ok.redirect.param("id");
  CHECK(s.store.last_five().front().id == id);

  const auto upd = s.front.handle_form(Route::parse("/admin-update"), {{"id", id}, {"price", "1200"}, {"s", token}}, at(2));
  CHECK(upd.effect == "update");
  CHECK(s.store.find_product(id)->price.value == 1200);
  CHECK(s.store.find_product(id)->name == "Atlas");

  const auto customer = s.login();
  const auto denied = s.front.handle_form(
      Route::parse("/admin-insert"),
      {{"name", "X"}, {"category", "books"}, {"price", "1"}, {"description", "d"}, {"s", customer}}, at(3));
  CHECK(denied.effect == "login-required");
}

TEST_CASE("every link of a logged-in page carries the token") {
  Shop s;
  const auto token = s.login();
  for (const auto& url : {"/menu", "/categories", "/list?category=books", "/product?id=p3", "/new"}) {
    const auto d = s.front.render_page(Route::parse(url).with("s", token), at(0));
    for (const auto& a : anchors(d)) {
      const auto link = Route::parse(a.href);
      const auto* carried = link.param("s");
      REQUIRE(carried);
      CHECK(*carried == token);
    }
  }
  for (const auto& a : anchors(s.page("/menu"))) CHECK(Route::parse(a.href).param("s") == nullptr);
}

TEST_CASE("every page validates and compiles smaller than its text") {
  Shop s;
  const auto token = s.login();
  const auto admin = s.admin_login();
  s.front.handle_form(Route::parse("/cart-add"), {{"id", "p1"}, {"s", token}}, at(1));
  const std::vector<std::string> urls{
      "/", "/menu?s=" + token, "/login", "/register", "/new", "/categories", "/list?category=cards",
      "/product?id=p3", "/cart?s=" + token, "/cart-add?id=p1&s=" + token, "/order-confirm?s=" + token,
      "/search", "/results?q=greek", "/help", "/orders?s=" + token, "/admin-login", "/admin-menu?s=" + admin,
      "/admin-insert?s=" + admin, "/admin-update?id=p2&s=" + admin, "/product?id=missing"};
  for (const auto& url : urls) {
    INFO(url);
    const auto d = s.page(url, 2);
    CHECK(wml::validate_deck(d).empty());
    CHECK(wbxml::compiled_size(d) <= wml::serialize_deck(d).size());
    CHECK(wml::parse_deck(wml::serialize_deck(d)) == d);
  }
}

TEST_CASE("the shipped catalog lints clean") {
  Shop s;
  const auto crawl = lint_storefront(s.front, lint::LintPolicy{}, at(0));
  CHECK(crawl.report.pass());
  CHECK(crawl.report.checked_decks >= 30);
}

TEST_CASE("HTML channel pages") {
  Shop s;
  const auto product = s.front.render_html_page(Route::parse("/product?id=p3"), at(0));
  REQUIRE(product.assets.size() == 1);
  CHECK(product.assets[0].bytes <= 12000);
  CHECK(s.front.render_html_page(Route::parse("/menu"), at(0)).assets.empty());
  const auto list = s.front.render_html_page(Route::parse("/list?category=books"), at(0));
  CHECK(list.assets.size() == 5);
  CHECK(list.total_bytes() > list.html.size());
  CHECK_THROWS_AS(s.front.render_html_page(Route::parse("/help"), at(0)), RouteError);
  for (const auto& url : {"/menu", "/list?category=books", "/product?id=p3"}) {
    const auto route = Route::parse(url);
    CHECK(s.front.render_html_page(route, at(0)).total_bytes() >= wbxml::compiled_size(s.front.render_page(route, at(0))));
  }
}

TEST_CASE("origin dispatch") {
  Shop s;
  auto get = [&](const std::string& url) { return serve_origin(s.front, {"GET", url, ""}, at(0)); };
  const auto menu = get("/menu");
  CHECK(menu.status == 200);
  CHECK(menu.content_type == kWmlContentType);
  CHECK(wml::parse_deck(menu.body) == s.page("/menu"));
  CHECK(get("/img/logo.wbmp").body.size() == kLogoBytes);
  CHECK(get("/html/product?id=p3").content_type == kHtmlContentType);
  CHECK(get("/html/help").status == 404);
  CHECK(serve_origin(s.front, {"DELETE", "/menu", ""}, at(0)).status == 405);
  const auto posted = serve_origin(s.front, {"POST", "/login", "username=kz&password=pw"}, at(0));
  CHECK(posted.status == 200);
  CHECK(wml::parse_deck(posted.body).cards[0].id == "menu");
}

TEST_CASE("wrapping keeps every line within the width") {
  const auto nodes = wrap_text("The quick brown fox jumps over the extraordinarily lazy dog", 20);
  for (const auto& n : nodes) {
    if (const auto* t = n.get_if<wml::Text>()) CHECK(t->text.size() <= 20);
  }
  CHECK(wrap_text("short").size() == 1);
}

TEST_CASE("admin directory") {
  const auto dir = AdminDirectory::from_json(R"([{"username": "root", "credential": ")" +
                                             shop::digest_password("pw") + "\"}]");
  CHECK(dir.verify("root", "pw"));
  CHECK_FALSE(dir.verify("root", "nope"));
  CHECK_FALSE(dir.verify("other", "pw"));
  CHECK_THROWS(AdminDirectory::from_json("{"));
}
