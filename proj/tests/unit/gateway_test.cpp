#include "test_support.hpp"
#include "wapshop/gateway.hpp"
#include "wapshop/wbxml.hpp"

#include <doctest.h>
#include <json.hpp>

using namespace wapshop;
using namespace wapshop::gateway;
using storefront::OriginRequest;
using storefront::OriginResponse;
using storefront::Route;
using wapshop::testing::at;

namespace {

struct Shop {
  shop::Store store = shop::Store::from_fixture(testing::kSeedCatalog);
  session::SessionRegistry sessions;
  storefront::Storefront front{store, sessions};
};

OriginFetcher fixed(int status, std::string type, std::string body) {
  return [=](const OriginRequest&) { return OriginResponse{status, type, body}; };
}

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

}  // namespace

TEST_CASE("transfer durations on a 9600 bit/s link without latency") {
  const auto link = LinkProfile::custom(9600);
  CHECK(simulate_transfer(1400, link) == 1167);
  CHECK(simulate_transfer(9200, link) == 7667);
  CHECK(simulate_transfer(0, link) == 0);
  CHECK(simulate_transfer(14500, LinkProfile::custom(56000)) == 2072);
  CHECK(simulate_transfer(1200, LinkProfile::custom(9600, 1500)) == 2500);
}

TEST_CASE("durations follow the closed form and are monotone") {
  for (const std::uint64_t rate : {9600u, 14400u, 56000u}) {
    std::uint64_t previous = 0;
    for (std::uint64_t bytes = 0; bytes < 5000; bytes += 37) {
      const auto d = simulate_transfer(bytes, LinkProfile::custom(rate));
      CHECK(d == ceil_div(bytes * 8000, rate));
      CHECK(d >= previous);
      previous = d;
    }
  }
}

TEST_CASE("airtime cost") {
  CHECK(airtime_cost(7667, Tariff::airtime(12)) == 2);
  CHECK(airtime_cost(7667, Tariff::flat()) == 0);
  CHECK(airtime_cost(60000, Tariff::airtime(12)) == 12);
  CHECK(airtime_cost(0, Tariff::airtime(12)) == 0);
  for (std::uint64_t k = 1; k <= 20; ++k) CHECK(airtime_cost(60000 * k, Tariff::airtime(12)) == 12 * k);
  CHECK(measure(9200, LinkProfile::custom(9600), Tariff::airtime(12)) == TransferMetrics{9200, 7667, 2});
}

TEST_CASE("link and tariff specifications") {
  CHECK(LinkProfile::parse("wap2g") == LinkProfile::wap2g());
  CHECK(LinkProfile::parse("dialup") == LinkProfile::dialup());
  CHECK(LinkProfile::parse("custom:14400").bitrate == 14400);
  CHECK(LinkProfile::parse("custom:14400:200").rtt_ms == 200);
  CHECK_THROWS_AS(LinkProfile::parse("custom:0"), std::invalid_argument);
  CHECK_THROWS_AS(LinkProfile::parse("gprs"), std::invalid_argument);
  CHECK(Tariff::parse("airtime:12") == Tariff::airtime(12));
  CHECK(Tariff::parse("flat") == Tariff::flat());
  CHECK_THROWS_AS(Tariff::parse("airtime:"), std::invalid_argument);
  CHECK_THROWS_AS(Tariff::parse("free"), std::invalid_argument);
}

TEST_CASE("the gateway compiles what the origin serves") {
  Shop s;
  const Gateway gw(in_process_origin(s.front, [] { return at(0); }));
  const auto r = gw.handle_request("/menu");
  CHECK_FALSE(r.error);
  CHECK(r.bytes == wbxml::compile_deck(s.front.render_page(Route::parse("/menu"), at(0))).bytes);
  CHECK(wbxml::decompile_deck(r.bytes) == r.deck);
  CHECK(r.bytes.size() <= gw.max_compiled_bytes());

  const auto posted = gw.handle_post("/search", "q=greek");
  CHECK_FALSE(posted.error);
  CHECK(posted.deck.cards[0].id == "results");
}

TEST_CASE("origin failures become error decks") {
  SUBCASE("malformed markup") {
    const Gateway gw(fixed(200, "text/vnd.wap.wml", "<wml><card id=\"a\"><p>x</card></wml>"));
    const auto r = gw.handle_request("/x");
    REQUIRE(r.error);
    CHECK(wbxml::decompile_deck(r.bytes) == r.deck);
  }
  SUBCASE("wrong content type") {
    const Gateway gw(fixed(200, "text/html", "<html/>"));
    CHECK(gw.handle_request("/x").error);
  }
  SUBCASE("http error") {
    const Gateway gw(fixed(500, "text/plain", "boom"));
    CHECK(gw.handle_request("/x").error);
  }
  SUBCASE("origin throws") {
    const Gateway gw([](const OriginRequest&) -> OriginResponse { throw std::runtime_error("down"); });
    CHECK(gw.handle_request("/x").error);
  }
  SUBCASE("oversize deck") {
    std::string body = "<wml><card id=\"a\"><p>";
    for (int i = 0; i < 300; ++i) body += "word" + std::to_string(i) + " ";
    body += "</p></card></wml>";
    const Gateway gw(fixed(200, "text/vnd.wap.wml", body));
    const auto r = gw.handle_request("/x");
    REQUIRE(r.error);
    CHECK(r.error->rfind("R1", 0) == 0);
    CHECK(r.bytes.size() <= 1400);
  }
  const auto e = error_deck("oops");
  CHECK(wml::validate_deck(e).empty());
}

TEST_CASE("deck JSON carries cards and metrics") {
  Shop s;
  const auto deck = s.front.render_page(Route::parse("/menu"), at(0));
  const auto j = nlohmann::json::parse(deck_json(deck, {231, 1693, 1}));
  CHECK(j["cards"].size() == 1);
  CHECK(j["cards"][0]["id"] == "menu");
  CHECK(j["metrics"]["bytes"] == 231);
  CHECK(j["metrics"]["duration_ms"] == 1693);
  CHECK(j["metrics"]["cost_cents"] == 1);
}

TEST_CASE("a single-route comparison agrees with its totals") {
  Shop s;
  const ChannelSetup setup;
  const auto row = compare_route(s.front, Route::parse("/product?id=p3"), setup, at(0));
  const auto wml_deck = s.front.render_page(Route::parse("/product?id=p3"), at(0));
  const auto compiled = wbxml::compiled_size(wml_deck);
  const auto p3 = *s.store.find_product("p3");
  CHECK(row.wml_bytes == compiled + p3.wap_img_bytes);
  CHECK(row.wml_requests == 2);
  CHECK(row.wml_ms == simulate_transfer(compiled, setup.wml_link) + simulate_transfer(p3.wap_img_bytes, setup.wml_link));
  CHECK(row.html_requests == 2);
  CHECK(row.largest_asset == p3.thumb_bytes);
  CHECK(row.largest_asset <= 12000);
  CHECK(row.html_cost == 0);

  const auto report = compare_channels(s.front, {Route::parse("/product?id=p3")}, setup, at(0));
  REQUIRE(report.rows.size() == 1);
  CHECK(report.rows[0] == row);
  const auto totals = report.totals();
  CHECK(totals.wml_bytes == row.wml_bytes);
  CHECK(totals.wml_ms == row.wml_ms);
  CHECK(totals.wml_cost == row.wml_cost);
  CHECK(totals.html_bytes == row.html_bytes);
  CHECK(totals.html_ms == row.html_ms);
}

TEST_CASE("comparison reports are deterministic and reject unknown routes") {
  Shop s;
  const std::vector<Route> journey{Route::parse("/menu"), Route::parse("/list?category=books"),
                                   Route::parse("/product?id=p3")};
  const auto a = compare_channels(s.front, journey, {}, at(0));
  const auto b = compare_channels(s.front, journey, {}, at(0));
  CHECK(render_text(a) == render_text(b));
  CHECK(render_json(a) == render_json(b));
  const auto totals = a.totals();
  std::uint64_t ms = 0;
  for (const auto& r : a.rows) ms += r.wml_ms;
  CHECK(totals.wml_ms == ms);
  CHECK(totals.wml_cost == airtime_cost(ms, Tariff::airtime(12)));
  CHECK(render_text(a).find("TOTAL") != std::string::npos);
  const auto j = nlohmann::json::parse(render_json(a));
  CHECK(j["rows"].size() == 3);
  CHECK_THROWS_AS(compare_route(s.front, Route::parse("/help"), {}, at(0)), RouteNotComparable);
}

TEST_CASE("device profiles") {
  const auto phone = DeviceProfile::phone();
  CHECK(phone.width == 150);
  CHECK(phone.height == 150);
  CHECK(phone.min_memory_bytes == 128 * 1024);
  CHECK(phone.max_memory_bytes == 512 * 1024);
  CHECK(DeviceProfile::desktop().width == 800);
}
