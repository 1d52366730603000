// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include "cli.hpp"
#include "test_support.hpp"
#include "wapshop/gateway.hpp"
#include "wapshop/journey.hpp"
#include "wapshop/lint.hpp"
#include "wapshop/storefront.hpp"
#include "wapshop/wbxml.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

using namespace wapshop;
using storefront::Route;
using testing::at;

namespace {

using Bytes = std::vector<std::uint8_t>;

struct Shop {
  shop::Store store;
  session::SessionRegistry sessions;
  storefront::Storefront front{store, sessions};

  explicit Shop(shop::Store s = shop::Store::from_fixture(testing::kSeedCatalog)) : store(std::move(s)) {}
};

/// Collects failure reasons; a criterion passes when none were recorded.
struct Check {
  std::vector<std::string> failures;
  std::string detail;

  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

int failed = 0;

void report(const std::string& name, const std::function<void(Check&)>& body) {
  Check c;
  try {
    body(c);
  } catch (const std::exception& e) {
    c.failures.push_back(std::string("exception: ") + e.what());
  }
  if (c.failures.empty()) {
    std::cout << "PASS " << name;
    if (!c.detail.empty()) std::cout << " (" << c.detail << ")";
    std::cout << "\n";
    return;
  }
  ++failed;
  std::cout << "FAIL " << name << ": " << c.failures.front();
  if (c.failures.size() > 1) std::cout << " (+" << c.failures.size() - 1 << " more)";
  std::cout << "\n";
}

std::string login(Shop& s, const std::string& user, std::int64_t t) {
  const auto out = s.front.handle_form(Route::parse("/login"), {{"username", user}, {"password", "pw"}}, at(t));
  const auto* token = out.redirect.param("s");
  return token ? *token : std::string{};
}

/// Every deck the storefront can emit for the seeded catalog: the anonymous
/// crawl plus the pages that need a customer or administrator session.
std::vector<wml::Deck> all_storefront_decks(Shop& s) {
  std::vector<wml::Deck> decks;
  const auto crawl = storefront::lint_storefront(s.front, {}, at(0));
  for (const auto& route : crawl.graph.nodes) decks.push_back(s.front.render_page(Route::parse(route), at(0)));
  s.store.register_customer("acc", "pw", "A", "B", "C");
  const auto token = login(s, "acc", 0);
  s.store.cart_add("acc", "p3", 2);
  for (const auto& url : {"/", "/menu", "/cart", "/cart-add?id=p3", "/order-confirm", "/orders", "/login", "/register",
                          "/search", "/results?q=a", "/admin-login", "/product?id=none"}) {
    decks.push_back(s.front.render_page(Route::parse(url).with("s", token), at(1)));
  }
  const auto order = s.front.handle_form(Route::parse("/order-confirm"), {{"payment", "courier"}, {"s", token}}, at(2));
  decks.push_back(s.front.render_page(order.redirect, at(3)));
  return decks;
}

void codec_round_trip(Check& c) {
  const Bytes hi{0x01, 0x45, 0xC6, 0x85, 0x03, 0x61, 0x00, 0x01, 0x47, 0x03, 0x48, 0x69, 0x00, 0x01, 0x01, 0x01};
  const Bytes empty{0x01, 0x45, 0x86, 0x85, 0x03, 0x61, 0x00, 0x01, 0x01};
  wml::Deck hi_deck;
  hi_deck.cards.push_back({"a", "", {wml::Paragraph{{wml::Text{"Hi"}}}}});
  wml::Deck empty_deck;
  empty_deck.cards.push_back({"a", "", {}});
  c.expect(wbxml::compile_deck(hi_deck).bytes == hi, "hand-encoded paragraph deck differs");
  c.expect(wbxml::compile_deck(empty_deck).bytes == empty, "hand-encoded empty card differs");
  c.expect(wbxml::decompile_deck(hi) == hi_deck && wbxml::decompile_deck(empty) == empty_deck,
           "hand-encoded bytes do not decode");

  testing::DeckGenerator gen(2008);
  for (int i = 0; i < 500; ++i) {
    const auto d = gen.deck();
    c.expect(wbxml::decompile_deck(wbxml::compile_deck(d).bytes) == d, "generated deck " + std::to_string(i));
  }
  Shop s;
  const auto decks = all_storefront_decks(s);
  for (const auto& d : decks) {
    c.expect(wbxml::decompile_deck(wbxml::compile_deck(d).bytes) == d, "storefront deck " + d.cards.at(0).id);
  }
  c.detail = "500 generated + " + std::to_string(decks.size()) + " storefront decks";
}

void size_constraints(Check& c) {
  Shop s;
  const auto crawl = storefront::lint_storefront(s.front, {}, at(0));
  std::size_t largest = 0, heaviest = 0;
  for (const auto& route : crawl.graph.nodes) {
    const auto deck = s.front.render_page(Route::parse(route), at(0));
    const auto compiled = wbxml::compiled_size(deck);
    std::set<std::string> images;
    for (const auto& card : deck.cards) {
      wml::walk(card.content, [&](const wml::Node& n) {
        if (const auto* img = n.get_if<wml::Image>()) images.insert(img->src);
      });
    }
    std::size_t weight = compiled;
    for (const auto& src : images) weight += s.front.image_weight(src).value_or(0);
    largest = std::max(largest, compiled);
    heaviest = std::max(heaviest, weight);
    c.expect(compiled <= 1400, route + " compiles to " + std::to_string(compiled) + " bytes");
    c.expect(weight <= 9200, route + " weighs " + std::to_string(weight) + " bytes");
  }
  for (std::size_t i = 1; i <= 20; ++i) {
    c.expect(crawl.graph.has_node("/product?id=p" + std::to_string(i)), "p" + std::to_string(i) + " not reachable");
  }

  std::ostringstream out, err;
  const int code = cli::run_cli({"--seed", testing::kSeedCatalog.string(), "lint"}, out, err);
  c.expect(code == 0, "lint exit status " + std::to_string(code));
  c.expect(out.str().find("\n0 violations") != std::string::npos || out.str().rfind("0 violations", 0) == 0,
           "lint did not report 0 violations");
  c.detail = std::to_string(crawl.graph.nodes.size()) + " decks, max " + std::to_string(largest) + " B compiled, max " +
             std::to_string(heaviest) + " B page weight";
}

void timing(Check& c) {
  using gateway::LinkProfile;
  const auto a = gateway::simulate_transfer(1400, LinkProfile::custom(9600, 0));
  const auto b = gateway::simulate_transfer(9200, LinkProfile::custom(9600, 0));
  const auto h = gateway::simulate_transfer(12000 + 2500, LinkProfile::custom(56000, 0));
  c.expect(a == 1167, "1400 B @ 9600 = " + std::to_string(a));
  c.expect(b == 7667, "9200 B @ 9600 = " + std::to_string(b));
  c.expect(h == 2072, "14500 B @ 56000 = " + std::to_string(h));
  c.detail = std::to_string(a) + " / " + std::to_string(b) + " / " + std::to_string(h) + " ms";
}

void cost(Check& c) {
  const auto airtime = gateway::airtime_cost(7667, gateway::Tariff::airtime(12));
  c.expect(airtime == 2, "7667 ms @ 12 c/min = " + std::to_string(airtime));
  for (std::uint64_t ms = 0; ms <= 600000; ms += 977) {
    c.expect(gateway::airtime_cost(ms, gateway::Tariff::flat()) == 0, "flat tariff charged at " + std::to_string(ms));
  }
  c.detail = std::to_string(airtime) + " cents";
}

constexpr const char* kComparisonJourney = R"(form /register username=cmp password=pw surname=C name=M address=Street
form /cart-add id=p3
goto /menu
goto /list?category=books
goto /product?id=p3
goto /cart
goto /order-confirm
)";

std::string comparison_text() {
  Shop s;
  const auto result = journey::run_journey(s.front, journey::Script::parse(kComparisonJourney));
  return gateway::render_text(result.report);
}

void comparison(Check& c) {
  Shop s;
  const auto result = journey::run_journey(s.front, journey::Script::parse(kComparisonJourney));
  const auto& rows = result.report.rows;
  c.expect(rows.size() == 5, std::to_string(rows.size()) + " rows");
  int thumb_rows = 0;
  for (const auto& r : rows) {
    c.expect(r.wml_bytes < r.html_bytes, r.route + ": wml " + std::to_string(r.wml_bytes) + " B >= html " +
                                             std::to_string(r.html_bytes) + " B");
    if (r.route.rfind("/product", 0) == 0 && r.largest_asset == 12000) {
      ++thumb_rows;
      c.expect(r.wml_ms > r.html_ms, r.route + ": wml " + std::to_string(r.wml_ms) + " ms <= html " +
                                         std::to_string(r.html_ms) + " ms");
    }
  }
  c.expect(thumb_rows == 1, "expected one product row with a 12000-byte thumbnail");
  c.expect(comparison_text() == comparison_text(), "report differs between runs");
  const auto& setup = result.report.setup;
  c.detail = "wml " + setup.wml_link.name + " rtt " + std::to_string(setup.wml_link.rtt_ms) + " ms, html " +
             setup.html_link.name + " rtt " + std::to_string(setup.html_link.rtt_ms) + " ms";
}

void commerce(Check& c) {
  std::mt19937 rng(1949);
  {
    Shop s;
    s.store.register_customer("buyer", "pw", "", "", "");
    const auto products = s.store.products();
    for (int trial = 0; trial < 100; ++trial) {
      std::map<std::string, std::int64_t> qty;
      const int adds = std::uniform_int_distribution<int>(1, 10)(rng);
      for (int i = 0; i < adds; ++i) {
        const auto& p = products[std::uniform_int_distribution<std::size_t>(0, products.size() - 1)(rng)];
        const auto n = std::uniform_int_distribution<std::int64_t>(1, 5)(rng);
        s.store.cart_add("buyer", p.id, n);
        qty[p.id] += n;
      }
      std::int64_t expected = 0;
      for (const auto& p : products) {
        if (qty.count(p.id)) expected += p.price.value * qty[p.id];
      }
      c.expect(s.store.place_order("buyer", "courier").total.value == expected, "cart " + std::to_string(trial));
    }
  }
  for (int trial = 0; trial < 50; ++trial) {
    shop::Store store;
    const int n = std::uniform_int_distribution<int>(0, 12)(rng);
    for (int i = 0; i < n; ++i) {
      shop::ProductFields f;
      f.name = "Item " + std::to_string(std::uniform_int_distribution<int>(0, 99)(rng));
      f.category = std::string(shop::to_string(shop::kCategories[std::uniform_int_distribution<int>(0, 3)(rng)]));
      f.price_cents = std::uniform_int_distribution<int>(1, 9999)(rng);
      f.description = "d";
      store.insert_product(f);
      if (i > 0 && std::uniform_int_distribution<int>(0, 2)(rng) == 0) {
        const auto all = store.products();
        auto changed = f;
        changed.name = "Renamed";
        store.update_product(all[std::uniform_int_distribution<std::size_t>(0, all.size() - 1)(rng)].id, changed);
      }
    }
    auto oracle = store.products();
    std::sort(oracle.begin(), oracle.end(),
              [](const shop::Product& a, const shop::Product& b) { return a.inserted_seq > b.inserted_seq; });
    if (oracle.size() > 5) oracle.resize(5);
    c.expect(store.last_five() == oracle, "insertion sequence " + std::to_string(trial));
  }
  {
    const auto store = shop::Store::from_fixture(testing::kSeedCatalog);
    const auto products = store.products();
    const auto lower = [](std::string s) {
      std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
      return s;
    };
    for (int trial = 0; trial < 50; ++trial) {
      const auto& source = products[std::uniform_int_distribution<std::size_t>(0, products.size() - 1)(rng)].name;
      const auto start = std::uniform_int_distribution<std::size_t>(0, source.size() - 1)(rng);
      const auto len = std::uniform_int_distribution<std::size_t>(1, std::min<std::size_t>(5, source.size() - start))(rng);
      auto keyword = source.substr(start, len);
      if (keyword.find_first_not_of(' ') == std::string::npos) keyword = "e";
      for (auto& ch : keyword) {
        if (std::uniform_int_distribution<int>(0, 1)(rng)) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
      }
      const auto first = keyword.find_first_not_of(' ');
      const auto needle = lower(keyword.substr(first, keyword.find_last_not_of(' ') - first + 1));
      std::set<std::string> expected, actual;
      for (const auto& p : products) {
        if (lower(p.name).find(needle) != std::string::npos) expected.insert(p.id);
      }
      for (const auto& p : store.search_by_title(keyword)) actual.insert(p.id);
      c.expect(expected == actual, "keyword '" + keyword + "'");
    }
  }
  c.detail = "100 carts, 50 insertion sequences, 50 keywords";
}

bool is_choice_deck(const wml::Deck& d) {
  std::vector<std::string> labels;
  for (const auto& card : d.cards) {
    wml::walk(card.content, [&](const wml::Node& n) {
      if (const auto* a = n.get_if<wml::Anchor>()) labels.push_back(a->label);
    });
  }
  return labels.size() == 2 && labels[0] == "1. Log in" && labels[1] == "2. Register";
}

void sessions(Check& c) {
  Shop s;
  s.store.register_customer("kz", "pw", "", "", "");
  c.expect(is_choice_deck(s.front.render_page(Route::parse("/cart-add?id=p3&s=deadbeefdeadbeef"), at(0))),
           "unknown token did not get the choice deck");
  const auto stale = login(s, "kz", 0);
  c.expect(is_choice_deck(s.front.render_page(Route::parse("/cart-add?id=p3&s=" + stale), at(31 * 60))),
           "expired token did not get the choice deck");
  const auto live = login(s, "kz", 40 * 60);
  const auto out = s.front.handle_form(Route::parse("/cart-add"), {{"id", "p3"}, {"s", live}}, at(40 * 60 + 5));
  const auto confirmation = s.front.render_page(out.redirect, at(40 * 60 + 6));
  c.expect(out.effect == "cart-add" && !is_choice_deck(confirmation) && confirmation.cards.at(0).id == "cart_add",
           "live token did not get the confirmation deck");
  c.expect(s.store.cart("kz").quantity_of("p3") == 1, "cart not updated");
  c.expect(lint::lint_deck(confirmation, {}, s.front.image_weights()).pass(), "confirmation deck fails lint");
}

void end_to_end(Check& c) {
  testing::TempDir dir;
  const auto path = dir / "store.json";
  std::string order_id;
  std::int64_t expected_total = 0;
  {
    auto store = shop::Store::from_fixture(testing::kSeedCatalog);
    store.bind(path);
    Shop s(std::move(store));
    const auto script = journey::Script::parse(R"(goto /
goto /menu
form /register username=eve password=pw surname=Doe name=Eve address=1+Museum+Sq
goto /login
form /login username=eve password=pw
goto /categories
goto /list?category=books
goto /product?id=p3
form /cart-add id=p3
goto /list?category=posters
goto /product?id=p7
form /cart-add id=p7
expect cart_size=2
goto /cart
form /cart id=p3 qty=3
goto /order-confirm
form /order-confirm payment=courier
expect cart_size=0
expect lint_pass
)");
    const auto result = journey::run_journey(s.front, script);
    for (const auto& e : result.expectations) c.expect(e.passed, "expect " + e.predicate + " got " + e.actual);
    for (const auto& note : result.notes) c.expect(false, "note: " + note);
    c.expect(result.last_order.has_value(), "no order placed");
    if (!result.last_order) return;
    order_id = result.last_order->id;
    expected_total = 3 * s.store.find_product("p3")->price.value + s.store.find_product("p7")->price.value;
    c.expect(result.last_order->total.value == expected_total, "order total " + shop::format_euros(result.last_order->total));
    c.expect(result.last_order->payment == shop::Payment::courier, "payment is not courier");
  }
  const auto reopened = shop::Store::open(path);
  const auto order = reopened.find_order(order_id);
  c.expect(order.has_value(), "order not persisted");
  if (order) c.expect(order->total.value == expected_total && order->lines.size() == 2, "persisted order differs");
  c.expect(reopened.cart("eve").lines.empty(), "cart not empty after reopen");
  c.expect(reopened.list_orders("eve").size() == 1, "order list differs after reopen");
  c.expect(shop::Store::from_json(reopened.to_json()).to_json() == reopened.to_json(), "store JSON does not round-trip");
  c.detail = "order " + order_id + " EUR " + shop::format_euros({expected_total});
}

}  // namespace

int main() {
  report("codec round-trip", codec_round_trip);
  report("size constraints", size_constraints);
  report("timing arithmetic", timing);
  report("cost model", cost);
  report("comparison report", comparison);
  report("commerce oracles", commerce);
  report("session behavior", sessions);
  report("end-to-end journey", end_to_end);
  return failed == 0 ? 0 : 1;
}
