#include "test_support.hpp"
#include "wapshop/journey.hpp"

#include <doctest.h>

using namespace wapshop;
using namespace wapshop::journey;

namespace {

struct Shop {
  shop::Store store = shop::Store::from_fixture(testing::kSeedCatalog);
  session::SessionRegistry sessions;
  storefront::Storefront front{store, sessions};
};

constexpr const char* kPurchase = R"(# buy two vases and a statue
goto /menu
form /register username=kz password=pw surname=Kappa name=Zeta address=Odos+1
goto /list?category=books
goto /product?id=p3
form /cart-add id=p3 qty=2
form /cart-add id=p7
expect cart_size=2
goto /cart
goto /order-confirm
form /order-confirm payment=courier
expect order_total=6500
expect lint_pass
)";

}  // namespace

TEST_CASE("script parsing") {
  const auto script = Script::parse(kPurchase);
  REQUIRE(script.steps.size() == 12);
  CHECK(script.steps[0].kind == Step::Kind::go);
  CHECK(script.steps[0].line == 2);
  CHECK(script.steps[1].kind == Step::Kind::form);
  CHECK(script.steps[1].fields.at("address") == "Odos 1");
  CHECK(script.steps.back().predicate == "lint_pass");

  CHECK_THROWS_AS(Script::parse(""), ScriptError);
  CHECK_THROWS_AS(Script::parse("# only a comment\n\n"), ScriptError);
  try {
    Script::parse("goto /menu\njump /cart\n");
    FAIL("expected ScriptError");
  } catch (const ScriptError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(Script::parse("goto /nowhere"), ScriptError);
  CHECK_THROWS_AS(Script::parse("goto"), ScriptError);
  CHECK_THROWS_AS(Script::parse("form /login username"), ScriptError);
  CHECK_THROWS_AS(Script::parse("expect cart_size=x"), ScriptError);
  CHECK_THROWS_AS(Script::parse("expect happiness"), ScriptError);
}

TEST_CASE("a scripted purchase places the expected order") {
  Shop s;
  const auto result = run_journey(s.front, Script::parse(kPurchase));
  CHECK(result.passed());
  REQUIRE(result.last_order);
  CHECK(result.last_order->total.value == 2 * 2800 + 900);
  CHECK(result.last_order->payment == shop::Payment::courier);
  CHECK(result.notes.empty());
  REQUIRE(result.expectations.size() == 3);
  for (const auto& e : result.expectations) CHECK(e.passed);

  std::vector<std::string> routes;
  for (const auto& r : result.report.rows) routes.push_back(r.route);
  CHECK(routes == std::vector<std::string>{"/menu", "/list?category=books", "/product?id=p3", "/cart", "/order-confirm"});
  const auto& product = result.report.rows[2];
  CHECK(product.wml_ms > product.html_ms);
  CHECK(product.wml_cost > product.html_cost);
  CHECK(product.largest_asset <= 12000);

  const auto summary = render_summary(result);
  CHECK(summary.find("total EUR 65.00") != std::string::npos);
  CHECK(summary.find("FAILED") == std::string::npos);
}

TEST_CASE("journeys are replayable") {
  Shop a, b;
  const auto script = Script::parse(kPurchase);
  const auto first = run_journey(a.front, script);
  const auto second = run_journey(b.front, script);
  CHECK(render_summary(first) == render_summary(second));
}

TEST_CASE("failed expectations and form errors are reported") {
  Shop s;
  const auto result = run_journey(s.front, Script::parse("form /login username=ghost password=x\nexpect cart_size=1\n"));
  CHECK_FALSE(result.passed());
  CHECK(result.notes.size() == 1);
  REQUIRE(result.expectations.size() == 1);
  CHECK_FALSE(result.expectations[0].passed);
  CHECK(render_summary(result).find("FAILED") != std::string::npos);
  CHECK(render_summary(result).find("order none") != std::string::npos);
}

TEST_CASE("the store clock is restored afterwards") {
  Shop s;
  const auto result = run_journey(s.front, Script::parse(kPurchase));
  REQUIRE(result.last_order);
  CHECK(result.last_order->placed_at < testing::at(3600));
  s.store.cart_add("kz", "p1", 1);
  const auto later = s.store.place_order("kz", "courier");
  CHECK(std::chrono::abs(later.placed_at - shop::system_now()) < std::chrono::minutes(1));
}
