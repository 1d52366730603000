#include "wapshop/journey.hpp"

#include <charconv>
#include <memory>
#include <sstream>

namespace wapshop::journey {

using storefront::Page;
using storefront::Route;

namespace {

std::vector<std::string_view> split_words(std::string_view line) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const auto start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) words.push_back(line.substr(start, i - start));
  }
  return words;
}

std::optional<std::int64_t> parse_number(std::string_view text) {
  std::int64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc{} || ptr != end || v < 0) return std::nullopt;
  return v;
}

bool valid_predicate(std::string_view p) {
  if (p == "lint_pass") return true;
  for (const std::string_view key : {"order_total=", "cart_size="}) {
    if (p.rfind(key, 0) == 0) return parse_number(p.substr(key.size())).has_value();
  }
  return false;
}

bool comparable(Page page) {
  return page == Page::menu || page == Page::list || page == Page::product || page == Page::cart ||
         page == Page::order_confirm;
}

}  // namespace

ScriptError::ScriptError(std::size_t line, const std::string& reason)
    : std::invalid_argument(line == 0 ? reason : "line " + std::to_string(line) + ": " + reason), line_(line) {}

Script Script::parse(std::string_view text) {
  Script script;
  std::size_t number = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    auto line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++number;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto words = split_words(line);
    if (words.empty() || words.front().front() == '#') continue;

    Step step;
    step.line = number;
    const auto action = words.front();
    if (action == "goto") {
      if (words.size() != 2) throw ScriptError(number, "goto takes exactly one route");
      step.kind = Step::Kind::go;
      step.route = std::string(words[1]);
    } else if (action == "form") {
      if (words.size() < 2) throw ScriptError(number, "form needs a route");
      step.kind = Step::Kind::form;
      step.route = std::string(words[1]);
      for (std::size_t i = 2; i < words.size(); ++i) {
        const auto eq = words[i].find('=');
        if (eq == std::string_view::npos || eq == 0) {
          throw ScriptError(number, "expected name=value, got '" + std::string(words[i]) + "'");
        }
        step.fields.insert_or_assign(storefront::percent_decode(words[i].substr(0, eq)),
                                     storefront::percent_decode(words[i].substr(eq + 1)));
      }
    } else if (action == "expect") {
      if (words.size() != 2 || !valid_predicate(words[1])) {
        throw ScriptError(number, "expect takes one of order_total=<cents>, cart_size=<n>, lint_pass");
      }
      step.kind = Step::Kind::expect;
      step.predicate = std::string(words[1]);
    } else {
      throw ScriptError(number, "unknown action '" + std::string(action) + "'");
    }
    if (step.kind != Step::Kind::expect) {
      try {
        (void)Route::parse(step.route);
      } catch (const storefront::RouteError& e) {
        throw ScriptError(number, e.what());
      }
    }
    script.steps.push_back(std::move(step));
  }
  if (script.steps.empty()) throw ScriptError(0, "journey script has no actions");
  return script;
}

bool JourneyResult::passed() const {
  for (const auto& e : expectations) {
    if (!e.passed) return false;
  }
  return true;
}

JourneyResult run_journey(storefront::Storefront& front, const Script& script, const JourneyOptions& options) {
  auto clock = std::make_shared<Timestamp>(options.epoch);
  front.store().set_clock([clock] { return *clock; });
  struct RestoreClock {
    shop::Store& store;
    ~RestoreClock() { store.set_clock(shop::system_now); }
  } restore{front.store()};

  JourneyResult result;
  result.report.setup = options.setup;
  const gateway::Gateway gate(gateway::in_process_origin(front, [clock] { return *clock; }));
  std::string token;

  const auto with_session = [&](Route route) {
    if (!token.empty() && !route.param(storefront::kSessionParam)) {
      route = route.with(std::string(storefront::kSessionParam), token);
    }
    return route;
  };
  const auto customer = [&]() -> std::optional<std::string> {
    if (token.empty()) return std::nullopt;
    const auto r = front.sessions().resolve(token, *clock);
    if (const auto* p = std::get_if<session::Principal>(&r)) {
      if (const auto* c = std::get_if<session::CustomerPrincipal>(p)) return c->username;
    }
    return std::nullopt;
  };

  for (const auto& step : script.steps) {
    *clock += std::chrono::seconds(1);
    switch (step.kind) {
      case Step::Kind::go: {
        const auto route = with_session(Route::parse(step.route));
        auto response = gate.handle_request(route.url());
        if (response.error) result.notes.push_back("line " + std::to_string(step.line) + ": " + *response.error);
        result.last_deck = std::move(response.deck);
        if (comparable(route.page)) {
          result.report.rows.push_back(gateway::compare_route(front, route, options.setup, *clock));
        }
        break;
      }
      case Step::Kind::form: {
        const auto route = with_session(Route::parse(step.route));
        auto fields = step.fields;
        if (!token.empty()) fields.try_emplace(std::string(storefront::kSessionParam), token);
        const auto outcome = front.handle_form(route, fields, *clock);
        if (outcome.error) {
          result.notes.push_back("line " + std::to_string(step.line) + ": " + *outcome.error);
          result.last_deck = front.submit(route, fields, *clock);
          break;
        }
        if (const auto* s = outcome.redirect.param(storefront::kSessionParam)) token = *s;
        if (outcome.effect == "order") {
          if (const auto* id = outcome.redirect.param("id")) result.last_order = front.store().find_order(*id);
        }
        result.last_deck = front.render_page(outcome.redirect, *clock);
        break;
      }
      case Step::Kind::expect: {
        Expectation e{step.line, step.predicate, false, {}};
        if (step.predicate == "lint_pass") {
          const auto crawl = storefront::lint_storefront(front, options.policy, *clock);
          e.passed = crawl.report.pass();
          e.actual = std::to_string(crawl.report.violations.size()) + " violations";
        } else if (step.predicate.rfind("order_total=", 0) == 0) {
          const auto want = *parse_number(std::string_view(step.predicate).substr(12));
          if (result.last_order) {
            e.passed = result.last_order->total.value == want;
            e.actual = std::to_string(result.last_order->total.value);
          } else {
            e.actual = "no order";
          }
        } else {
          const auto want = *parse_number(std::string_view(step.predicate).substr(10));
          if (const auto who = customer()) {
            const auto lines = static_cast<std::int64_t>(front.store().cart(*who).lines.size());
            e.passed = lines == want;
            e.actual = std::to_string(lines);
          } else {
            e.actual = "no customer session";
          }
        }
        result.expectations.push_back(std::move(e));
        break;
      }
    }
  }
  return result;
}

std::string render_summary(const JourneyResult& result) {
  std::ostringstream out;
  out << gateway::render_text(result.report);
  for (const auto& note : result.notes) out << "note " << note << "\n";
  if (const auto& order = result.last_order) {
    out << "order " << order->id << " for " << order->customer << ", "
        << (order->payment == shop::Payment::courier ? "courier" : "snail mail") << "\n";
    for (const auto& line : order->lines) {
      out << "  " << line.product_id << "  " << line.name << "  x" << line.quantity << "  EUR "
          << shop::format_euros(line.unit_price * line.quantity) << "\n";
    }
    out << "  total EUR " << shop::format_euros(order->total) << "\n";
  } else {
    out << "order none\n";
  }
  for (const auto& e : result.expectations) {
    out << "expect " << e.predicate << ": " << (e.passed ? "ok" : "FAILED") << " (" << e.actual << ")\n";
  }
  return out.str();
}

}  // namespace wapshop::journey
