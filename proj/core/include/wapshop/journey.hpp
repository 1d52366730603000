// Headless, replayable shopping sessions driven by a line-oriented script:
//
//   goto /list?category=books
//   form /login username=alice password=secret
//   expect cart_size=2
//
// Blank lines and lines starting with '#' are ignored. Form values are
// percent-decoded, so "address=1+Main+St" carries spaces.
#pragma once

#include "wapshop/gateway.hpp"
#include "wapshop/lint.hpp"
#include "wapshop/shop.hpp"
#include "wapshop/storefront.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wapshop::journey {

using shop::Timestamp;

class ScriptError : public std::invalid_argument {
 public:
  ScriptError(std::size_t line, const std::string& reason);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct Step {
  enum class Kind { go, form, expect };
  Kind kind = Kind::go;
  std::size_t line = 0;
  std::string route;
  storefront::Params fields;
  std::string predicate;  // "order_total=<cents>", "cart_size=<n>" or "lint_pass"
};

struct Script {
  std::vector<Step> steps;

  /// Throws ScriptError on unknown actions, malformed lines or an empty script.
  static Script parse(std::string_view text);
};

struct Expectation {
  std::size_t line = 0;
  std::string predicate;
  bool passed = false;
  std::string actual;
};

struct JourneyOptions {
  gateway::ChannelSetup setup;
  lint::LintPolicy policy;
  /// Logical clock start; every step advances it by one second.
  Timestamp epoch = Timestamp{std::chrono::milliseconds{1199145600000}};  // 2008-01-01T00:00:00Z
};

struct JourneyResult {
  gateway::ComparisonReport report;
  std::vector<Expectation> expectations;
  std::vector<std::string> notes;  // form errors and gateway error decks
  std::optional<shop::Order> last_order;
  wml::Deck last_deck;

  bool passed() const;
};

/// The store's clock follows the journey's logical clock while running and is
/// reset to the system clock afterwards.
JourneyResult run_journey(storefront::Storefront& front, const Script& script, const JourneyOptions& options = {});

/// Comparison report, notes, final order summary and expectation outcomes.
std::string render_summary(const JourneyResult& result);

}  // namespace wapshop::journey
