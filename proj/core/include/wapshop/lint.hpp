// Usability rules for constrained-device decks and a site crawler that
// applies them across every reachable page.
//
//   R1  compiled deck size            R5  navigation depth / alternate routes
//   R2  page weight incl. images      R6  text line length (horizontal scroll)
//   R3  numbered menus                R7  per-image weight budget
//   R4  a Back (prev) action per card
#pragma once

#include "wapshop/wml.hpp"

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wapshop::lint {

struct LintPolicy {
  std::size_t max_compiled_bytes = 1400;
  std::size_t max_page_weight_bytes = 9200;
  std::size_t max_menu_depth = 3;
  std::size_t max_line_chars = 20;
  bool require_back = true;
  bool require_numbered_menu = true;
  std::size_t max_image_bytes = 1000;

  /// Throws std::invalid_argument if any count is zero.
  void check() const;
};

/// Applies a JSON object of overrides. Unknown keys and non-positive counts
/// throw std::invalid_argument.
LintPolicy policy_from_json(std::string_view json_text, LintPolicy base = {});

enum class Rule { R1, R2, R3, R4, R5, R6, R7, FetchFailed };

std::string_view to_string(Rule rule);

struct LintViolation {
  Rule rule;
  std::string where;
  std::string message;

  auto operator<=>(const LintViolation&) const = default;
};

/// Vertical-scroll indicator, reported but never a violation.
struct CardMetric {
  std::string where;
  std::size_t node_count = 0;
  bool operator==(const CardMetric&) const = default;
};

struct LintReport {
  std::vector<LintViolation> violations;
  std::size_t checked_decks = 0;
  std::vector<CardMetric> card_metrics;

  bool pass() const { return violations.empty(); }
  /// Sorts violations and metrics so that output is order independent.
  void normalize();
  void merge(LintReport other);
};

std::string render_text(const LintReport& report);
std::string render_json(const LintReport& report);

using ImageWeights = std::map<std::string, std::size_t>;

/// `where_prefix` is prepended to card ids in violation locations.
LintReport lint_deck(const wml::Deck& deck, const LintPolicy& policy, const ImageWeights& image_weights,
                     std::string_view where_prefix = {});

struct Edge {
  std::string from;
  std::string to;
  std::string label;
  auto operator<=>(const Edge&) const = default;
};

struct SiteGraph {
  std::string root;
  std::vector<std::string> nodes;  // discovery (breadth-first) order
  std::vector<Edge> edges;

  bool has_node(std::string_view route) const;
  std::vector<std::string> successors(std::string_view route) const;
};

/// Thrown by fetchers; the crawler records it as a FetchFailed violation.
class FetchFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Fetcher = std::function<wml::Deck(const std::string& route)>;
/// Resolves an image src (as written in the deck) to its byte weight.
using ImageWeigher = std::function<std::optional<std::size_t>(const std::string& src)>;

struct CrawlResult {
  SiteGraph graph;
  LintReport report;
};

/// Predicate identifying product-detail routes for the alternate-route rule.
using DetailPredicate = std::function<bool(std::string_view route)>;

/// Default: the path component is "/product".
bool is_product_route(std::string_view route);

/// Canonical form of a same-site link: path plus query parameters sorted by
/// name. Returns nullopt for links that are not crawlable (fragments,
/// variables, other hosts).
std::optional<std::string> normalize_link(std::string_view href);

CrawlResult crawl_site(const Fetcher& fetcher, const ImageWeigher& images, const std::string& root,
                       const LintPolicy& policy, const DetailPredicate& is_detail = is_product_route,
                       std::size_t max_nodes = 10000);

std::vector<LintViolation> check_navigation(const SiteGraph& graph, const LintPolicy& policy,
                                            const DetailPredicate& is_detail = is_product_route);

/// Shortest navigation distance from the graph root (breadth first);
/// unreachable nodes are absent.
std::map<std::string, std::size_t> depths(const SiteGraph& graph);

}  // namespace wapshop::lint
