#include "wapshop/lint.hpp"

#include "wapshop/wbxml.hpp"

#include "utf8.hpp"

#include <algorithm>
#include <deque>
#include <json.hpp>
#include <set>
#include <sstream>

namespace wapshop::lint {

using nlohmann::json;

void LintPolicy::check() const {
  if (max_compiled_bytes == 0 || max_page_weight_bytes == 0 || max_menu_depth == 0 || max_line_chars == 0 ||
      max_image_bytes == 0) {
    throw std::invalid_argument("lint policy counts must be > 0");
  }
}

LintPolicy policy_from_json(std::string_view json_text, LintPolicy base) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("policy is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw std::invalid_argument("policy must be a JSON object");
  auto count = [](const json& v, const std::string& key) -> std::size_t {
    if (!v.is_number_integer() || v.get<long long>() <= 0) {
      throw std::invalid_argument("policy key '" + key + "' must be a positive integer");
    }
    return v.get<std::size_t>();
  };
  auto flag = [](const json& v, const std::string& key) -> bool {
    if (!v.is_boolean()) throw std::invalid_argument("policy key '" + key + "' must be a boolean");
    return v.get<bool>();
  };
  for (const auto& [key, value] : doc.items()) {
    if (key == "max_compiled_bytes") base.max_compiled_bytes = count(value, key);
    else if (key == "max_page_weight_bytes") base.max_page_weight_bytes = count(value, key);
    else if (key == "max_menu_depth") base.max_menu_depth = count(value, key);
    else if (key == "max_line_chars") base.max_line_chars = count(value, key);
    else if (key == "require_back") base.require_back = flag(value, key);
    else if (key == "require_numbered_menu") base.require_numbered_menu = flag(value, key);
    else if (key == "max_image_bytes") base.max_image_bytes = count(value, key);
    else throw std::invalid_argument("unknown policy key '" + key + "'");
  }
  base.check();
  return base;
}

std::string_view to_string(Rule rule) {
  switch (rule) {
    case Rule::R1: return "R1";
    case Rule::R2: return "R2";
    case Rule::R3: return "R3";
    case Rule::R4: return "R4";
    case Rule::R5: return "R5";
    case Rule::R6: return "R6";
    case Rule::R7: return "R7";
    case Rule::FetchFailed: return "FetchFailed";
  }
  return "?";
}

void LintReport::normalize() {
  std::sort(violations.begin(), violations.end());
  violations.erase(std::unique(violations.begin(), violations.end()), violations.end());
  std::sort(card_metrics.begin(), card_metrics.end(),
            [](const CardMetric& a, const CardMetric& b) { return a.where < b.where; });
}

void LintReport::merge(LintReport other) {
  violations.insert(violations.end(), std::make_move_iterator(other.violations.begin()),
                    std::make_move_iterator(other.violations.end()));
  card_metrics.insert(card_metrics.end(), std::make_move_iterator(other.card_metrics.begin()),
                      std::make_move_iterator(other.card_metrics.end()));
  checked_decks += other.checked_decks;
}

std::string render_text(const LintReport& report) {
  std::ostringstream out;
  for (const auto& v : report.violations) {
    out << to_string(v.rule) << "  " << v.where << "  " << v.message << "\n";
  }
  std::size_t widest = 0;
  std::string widest_at;
  for (const auto& m : report.card_metrics) {
    if (m.node_count > widest) {
      widest = m.node_count;
      widest_at = m.where;
    }
  }
  out << "checked " << report.checked_decks << " deck(s), " << report.card_metrics.size() << " card(s)";
  if (!widest_at.empty()) out << ", longest card " << widest_at << " (" << widest << " nodes)";
  out << "\n" << report.violations.size() << " violations\n";
  return out.str();
}

std::string render_json(const LintReport& report) {
  json doc;
  doc["violations"] = json::array();
  for (const auto& v : report.violations) {
    doc["violations"].push_back({{"rule", to_string(v.rule)}, {"where", v.where}, {"message", v.message}});
  }
  doc["checked_decks"] = report.checked_decks;
  return doc.dump(2) + "\n";
}

namespace {

std::string card_where(std::string_view prefix, const std::string& card_id) {
  if (prefix.empty()) return card_id;
  return std::string(prefix) + "#" + card_id;
}

std::string deck_where(std::string_view prefix) { return prefix.empty() ? std::string("deck") : std::string(prefix); }

bool numbered(const std::string& label, std::size_t index) {
  const auto want = std::to_string(index) + ".";
  return label.compare(0, want.size(), want) == 0;
}

void check_runs(const std::vector<wml::Node>& nodes, std::size_t limit, const std::string& where,
                std::vector<LintViolation>& out) {
  std::string run;
  auto flush = [&] {
    const auto n = detail::code_points(run);
    if (n > limit) {
      out.push_back({Rule::R6, where,
                     "text line of " + std::to_string(n) + " chars exceeds " + std::to_string(limit) + ": \"" +
                         run + "\""});
    }
    run.clear();
  };
  for (const auto& node : nodes) {
    if (const auto* t = node.get_if<wml::Text>()) {
      run += t->text;
      continue;
    }
    flush();
    if (const auto* p = node.get_if<wml::Paragraph>()) {
      check_runs(p->children, limit, where, out);
    } else if (const auto* table = node.get_if<wml::Table>()) {
      for (const auto& row : table->rows) {
        for (const auto& cell : row) {
          run = cell;
          flush();
        }
      }
    }
  }
  flush();
}

std::vector<std::string> image_sources(const wml::Deck& deck) {
  std::vector<std::string> srcs;
  for (const auto& card : deck.cards) {
    wml::walk(card.content, [&](const wml::Node& node) {
      if (const auto* img = node.get_if<wml::Image>()) {
        if (std::find(srcs.begin(), srcs.end(), img->src) == srcs.end()) srcs.push_back(img->src);
      }
    });
  }
  return srcs;
}

struct Link {
  std::string href;
  std::string label;
};

std::vector<Link> outgoing_links(const wml::Deck& deck) {
  std::vector<Link> links;
  for (const auto& card : deck.cards) {
    wml::walk(card.content, [&](const wml::Node& node) {
      if (const auto* a = node.get_if<wml::Anchor>()) {
        links.push_back({a->href, a->label});
      } else if (const auto* d = node.get_if<wml::Do>()) {
        if (d->target && d->method == wml::Method::get) links.push_back({*d->target, d->label});
      }
    });
  }
  return links;
}

std::string_view route_path(std::string_view route) { return route.substr(0, route.find('?')); }

}  // namespace

LintReport lint_deck(const wml::Deck& deck, const LintPolicy& policy, const ImageWeights& image_weights,
                     std::string_view where_prefix) {
  LintReport report;
  report.checked_decks = 1;
  auto& out = report.violations;
  const auto deck_at = deck_where(where_prefix);

  const auto compiled = wbxml::encode_unchecked(deck).size();
  if (compiled > policy.max_compiled_bytes) {
    out.push_back({Rule::R1, deck_at,
                   "compiled size " + std::to_string(compiled) + " B exceeds " +
                       std::to_string(policy.max_compiled_bytes) + " B"});
  }

  std::size_t weight = compiled;
  for (const auto& src : image_sources(deck)) {
    const auto it = image_weights.find(src);
    if (it == image_weights.end()) {
      out.push_back({Rule::R7, deck_at, "no weight known for image " + src});
      continue;
    }
    weight += it->second;
    if (it->second > policy.max_image_bytes) {
      out.push_back({Rule::R7, deck_at,
                     "image " + src + " weighs " + std::to_string(it->second) + " B, limit " +
                         std::to_string(policy.max_image_bytes) + " B"});
    }
  }
  if (weight > policy.max_page_weight_bytes) {
    out.push_back({Rule::R2, deck_at,
                   "page weight " + std::to_string(weight) + " B exceeds " +
                       std::to_string(policy.max_page_weight_bytes) + " B"});
  }

  for (const auto& card : deck.cards) {
    const auto where = card_where(where_prefix, card.id);
    std::vector<const wml::Anchor*> anchors;
    bool has_back = false;
    std::size_t node_count = 0;
    wml::walk(card.content, [&](const wml::Node& node) {
      ++node_count;
      if (const auto* a = node.get_if<wml::Anchor>()) anchors.push_back(a);
      if (const auto* d = node.get_if<wml::Do>(); d && d->kind == wml::DoKind::prev) has_back = true;
      if (const auto* sel = node.get_if<wml::Select>(); sel && policy.require_numbered_menu) {
        for (std::size_t i = 0; i < sel->options.size(); ++i) {
          if (!numbered(sel->options[i].label, i + 1)) {
            out.push_back({Rule::R3, where,
                           "option \"" + sel->options[i].label + "\" of select '" + sel->name + "' should start \"" +
                               std::to_string(i + 1) + ".\""});
          }
        }
      }
    });
    report.card_metrics.push_back({where, node_count});

    if (policy.require_numbered_menu && anchors.size() >= 3) {
      for (std::size_t i = 0; i < anchors.size(); ++i) {
        if (!numbered(anchors[i]->label, i + 1)) {
          out.push_back({Rule::R3, where,
                         "menu item \"" + anchors[i]->label + "\" should start \"" + std::to_string(i + 1) + ".\""});
        }
      }
    }
    if (policy.require_back && !has_back) out.push_back({Rule::R4, where, "card has no Back (prev) action"});
    check_runs(card.content, policy.max_line_chars, where, out);
  }
  report.normalize();
  return report;
}

bool SiteGraph::has_node(std::string_view route) const {
  return std::find(nodes.begin(), nodes.end(), route) != nodes.end();
}

std::vector<std::string> SiteGraph::successors(std::string_view route) const {
  std::vector<std::string> out;
  for (const auto& e : edges) {
    if (e.from == route && std::find(out.begin(), out.end(), e.to) == out.end()) out.push_back(e.to);
  }
  return out;
}

bool is_product_route(std::string_view route) { return route_path(route) == "/product"; }

std::optional<std::string> normalize_link(std::string_view href) {
  if (href.empty() || href.front() != '/') return std::nullopt;
  if (href.find("$(") != std::string_view::npos) return std::nullopt;
  href = href.substr(0, href.find('#'));
  const auto q = href.find('?');
  std::string out(href.substr(0, q));
  if (q == std::string_view::npos) return out;
  std::vector<std::string> params;
  auto query = href.substr(q + 1);
  while (!query.empty()) {
    const auto amp = query.find('&');
    const auto part = query.substr(0, amp);
    if (!part.empty()) params.emplace_back(part);
    if (amp == std::string_view::npos) break;
    query.remove_prefix(amp + 1);
  }
  std::stable_sort(params.begin(), params.end(), [](const std::string& a, const std::string& b) {
    return a.substr(0, a.find('=')) < b.substr(0, b.find('='));
  });
  for (std::size_t i = 0; i < params.size(); ++i) {
    out += (i == 0 ? "?" : "&");
    out += params[i];
  }
  return out;
}

std::map<std::string, std::size_t> depths(const SiteGraph& graph) {
  std::map<std::string, std::vector<std::string>> adjacency;
  for (const auto& e : graph.edges) adjacency[e.from].push_back(e.to);
  std::map<std::string, std::size_t> depth;
  std::deque<std::string> queue{graph.root};
  depth[graph.root] = 0;
  while (!queue.empty()) {
    const auto current = queue.front();
    queue.pop_front();
    for (const auto& next : adjacency[current]) {
      if (depth.emplace(next, depth[current] + 1).second) queue.push_back(next);
    }
  }
  return depth;
}

std::vector<LintViolation> check_navigation(const SiteGraph& graph, const LintPolicy& policy,
                                            const DetailPredicate& is_detail) {
  std::vector<LintViolation> out;
  const auto depth = depths(graph);
  for (const auto& node : graph.nodes) {
    const auto it = depth.find(node);
    if (it == depth.end()) {
      out.push_back({Rule::R5, node, "unreachable from " + graph.root});
    } else if (it->second > policy.max_menu_depth) {
      out.push_back({Rule::R5, node,
                     "depth " + std::to_string(it->second) + " from " + graph.root + " exceeds " +
                         std::to_string(policy.max_menu_depth)});
    }
    if (is_detail && is_detail(node)) {
      std::set<std::string> incoming;
      for (const auto& e : graph.edges) {
        if (e.to == node && e.from != node) incoming.insert(e.from);
      }
      if (incoming.size() < 2) {
        out.push_back({Rule::R5, node,
                       "only " + std::to_string(incoming.size()) + " distinct incoming route(s), need 2"});
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

CrawlResult crawl_site(const Fetcher& fetcher, const ImageWeigher& images, const std::string& root,
                       const LintPolicy& policy, const DetailPredicate& is_detail, std::size_t max_nodes) {
  CrawlResult result;
  auto& graph = result.graph;
  const auto start = normalize_link(root).value_or(root);
  graph.root = start;
  graph.nodes.push_back(start);
  std::set<std::string> seen{start};
  std::set<Edge> edge_set;
  std::deque<std::string> queue{start};

  while (!queue.empty()) {
    const auto route = queue.front();
    queue.pop_front();
    wml::Deck deck;
    try {
      deck = fetcher(route);
    } catch (const std::exception& e) {
      result.report.violations.push_back({Rule::FetchFailed, route, e.what()});
      continue;
    }
    ImageWeights weights;
    for (const auto& src : image_sources(deck)) {
      if (auto w = images ? images(src) : std::nullopt) weights[src] = *w;
    }
    result.report.merge(lint_deck(deck, policy, weights, route));

    for (const auto& link : outgoing_links(deck)) {
      const auto target = normalize_link(link.href);
      if (!target) continue;
      if (!seen.count(*target)) {
        if (seen.size() >= max_nodes) continue;
        seen.insert(*target);
        graph.nodes.push_back(*target);
        queue.push_back(*target);
      }
      Edge edge{route, *target, link.label};
      if (edge_set.insert(edge).second) graph.edges.push_back(std::move(edge));
    }
  }

  auto nav = check_navigation(graph, policy, is_detail);
  result.report.violations.insert(result.report.violations.end(), nav.begin(), nav.end());
  result.report.normalize();
  return result;
}

}  // namespace wapshop::lint
