#include "wapshop/gateway.hpp"

#include "wapshop/wbxml.hpp"

#include <algorithm>
#include <charconv>
#include <iomanip>
#include <json.hpp>
#include <set>
#include <sstream>

namespace wapshop::gateway {

using nlohmann::json;
using storefront::OriginRequest;
using storefront::OriginResponse;
using storefront::Route;

namespace {

std::uint64_t parse_u64(std::string_view text, std::string_view what) {
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc{} || ptr != end) {
    throw std::invalid_argument("invalid " + std::string(what) + " '" + std::string(text) + "'");
  }
  return v;
}

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return a / b + (a % b != 0); }

json node_json(const wml::Node& node) {
  return std::visit(
      [](const auto& n) -> json {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, wml::Text>) {
          return {{"type", "text"}, {"text", n.text}};
        } else if constexpr (std::is_same_v<T, wml::Paragraph>) {
          json children = json::array();
          for (const auto& c : n.children) children.push_back(node_json(c));
          return {{"type", "p"}, {"children", children}};
        } else if constexpr (std::is_same_v<T, wml::Anchor>) {
          return {{"type", "a"}, {"href", n.href}, {"label", n.label}};
        } else if constexpr (std::is_same_v<T, wml::Do>) {
          json fields = json::array();
          for (const auto& f : n.postfields) fields.push_back({{"name", f.name}, {"value", f.value}});
          return {{"type", "do"},
                  {"kind", wml::to_string(n.kind)},
                  {"label", n.label},
                  {"target", n.target ? json(*n.target) : json(nullptr)},
                  {"method", wml::to_string(n.method)},
                  {"postfields", fields}};
        } else if constexpr (std::is_same_v<T, wml::Input>) {
          return {{"type", "input"}, {"name", n.name}, {"kind", wml::to_string(n.kind)}};
        } else if constexpr (std::is_same_v<T, wml::Select>) {
          json options = json::array();
          for (const auto& o : n.options) options.push_back({{"label", o.label}, {"value", o.value}});
          return {{"type", "select"}, {"name", n.name}, {"options", options}};
        } else if constexpr (std::is_same_v<T, wml::Table>) {
          return {{"type", "table"}, {"rows", n.rows}};
        } else if constexpr (std::is_same_v<T, wml::Image>) {
          return {{"type", "img"}, {"src", n.src}, {"alt", n.alt}};
        } else {
          return {{"type", "br"}};
        }
      },
      node.value);
}

json row_json(const ComparisonRow& r) {
  return {{"route", r.route},
          {"wml_bytes", r.wml_bytes},
          {"wml_requests", r.wml_requests},
          {"wml_ms", r.wml_ms},
          {"wml_cost_cents", r.wml_cost},
          {"html_bytes", r.html_bytes},
          {"html_requests", r.html_requests},
          {"html_ms", r.html_ms},
          {"html_cost_cents", r.html_cost}};
}

json link_json(const LinkProfile& l) { return {{"name", l.name}, {"bitrate", l.bitrate}, {"rtt_ms", l.rtt_ms}}; }

json tariff_json(const Tariff& t) {
  return {{"kind", t.kind == Tariff::Kind::flat ? "flat" : "airtime_per_minute"}, {"rate", t.rate}};
}

std::string describe(const LinkProfile& l) {
  return l.name + " " + std::to_string(l.bitrate) + " bit/s, rtt " + std::to_string(l.rtt_ms) + " ms";
}

}  // namespace

LinkProfile LinkProfile::wap2g(std::uint64_t rtt_ms) { return {"wap2g", 9600, rtt_ms}; }
LinkProfile LinkProfile::dialup(std::uint64_t rtt_ms) { return {"dialup", 56000, rtt_ms}; }

LinkProfile LinkProfile::custom(std::uint64_t bitrate, std::uint64_t rtt_ms) {
  if (bitrate == 0) throw std::invalid_argument("link bitrate must be positive");
  return {"custom", bitrate, rtt_ms};
}

LinkProfile LinkProfile::parse(std::string_view spec) {
  if (spec == "wap2g") return wap2g();
  if (spec == "dialup") return dialup();
  if (spec.rfind("custom:", 0) == 0) {
    spec.remove_prefix(7);
    const auto colon = spec.find(':');
    const auto bitrate = parse_u64(spec.substr(0, colon), "bitrate");
    const auto rtt = colon == std::string_view::npos ? 0 : parse_u64(spec.substr(colon + 1), "rtt");
    return custom(bitrate, rtt);
  }
  throw std::invalid_argument("unknown link profile '" + std::string(spec) + "' (wap2g, dialup, custom:<bps>[:<rtt>])");
}

Tariff Tariff::parse(std::string_view spec) {
  if (spec == "flat") return flat();
  if (spec.rfind("airtime:", 0) == 0) return airtime(parse_u64(spec.substr(8), "airtime rate"));
  throw std::invalid_argument("unknown tariff '" + std::string(spec) + "' (airtime:<cents>, flat)");
}

std::string Tariff::describe() const {
  if (kind == Kind::flat) return "flat";
  return "airtime " + std::to_string(rate) + " c/min";
}

std::uint64_t simulate_transfer(std::uint64_t payload_bytes, const LinkProfile& link) {
  return ceil_div(payload_bytes * 8 * 1000, link.bitrate) + link.rtt_ms;
}

std::uint64_t airtime_cost(std::uint64_t duration_ms, const Tariff& tariff) {
  if (tariff.kind == Tariff::Kind::flat) return 0;
  return ceil_div(duration_ms * tariff.rate, 60000);
}

TransferMetrics measure(std::uint64_t payload_bytes, const LinkProfile& link, const Tariff& tariff) {
  const auto duration = simulate_transfer(payload_bytes, link);
  return {payload_bytes, duration, airtime_cost(duration, tariff)};
}

DeviceProfile DeviceProfile::phone() { return {"phone", 150, 150, 128 * 1024, 512 * 1024}; }
DeviceProfile DeviceProfile::desktop() { return {"desktop", 800, 600, 0, 0}; }

OriginFetcher in_process_origin(storefront::Storefront& front, std::function<Timestamp()> clock) {
  return [&front, clock = std::move(clock)](const OriginRequest& request) {
    return storefront::serve_origin(front, request, clock());
  };
}

wml::Deck error_deck(std::string_view message) {
  wml::Card card;
  card.id = "error";
  card.title = "Error";
  auto text = storefront::wrap_text(message);
  if (!text.empty()) card.content.push_back(wml::Paragraph{std::move(text)});
  card.content.push_back(wml::Do{wml::DoKind::prev, "Back", std::nullopt, wml::Method::get, {}});
  wml::Deck deck;
  deck.cards.push_back(std::move(card));
  return deck;
}

Gateway::Gateway(OriginFetcher origin, std::size_t max_compiled_bytes)
    : origin_(std::move(origin)), max_compiled_bytes_(max_compiled_bytes) {}

GatewayResponse Gateway::handle_request(const std::string& url) const { return forward({"GET", url, {}}); }

GatewayResponse Gateway::handle_post(const std::string& url, const std::string& body) const {
  return forward({"POST", url, body});
}

GatewayResponse Gateway::forward(const OriginRequest& request) const {
  const auto fail = [](std::string message) {
    auto deck = error_deck(message);
    auto compiled = wbxml::compile_deck(deck);
    return GatewayResponse{std::move(compiled.bytes), std::move(deck), std::move(message)};
  };
  OriginResponse reply;
  try {
    reply = origin_(request);
  } catch (const std::exception& e) {
    return fail(std::string("Origin unreachable: ") + e.what());
  }
  if (reply.status != 200) return fail("Origin error " + std::to_string(reply.status));
  if (reply.content_type.rfind("text/vnd.wap.wml", 0) != 0) return fail("Origin sent " + reply.content_type);
  try {
    auto deck = wml::parse_deck(reply.body);
    auto compiled = wbxml::compile_deck(deck);
    if (compiled.bytes.size() > max_compiled_bytes_) {
      return fail("R1: deck is " + std::to_string(compiled.bytes.size()) + " bytes, limit " +
                  std::to_string(max_compiled_bytes_));
    }
    return GatewayResponse{std::move(compiled.bytes), std::move(deck), std::nullopt};
  } catch (const wml::ParseError& e) {
    return fail(std::string("Invalid WML: ") + e.what());
  } catch (const wbxml::InvalidDeck& e) {
    return fail(std::string("Invalid WML: ") + e.what());
  }
}

std::string deck_json(const wml::Deck& deck, const TransferMetrics& metrics) {
  json cards = json::array();
  for (const auto& card : deck.cards) {
    json nodes = json::array();
    for (const auto& n : card.content) nodes.push_back(node_json(n));
    cards.push_back({{"id", card.id}, {"title", card.title}, {"nodes", nodes}});
  }
  const json doc = {
      {"cards", cards},
      {"metrics",
       {{"bytes", metrics.payload}, {"duration_ms", metrics.duration_ms}, {"cost_cents", metrics.cost_cents}}}};
  return doc.dump();
}

ComparisonRow compare_route(storefront::Storefront& front, const Route& route, const ChannelSetup& setup,
                            Timestamp now) {
  storefront::HtmlPage html;
  try {
    html = front.render_html_page(route, now);
  } catch (const storefront::RouteError& e) {
    throw RouteNotComparable(e.what());
  }

  ComparisonRow row;
  row.route = route.display();

  const Gateway gateway(in_process_origin(front, [now] { return now; }));
  const auto response = gateway.handle_request(route.url());
  row.wml_bytes = response.bytes.size();
  row.wml_requests = 1;
  row.wml_ms = simulate_transfer(response.bytes.size(), setup.wml_link);
  std::set<std::string> images;
  for (const auto& card : response.deck.cards) {
    wml::walk(card.content, [&](const wml::Node& n) {
      if (const auto* img = n.get_if<wml::Image>()) images.insert(img->src);
    });
  }
  for (const auto& src : images) {
    const auto weight = front.image_weight(src).value_or(0);
    row.wml_bytes += weight;
    row.wml_requests += 1;
    row.wml_ms += simulate_transfer(weight, setup.wml_link);
  }
  row.wml_cost = airtime_cost(row.wml_ms, setup.wml_tariff);

  row.html_bytes = html.html.size();
  row.html_requests = 1;
  row.html_ms = simulate_transfer(html.html.size(), setup.html_link);
  for (const auto& asset : html.assets) {
    row.html_bytes += asset.bytes;
    row.html_requests += 1;
    row.html_ms += simulate_transfer(asset.bytes, setup.html_link);
    row.largest_asset = std::max<std::uint64_t>(row.largest_asset, asset.bytes);
  }
  row.html_cost = airtime_cost(row.html_ms, setup.html_tariff);
  return row;
}

ComparisonReport compare_channels(storefront::Storefront& front, const std::vector<Route>& journey,
                                  const ChannelSetup& setup, Timestamp now) {
  ComparisonReport report{setup, {}};
  for (const auto& route : journey) report.rows.push_back(compare_route(front, route, setup, now));
  return report;
}

ComparisonRow ComparisonReport::totals() const {
  ComparisonRow t;
  t.route = "TOTAL";
  for (const auto& r : rows) {
    t.wml_bytes += r.wml_bytes;
    t.wml_requests += r.wml_requests;
    t.wml_ms += r.wml_ms;
    t.html_bytes += r.html_bytes;
    t.html_requests += r.html_requests;
    t.html_ms += r.html_ms;
    t.largest_asset = std::max(t.largest_asset, r.largest_asset);
  }
  t.wml_cost = airtime_cost(t.wml_ms, setup.wml_tariff);
  t.html_cost = airtime_cost(t.html_ms, setup.html_tariff);
  return t;
}

std::string render_text(const ComparisonReport& report) {
  const std::vector<std::string> header{"route", "wml_bytes", "wml_ms", "wml_cents",
                                        "html_bytes", "html_ms", "html_cents"};
  std::vector<std::vector<std::string>> table{header};
  auto add = [&](const ComparisonRow& r) {
    table.push_back({r.route, std::to_string(r.wml_bytes), std::to_string(r.wml_ms), std::to_string(r.wml_cost),
                     std::to_string(r.html_bytes), std::to_string(r.html_ms), std::to_string(r.html_cost)});
  };
  for (const auto& r : report.rows) add(r);
  add(report.totals());

  std::vector<std::size_t> widths(header.size(), 0);
  for (const auto& row : table) {
    for (std::size_t i = 0; i < row.size(); ++i) widths[i] = std::max(widths[i], row[i].size());
  }

  std::ostringstream out;
  out << "wml:  " << describe(report.setup.wml_link) << ", " << report.setup.wml_tariff.describe() << "\n";
  out << "html: " << describe(report.setup.html_link) << ", " << report.setup.html_tariff.describe() << "\n";
  for (const auto& row : table) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i == 0) {
        out << std::left << std::setw(static_cast<int>(widths[i])) << row[i];
      } else {
        out << "  " << std::right << std::setw(static_cast<int>(widths[i])) << row[i];
      }
    }
    out << "\n";
  }
  return out.str();
}

std::string render_json(const ComparisonReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) rows.push_back(row_json(r));
  const json doc = {{"setup",
                     {{"wml_link", link_json(report.setup.wml_link)},
                      {"wml_tariff", tariff_json(report.setup.wml_tariff)},
                      {"html_link", link_json(report.setup.html_link)},
                      {"html_tariff", tariff_json(report.setup.html_tariff)}}},
                    {"rows", rows},
                    {"totals", row_json(report.totals())}};
  return doc.dump(2) + "\n";
}

}  // namespace wapshop::gateway
