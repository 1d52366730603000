// The WAP gateway (fetch, validate, compile, forward) and the link/tariff
// models used to compare the wireless and wired channels.
#pragma once

#include "wapshop/route.hpp"
#include "wapshop/storefront.hpp"
#include "wapshop/wml.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wapshop::gateway {

using shop::Timestamp;

struct LinkProfile {
  std::string name;
  std::uint64_t bitrate = 9600;  // bits per second
  std::uint64_t rtt_ms = 0;      // added once per request

  /// 9.6 kbit/s circuit-switched data.
  static LinkProfile wap2g(std::uint64_t rtt_ms = 1500);
  /// 56 kbit/s modem.
  static LinkProfile dialup(std::uint64_t rtt_ms = 150);
  static LinkProfile custom(std::uint64_t bitrate, std::uint64_t rtt_ms = 0);

  /// "wap2g", "dialup", "custom:<bps>" or "custom:<bps>:<rtt>". Throws
  /// std::invalid_argument.
  static LinkProfile parse(std::string_view spec);

  bool operator==(const LinkProfile&) const = default;
};

struct Tariff {
  enum class Kind { airtime_per_minute, flat };
  Kind kind = Kind::flat;
  std::uint64_t rate = 0;  // cents per minute; 0 for flat

  static Tariff airtime(std::uint64_t cents_per_minute) { return {Kind::airtime_per_minute, cents_per_minute}; }
  static Tariff flat() { return {Kind::flat, 0}; }
  /// "airtime:<cents>" or "flat".
  static Tariff parse(std::string_view spec);
  std::string describe() const;

  bool operator==(const Tariff&) const = default;
};

/// ceil(payload * 8 * 1000 / bitrate) + rtt.
std::uint64_t simulate_transfer(std::uint64_t payload_bytes, const LinkProfile& link);
/// ceil(duration * rate / 60000) for airtime, 0 for flat.
std::uint64_t airtime_cost(std::uint64_t duration_ms, const Tariff& tariff);

struct TransferMetrics {
  std::uint64_t payload = 0;
  std::uint64_t duration_ms = 0;
  std::uint64_t cost_cents = 0;
  bool operator==(const TransferMetrics&) const = default;
};

TransferMetrics measure(std::uint64_t payload_bytes, const LinkProfile& link, const Tariff& tariff);

struct DeviceProfile {
  std::string name;
  unsigned width = 0;
  unsigned height = 0;
  std::size_t min_memory_bytes = 0;
  std::size_t max_memory_bytes = 0;

  static DeviceProfile phone();
  static DeviceProfile desktop();
};

using OriginFetcher = std::function<storefront::OriginResponse(const storefront::OriginRequest&)>;

/// Serves a Storefront directly, without a network hop.
OriginFetcher in_process_origin(storefront::Storefront& front, std::function<Timestamp()> clock);

struct GatewayResponse {
  std::vector<std::uint8_t> bytes;  // what goes over the air
  wml::Deck deck;                   // the deck those bytes decode to
  std::optional<std::string> error; // set when an error deck was substituted
};

class Gateway {
 public:
  explicit Gateway(OriginFetcher origin, std::size_t max_compiled_bytes = 1400);

  GatewayResponse handle_request(const std::string& url) const;
  /// Forwards a form post (urlencoded body) and compiles the reply.
  GatewayResponse handle_post(const std::string& url, const std::string& body) const;

  std::size_t max_compiled_bytes() const { return max_compiled_bytes_; }

 private:
  GatewayResponse forward(const storefront::OriginRequest& request) const;

  OriginFetcher origin_;
  std::size_t max_compiled_bytes_;
};

/// Small compiled deck with a Back action, used in place of failures.
wml::Deck error_deck(std::string_view message);

/// {cards:[{id,title,nodes}], metrics:{bytes,duration_ms,cost_cents}}
std::string deck_json(const wml::Deck& deck, const TransferMetrics& metrics);

class RouteNotComparable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ChannelSetup {
  LinkProfile wml_link = LinkProfile::wap2g();
  Tariff wml_tariff = Tariff::airtime(12);
  LinkProfile html_link = LinkProfile::dialup();
  Tariff html_tariff = Tariff::flat();
};

struct ComparisonRow {
  std::string route;  // without the session parameter
  std::uint64_t wml_bytes = 0;
  std::uint64_t wml_requests = 0;
  std::uint64_t wml_ms = 0;
  std::uint64_t wml_cost = 0;
  std::uint64_t html_bytes = 0;
  std::uint64_t html_requests = 0;
  std::uint64_t html_ms = 0;
  std::uint64_t html_cost = 0;
  /// Largest single HTML asset on the page.
  std::uint64_t largest_asset = 0;

  bool operator==(const ComparisonRow&) const = default;
};

struct ComparisonReport {
  ChannelSetup setup;
  std::vector<ComparisonRow> rows;

  /// Sums of bytes, requests and durations; costs are billed on the summed
  /// durations (one connection per channel).
  ComparisonRow totals() const;
};

ComparisonRow compare_route(storefront::Storefront& front, const storefront::Route& route, const ChannelSetup& setup,
                            Timestamp now);
ComparisonReport compare_channels(storefront::Storefront& front, const std::vector<storefront::Route>& journey,
                                  const ChannelSetup& setup, Timestamp now);

std::string render_text(const ComparisonReport& report);
std::string render_json(const ComparisonReport& report);

}  // namespace wapshop::gateway
