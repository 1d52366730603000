// HTTP front ends: the origin web server and the WAP gateway, each running
// on a background thread.
#pragma once

#include "wapshop/gateway.hpp"
#include "wapshop/lint.hpp"
#include "wapshop/storefront.hpp"

#include <memory>
#include <string>

namespace wapshop::http {

class OriginServer {
 public:
  /// Port 0 picks an ephemeral port.
  OriginServer(storefront::Storefront& front, std::string host = "127.0.0.1", int port = 0);
  ~OriginServer();
  OriginServer(const OriginServer&) = delete;
  OriginServer& operator=(const OriginServer&) = delete;

  int port() const;
  std::string base_url() const;
  /// Blocks until the server is stopped.
  void wait();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Binary decks under any path, the decoded-deck JSON under /ui/deck?url=...
/// (GET to navigate, POST with a urlencoded body to submit a form).
class GatewayServer {
 public:
  GatewayServer(gateway::Gateway gate, gateway::LinkProfile link, gateway::Tariff tariff,
                std::string host = "127.0.0.1", int port = 0);
  ~GatewayServer();
  GatewayServer(const GatewayServer&) = delete;
  GatewayServer& operator=(const GatewayServer&) = delete;

  int port() const;
  std::string base_url() const;
  void wait();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

inline constexpr std::string_view kWmlcContentType = "application/vnd.wap.wmlc";

/// Origin fetcher talking HTTP to `base_url` ("http://host:port").
gateway::OriginFetcher http_origin(std::string base_url);

/// Crawler plumbing for a remote site: decks are fetched as text and images
/// are weighed by their response size.
lint::Fetcher http_deck_fetcher(std::string base_url);
lint::ImageWeigher http_image_weigher(std::string base_url);

}  // namespace wapshop::http
