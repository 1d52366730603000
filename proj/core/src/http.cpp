#include "wapshop/http.hpp"

#include <httplib.h>

#include <stdexcept>
#include <thread>

namespace wapshop::http {

namespace {

std::string path_of(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) return url.empty() || url.front() != '/' ? "/" + url : url;
  const auto slash = url.find('/', scheme + 3);
  return slash == std::string::npos ? "/" : url.substr(slash);
}

// Owns a bound server and the thread running its accept loop.
struct Runner {
  httplib::Server server;
  std::string host;
  int port = 0;
  std::thread thread;

  void start(const std::string& bind_host, int wanted_port) {
    host = bind_host;
    if (wanted_port == 0) {
      port = server.bind_to_any_port(host);
    } else {
      port = server.bind_to_port(host, wanted_port) ? wanted_port : -1;
    }
    if (port < 0) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(wanted_port));
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }

  void stop() {
    server.stop();
    if (thread.joinable()) thread.join();
  }

  void wait() {
    if (thread.joinable()) thread.join();
  }

  std::string base_url() const { return "http://" + host + ":" + std::to_string(port); }
};

}  // namespace

struct OriginServer::Impl {
  Runner runner;
};

OriginServer::OriginServer(storefront::Storefront& front, std::string host, int port) : impl_(std::make_unique<Impl>()) {
  auto handler = [&front](const httplib::Request& req, httplib::Response& res) {
    storefront::OriginRequest request{req.method, req.target, req.body};
    const auto reply = storefront::serve_origin(front, request, shop::system_now());
    res.status = reply.status;
    res.set_content(reply.body, reply.content_type);
  };
  impl_->runner.server.Get(".*", handler);
  impl_->runner.server.Post(".*", handler);
  impl_->runner.start(host, port);
}

OriginServer::~OriginServer() { impl_->runner.stop(); }
int OriginServer::port() const { return impl_->runner.port; }
std::string OriginServer::base_url() const { return impl_->runner.base_url(); }
void OriginServer::wait() { impl_->runner.wait(); }
void OriginServer::stop() { impl_->runner.stop(); }

struct GatewayServer::Impl {
  Impl(gateway::Gateway g, gateway::LinkProfile l, gateway::Tariff t)
      : gate(std::move(g)), link(std::move(l)), tariff(t) {}

  gateway::Gateway gate;
  gateway::LinkProfile link;
  gateway::Tariff tariff;
  Runner runner;
};

GatewayServer::GatewayServer(gateway::Gateway gate, gateway::LinkProfile link, gateway::Tariff tariff,
                             std::string host, int port)
    : impl_(std::make_unique<Impl>(std::move(gate), std::move(link), tariff)) {
  auto& server = impl_->runner.server;
  auto* impl = impl_.get();
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  server.Options(".*", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });

  auto ui_deck = [impl](const httplib::Request& req, httplib::Response& res) {
    if (!req.has_param("url")) {
      res.status = 400;
      res.set_content("{\"error\":\"missing url parameter\"}", "application/json");
      return;
    }
    const auto url = req.get_param_value("url");
    const auto response = req.method == "POST" ? impl->gate.handle_post(url, req.body) : impl->gate.handle_request(url);
    const auto metrics = gateway::measure(response.bytes.size(), impl->link, impl->tariff);
    res.set_content(gateway::deck_json(response.deck, metrics), "application/json");
  };
  server.Get("/ui/deck", ui_deck);
  server.Post("/ui/deck", ui_deck);

  auto binary = [impl](const httplib::Request& req, httplib::Response& res) {
    const auto response =
        req.method == "POST" ? impl->gate.handle_post(req.target, req.body) : impl->gate.handle_request(req.target);
    res.set_content(std::string(response.bytes.begin(), response.bytes.end()), std::string(kWmlcContentType));
  };
  server.Get(".*", binary);
  server.Post(".*", binary);
  impl_->runner.start(host, port);
}

GatewayServer::~GatewayServer() { impl_->runner.stop(); }
int GatewayServer::port() const { return impl_->runner.port; }
std::string GatewayServer::base_url() const { return impl_->runner.base_url(); }
void GatewayServer::wait() { impl_->runner.wait(); }
void GatewayServer::stop() { impl_->runner.stop(); }

gateway::OriginFetcher http_origin(std::string base_url) {
  return [base_url = std::move(base_url)](const storefront::OriginRequest& request) {
    httplib::Client client(base_url);
    client.set_connection_timeout(5);
    const auto target = path_of(request.url);
    auto result = request.method == "POST"
                      ? client.Post(target, request.body, "application/x-www-form-urlencoded")
                      : client.Get(target);
    if (!result) throw std::runtime_error(httplib::to_string(result.error()));
    storefront::OriginResponse reply;
    reply.status = result->status;
    reply.content_type = result->get_header_value("Content-Type");
    reply.body = result->body;
    return reply;
  };
}

lint::Fetcher http_deck_fetcher(std::string base_url) {
  auto origin = http_origin(std::move(base_url));
  return [origin](const std::string& route) {
    storefront::OriginResponse reply;
    try {
      reply = origin({"GET", route, {}});
    } catch (const std::exception& e) {
      throw lint::FetchFailed(e.what());
    }
    if (reply.status != 200) throw lint::FetchFailed("HTTP " + std::to_string(reply.status));
    return wml::parse_deck(reply.body);
  };
}

lint::ImageWeigher http_image_weigher(std::string base_url) {
  auto origin = http_origin(std::move(base_url));
  return [origin](const std::string& src) -> std::optional<std::size_t> {
    try {
      const auto reply = origin({"GET", src, {}});
      if (reply.status != 200) return std::nullopt;
      return reply.body.size();
    } catch (const std::exception&) {
      return std::nullopt;
    }
  };
}

}  // namespace wapshop::http
