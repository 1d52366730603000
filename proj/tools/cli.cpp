#include "cli.hpp"

#include "wapshop/gateway.hpp"
#include "wapshop/http.hpp"
#include "wapshop/journey.hpp"
#include "wapshop/lint.hpp"
#include "wapshop/shop.hpp"
#include "wapshop/storefront.hpp"
#include "wapshop/wbxml.hpp"
#include "wapshop/wml.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace wapshop::cli {

namespace fs = std::filesystem;

namespace {

/// Exit status 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Config {
  std::string store;
  std::string seed;
  int origin_port = 8080;
  int gateway_port = 9200;
  std::string link = "wap2g";
  std::string tariff = "airtime:12";
  std::string policy;
  std::string admins;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !out.write(data.data(), static_cast<std::streamsize>(data.size()))) {
    throw UsageError("cannot write " + path.string());
  }
}

lint::LintPolicy load_policy(const Config& c) {
  if (c.policy.empty()) return {};
  try {
    return lint::policy_from_json(read_file(c.policy));
  } catch (const std::invalid_argument& e) {
    throw UsageError("policy " + c.policy + ": " + e.what());
  }
}

storefront::AdminDirectory load_admins(const Config& c) {
  if (c.admins.empty()) return {};
  try {
    return storefront::AdminDirectory::from_json(read_file(c.admins));
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

shop::Store load_store(const Config& c) {
  try {
    if (!c.store.empty()) {
      if (!fs::exists(c.store) && !c.seed.empty()) {
        auto store = shop::Store::from_fixture(c.seed);
        store.bind(c.store);
        return store;
      }
      return shop::Store::open(c.store);
    }
    if (!c.seed.empty()) return shop::Store::from_fixture(c.seed);
  } catch (const shop::StoreIoError& e) {
    throw UsageError(e.what());
  }
  throw UsageError("a store is required: pass --store or --seed");
}

gateway::ChannelSetup channel_setup(const Config& c) {
  gateway::ChannelSetup setup;
  try {
    setup.wml_link = gateway::LinkProfile::parse(c.link);
    setup.wml_tariff = gateway::Tariff::parse(c.tariff);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return setup;
}

int emit_report(const lint::LintReport& report, bool as_json, std::ostream& out) {
  out << (as_json ? lint::render_json(report) : lint::render_text(report));
  return report.pass() ? 0 : 1;
}

int cmd_lint(const Config& c, const std::string& target, bool as_json, std::ostream& out) {
  const auto policy = load_policy(c);

  if (target.rfind("http://", 0) == 0) {
    const auto slash = target.find('/', 7);
    const auto base = slash == std::string::npos ? target : target.substr(0, slash);
    auto root = slash == std::string::npos ? std::string("/menu") : target.substr(slash);
    if (root == "/") root = "/menu";
    const auto crawl =
        lint::crawl_site(http::http_deck_fetcher(base), http::http_image_weigher(base), root, policy);
    return emit_report(crawl.report, as_json, out);
  }

  const bool is_file = !target.empty() && (target.front() != '/' || fs::path(target).extension() == ".wml" ||
                                          fs::is_regular_file(target));
  if (is_file) {
    const fs::path file(target);
    const auto text = read_file(file);
    lint::ImageWeights weights;
    lint::LintReport report;
    try {
      const auto deck = wml::parse_deck(text);
      for (const auto& card : deck.cards) {
        wml::walk(card.content, [&](const wml::Node& n) {
          if (const auto* img = n.get_if<wml::Image>()) {
            const auto local = file.parent_path() / fs::path(img->src).relative_path();
            std::error_code ec;
            const auto size = fs::file_size(local, ec);
            if (!ec) weights[img->src] = size;
          }
        });
      }
      report = lint::lint_deck(deck, policy, weights, target);
    } catch (const wml::ParseError& e) {
      report.violations.push_back({lint::Rule::FetchFailed, target, e.what()});
      report.checked_decks = 1;
    }
    report.normalize();
    return emit_report(report, as_json, out);
  }

  auto store = load_store(c);
  session::SessionRegistry sessions;
  storefront::Storefront front(store, sessions, load_admins(c));
  const auto now = shop::system_now();
  if (target.empty() || target == "/") {
    return emit_report(storefront::lint_storefront(front, policy, now).report, as_json, out);
  }
  const auto fetcher = [&](const std::string& route) {
    try {
      return wml::parse_deck(wml::serialize_deck(front.render_page(storefront::Route::parse(route), now)));
    } catch (const storefront::RouteError& e) {
      throw lint::FetchFailed(e.what());
    }
  };
  const auto images = [&](const std::string& src) { return front.image_weight(src); };
  return emit_report(lint::crawl_site(fetcher, images, target, policy).report, as_json, out);
}

int cmd_compile(const std::string& in, const std::string& out_path, std::ostream& err) {
  try {
    const auto compiled = wbxml::compile_deck(wml::parse_deck(read_file(in)));
    write_file(out_path, std::string_view(reinterpret_cast<const char*>(compiled.bytes.data()), compiled.bytes.size()));
    return 0;
  } catch (const wml::ParseError& e) {
    err << in << ": " << e.what() << "\n";
  } catch (const wbxml::InvalidDeck& e) {
    err << in << ": " << e.what() << "\n";
  }
  return 2;
}

int cmd_decompile(const std::string& in, std::ostream& out, std::ostream& err) {
  const auto data = read_file(in);
  try {
    const std::vector<std::uint8_t> bytes(data.begin(), data.end());
    out << wml::serialize_deck(wbxml::decompile_deck(bytes));
    return 0;
  } catch (const wbxml::CodecError& e) {
    err << in << ": " << e.what() << "\n";
  }
  return 2;
}

int cmd_seed(const Config& c, const std::string& fixture, std::ostream& out) {
  if (c.store.empty()) throw UsageError("seed needs --store");
  if (fs::exists(c.store)) throw UsageError("refusing to overwrite existing store " + c.store);
  try {
    auto store = shop::Store::from_fixture(fixture);
    store.bind(c.store);
    out << "seeded " << store.products().size() << " products into " << c.store << "\n";
  } catch (const shop::ShopError& e) {
    throw UsageError(e.what());
  }
  return 0;
}

int cmd_journey(const Config& c, const std::string& script_path, bool as_json, std::ostream& out) {
  journey::Script script;
  try {
    script = journey::Script::parse(read_file(script_path));
  } catch (const journey::ScriptError& e) {
    throw UsageError(script_path + ": " + e.what());
  }
  journey::JourneyOptions options;
  options.setup = channel_setup(c);
  options.policy = load_policy(c);
  auto store = load_store(c);
  session::SessionRegistry sessions;
  storefront::Storefront front(store, sessions, load_admins(c));
  const auto result = journey::run_journey(front, script, options);
  out << (as_json ? gateway::render_json(result.report) : journey::render_summary(result));
  return result.passed() ? 0 : 1;
}

int cmd_serve(const Config& c, std::ostream& out) {
  if (c.origin_port == c.gateway_port) throw UsageError("origin and gateway ports must differ");
  const auto policy = load_policy(c);
  const auto setup = channel_setup(c);
  auto store = load_store(c);
  session::SessionRegistry sessions;
  storefront::Storefront front(store, sessions, load_admins(c));
  http::OriginServer origin(front, "0.0.0.0", c.origin_port);
  http::GatewayServer gate(gateway::Gateway(http::http_origin("http://127.0.0.1:" + std::to_string(origin.port())),
                                            policy.max_compiled_bytes),
                           setup.wml_link, setup.wml_tariff, "0.0.0.0", c.gateway_port);
  out << "origin  http://0.0.0.0:" << origin.port() << "/\n"
      << "gateway http://0.0.0.0:" << gate.port() << "/ (deck JSON at /ui/deck?url=/menu)\n"
      << std::flush;
  gate.wait();
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Museum shop WAP toolchain: storefront, gateway, linter and codec", "wapshop"};
  app.require_subcommand(1);
  app.fallthrough();
  Config c;
  app.add_option("--store", c.store, "Store file (JSON)")->envname("WAPSHOP_STORE");
  app.add_option("--seed", c.seed, "Catalog fixture used when the store does not exist")->envname("WAPSHOP_SEED");
  app.add_option("--origin-port", c.origin_port, "Origin server port")->envname("WAPSHOP_ORIGIN_PORT");
  app.add_option("--gateway-port", c.gateway_port, "Gateway port")->envname("WAPSHOP_GATEWAY_PORT");
  app.add_option("--link", c.link, "wap2g, dialup or custom:<bps>[:<rtt>]")->envname("WAPSHOP_LINK");
  app.add_option("--tariff", c.tariff, "airtime:<cents per minute> or flat")->envname("WAPSHOP_TARIFF");
  app.add_option("--policy", c.policy, "Lint policy overrides (JSON)")->envname("WAPSHOP_POLICY");
  app.add_option("--admins", c.admins, "Administrator accounts (JSON)")->envname("WAPSHOP_ADMINS");

  auto* serve = app.add_subcommand("serve", "Run the origin storefront and the gateway");

  std::string lint_target;
  bool lint_json = false;
  auto* lint_cmd = app.add_subcommand("lint", "Lint a site (http URL), a .wml file or a storefront route");
  lint_cmd->add_option("target", lint_target, "http://host:port/route, file.wml or /route (default: whole shop)");
  lint_cmd->add_flag("--json", lint_json, "JSON report");

  std::string compile_in, compile_out;
  auto* compile = app.add_subcommand("compile", "Compile textual WML to binary");
  compile->add_option("input", compile_in)->required();
  compile->add_option("output", compile_out)->required();

  std::string decompile_in;
  auto* decompile = app.add_subcommand("decompile", "Print the canonical text of a binary deck");
  decompile->add_option("input", decompile_in)->required();

  std::string fixture;
  auto* seed = app.add_subcommand("seed", "Create a store from a catalog fixture");
  seed->add_option("fixture", fixture)->required();

  std::string script;
  bool journey_json = false;
  auto* journey_cmd = app.add_subcommand("journey", "Run a scripted shopping session");
  journey_cmd->add_option("script", script)->required();
  journey_cmd->add_flag("--json", journey_json, "Print the comparison report as JSON");

  std::string password;
  auto* hash = app.add_subcommand("hash-password", "Digest a password for the administrators file");
  hash->add_option("password", password)->required();

  std::vector<std::string> argv_storage{"wapshop"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*serve) return cmd_serve(c, out);
    if (*lint_cmd) return cmd_lint(c, lint_target, lint_json, out);
    if (*compile) return cmd_compile(compile_in, compile_out, err);
    if (*decompile) return cmd_decompile(decompile_in, out, err);
    if (*seed) return cmd_seed(c, fixture, out);
    if (*journey_cmd) return cmd_journey(c, script, journey_json, out);
    if (*hash) {
      out << shop::digest_password(password) << "\n";
      return 0;
    }
  } catch (const UsageError& e) {
    err << "wapshop: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "wapshop: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace wapshop::cli
