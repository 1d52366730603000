#include "wapshop/storefront.hpp"

#include "wapshop/wbxml.hpp"

#include "utf8.hpp"

#include <algorithm>
#include <charconv>
#include <json.hpp>

namespace wapshop::storefront {

using wml::Node;

namespace {

constexpr std::size_t kMaxListed = 10;

struct Viewer {
  std::optional<std::string> token;
  std::optional<std::string> customer;
  std::optional<std::string> admin;
};

Viewer identify(Storefront& front, std::string_view token, Timestamp now) {
  Viewer viewer;
  if (token.empty()) return viewer;
  const auto resolution = front.sessions().resolve(token, now);
  if (const auto* principal = std::get_if<session::Principal>(&resolution)) {
    viewer.token = std::string(token);
    if (const auto* c = std::get_if<session::CustomerPrincipal>(principal)) viewer.customer = c->username;
    if (const auto* a = std::get_if<session::AdminPrincipal>(principal)) viewer.admin = a->username;
  }
  return viewer;
}

std::string session_param(const Route& route, const Params& fields = {}) {
  if (const auto it = fields.find(kSessionParam); it != fields.end() && !it->second.empty()) return it->second;
  if (const auto* s = route.param(kSessionParam)) return *s;
  return {};
}

std::string euros(shop::Cents amount) { return "EUR " + shop::format_euros(amount); }

Route to(Page page, Params params = {}) { return Route{page, std::move(params)}; }

// Builds the single-card decks the shop serves: one paragraph of body content
// followed by the card's softkeys.
class DeckBuilder {
 public:
  DeckBuilder(Page page, std::string title, const Viewer& viewer)
      : page_(page), title_(std::move(title)), viewer_(viewer) {}

  void text(std::string_view s) {
    auto nodes = wrap_text(s);
    body_.insert(body_.end(), nodes.begin(), nodes.end());
    body_.push_back(wml::Break{});
  }

  void item(std::string_view label, const Route& route) {
    body_.push_back(wml::Anchor{href(route), std::to_string(++items_) + ". " + std::string(label)});
    body_.push_back(wml::Break{});
  }

  void link(std::string_view label, const Route& route) {
    body_.push_back(wml::Anchor{href(route), std::string(label)});
    body_.push_back(wml::Break{});
  }

  void image(std::string src, std::string alt) {
    body_.push_back(wml::Image{std::move(src), std::move(alt)});
    body_.push_back(wml::Break{});
  }

  void prompt(std::string_view label, std::string name, wml::InputKind kind = wml::InputKind::text) {
    text(label);
    body_.push_back(wml::Input{std::move(name), kind});
    body_.push_back(wml::Break{});
  }

  void select(std::string_view label, std::string name, const std::vector<std::pair<std::string, std::string>>& opts) {
    text(label);
    wml::Select sel{std::move(name), {}};
    for (std::size_t i = 0; i < opts.size(); ++i) {
      sel.options.push_back({std::to_string(i + 1) + ". " + opts[i].first, opts[i].second});
    }
    body_.push_back(std::move(sel));
    body_.push_back(wml::Break{});
  }

  /// Form submission softkey; the session token rides along as a postfield.
  void submit(std::string label, Page target, std::vector<wml::Postfield> fields) {
    if (viewer_.token) fields.push_back({std::string(kSessionParam), *viewer_.token});
    accept_ = wml::Do{wml::DoKind::accept, std::move(label), "/" + std::string(path_name(target)), wml::Method::post,
                      std::move(fields)};
  }

  void options_menu(Page page) { options_page_ = page; }

  wml::Deck build() {
    while (!body_.empty() && body_.back().is<wml::Break>()) body_.pop_back();
    wml::Card card;
    card.id = std::string(path_name(page_));
    std::replace(card.id.begin(), card.id.end(), '-', '_');
    card.title = title_;
    if (!body_.empty()) card.content.push_back(wml::Paragraph{std::move(body_)});
    if (accept_) card.content.push_back(std::move(*accept_));
    card.content.push_back(wml::Do{wml::DoKind::prev, "Back", std::nullopt, wml::Method::get, {}});
    card.content.push_back(
        wml::Do{wml::DoKind::options, "Menu", href(to(options_page_)), wml::Method::get, {}});
    wml::Deck deck;
    deck.cards.push_back(std::move(card));
    return deck;
  }

 private:
  std::string href(Route route) const {
    if (viewer_.token) route = route.with(std::string(kSessionParam), *viewer_.token);
    else route = route.without(kSessionParam);
    return route.url();
  }

  Page page_;
  std::string title_;
  const Viewer& viewer_;
  std::vector<Node> body_;
  std::optional<wml::Do> accept_;
  Page options_page_ = Page::menu;
  int items_ = 0;
};

wml::Deck error_card(std::string_view message, const Viewer& viewer) {
  DeckBuilder b(Page::help, "Error", viewer);
  b.text(message);
  b.item("Main menu", to(Page::menu));
  auto deck = b.build();
  deck.cards.front().id = "error";
  return deck;
}

wml::Deck choice_deck(const Viewer& viewer) {
  // Expired or unknown sessions fall back to an anonymous view.
  Viewer anonymous;
  (void)viewer;
  DeckBuilder b(Page::cart_add, "Log in", anonymous);
  b.text("Please log in or register to shop.");
  b.item("Log in", to(Page::login));
  b.item("Register", to(Page::register_));
  return b.build();
}

wml::Deck admin_login_deck(const Viewer& viewer) {
  DeckBuilder b(Page::admin_login, "Admin", viewer);
  b.prompt("Admin user:", "username");
  b.prompt("Password:", "password", wml::InputKind::password);
  b.submit("Login", Page::admin_login, {{"username", "$(username)"}, {"password", "$(password)"}});
  return b.build();
}

std::vector<std::pair<std::string, std::string>> category_options() {
  std::vector<std::pair<std::string, std::string>> opts;
  for (auto c : shop::kCategories) {
    auto label = std::string(shop::to_string(c));
    label.front() = static_cast<char>(std::toupper(static_cast<unsigned char>(label.front())));
    opts.emplace_back(label, std::string(shop::to_string(c)));
  }
  return opts;
}

std::string category_title(shop::Category c) {
  auto label = std::string(shop::to_string(c));
  label.front() = static_cast<char>(std::toupper(static_cast<unsigned char>(label.front())));
  return label;
}

std::int64_t parse_int(std::string_view text, std::string_view what) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  std::int64_t v = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc{} || ptr != end) {
    throw shop::ValidationError(std::string(what) + " must be a whole number");
  }
  return v;
}

std::string field(const Params& fields, std::string_view name) {
  const auto it = fields.find(name);
  return it == fields.end() ? std::string{} : it->second;
}

std::string image_src(const shop::Product& p) { return "/img/" + p.id + ".wbmp"; }
std::string thumb_src(const shop::Product& p) { return "/html/img/" + p.id + "-thumb.jpg"; }
std::string photo_src(const shop::Product& p) { return "/html/img/" + p.id + "-photo.jpg"; }

}  // namespace

std::vector<Node> wrap_text(std::string_view text, std::size_t width) {
  std::vector<std::string> lines;
  std::string line;
  auto flush = [&] {
    if (!line.empty()) lines.push_back(std::move(line));
    line.clear();
  };
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && text[i] == ' ') ++i;
    const auto end = std::min(text.find(' ', i), text.size());
    std::string_view word = text.substr(i, end - i);
    i = end;
    if (word.empty()) continue;
    const auto len = detail::code_points(word);
    const auto used = detail::code_points(line);
    if (!line.empty() && used + 1 + len <= width) {
      line += ' ';
      line += word;
      continue;
    }
    flush();
    // Over-long words are split at code point boundaries.
    while (detail::code_points(word) > width) {
      std::size_t bytes = 0;
      for (std::size_t cps = 0; cps < width; ++cps) {
        ++bytes;
        while (bytes < word.size() && (static_cast<unsigned char>(word[bytes]) & 0xC0) == 0x80) ++bytes;
      }
      lines.emplace_back(word.substr(0, bytes));
      word.remove_prefix(bytes);
    }
    line = std::string(word);
  }
  flush();
  std::vector<Node> nodes;
  for (std::size_t k = 0; k < lines.size(); ++k) {
    if (k > 0) nodes.push_back(wml::Break{});
    nodes.push_back(wml::Text{lines[k]});
  }
  return nodes;
}

AdminDirectory AdminDirectory::from_json(std::string_view json_text) {
  std::vector<AdminAccount> accounts;
  try {
    const auto doc = nlohmann::json::parse(json_text);
    for (const auto& a : doc) {
      accounts.push_back({a.at("username").get<std::string>(), a.at("credential").get<std::string>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed admin file: ") + e.what());
  }
  return AdminDirectory(std::move(accounts));
}

bool AdminDirectory::verify(std::string_view username, std::string_view password) const {
  for (const auto& a : accounts_) {
    if (a.username == username) return shop::verify_password(a.credential, password);
  }
  return false;
}

std::size_t HtmlPage::total_bytes() const {
  std::size_t total = html.size();
  for (const auto& a : assets) total += a.bytes;
  return total;
}

Storefront::Storefront(shop::Store& store, session::SessionRegistry& sessions, AdminDirectory admins)
    : store_(store), sessions_(sessions), admins_(std::move(admins)) {}

session::Resolution Storefront::resolve(const Route& route, Timestamp now) {
  const auto token = session_param(route);
  if (token.empty()) return session::Unknown{};
  return sessions_.resolve(token, now);
}

wml::Deck Storefront::render_page(const Route& route, Timestamp now) {
  const auto viewer = identify(*this, session_param(route), now);
  const auto require = [&](std::string_view name) -> const std::string& {
    if (const auto* v = route.param(name)) return *v;
    throw RouteError("missing parameter '" + std::string(name) + "'");
  };

  try {
    switch (route.page) {
      case Page::intro: {
        DeckBuilder b(Page::intro, "Museum Shop", viewer);
        b.image(std::string(kLogoSrc), "Museum logo");
        b.link("ENTER", to(Page::menu));
        return b.build();
      }
      case Page::menu: {
        DeckBuilder b(Page::menu, "Main menu", viewer);
        if (viewer.customer) {
          b.item("My cart", to(Page::cart));
          b.item("My orders", to(Page::orders));
        } else {
          b.item("Login", to(Page::login));
          b.item("Register", to(Page::register_));
        }
        b.item("New arrivals", to(Page::new_arrivals));
        b.item("Categories", to(Page::categories));
        b.item("Search", to(Page::search));
        b.item("Help", to(Page::help));
        return b.build();
      }
      case Page::login: {
        DeckBuilder b(Page::login, "Log in", viewer);
        b.prompt("Username:", "username");
        b.prompt("Password:", "password", wml::InputKind::password);
        b.submit("Login", Page::login, {{"username", "$(username)"}, {"password", "$(password)"}});
        return b.build();
      }
      case Page::register_: {
        DeckBuilder b(Page::register_, "Register", viewer);
        b.prompt("Username:", "username");
        b.prompt("Password:", "password", wml::InputKind::password);
        b.prompt("Surname:", "surname");
        b.prompt("Name:", "name");
        b.prompt("Address:", "address");
        b.submit("Register", Page::register_,
                 {{"username", "$(username)"},
                  {"password", "$(password)"},
                  {"surname", "$(surname)"},
                  {"name", "$(name)"},
                  {"address", "$(address)"}});
        return b.build();
      }
      case Page::new_arrivals: {
        DeckBuilder b(Page::new_arrivals, "New arrivals", viewer);
        const auto products = store_.last_five();
        if (products.empty()) b.text("No products yet.");
        for (const auto& p : products) b.item(p.name, to(Page::product, {{"id", p.id}}));
        return b.build();
      }
      case Page::categories: {
        DeckBuilder b(Page::categories, "Categories", viewer);
        for (auto c : shop::kCategories) {
          b.item(category_title(c), to(Page::list, {{"category", std::string(shop::to_string(c))}}));
        }
        return b.build();
      }
      case Page::list: {
        const auto category = shop::parse_category(require("category"));
        if (!category) return error_card("Unknown category.", viewer);
        DeckBuilder b(Page::list, category_title(*category), viewer);
        const auto products = store_.list_by_category(*category);
        if (products.empty()) b.text("No products.");
        for (const auto& p : products) b.item(p.name, to(Page::product, {{"id", p.id}}));
        return b.build();
      }
      case Page::product: {
        const auto product = store_.find_product(require("id"));
        if (!product) return error_card("Product not found.", viewer);
        DeckBuilder b(Page::product, "Product", viewer);
        b.text(product->name);
        if (product->wap_img_bytes > 0) b.image(image_src(*product), product->name);
        b.text(product->description);
        b.text("Price: " + euros(product->price));
        const auto siblings = store_.list_by_category(product->category);
        const auto self = std::find_if(siblings.begin(), siblings.end(),
                                       [&](const shop::Product& p) { return p.id == product->id; });
        if (siblings.size() > 1 && self != siblings.end()) {
          const auto next = std::next(self) == siblings.end() ? siblings.begin() : std::next(self);
          b.item("Next item", to(Page::product, {{"id", next->id}}));
        }
        b.item(category_title(product->category),
               to(Page::list, {{"category", std::string(shop::to_string(product->category))}}));
        b.item("Main menu", to(Page::menu));
        b.submit("Add", Page::cart_add, {{"id", product->id}});
        return b.build();
      }
      case Page::cart_add: {
        if (!viewer.customer) return choice_deck(viewer);
        const auto product = store_.find_product(require("id"));
        if (!product) return error_card("Product not found.", viewer);
        DeckBuilder b(Page::cart_add, "Added", viewer);
        b.text(product->name + " is in your cart.");
        b.item("Continue shopping", to(Page::categories));
        b.item("Issue order", to(Page::cart));
        return b.build();
      }
      case Page::cart: {
        if (!viewer.customer) return choice_deck(viewer);
        DeckBuilder b(Page::cart, "My cart", viewer);
        const auto cart = store_.cart(*viewer.customer);
        if (cart.lines.empty()) {
          b.text("Your cart is empty.");
          b.item("Categories", to(Page::categories));
          return b.build();
        }
        shop::Cents total;
        std::vector<std::pair<std::string, std::string>> opts;
        for (const auto& line : cart.lines) {
          const auto product = store_.find_product(line.product_id);
          if (!product) continue;
          b.text(product->name + " x" + std::to_string(line.quantity));
          b.text(euros(product->price * line.quantity));
          total += product->price * line.quantity;
          opts.emplace_back(product->name, product->id);
        }
        b.text("Total: " + euros(total));
        b.select("Item:", "item", opts);
        b.prompt("Qty (0 = delete):", "qty");
        b.submit("Update", Page::cart, {{"id", "$(item)"}, {"qty", "$(qty)"}});
        b.item("Order", to(Page::order_confirm));
        b.item("Continue shopping", to(Page::categories));
        return b.build();
      }
      case Page::order_confirm: {
        if (!viewer.customer) return choice_deck(viewer);
        DeckBuilder b(Page::order_confirm, "Order", viewer);
        const auto cart = store_.cart(*viewer.customer);
        if (cart.lines.empty()) {
          b.text("Your cart is empty.");
          b.item("Categories", to(Page::categories));
          return b.build();
        }
        const auto customer = store_.find_customer(*viewer.customer);
        b.text("Deliver to:");
        if (customer) {
          b.text(customer->name + " " + customer->surname);
          if (!customer->address.empty()) b.text(customer->address);
        }
        shop::Cents total;
        for (const auto& line : cart.lines) {
          if (const auto product = store_.find_product(line.product_id)) {
            b.text(product->name + " x" + std::to_string(line.quantity));
            total += product->price * line.quantity;
          }
        }
        b.text("Total: " + euros(total));
        b.select("Pay by:", "payment", {{"Snail mail", "snail_mail"}, {"Courier", "courier"}});
        b.submit("Order", Page::order_confirm, {{"payment", "$(payment)"}});
        b.item("Edit cart", to(Page::cart));
        return b.build();
      }
      case Page::order_done: {
        if (!viewer.customer) return choice_deck(viewer);
        const auto order = store_.find_order(require("id"));
        if (!order || order->customer != *viewer.customer) return error_card("Order not found.", viewer);
        DeckBuilder b(Page::order_done, "Thank you", viewer);
        b.text("Order " + order->id + " placed.");
        b.text("Total: " + euros(order->total));
        b.text(std::string("Payment: ") + (order->payment == shop::Payment::courier ? "courier" : "snail mail"));
        b.item("My orders", to(Page::orders));
        b.item("Main menu", to(Page::menu));
        return b.build();
      }
      case Page::search: {
        DeckBuilder b(Page::search, "Search", viewer);
        b.prompt("Title:", "q");
        b.submit("Search", Page::search, {{"q", "$(q)"}});
        return b.build();
      }
      case Page::results: {
        const auto products = store_.search_by_title(require("q"));
        DeckBuilder b(Page::results, "Results", viewer);
        if (products.empty()) b.text("No matches.");
        if (products.size() > kMaxListed) {
          b.text("First " + std::to_string(kMaxListed) + " of " + std::to_string(products.size()));
        }
        for (std::size_t i = 0; i < products.size() && i < kMaxListed; ++i) {
          b.item(products[i].name, to(Page::product, {{"id", products[i].id}}));
        }
        b.item("New search", to(Page::search));
        return b.build();
      }
      case Page::help: {
        DeckBuilder b(Page::help, "Help", viewer);
        b.text("Browse by category, new arrivals or search.");
        b.text("Log in to use the cart and to order.");
        b.text("Payment: snail mail or courier.");
        b.text("Orders ship in 3-5 working days.");
        b.item("Main menu", to(Page::menu));
        return b.build();
      }
      case Page::orders: {
        if (!viewer.customer) return choice_deck(viewer);
        DeckBuilder b(Page::orders, "My orders", viewer);
        const auto orders = store_.list_orders(*viewer.customer);
        if (orders.empty()) b.text("No orders yet.");
        for (std::size_t i = 0; i < orders.size() && i < kMaxListed; ++i) {
          b.item(orders[i].id + " " + euros(orders[i].total), to(Page::order_done, {{"id", orders[i].id}}));
        }
        return b.build();
      }
      case Page::admin_login:
        return admin_login_deck(viewer);
      case Page::admin_menu: {
        if (!viewer.admin) return admin_login_deck(Viewer{});
        DeckBuilder b(Page::admin_menu, "Admin", viewer);
        b.options_menu(Page::admin_menu);
        b.item("Insert product", to(Page::admin_insert));
        b.item("Update product", to(Page::admin_update));
        return b.build();
      }
      case Page::admin_insert: {
        if (!viewer.admin) return admin_login_deck(Viewer{});
        DeckBuilder b(Page::admin_insert, "Insert", viewer);
        b.options_menu(Page::admin_menu);
        b.prompt("Name:", "name");
        b.select("Category:", "category", category_options());
        b.prompt("Price (cents):", "price");
        b.prompt("Description:", "description");
        b.prompt("Thumb bytes:", "thumb");
        b.prompt("Photo bytes:", "photo");
        b.prompt("WAP image bytes:", "wap");
        b.submit("Insert", Page::admin_insert,
                 {{"name", "$(name)"},
                  {"category", "$(category)"},
                  {"price", "$(price)"},
                  {"description", "$(description)"},
                  {"thumb", "$(thumb)"},
                  {"photo", "$(photo)"},
                  {"wap", "$(wap)"}});
        return b.build();
      }
      case Page::admin_update: {
        if (!viewer.admin) return admin_login_deck(Viewer{});
        DeckBuilder b(Page::admin_update, "Update", viewer);
        b.options_menu(Page::admin_menu);
        const auto* id = route.param("id");
        if (!id) {
          std::vector<std::pair<std::string, std::string>> opts;
          for (const auto& p : store_.products()) opts.emplace_back(p.name, p.id);
          b.select("Product:", "id", opts);
          b.submit("Edit", Page::admin_update, {{"id", "$(id)"}});
          return b.build();
        }
        const auto product = store_.find_product(*id);
        if (!product) return error_card("Product not found.", viewer);
        b.text(product->id + ": " + product->name);
        b.text(category_title(product->category) + ", " + euros(product->price));
        b.text("Blank keeps value.");
        b.prompt("Name:", "name");
        b.select("Category:", "category", category_options());
        b.prompt("Price (cents):", "price");
        b.prompt("Description:", "description");
        b.submit("Save", Page::admin_update,
                 {{"id", product->id},
                  {"name", "$(name)"},
                  {"category", "$(category)"},
                  {"price", "$(price)"},
                  {"description", "$(description)"}});
        return b.build();
      }
    }
  } catch (const shop::ShopError& e) {
    return error_card(e.what(), viewer);
  } catch (const RouteError& e) {
    return error_card(e.what(), viewer);
  }
  return error_card("Page not found.", viewer);
}

FormOutcome Storefront::handle_form(const Route& route, const Params& fields, Timestamp now) {
  const auto viewer = identify(*this, session_param(route, fields), now);
  const auto with_token = [&](Route r, const std::string& token) {
    return r.with(std::string(kSessionParam), token);
  };
  const auto keep_session = [&](Route r) {
    return viewer.token ? with_token(std::move(r), *viewer.token) : r.without(kSessionParam);
  };

  try {
    switch (route.page) {
      case Page::login: {
        const auto customer = store_.authenticate(field(fields, "username"), field(fields, "password"));
        const auto s = sessions_.create(session::CustomerPrincipal{customer.username}, now);
        return {"login", with_token(to(Page::menu), s.token), std::nullopt};
      }
      case Page::register_: {
        const auto customer = store_.register_customer(field(fields, "username"), field(fields, "password"),
                                                       field(fields, "surname"), field(fields, "name"),
                                                       field(fields, "address"));
        const auto s = sessions_.create(session::CustomerPrincipal{customer.username}, now);
        return {"register", with_token(to(Page::menu), s.token), std::nullopt};
      }
      case Page::cart_add: {
        const auto id = field(fields, "id").empty() ? (route.param("id") ? *route.param("id") : "")
                                                    : field(fields, "id");
        if (!viewer.customer) return {"login-required", to(Page::cart_add, {{"id", id}}), std::nullopt};
        const auto qty_text = field(fields, "qty");
        const auto qty = qty_text.empty() ? 1 : parse_int(qty_text, "quantity");
        store_.cart_add(*viewer.customer, id, qty);
        return {"cart-add", keep_session(to(Page::cart_add, {{"id", id}})), std::nullopt};
      }
      case Page::cart: {
        if (!viewer.customer) return {"login-required", to(Page::cart), std::nullopt};
        store_.cart_update(*viewer.customer, field(fields, "id"), parse_int(field(fields, "qty"), "quantity"));
        return {"cart-update", keep_session(to(Page::cart)), std::nullopt};
      }
      case Page::order_confirm: {
        if (!viewer.customer) return {"login-required", to(Page::order_confirm), std::nullopt};
        const auto order = store_.place_order(*viewer.customer, field(fields, "payment"));
        return {"order", keep_session(to(Page::order_done, {{"id", order.id}})), std::nullopt};
      }
      case Page::search: {
        const auto q = field(fields, "q");
        store_.search_by_title(q);  // surfaces EmptyQuery
        return {"search", keep_session(to(Page::results, {{"q", q}})), std::nullopt};
      }
      case Page::admin_login: {
        if (!admins_.verify(field(fields, "username"), field(fields, "password"))) throw shop::AuthFailed();
        const auto s = sessions_.create(session::AdminPrincipal{field(fields, "username")}, now);
        return {"admin-login", with_token(to(Page::admin_menu), s.token), std::nullopt};
      }
      case Page::admin_insert: {
        if (!viewer.admin) return {"login-required", to(Page::admin_login), std::nullopt};
        shop::ProductFields pf;
        pf.name = field(fields, "name");
        pf.category = field(fields, "category");
        pf.price_cents = parse_int(field(fields, "price"), "price");
        pf.description = field(fields, "description");
        const auto size = [&](std::string_view key, std::string_view what) -> std::size_t {
          const auto text = field(fields, key);
          if (text.empty()) return 0;
          const auto v = parse_int(text, what);
          if (v < 0) throw shop::ValidationError(std::string(what) + " must not be negative");
          return static_cast<std::size_t>(v);
        };
        pf.thumb_bytes = size("thumb", "thumbnail bytes");
        pf.photo_bytes = size("photo", "photo bytes");
        pf.wap_img_bytes = size("wap", "WAP image bytes");
        const auto product = store_.insert_product(pf);
        return {"insert", keep_session(to(Page::admin_update, {{"id", product.id}})), std::nullopt};
      }
      case Page::admin_update: {
        if (!viewer.admin) return {"login-required", to(Page::admin_login), std::nullopt};
        const auto id = field(fields, "id");
        const auto current = store_.find_product(id);
        if (!current) throw shop::NotFound("no product '" + id + "'");
        const bool editing = !field(fields, "name").empty() || !field(fields, "category").empty() ||
                             !field(fields, "price").empty() || !field(fields, "description").empty();
        if (editing) {
          shop::ProductFields pf;
          pf.name = field(fields, "name").empty() ? current->name : field(fields, "name");
          pf.category = field(fields, "category").empty() ? std::string(shop::to_string(current->category))
                                                          : field(fields, "category");
          pf.price_cents = field(fields, "price").empty() ? current->price.value
                                                          : parse_int(field(fields, "price"), "price");
          pf.description = field(fields, "description").empty() ? current->description : field(fields, "description");
          pf.thumb_bytes = current->thumb_bytes;
          pf.photo_bytes = current->photo_bytes;
          pf.wap_img_bytes = current->wap_img_bytes;
          store_.update_product(id, pf);
        }
        return {editing ? "update" : "select", keep_session(to(Page::admin_update, {{"id", id}})), std::nullopt};
      }
      default:
        return {"error", keep_session(route), "This page has no form."};
    }
  } catch (const shop::ShopError& e) {
    return {"error", keep_session(route), std::string(e.what())};
  }
}

wml::Deck Storefront::submit(const Route& route, const Params& fields, Timestamp now) {
  auto outcome = handle_form(route, fields, now);
  if (outcome.error) {
    const auto viewer = identify(*this, session_param(route, fields), now);
    return error_card(*outcome.error, viewer);
  }
  return render_page(outcome.redirect, now);
}

lint::ImageWeights Storefront::image_weights() const {
  lint::ImageWeights weights{{std::string(kLogoSrc), kLogoBytes}};
  for (const auto& p : store_.products()) {
    if (p.wap_img_bytes > 0) weights[image_src(p)] = p.wap_img_bytes;
  }
  return weights;
}

std::optional<std::size_t> Storefront::image_weight(std::string_view src) const {
  if (src == kLogoSrc) return kLogoBytes;
  for (const auto& p : store_.products()) {
    if (p.wap_img_bytes > 0 && image_src(p) == src) return p.wap_img_bytes;
  }
  return std::nullopt;
}

std::optional<std::size_t> Storefront::html_asset_weight(std::string_view src) const {
  for (const auto& p : store_.products()) {
    if (thumb_src(p) == src) return p.thumb_bytes;
    if (photo_src(p) == src) return p.photo_bytes;
  }
  return std::nullopt;
}

lint::CrawlResult lint_storefront(Storefront& front, const lint::LintPolicy& policy, Timestamp now) {
  const auto fetch_text = [&](const Route& route) {
    // Through the text form, as a remote crawler would see it.
    return wml::parse_deck(wml::serialize_deck(front.render_page(route, now)));
  };
  const auto fetcher = [&](const std::string& url) {
    try {
      return fetch_text(Route::parse(url));
    } catch (const RouteError& e) {
      throw lint::FetchFailed(e.what());
    }
  };
  const auto images = [&](const std::string& src) { return front.image_weight(src); };
  auto result = lint::crawl_site(fetcher, images, "/menu", policy);

  const auto weights = front.image_weights();
  result.report.merge(lint::lint_deck(fetch_text(Route{Page::intro, {}}), policy, weights, "/intro"));
  const auto products = front.store().products();
  const auto choice = Route{Page::cart_add, {{"id", products.empty() ? "none" : products.front().id}}};
  result.report.merge(lint::lint_deck(fetch_text(choice), policy, weights, choice.url()));
  result.report.normalize();
  return result;
}

OriginResponse serve_origin(Storefront& front, const OriginRequest& request, Timestamp now) {
  auto path = std::string_view(request.url);
  if (const auto scheme = path.find("://"); scheme != std::string_view::npos) {
    const auto slash = path.find('/', scheme + 3);
    path = slash == std::string_view::npos ? std::string_view("/") : path.substr(slash);
  }
  const auto bare = path.substr(0, path.find('?'));

  if (request.method == "GET" && bare.rfind("/html/img/", 0) == 0) {
    if (const auto w = front.html_asset_weight(bare)) return {200, "image/jpeg", std::string(*w, '\0')};
    return {404, "text/plain", "no such asset\n"};
  }
  if (request.method == "GET" && bare.rfind("/img/", 0) == 0) {
    if (const auto w = front.image_weight(bare)) return {200, "image/vnd.wap.wbmp", std::string(*w, '\0')};
    return {404, "text/plain", "no such image\n"};
  }
  if (bare.rfind("/html/", 0) == 0) {
    if (request.method != "GET") return {405, "text/plain", "method not allowed\n"};
    try {
      const auto route = Route::parse(path.substr(5));
      return {200, std::string(kHtmlContentType), front.render_html_page(route, now).html};
    } catch (const RouteError& e) {
      return {404, std::string(kHtmlContentType), std::string("<!DOCTYPE html><title>Not found</title><p>") +
                                                       e.what() + "</p>\n"};
    }
  }

  Route route;
  try {
    route = Route::parse(path);
  } catch (const RouteError& e) {
    return {404, "text/plain", std::string(e.what()) + "\n"};
  }
  if (request.method == "GET") {
    return {200, std::string(kWmlContentType), wml::serialize_deck(front.render_page(route, now))};
  }
  if (request.method == "POST") {
    const auto fields = parse_query(request.body);
    return {200, std::string(kWmlContentType), wml::serialize_deck(front.submit(route, fields, now))};
  }
  return {405, "text/plain", "method not allowed\n"};
}

}  // namespace wapshop::storefront
