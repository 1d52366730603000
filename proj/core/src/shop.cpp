#include "wapshop/shop.hpp"

#include <sodium.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <mutex>
#include <json.hpp>
#include <sstream>

namespace wapshop::shop {

using nlohmann::json;

namespace {

// Argon2id cost: cheap enough for an interactive shop on modest hardware.
constexpr unsigned long long kPwhashOps = 2;
constexpr std::size_t kPwhashMem = 8u << 20;

void ensure_sodium() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (sodium_init() < 0) throw std::runtime_error("libsodium initialisation failed");
  });
}

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool valid_identifier(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '-' || c == '_';
  });
}

bool by_name(const Product& a, const Product& b) {
  if (a.name != b.name) return a.name < b.name;
  return a.id < b.id;
}

json product_to_json(const Product& p) {
  return {{"id", p.id},
          {"name", p.name},
          {"category", to_string(p.category)},
          {"price", p.price.value},
          {"description", p.description},
          {"thumb_bytes", p.thumb_bytes},
          {"photo_bytes", p.photo_bytes},
          {"wap_img_bytes", p.wap_img_bytes},
          {"inserted_seq", p.inserted_seq}};
}

}  // namespace

Timestamp system_now() {
  return std::chrono::time_point_cast<std::chrono::milliseconds>(std::chrono::system_clock::now());
}

std::string format_euros(Cents amount) {
  const auto v = amount.value;
  const auto abs = v < 0 ? -v : v;
  std::ostringstream out;
  if (v < 0) out << '-';
  out << abs / 100 << '.' << (abs % 100 < 10 ? "0" : "") << abs % 100;
  return out.str();
}

std::string_view to_string(Category c) {
  switch (c) {
    case Category::books: return "books";
    case Category::posters: return "posters";
    case Category::souvenirs: return "souvenirs";
    case Category::cards: return "cards";
  }
  return "books";
}

std::optional<Category> parse_category(std::string_view text) {
  for (auto c : kCategories) {
    if (to_string(c) == text) return c;
  }
  return std::nullopt;
}

std::string_view to_string(Payment p) { return p == Payment::courier ? "courier" : "snail_mail"; }

std::optional<Payment> parse_payment(std::string_view text) {
  if (text == "snail_mail") return Payment::snail_mail;
  if (text == "courier") return Payment::courier;
  return std::nullopt;
}

std::string digest_password(std::string_view password) {
  ensure_sodium();
  char out[crypto_pwhash_STRBYTES];
  if (crypto_pwhash_str(out, password.data(), password.size(), kPwhashOps, kPwhashMem) != 0) {
    throw std::runtime_error("password digest failed (out of memory)");
  }
  return out;
}

bool verify_password(std::string_view credential, std::string_view password) {
  ensure_sodium();
  const std::string stored(credential);
  return crypto_pwhash_str_verify(stored.c_str(), password.data(), password.size()) == 0;
}

std::int64_t Cart::quantity_of(std::string_view product_id) const {
  for (const auto& line : lines) {
    if (line.product_id == product_id) return line.quantity;
  }
  return 0;
}

Store::Store() : clock_(system_now) {}

Store::Store(Store&& other) noexcept
    : state_(std::move(other.state_)), path_(std::move(other.path_)), clock_(std::move(other.clock_)) {}

Store& Store::operator=(Store&& other) noexcept {
  if (this != &other) {
    std::unique_lock lock(mutex_);
    state_ = std::move(other.state_);
    path_ = std::move(other.path_);
    clock_ = std::move(other.clock_);
  }
  return *this;
}

Store Store::open(const std::filesystem::path& path) {
  Store store;
  if (std::filesystem::exists(path)) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StoreIoError("cannot read store " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    store.state_ = parse_state(buffer.str());
  }
  store.path_ = path;
  return store;
}

Store Store::from_fixture(const std::filesystem::path& fixture) {
  std::ifstream in(fixture, std::ios::binary);
  if (!in) throw StoreIoError("cannot read fixture " + fixture.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json(buffer.str());
}

Store Store::from_json(std::string_view json_text) {
  Store store;
  store.state_ = parse_state(json_text);
  return store;
}

void Store::set_clock(Clock clock) {
  std::unique_lock lock(mutex_);
  clock_ = std::move(clock);
}

void Store::bind(const std::filesystem::path& path) {
  std::unique_lock lock(mutex_);
  path_ = path;
  persist_locked();
}

Store::State Store::parse_state(std::string_view json_text) {
  State state;
  try {
    const auto doc = json::parse(json_text);
    for (const auto& p : doc.value("products", json::array())) {
      Product product;
      product.id = p.at("id").get<std::string>();
      product.name = p.at("name").get<std::string>();
      const auto category = parse_category(p.at("category").get<std::string>());
      if (!category) throw ValidationError("bad category for product " + product.id);
      product.category = *category;
      product.price = {p.at("price").get<std::int64_t>()};
      product.description = p.value("description", "");
      product.thumb_bytes = p.value("thumb_bytes", std::size_t{0});
      product.photo_bytes = p.value("photo_bytes", std::size_t{0});
      product.wap_img_bytes = p.value("wap_img_bytes", std::size_t{0});
      product.inserted_seq = p.at("inserted_seq").get<std::uint64_t>();
      state.products.push_back(std::move(product));
    }
    for (const auto& c : doc.value("customers", json::array())) {
      state.customers.push_back({c.at("username").get<std::string>(), c.at("credential").get<std::string>(),
                                 c.value("surname", ""), c.value("name", ""), c.value("address", "")});
    }
    for (const auto& c : doc.value("carts", json::array())) {
      Cart cart{c.at("customer").get<std::string>(), {}};
      for (const auto& l : c.value("lines", json::array())) {
        cart.lines.push_back({l.at("product").get<std::string>(), l.at("quantity").get<std::int64_t>()});
      }
      state.carts.push_back(std::move(cart));
    }
    for (const auto& o : doc.value("orders", json::array())) {
      Order order;
      order.id = o.at("id").get<std::string>();
      order.customer = o.at("customer").get<std::string>();
      for (const auto& l : o.at("lines")) {
        order.lines.push_back({l.at("product").get<std::string>(), l.at("name").get<std::string>(),
                               {l.at("unit_price").get<std::int64_t>()}, l.at("quantity").get<std::int64_t>()});
      }
      const auto payment = parse_payment(o.at("payment").get<std::string>());
      if (!payment) throw ValidationError("bad payment for order " + order.id);
      order.payment = *payment;
      order.total = {o.at("total").get<std::int64_t>()};
      order.placed_at = Timestamp(std::chrono::milliseconds(o.at("placed_at").get<std::int64_t>()));
      state.orders.push_back(std::move(order));
    }
    std::uint64_t max_seq = 0;
    for (const auto& p : state.products) max_seq = std::max(max_seq, p.inserted_seq);
    state.next_seq = std::max(doc.value("next_seq", std::uint64_t{1}), max_seq + 1);
  } catch (const json::exception& e) {
    throw StoreIoError(std::string("malformed store document: ") + e.what());
  }
  return state;
}

std::string Store::to_json() const {
  std::shared_lock lock(mutex_);
  return to_json_locked();
}

std::string Store::to_json_locked() const {
  json doc;
  doc["products"] = json::array();
  for (const auto& p : state_.products) doc["products"].push_back(product_to_json(p));
  doc["customers"] = json::array();
  for (const auto& c : state_.customers) {
    doc["customers"].push_back({{"username", c.username},
                                {"credential", c.credential},
                                {"surname", c.surname},
                                {"name", c.name},
                                {"address", c.address}});
  }
  doc["carts"] = json::array();
  for (const auto& cart : state_.carts) {
    json lines = json::array();
    for (const auto& l : cart.lines) lines.push_back({{"product", l.product_id}, {"quantity", l.quantity}});
    doc["carts"].push_back({{"customer", cart.customer}, {"lines", lines}});
  }
  doc["orders"] = json::array();
  for (const auto& o : state_.orders) {
    json lines = json::array();
    for (const auto& l : o.lines) {
      lines.push_back({{"product", l.product_id},
                       {"name", l.name},
                       {"unit_price", l.unit_price.value},
                       {"quantity", l.quantity}});
    }
    doc["orders"].push_back({{"id", o.id},
                             {"customer", o.customer},
                             {"lines", lines},
                             {"payment", to_string(o.payment)},
                             {"total", o.total.value},
                             {"placed_at", o.placed_at.time_since_epoch().count()}});
  }
  doc["next_seq"] = state_.next_seq;
  return doc.dump(2) + "\n";
}

void Store::save() const {
  std::shared_lock lock(mutex_);
  persist_locked();
}

void Store::persist_locked() const {
  if (!path_) return;
  auto tmp = *path_;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw StoreIoError("cannot write " + tmp.string());
    out << to_json_locked();
    out.flush();
    if (!out) throw StoreIoError("short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, *path_, ec);
  if (ec) throw StoreIoError("cannot replace " + path_->string() + ": " + ec.message());
}

Product Store::validated(const ProductFields& fields) const {
  Product p;
  if (trim(fields.name).empty()) throw ValidationError("product name is required");
  const auto category = parse_category(fields.category);
  if (!category) {
    throw ValidationError("unknown category '" + fields.category + "' (books, posters, souvenirs or cards)");
  }
  if (fields.price_cents <= 0) throw ValidationError("price must be positive");
  if (fields.thumb_bytes > kMaxThumbBytes) throw ValidationError("thumbnail exceeds 12000 bytes");
  if (fields.photo_bytes > kMaxPhotoBytes) throw ValidationError("photo exceeds 300000 bytes");
  if (fields.wap_img_bytes > kMaxWapImageBytes) throw ValidationError("WAP image exceeds 1000 bytes");
  p.name = std::string(trim(fields.name));
  p.category = *category;
  p.price = {fields.price_cents};
  p.description = fields.description;
  p.thumb_bytes = fields.thumb_bytes;
  p.photo_bytes = fields.photo_bytes;
  p.wap_img_bytes = fields.wap_img_bytes;
  return p;
}

Product Store::insert_product(const ProductFields& fields) {
  std::unique_lock lock(mutex_);
  auto product = validated(fields);
  if (fields.id) {
    if (!valid_identifier(*fields.id)) throw ValidationError("invalid product id '" + *fields.id + "'");
    product.id = *fields.id;
  } else {
    product.id = "p" + std::to_string(state_.next_seq);
  }
  for (const auto& p : state_.products) {
    if (p.id == product.id) throw ValidationError("duplicate product id '" + product.id + "'");
  }
  product.inserted_seq = state_.next_seq++;
  state_.products.push_back(product);
  persist_locked();
  return product;
}

Product Store::update_product(std::string_view id, const ProductFields& fields) {
  std::unique_lock lock(mutex_);
  auto it = std::find_if(state_.products.begin(), state_.products.end(),
                         [&](const Product& p) { return p.id == id; });
  if (it == state_.products.end()) throw NotFound("no product '" + std::string(id) + "'");
  auto updated = validated(fields);
  updated.id = it->id;
  updated.inserted_seq = it->inserted_seq;
  *it = updated;
  persist_locked();
  return updated;
}

std::optional<Product> Store::find_product(std::string_view id) const {
  std::shared_lock lock(mutex_);
  for (const auto& p : state_.products) {
    if (p.id == id) return p;
  }
  return std::nullopt;
}

std::vector<Product> Store::products() const {
  std::shared_lock lock(mutex_);
  return state_.products;
}

std::vector<Product> Store::list_by_category(Category category) const {
  std::shared_lock lock(mutex_);
  std::vector<Product> out;
  std::copy_if(state_.products.begin(), state_.products.end(), std::back_inserter(out),
               [&](const Product& p) { return p.category == category; });
  std::sort(out.begin(), out.end(), by_name);
  return out;
}

std::vector<Product> Store::last_five() const {
  std::shared_lock lock(mutex_);
  std::vector<Product> out = state_.products;
  std::sort(out.begin(), out.end(),
            [](const Product& a, const Product& b) { return a.inserted_seq > b.inserted_seq; });
  if (out.size() > 5) out.resize(5);
  return out;
}

std::vector<Product> Store::search_by_title(std::string_view keyword) const {
  const auto needle = lower_ascii(trim(keyword));
  if (needle.empty()) throw EmptyQuery();
  std::shared_lock lock(mutex_);
  std::vector<Product> out;
  for (const auto& p : state_.products) {
    if (lower_ascii(p.name).find(needle) != std::string::npos) out.push_back(p);
  }
  std::sort(out.begin(), out.end(), by_name);
  return out;
}

Customer Store::register_customer(std::string_view username, std::string_view password, std::string_view surname,
                                  std::string_view name, std::string_view address) {
  const auto user = trim(username);
  if (!valid_identifier(user)) throw ValidationError("username must be letters, digits, '-' or '_'");
  if (password.empty()) throw ValidationError("password is required");
  {
    std::shared_lock lock(mutex_);
    for (const auto& c : state_.customers) {
      if (c.username == user) throw UsernameTaken("username '" + std::string(user) + "' is taken");
    }
  }
  Customer customer{std::string(user), digest_password(password), std::string(trim(surname)),
                    std::string(trim(name)), std::string(trim(address))};
  std::unique_lock lock(mutex_);
  for (const auto& c : state_.customers) {
    if (c.username == user) throw UsernameTaken("username '" + std::string(user) + "' is taken");
  }
  state_.customers.push_back(customer);
  persist_locked();
  return customer;
}

Customer Store::authenticate(std::string_view username, std::string_view password) const {
  // Unknown users still pay for one verification so both failures look alike.
  static const std::string decoy = digest_password("decoy-password");
  if (auto customer = find_customer(username)) {
    if (verify_password(customer->credential, password)) return *customer;
    throw AuthFailed();
  }
  verify_password(decoy, password);
  throw AuthFailed();
}

std::optional<Customer> Store::find_customer(std::string_view username) const {
  std::shared_lock lock(mutex_);
  for (const auto& c : state_.customers) {
    if (c.username == username) return c;
  }
  return std::nullopt;
}

const Customer& Store::require_customer(std::string_view username) const {
  for (const auto& c : state_.customers) {
    if (c.username == username) return c;
  }
  throw NotFound("no customer '" + std::string(username) + "'");
}

Cart& Store::cart_locked(std::string_view username) {
  require_customer(username);
  for (auto& cart : state_.carts) {
    if (cart.customer == username) return cart;
  }
  state_.carts.push_back({std::string(username), {}});
  return state_.carts.back();
}

Cart Store::cart(std::string_view username) const {
  std::shared_lock lock(mutex_);
  for (const auto& cart : state_.carts) {
    if (cart.customer == username) return cart;
  }
  return {std::string(username), {}};
}

Cart Store::cart_add(std::string_view username, std::string_view product_id, std::int64_t qty) {
  std::unique_lock lock(mutex_);
  if (qty < 1) throw ValidationError("quantity must be at least 1");
  const bool exists = std::any_of(state_.products.begin(), state_.products.end(),
                                  [&](const Product& p) { return p.id == product_id; });
  if (!exists) throw NotFound("no product '" + std::string(product_id) + "'");
  auto& cart = cart_locked(username);
  auto line = std::find_if(cart.lines.begin(), cart.lines.end(),
                           [&](const CartLine& l) { return l.product_id == product_id; });
  if (line == cart.lines.end()) cart.lines.push_back({std::string(product_id), qty});
  else line->quantity += qty;
  persist_locked();
  return cart;
}

Cart Store::cart_update(std::string_view username, std::string_view product_id, std::int64_t qty) {
  std::unique_lock lock(mutex_);
  if (qty < 0) throw ValidationError("quantity must not be negative");
  const bool exists = std::any_of(state_.products.begin(), state_.products.end(),
                                  [&](const Product& p) { return p.id == product_id; });
  if (!exists) throw NotFound("no product '" + std::string(product_id) + "'");
  auto& cart = cart_locked(username);
  auto line = std::find_if(cart.lines.begin(), cart.lines.end(),
                           [&](const CartLine& l) { return l.product_id == product_id; });
  if (qty == 0) {
    if (line != cart.lines.end()) cart.lines.erase(line);
  } else if (line == cart.lines.end()) {
    cart.lines.push_back({std::string(product_id), qty});
  } else {
    line->quantity = qty;
  }
  persist_locked();
  return cart;
}

Order Store::place_order(std::string_view username, std::string_view payment) {
  std::unique_lock lock(mutex_);
  auto& cart = cart_locked(username);
  if (cart.lines.empty()) throw EmptyCart();
  const auto method = parse_payment(payment);
  if (!method) throw ValidationError("payment must be snail_mail or courier");
  Order order;
  order.id = "o" + std::to_string(state_.orders.size() + 1);
  order.customer = std::string(username);
  order.payment = *method;
  for (const auto& line : cart.lines) {
    auto product = std::find_if(state_.products.begin(), state_.products.end(),
                                [&](const Product& p) { return p.id == line.product_id; });
    if (product == state_.products.end()) throw NotFound("no product '" + line.product_id + "'");
    order.lines.push_back({product->id, product->name, product->price, line.quantity});
    order.total += product->price * line.quantity;
  }
  order.placed_at = clock_();
  state_.orders.push_back(order);
  cart.lines.clear();
  persist_locked();
  return order;
}

std::vector<Order> Store::list_orders(std::string_view username) const {
  std::shared_lock lock(mutex_);
  std::vector<Order> out;
  for (auto it = state_.orders.rbegin(); it != state_.orders.rend(); ++it) {
    if (it->customer == username) out.push_back(*it);
  }
  return out;
}

std::optional<Order> Store::find_order(std::string_view id) const {
  std::shared_lock lock(mutex_);
  for (const auto& o : state_.orders) {
    if (o.id == id) return o;
  }
  return std::nullopt;
}

}  // namespace wapshop::shop
