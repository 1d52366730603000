// Commerce state: catalog, customers, carts and orders, persisted as a single
// JSON document that is rewritten atomically after every mutation.
#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wapshop::shop {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;
using Clock = std::function<Timestamp()>;

Timestamp system_now();

/// Money in euro cents. Integral on purpose: no fractional cents exist.
struct Cents {
  std::int64_t value = 0;

  auto operator<=>(const Cents&) const = default;
  Cents operator+(Cents other) const { return {value + other.value}; }
  Cents& operator+=(Cents other) {
    value += other.value;
    return *this;
  }
  Cents operator*(std::int64_t n) const { return {value * n}; }
};

/// "12.50" style rendering.
std::string format_euros(Cents amount);

enum class Category { books, posters, souvenirs, cards };
inline constexpr Category kCategories[] = {Category::books, Category::posters, Category::souvenirs,
                                           Category::cards};

std::string_view to_string(Category c);
std::optional<Category> parse_category(std::string_view text);

enum class Payment { snail_mail, courier };

std::string_view to_string(Payment p);
std::optional<Payment> parse_payment(std::string_view text);

inline constexpr std::size_t kMaxThumbBytes = 12000;
inline constexpr std::size_t kMaxPhotoBytes = 300000;
inline constexpr std::size_t kMaxWapImageBytes = 1000;

struct Product {
  std::string id;
  std::string name;
  Category category = Category::books;
  Cents price;
  std::string description;
  std::size_t thumb_bytes = 0;
  std::size_t photo_bytes = 0;
  std::size_t wap_img_bytes = 0;
  std::uint64_t inserted_seq = 0;

  bool operator==(const Product&) const = default;
};

/// Product fields as submitted by an administrator. Category is kept as text
/// so that an invalid value reaches validation rather than the type system.
struct ProductFields {
  std::optional<std::string> id;
  std::string name;
  std::string category;
  std::int64_t price_cents = 0;
  std::string description;
  std::size_t thumb_bytes = 0;
  std::size_t photo_bytes = 0;
  std::size_t wap_img_bytes = 0;
};

struct Customer {
  std::string username;
  std::string credential;  // one-way digest, never the password
  std::string surname;
  std::string name;
  std::string address;

  bool operator==(const Customer&) const = default;
};

struct CartLine {
  std::string product_id;
  std::int64_t quantity = 0;
  bool operator==(const CartLine&) const = default;
};

struct Cart {
  std::string customer;
  std::vector<CartLine> lines;

  std::int64_t quantity_of(std::string_view product_id) const;
  bool operator==(const Cart&) const = default;
};

struct OrderLine {
  std::string product_id;
  std::string name;
  Cents unit_price;
  std::int64_t quantity = 0;
  bool operator==(const OrderLine&) const = default;
};

struct Order {
  std::string id;
  std::string customer;
  std::vector<OrderLine> lines;
  Payment payment = Payment::snail_mail;
  Cents total;
  Timestamp placed_at;

  bool operator==(const Order&) const = default;
};

class ShopError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class ValidationError : public ShopError {
 public:
  using ShopError::ShopError;
};
class NotFound : public ShopError {
 public:
  using ShopError::ShopError;
};
class UsernameTaken : public ShopError {
 public:
  using ShopError::ShopError;
};
class AuthFailed : public ShopError {
 public:
  AuthFailed() : ShopError("invalid username or password") {}
};
class EmptyCart : public ShopError {
 public:
  EmptyCart() : ShopError("cart is empty") {}
};
class EmptyQuery : public ShopError {
 public:
  EmptyQuery() : ShopError("search keyword is empty") {}
};
class StoreIoError : public ShopError {
 public:
  using ShopError::ShopError;
};

/// Salted one-way password digest (Argon2id via libsodium).
std::string digest_password(std::string_view password);
bool verify_password(std::string_view credential, std::string_view password);

/// Single-writer store: mutations take an exclusive lock, reads a shared one.
/// When backed by a file, every mutation is written through atomically.
class Store {
 public:
  /// Empty, not persisted.
  Store();
  /// Loads `path` if it exists, otherwise starts empty; writes go to `path`.
  static Store open(const std::filesystem::path& path);
  /// Loads a fixture (same schema as a store file) without binding a path.
  static Store from_fixture(const std::filesystem::path& fixture);
  static Store from_json(std::string_view json_text);

  Store(Store&& other) noexcept;
  Store& operator=(Store&& other) noexcept;

  void set_clock(Clock clock);
  /// Binds a file path for write-through persistence and writes immediately.
  void bind(const std::filesystem::path& path);
  const std::optional<std::filesystem::path>& path() const { return path_; }

  std::string to_json() const;
  void save() const;

  // Catalog.
  Product insert_product(const ProductFields& fields);
  Product update_product(std::string_view id, const ProductFields& fields);
  std::optional<Product> find_product(std::string_view id) const;
  std::vector<Product> products() const;  // insertion order
  std::vector<Product> list_by_category(Category category) const;
  std::vector<Product> last_five() const;
  std::vector<Product> search_by_title(std::string_view keyword) const;

  // Customers.
  Customer register_customer(std::string_view username, std::string_view password, std::string_view surname,
                             std::string_view name, std::string_view address);
  Customer authenticate(std::string_view username, std::string_view password) const;
  std::optional<Customer> find_customer(std::string_view username) const;

  // Cart and orders.
  Cart cart(std::string_view username) const;
  Cart cart_add(std::string_view username, std::string_view product_id, std::int64_t qty);
  Cart cart_update(std::string_view username, std::string_view product_id, std::int64_t qty);
  Order place_order(std::string_view username, std::string_view payment);
  std::vector<Order> list_orders(std::string_view username) const;
  std::optional<Order> find_order(std::string_view id) const;

 private:
  struct State {
    std::vector<Product> products;
    std::vector<Customer> customers;
    std::vector<Cart> carts;
    std::vector<Order> orders;
    std::uint64_t next_seq = 1;
  };

  static State parse_state(std::string_view json_text);
  std::string to_json_locked() const;
  void persist_locked() const;
  Product validated(const ProductFields& fields) const;
  const Customer& require_customer(std::string_view username) const;
  Cart& cart_locked(std::string_view username);

  State state_;
  std::optional<std::filesystem::path> path_;
  Clock clock_;
  mutable std::shared_mutex mutex_;
};

}  // namespace wapshop::shop
