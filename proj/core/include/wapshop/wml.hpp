// WML document model: decks of cards holding a closed set of node kinds.
#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

namespace wapshop::wml {

enum class DoKind { accept, prev, options };
enum class InputKind { text, password };
enum class Method { get, post };

std::string_view to_string(DoKind kind);
std::string_view to_string(InputKind kind);
std::string_view to_string(Method method);

struct Text {
  std::string text;
  bool operator==(const Text&) const = default;
};

struct Anchor {
  std::string href;
  std::string label;
  bool operator==(const Anchor&) const = default;
};

struct Postfield {
  std::string name;
  std::string value;
  bool operator==(const Postfield&) const = default;
};

/// Softkey action. A missing target means "go back in history".
struct Do {
  DoKind kind = DoKind::accept;
  std::string label;
  std::optional<std::string> target;
  Method method = Method::get;
  std::vector<Postfield> postfields;
  bool operator==(const Do&) const = default;
};

struct Input {
  std::string name;
  InputKind kind = InputKind::text;
  bool operator==(const Input&) const = default;
};

struct Option {
  std::string label;
  std::string value;
  bool operator==(const Option&) const = default;
};

struct Select {
  std::string name;
  std::vector<Option> options;
  bool operator==(const Select&) const = default;
};

struct Table {
  std::vector<std::vector<std::string>> rows;
  bool operator==(const Table&) const = default;
  std::size_t columns() const;
};

struct Image {
  std::string src;
  std::string alt;
  bool operator==(const Image&) const = default;
};

struct Break {
  bool operator==(const Break&) const = default;
};

struct Node;

struct Paragraph {
  std::vector<Node> children;
  bool operator==(const Paragraph&) const;
};

struct Node {
  using Value = std::variant<Text, Paragraph, Anchor, Do, Input, Select, Table, Image, Break>;
  Value value;

  template <typename T>
    requires(!std::is_same_v<std::remove_cvref_t<T>, Node>)
  Node(T v) : value(std::move(v)) {}

  template <typename T>
  bool is() const { return std::holds_alternative<T>(value); }
  template <typename T>
  const T* get_if() const { return std::get_if<T>(&value); }

  bool operator==(const Node&) const = default;
};

inline bool Paragraph::operator==(const Paragraph& other) const { return children == other.children; }

struct Card {
  std::string id;
  std::string title;
  std::vector<Node> content;
  bool operator==(const Card&) const = default;
};

struct Deck {
  std::vector<Card> cards;
  /// Byte length of the text this deck was parsed from; 0 when constructed.
  std::size_t source_bytes = 0;

  /// Structural equality: source_bytes is not part of the structure.
  bool operator==(const Deck& other) const { return cards == other.cards; }

  const Card* find_card(std::string_view id) const;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t position, std::string reason);
  std::size_t position() const { return position_; }
  const std::string& reason() const { return reason_; }

 private:
  std::size_t position_;
  std::string reason_;
};

Deck parse_deck(std::string_view source);

/// Canonical text form: fixed attribute order, no insignificant whitespace.
std::string serialize_deck(const Deck& deck);

enum class ViolationCode {
  NoCards,
  DuplicateCardId,
  InvalidCardId,
  DanglingTarget,
  MissingAlt,
  MissingName,
  NonCanonicalText,
  InvalidCharacter,
  InvalidNesting,  // paragraph in paragraph, or a form Do without a target
};

std::string_view to_string(ViolationCode code);

struct Violation {
  ViolationCode code;
  std::string card_id;
  std::string detail;
  bool operator==(const Violation&) const = default;
};

std::vector<Violation> validate_deck(const Deck& deck);

/// Calls `fn` on every node of the card, depth first, paragraphs before their children.
template <typename Fn>
void walk(const std::vector<Node>& nodes, Fn&& fn) {
  for (const auto& node : nodes) {
    fn(node);
    if (const auto* p = node.get_if<Paragraph>()) walk(p->children, fn);
  }
}

}  // namespace wapshop::wml
