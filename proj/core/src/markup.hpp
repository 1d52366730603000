// Generic element tree shared by the text parser, the serializer and the
// binary codec. The deck model is built from / lowered to this tree, so both
// wire forms enforce exactly the same structure.
#pragma once

#include "wapshop/wml.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace wapshop::detail {

// Values are the binary tag tokens; `text` is a sentinel for character data.
enum class Tag : std::uint8_t {
  text = 0x00,
  wml = 0x05,
  card = 0x06,
  p = 0x07,
  a = 0x08,
  do_ = 0x09,
  go = 0x0A,
  input = 0x0B,
  select = 0x0C,
  option = 0x0D,
  table = 0x0E,
  tr = 0x0F,
  td = 0x10,
  img = 0x11,
  br = 0x12,
  postfield = 0x13,
};

// Values are the binary attribute tokens. Enumerator order is the canonical
// attribute order of the text form.
enum class Attr : std::uint8_t {
  id = 0x85,
  title = 0x86,
  href = 0x87,
  type = 0x88,
  label = 0x89,
  name = 0x8A,
  value = 0x8B,
  src = 0x8C,
  alt = 0x8D,
  method = 0x8E,
  columns = 0x8F,
};

enum class ContentModel { empty, elements, mixed, text };

std::optional<Tag> tag_from_name(std::string_view name);
std::optional<Tag> tag_from_token(std::uint8_t token);
std::string_view tag_name(Tag tag);
ContentModel content_model(Tag tag);

std::optional<Attr> attr_from_name(std::string_view name);
std::optional<Attr> attr_from_token(std::uint8_t token);
std::string_view attr_name(Attr attr);

struct RawElement {
  Tag tag = Tag::text;
  std::string text;  // only for Tag::text
  std::vector<std::pair<Attr, std::string>> attrs;
  std::vector<RawElement> children;
  std::size_t offset = 0;

  const std::string* attr(Attr a) const;
};

/// Raised while building a deck from a raw tree; front ends translate it
/// into their own error type.
struct StructureError : std::runtime_error {
  StructureError(std::size_t offset, std::string reason)
      : std::runtime_error(reason), offset(offset) {}
  std::size_t offset;
};

/// Checks element placement and attribute sets, then builds the deck model.
wml::Deck build_deck(const RawElement& root);

/// Lowers a deck to its canonical raw tree (attributes in canonical order).
RawElement lower_deck(const wml::Deck& deck);

}  // namespace wapshop::detail
