#include "wapshop/wbxml.hpp"

#include "markup.hpp"
#include "utf8.hpp"

namespace wapshop::wbxml {

using detail::Attr;
using detail::RawElement;
using detail::Tag;

namespace {

std::string describe(const std::vector<wml::Violation>& violations) {
  std::string msg = "invalid deck:";
  for (const auto& v : violations) {
    msg += " ";
    msg += wml::to_string(v.code);
    if (!v.card_id.empty()) msg += "[" + v.card_id + "]";
    if (!v.detail.empty()) msg += "(" + v.detail + ")";
  }
  return msg;
}

void put_string(std::vector<std::uint8_t>& out, const std::string& s) {
  out.push_back(kStrI);
  out.insert(out.end(), s.begin(), s.end());
  out.push_back(0x00);
}

void encode(std::vector<std::uint8_t>& out, const RawElement& el) {
  if (el.tag == Tag::text) {
    put_string(out, el.text);
    return;
  }
  auto token = static_cast<std::uint8_t>(el.tag);
  if (!el.children.empty()) token |= kHasContent;
  if (!el.attrs.empty()) token |= kHasAttributes;
  out.push_back(token);
  if (!el.attrs.empty()) {
    for (const auto& [attr, value] : el.attrs) {
      out.push_back(static_cast<std::uint8_t>(attr));
      put_string(out, value);
    }
    out.push_back(kEnd);
  }
  if (!el.children.empty()) {
    for (const auto& child : el.children) encode(out, child);
    out.push_back(kEnd);
  }
}

class Decoder {
 public:
  explicit Decoder(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  RawElement document() {
    if (bytes_.empty()) error(0, "empty stream");
    if (bytes_[0] != kVersion) error(0, "unsupported version");
    pos_ = 1;
    const auto at = pos_;
    const auto token = next("missing document element");
    auto root = element(at, token);
    if (root.tag != Tag::wml) error(at, "document element must be wml");
    if (pos_ != bytes_.size()) error(pos_, "trailing bytes after document");
    return root;
  }

 private:
  [[noreturn]] void error(std::size_t at, std::string reason) { throw CodecError(at, std::move(reason)); }

  std::uint8_t next(const char* what) {
    if (pos_ >= bytes_.size()) error(pos_, std::string("truncated stream: ") + what);
    return bytes_[pos_++];
  }

  std::string string_body(std::size_t at) {
    const auto start = pos_;
    while (pos_ < bytes_.size() && bytes_[pos_] != 0x00) ++pos_;
    if (pos_ >= bytes_.size()) error(at, "truncated stream: unterminated string");
    std::string s(reinterpret_cast<const char*>(bytes_.data() + start), pos_ - start);
    ++pos_;
    if (auto bad = detail::first_invalid_utf8(s)) error(start + *bad, "invalid UTF-8 in string");
    return s;
  }

  RawElement element(std::size_t at, std::uint8_t token) {
    if (++depth_ > kMaxDepth) error(at, "nesting too deep");
    const auto tag = detail::tag_from_token(token & 0x3F);
    if (!tag) error(at, "unknown token");
    RawElement el;
    el.tag = *tag;
    el.offset = at;
    if (token & kHasAttributes) {
      for (;;) {
        const auto attr_at = pos_;
        const auto attr_token = next("inside attribute list");
        if (attr_token == kEnd) break;
        const auto attr = detail::attr_from_token(attr_token);
        if (!attr) error(attr_at, "unknown attribute token");
        const auto str_at = pos_;
        if (next("attribute value") != kStrI) error(str_at, "attribute value must be STR_I");
        el.attrs.emplace_back(*attr, string_body(str_at));
      }
      if (el.attrs.empty()) error(at, "attribute flag set but list empty");
    }
    if (token & kHasContent) {
      for (;;) {
        const auto child_at = pos_;
        const auto child = next("inside element content");
        if (child == kEnd) break;
        if (child == kStrI) {
          RawElement text;
          text.tag = Tag::text;
          text.offset = child_at;
          text.text = string_body(child_at);
          el.children.push_back(std::move(text));
        } else {
          el.children.push_back(element(child_at, child));
        }
      }
      if (el.children.empty()) error(at, "content flag set but content empty");
    }
    --depth_;
    return el;
  }

  static constexpr int kMaxDepth = 16;

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
  int depth_ = 0;
};

}  // namespace

InvalidDeck::InvalidDeck(std::vector<wml::Violation> violations)
    : std::runtime_error(describe(violations)), violations_(std::move(violations)) {}

CodecError::CodecError(std::size_t offset, std::string reason)
    : std::runtime_error("codec error at byte " + std::to_string(offset) + ": " + reason),
      offset_(offset),
      reason_(std::move(reason)) {}

std::vector<std::uint8_t> encode_unchecked(const wml::Deck& deck) {
  std::vector<std::uint8_t> out{kVersion};
  encode(out, detail::lower_deck(deck));
  return out;
}

CompiledDeck compile_deck(const wml::Deck& deck) {
  if (auto violations = wml::validate_deck(deck); !violations.empty()) throw InvalidDeck(std::move(violations));
  return {encode_unchecked(deck), deck.cards.size()};
}

wml::Deck decompile_deck(std::span<const std::uint8_t> bytes) {
  Decoder decoder(bytes);
  const auto root = decoder.document();
  try {
    auto deck = detail::build_deck(root);
    if (auto violations = wml::validate_deck(deck); !violations.empty()) {
      throw CodecError(0, describe(violations));
    }
    return deck;
  } catch (const detail::StructureError& e) {
    throw CodecError(e.offset, e.what());
  }
}

std::size_t compiled_size(const wml::Deck& deck) { return compile_deck(deck).bytes.size(); }

}  // namespace wapshop::wbxml
