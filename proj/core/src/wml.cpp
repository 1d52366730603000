#include "wapshop/wml.hpp"

#include "markup.hpp"
#include "utf8.hpp"

#include <algorithm>
#include <set>

namespace wapshop::wml {

using detail::Attr;
using detail::ContentModel;
using detail::RawElement;
using detail::Tag;

std::string_view to_string(DoKind kind) {
  switch (kind) {
    case DoKind::accept: return "accept";
    case DoKind::prev: return "prev";
    case DoKind::options: return "options";
  }
  return "accept";
}

std::string_view to_string(InputKind kind) {
  return kind == InputKind::password ? "password" : "text";
}

std::string_view to_string(Method method) { return method == Method::post ? "post" : "get"; }

std::size_t Table::columns() const {
  std::size_t n = 0;
  for (const auto& row : rows) n = std::max(n, row.size());
  return n;
}

const Card* Deck::find_card(std::string_view id) const {
  for (const auto& card : cards) {
    if (card.id == id) return &card;
  }
  return nullptr;
}

ParseError::ParseError(std::size_t position, std::string reason)
    : std::runtime_error("parse error at byte " + std::to_string(position) + ": " + reason),
      position_(position),
      reason_(std::move(reason)) {}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

bool all_space(std::string_view s) { return std::all_of(s.begin(), s.end(), is_space); }

bool is_name_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
         c == '_' || c == ':' || c == '.';
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  RawElement parse_document() {
    if (src_.substr(0, 3) == "\xEF\xBB\xBF") error(0, "byte-order mark not allowed");
    if (auto bad = detail::first_invalid_utf8(src_)) error(*bad, "invalid UTF-8");
    if (auto nul = src_.find('\0'); nul != std::string_view::npos) error(nul, "NUL character");

    if (starts_with("<?xml")) skip_past("?>", "unterminated XML declaration");
    skip_misc();
    if (starts_with("<!DOCTYPE")) {
      skip_past(">", "unterminated DOCTYPE");
      skip_misc();
    }
    if (pos_ >= src_.size() || src_[pos_] != '<') error(pos_, "expected <wml> element");
    auto root = parse_element();
    skip_misc();
    if (pos_ != src_.size()) error(pos_, "content after document element");
    return root;
  }

 private:
  [[noreturn]] void error(std::size_t at, std::string reason) { throw ParseError(at, std::move(reason)); }

  bool starts_with(std::string_view s) const { return src_.substr(pos_, s.size()) == s; }

  void skip_past(std::string_view terminator, const char* what) {
    const auto end = src_.find(terminator, pos_);
    if (end == std::string_view::npos) error(pos_, what);
    pos_ = end + terminator.size();
  }

  void skip_space() {
    while (pos_ < src_.size() && is_space(src_[pos_])) ++pos_;
  }

  void skip_misc() {
    for (;;) {
      skip_space();
      if (starts_with("<!--")) {
        skip_past("-->", "unterminated comment");
      } else {
        return;
      }
    }
  }

  std::string_view read_name() {
    const auto start = pos_;
    while (pos_ < src_.size() && is_name_char(src_[pos_])) ++pos_;
    if (pos_ == start) error(start, "expected a name");
    return src_.substr(start, pos_ - start);
  }

  // Decodes the four recognised entities; everything else is an error.
  std::string decode(std::string_view raw, std::size_t base) {
    std::string out;
    out.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] != '&') {
        out.push_back(raw[i]);
        continue;
      }
      const auto semi = raw.find(';', i);
      if (semi == std::string_view::npos) error(base + i, "unterminated entity");
      const auto entity = raw.substr(i, semi - i + 1);
      if (entity == "&amp;") out.push_back('&');
      else if (entity == "&lt;") out.push_back('<');
      else if (entity == "&gt;") out.push_back('>');
      else if (entity == "&quot;") out.push_back('"');
      else error(base + i, "unsupported entity " + std::string(entity));
      i = semi;
    }
    return out;
  }

  RawElement parse_element() {
    if (++depth_ > kMaxDepth) error(pos_, "nesting too deep");
    RawElement el;
    el.offset = pos_;
    ++pos_;  // '<'
    const auto name = read_name();
    const auto tag = detail::tag_from_name(name);
    if (!tag) error(el.offset, "unknown element <" + std::string(name) + ">");
    el.tag = *tag;

    for (;;) {
      const auto before = pos_;
      skip_space();
      if (pos_ >= src_.size()) error(el.offset, "unclosed start tag <" + std::string(name) + ">");
      if (starts_with("/>")) {
        pos_ += 2;
        --depth_;
        return el;
      }
      if (src_[pos_] == '>') {
        ++pos_;
        break;
      }
      if (before == pos_) error(pos_, "expected whitespace before attribute");
      const auto attr_pos = pos_;
      const auto attr_name = read_name();
      const auto attr = detail::attr_from_name(attr_name);
      if (!attr) error(attr_pos, "unknown attribute '" + std::string(attr_name) + "'");
      skip_space();
      if (pos_ >= src_.size() || src_[pos_] != '=') error(pos_, "expected '='");
      ++pos_;
      skip_space();
      if (pos_ >= src_.size() || (src_[pos_] != '"' && src_[pos_] != '\'')) error(pos_, "expected quoted value");
      const char quote = src_[pos_++];
      const auto end = src_.find(quote, pos_);
      if (end == std::string_view::npos) error(attr_pos, "unterminated attribute value");
      const auto raw = src_.substr(pos_, end - pos_);
      if (const auto lt = raw.find('<'); lt != std::string_view::npos) error(pos_ + lt, "'<' in attribute value");
      el.attrs.emplace_back(*attr, decode(raw, pos_));
      pos_ = end + 1;
    }

    const auto model = detail::content_model(el.tag);
    for (;;) {
      if (pos_ >= src_.size()) error(el.offset, "unclosed element <" + std::string(name) + ">");
      if (starts_with("</")) {
        const auto close_pos = pos_;
        pos_ += 2;
        const auto close = read_name();
        if (close != name) {
          error(close_pos, "mismatched </" + std::string(close) + ">, expected </" + std::string(name) + ">");
        }
        skip_space();
        if (pos_ >= src_.size() || src_[pos_] != '>') error(pos_, "expected '>'");
        ++pos_;
        --depth_;
        return el;
      }
      if (starts_with("<!--")) {
        skip_past("-->", "unterminated comment");
        continue;
      }
      if (src_[pos_] == '<') {
        el.children.push_back(parse_element());
        continue;
      }
      const auto start = pos_;
      const auto end = std::min(src_.find('<', pos_), src_.size());
      pos_ = end;
      const auto raw = src_.substr(start, end - start);
      if (model != ContentModel::text && all_space(raw)) continue;
      RawElement text;
      text.tag = Tag::text;
      text.offset = start;
      text.text = decode(raw, start);
      el.children.push_back(std::move(text));
    }
  }

  static constexpr int kMaxDepth = 16;

  std::string_view src_;
  std::size_t pos_ = 0;
  int depth_ = 0;
};

void escape_into(std::string& out, std::string_view s, bool attribute) {
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"':
        if (attribute) out += "&quot;";
        else out.push_back(c);
        break;
      default: out.push_back(c);
    }
  }
}

void write(std::string& out, const RawElement& el) {
  if (el.tag == Tag::text) {
    escape_into(out, el.text, false);
    return;
  }
  const auto name = detail::tag_name(el.tag);
  out.push_back('<');
  out += name;
  for (const auto& [attr, value] : el.attrs) {
    out.push_back(' ');
    out += detail::attr_name(attr);
    out += "=\"";
    escape_into(out, value, true);
    out.push_back('"');
  }
  if (el.children.empty()) {
    out += "/>";
    return;
  }
  out.push_back('>');
  for (const auto& child : el.children) write(out, child);
  out += "</";
  out += name;
  out.push_back('>');
}

bool bad_chars(std::string_view s) {
  return detail::first_invalid_utf8(s).has_value() || s.find('\0') != std::string_view::npos;
}

class Validator {
 public:
  Validator(const Deck& deck, std::vector<Violation>& out) : deck_(deck), out_(out) {}

  void card(const Card& c) {
    card_ = &c;
    if (c.id.empty() || std::any_of(c.id.begin(), c.id.end(), is_space)) {
      add(ViolationCode::InvalidCardId, c.id);
    }
    strings(c.id);
    strings(c.title);
    nodes(c.content);
  }

 private:
  void add(ViolationCode code, std::string detail) { out_.push_back({code, card_->id, std::move(detail)}); }

  void strings(std::string_view s) {
    if (bad_chars(s)) add(ViolationCode::InvalidCharacter, "invalid UTF-8 or NUL");
  }

  void target(const std::string& href) {
    strings(href);
    if (!href.empty() && href.front() == '#') {
      const auto frag = href.substr(1);
      if (!deck_.find_card(frag)) add(ViolationCode::DanglingTarget, frag);
    }
  }

  void nodes(const std::vector<Node>& list) {
    bool prev_text = false;
    for (std::size_t i = 0; i < list.size(); ++i) {
      const auto& node = list[i];
      const bool is_text = node.is<Text>();
      if (is_text && prev_text) add(ViolationCode::NonCanonicalText, "adjacent text nodes");
      prev_text = is_text;
      if (const auto* t = node.get_if<Text>(); t && !t->text.empty()) {
        const auto line_edge = [&](std::size_t j) { return list[j].is<Break>() || list[j].is<Paragraph>(); };
        if (t->text.front() == ' ' && (i == 0 || line_edge(i - 1))) {
          add(ViolationCode::NonCanonicalText, "leading space at line start");
        }
        if (t->text.back() == ' ' && (i + 1 == list.size() || line_edge(i + 1))) {
          add(ViolationCode::NonCanonicalText, "trailing space at line end");
        }
      }
      std::visit([this](const auto& n) { visit(n); }, node.value);
    }
  }

  // Text that the parser would collapse or trim cannot survive a round trip.
  void spacing(std::string_view s, bool trimmed) {
    bool prev_space = false;
    for (const char c : s) {
      if (c == '\t' || c == '\n' || c == '\r' || (c == ' ' && prev_space)) {
        add(ViolationCode::NonCanonicalText, "uncollapsed whitespace");
        return;
      }
      prev_space = c == ' ';
    }
    if (trimmed && !s.empty() && (s.front() == ' ' || s.back() == ' ')) {
      add(ViolationCode::NonCanonicalText, "label has surrounding spaces");
    }
  }

  void visit(const Text& t) {
    strings(t.text);
    spacing(t.text, false);
    if (all_space(t.text)) add(ViolationCode::NonCanonicalText, "empty or whitespace-only text");
  }
  void visit(const Paragraph& p) {
    for (const auto& child : p.children) {
      if (child.is<Paragraph>()) add(ViolationCode::InvalidNesting, "paragraph inside paragraph");
    }
    nodes(p.children);
  }
  void visit(const Anchor& a) {
    target(a.href);
    strings(a.label);
    spacing(a.label, true);
  }
  void visit(const Do& d) {
    strings(d.label);
    if (d.target) target(*d.target);
    if (!d.target && (d.method == Method::post || !d.postfields.empty())) {
      add(ViolationCode::InvalidNesting, "back action cannot carry a form submission");
    }
    for (const auto& pf : d.postfields) {
      if (pf.name.empty()) add(ViolationCode::MissingName, "postfield");
      strings(pf.name);
      strings(pf.value);
    }
  }
  void visit(const Input& in) {
    if (in.name.empty()) add(ViolationCode::MissingName, "input");
    strings(in.name);
  }
  void visit(const Select& sel) {
    if (sel.name.empty()) add(ViolationCode::MissingName, "select");
    strings(sel.name);
    for (const auto& opt : sel.options) {
      strings(opt.label);
      spacing(opt.label, true);
      strings(opt.value);
    }
  }
  void visit(const Table& t) {
    for (const auto& row : t.rows) {
      for (const auto& cell : row) {
        strings(cell);
        spacing(cell, true);
      }
    }
  }
  void visit(const Image& img) {
    strings(img.src);
    strings(img.alt);
    if (all_space(img.alt)) add(ViolationCode::MissingAlt, img.src);
  }
  void visit(const Break&) {}

  const Deck& deck_;
  std::vector<Violation>& out_;
  const Card* card_ = nullptr;
};

std::string collapse_space(std::string_view s) {
  std::string out;
  bool in_space = false;
  for (const char c : s) {
    if (is_space(c)) {
      if (!in_space) out.push_back(' ');
      in_space = true;
    } else {
      out.push_back(c);
      in_space = false;
    }
  }
  return out;
}

bool breaks_line(const RawElement& el) { return el.tag == Tag::br || el.tag == Tag::p; }

void trim_front(std::string& s) {
  if (!s.empty() && s.front() == ' ') s.erase(0, 1);
}

void trim_back(std::string& s) {
  if (!s.empty() && s.back() == ' ') s.pop_back();
}

// Browsers render whitespace runs as one space and ignore it at line starts
// and ends; the parsed model keeps only what is rendered.
void normalize_space(RawElement& el) {
  std::vector<RawElement> merged;
  for (auto& child : el.children) {
    if (child.tag == Tag::text && !merged.empty() && merged.back().tag == Tag::text) {
      merged.back().text += child.text;
    } else {
      merged.push_back(std::move(child));
    }
  }
  for (std::size_t i = 0; i < merged.size(); ++i) {
    auto& child = merged[i];
    if (child.tag != Tag::text) {
      normalize_space(child);
      continue;
    }
    child.text = collapse_space(child.text);
    if (i == 0 || breaks_line(merged[i - 1])) trim_front(child.text);
    if (i + 1 == merged.size() || breaks_line(merged[i + 1])) trim_back(child.text);
  }
  std::erase_if(merged, [](const RawElement& c) { return c.tag == Tag::text && c.text.empty(); });
  el.children = std::move(merged);
}

}  // namespace

Deck parse_deck(std::string_view source) {
  Parser parser(source);
  auto root = parser.parse_document();
  normalize_space(root);
  try {
    auto deck = detail::build_deck(root);
    deck.source_bytes = source.size();
    return deck;
  } catch (const detail::StructureError& e) {
    throw ParseError(e.offset, e.what());
  }
}

std::string serialize_deck(const Deck& deck) {
  std::string out;
  write(out, detail::lower_deck(deck));
  return out;
}

std::string_view to_string(ViolationCode code) {
  switch (code) {
    case ViolationCode::NoCards: return "NoCards";
    case ViolationCode::DuplicateCardId: return "DuplicateCardId";
    case ViolationCode::InvalidCardId: return "InvalidCardId";
    case ViolationCode::DanglingTarget: return "DanglingTarget";
    case ViolationCode::MissingAlt: return "MissingAlt";
    case ViolationCode::MissingName: return "MissingName";
    case ViolationCode::NonCanonicalText: return "NonCanonicalText";
    case ViolationCode::InvalidCharacter: return "InvalidCharacter";
    case ViolationCode::InvalidNesting: return "InvalidNesting";
  }
  return "?";
}

std::vector<Violation> validate_deck(const Deck& deck) {
  std::vector<Violation> out;
  if (deck.cards.empty()) out.push_back({ViolationCode::NoCards, "", "deck has no cards"});
  std::set<std::string> seen;
  std::set<std::string> reported;
  for (const auto& card : deck.cards) {
    if (!seen.insert(card.id).second && reported.insert(card.id).second) {
      out.push_back({ViolationCode::DuplicateCardId, card.id, card.id});
    }
  }
  for (const auto& card : deck.cards) Validator(deck, out).card(card);
  return out;
}

}  // namespace wapshop::wml
