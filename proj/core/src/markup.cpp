#include "markup.hpp"

#include <algorithm>
#include <array>
#include <charconv>

namespace wapshop::detail {

namespace {

struct TagInfo {
  Tag tag;
  std::string_view name;
  ContentModel model;
};

constexpr std::array<TagInfo, 15> kTags{{
    {Tag::wml, "wml", ContentModel::elements},
    {Tag::card, "card", ContentModel::mixed},
    {Tag::p, "p", ContentModel::mixed},
    {Tag::a, "a", ContentModel::text},
    {Tag::do_, "do", ContentModel::elements},
    {Tag::go, "go", ContentModel::elements},
    {Tag::input, "input", ContentModel::empty},
    {Tag::select, "select", ContentModel::elements},
    {Tag::option, "option", ContentModel::text},
    {Tag::table, "table", ContentModel::elements},
    {Tag::tr, "tr", ContentModel::elements},
    {Tag::td, "td", ContentModel::text},
    {Tag::img, "img", ContentModel::empty},
    {Tag::br, "br", ContentModel::empty},
    {Tag::postfield, "postfield", ContentModel::empty},
}};

constexpr std::array<std::pair<Attr, std::string_view>, 11> kAttrs{{
    {Attr::id, "id"},
    {Attr::title, "title"},
    {Attr::href, "href"},
    {Attr::type, "type"},
    {Attr::label, "label"},
    {Attr::name, "name"},
    {Attr::value, "value"},
    {Attr::src, "src"},
    {Attr::alt, "alt"},
    {Attr::method, "method"},
    {Attr::columns, "columns"},
}};

bool attr_allowed(Tag tag, Attr attr) {
  switch (tag) {
    case Tag::card: return attr == Attr::id || attr == Attr::title;
    case Tag::a: return attr == Attr::href;
    case Tag::do_: return attr == Attr::type || attr == Attr::label;
    case Tag::go: return attr == Attr::href || attr == Attr::method;
    case Tag::input: return attr == Attr::name || attr == Attr::type;
    case Tag::select: return attr == Attr::name;
    case Tag::option: return attr == Attr::value;
    case Tag::table: return attr == Attr::columns;
    case Tag::img: return attr == Attr::src || attr == Attr::alt;
    case Tag::postfield: return attr == Attr::name || attr == Attr::value;
    default: return false;
  }
}

bool child_allowed(Tag parent, Tag child) {
  switch (parent) {
    case Tag::wml: return child == Tag::card;
    case Tag::card:
    case Tag::p:
      switch (child) {
        case Tag::text:
        case Tag::a:
        case Tag::do_:
        case Tag::input:
        case Tag::select:
        case Tag::table:
        case Tag::img:
        case Tag::br:
          return true;
        case Tag::p:
          return parent == Tag::card;
        default:
          return false;
      }
    case Tag::a:
    case Tag::option:
    case Tag::td:
      return child == Tag::text;
    case Tag::do_: return child == Tag::go;
    case Tag::go: return child == Tag::postfield;
    case Tag::select: return child == Tag::option;
    case Tag::table: return child == Tag::tr;
    case Tag::tr: return child == Tag::td;
    default: return false;
  }
}

[[noreturn]] void fail(const RawElement& el, std::string reason) {
  throw StructureError(el.offset, std::move(reason));
}

const std::string& require(const RawElement& el, Attr a) {
  if (const auto* v = el.attr(a)) return *v;
  fail(el, "<" + std::string(tag_name(el.tag)) + "> requires attribute '" +
               std::string(attr_name(a)) + "'");
}

std::string optional_attr(const RawElement& el, Attr a) {
  const auto* v = el.attr(a);
  return v ? *v : std::string{};
}

void check_element(const RawElement& el) {
  for (std::size_t i = 0; i < el.attrs.size(); ++i) {
    const Attr a = el.attrs[i].first;
    if (!attr_allowed(el.tag, a)) {
      fail(el, "attribute '" + std::string(attr_name(a)) + "' not allowed on <" +
                   std::string(tag_name(el.tag)) + ">");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (el.attrs[j].first == a) fail(el, "duplicate attribute '" + std::string(attr_name(a)) + "'");
    }
  }
  for (const auto& child : el.children) {
    if (!child_allowed(el.tag, child.tag)) {
      const std::string what =
          child.tag == Tag::text ? std::string("text") : "<" + std::string(tag_name(child.tag)) + ">";
      throw StructureError(child.offset,
                           what + " not allowed inside <" + std::string(tag_name(el.tag)) + ">");
    }
  }
}

std::string text_content(const RawElement& el) {
  std::string out;
  for (const auto& child : el.children) out += child.text;
  return out;
}

wml::Node build_node(const RawElement& el);

std::vector<wml::Node> build_nodes(const RawElement& parent) {
  std::vector<wml::Node> nodes;
  nodes.reserve(parent.children.size());
  for (const auto& child : parent.children) nodes.push_back(build_node(child));
  return nodes;
}

wml::Node build_node(const RawElement& el) {
  check_element(el);
  switch (el.tag) {
    case Tag::text:
      return wml::Text{el.text};
    case Tag::p:
      return wml::Paragraph{build_nodes(el)};
    case Tag::a:
      return wml::Anchor{require(el, Attr::href), text_content(el)};
    case Tag::do_: {
      wml::Do d;
      const auto& type = require(el, Attr::type);
      if (type == "accept") d.kind = wml::DoKind::accept;
      else if (type == "prev") d.kind = wml::DoKind::prev;
      else if (type == "options") d.kind = wml::DoKind::options;
      else fail(el, "unknown do type '" + type + "'");
      d.label = optional_attr(el, Attr::label);
      if (el.children.size() > 1) fail(el, "<do> holds at most one <go>");
      if (!el.children.empty()) {
        const auto& go = el.children.front();
        check_element(go);
        d.target = require(go, Attr::href);
        const auto method = optional_attr(go, Attr::method);
        if (method.empty() || method == "get") d.method = wml::Method::get;
        else if (method == "post") d.method = wml::Method::post;
        else fail(go, "unknown method '" + method + "'");
        for (const auto& pf : go.children) {
          check_element(pf);
          d.postfields.push_back({require(pf, Attr::name), optional_attr(pf, Attr::value)});
        }
      }
      return d;
    }
    case Tag::input: {
      wml::Input in;
      in.name = require(el, Attr::name);
      const auto type = optional_attr(el, Attr::type);
      if (type.empty() || type == "text") in.kind = wml::InputKind::text;
      else if (type == "password") in.kind = wml::InputKind::password;
      else fail(el, "unknown input type '" + type + "'");
      return in;
    }
    case Tag::select: {
      wml::Select sel;
      sel.name = require(el, Attr::name);
      for (const auto& opt : el.children) {
        check_element(opt);
        sel.options.push_back({text_content(opt), optional_attr(opt, Attr::value)});
      }
      return sel;
    }
    case Tag::table: {
      wml::Table table;
      if (const auto* cols = el.attr(Attr::columns)) {
        int n = 0;
        const auto* end = cols->data() + cols->size();
        auto [ptr, ec] = std::from_chars(cols->data(), end, n);
        if (ec != std::errc{} || ptr != end || n <= 0) fail(el, "columns must be a positive integer");
      }
      for (const auto& tr : el.children) {
        check_element(tr);
        std::vector<std::string> row;
        for (const auto& td : tr.children) {
          check_element(td);
          row.push_back(text_content(td));
        }
        table.rows.push_back(std::move(row));
      }
      return table;
    }
    case Tag::img:
      return wml::Image{require(el, Attr::src), optional_attr(el, Attr::alt)};
    case Tag::br:
      return wml::Break{};
    default:
      fail(el, "<" + std::string(tag_name(el.tag)) + "> not allowed here");
  }
}

RawElement element(Tag tag) {
  RawElement el;
  el.tag = tag;
  return el;
}

RawElement text_element(std::string text) {
  RawElement el;
  el.tag = Tag::text;
  el.text = std::move(text);
  return el;
}

void add_text_child(RawElement& el, const std::string& text) {
  if (!text.empty()) el.children.push_back(text_element(text));
}

RawElement lower_node(const wml::Node& node);

void lower_nodes(RawElement& parent, const std::vector<wml::Node>& nodes) {
  for (const auto& node : nodes) parent.children.push_back(lower_node(node));
}

RawElement lower_node(const wml::Node& node) {
  return std::visit(
      [](const auto& n) -> RawElement {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, wml::Text>) {
          return text_element(n.text);
        } else if constexpr (std::is_same_v<T, wml::Paragraph>) {
          auto el = element(Tag::p);
          lower_nodes(el, n.children);
          return el;
        } else if constexpr (std::is_same_v<T, wml::Anchor>) {
          auto el = element(Tag::a);
          el.attrs.emplace_back(Attr::href, n.href);
          add_text_child(el, n.label);
          return el;
        } else if constexpr (std::is_same_v<T, wml::Do>) {
          auto el = element(Tag::do_);
          el.attrs.emplace_back(Attr::type, std::string(wml::to_string(n.kind)));
          if (!n.label.empty()) el.attrs.emplace_back(Attr::label, n.label);
          if (n.target) {
            auto go = element(Tag::go);
            go.attrs.emplace_back(Attr::href, *n.target);
            if (n.method == wml::Method::post) go.attrs.emplace_back(Attr::method, "post");
            for (const auto& pf : n.postfields) {
              auto field = element(Tag::postfield);
              field.attrs.emplace_back(Attr::name, pf.name);
              field.attrs.emplace_back(Attr::value, pf.value);
              go.children.push_back(std::move(field));
            }
            el.children.push_back(std::move(go));
          }
          return el;
        } else if constexpr (std::is_same_v<T, wml::Input>) {
          auto el = element(Tag::input);
          el.attrs.emplace_back(Attr::type, std::string(wml::to_string(n.kind)));
          el.attrs.emplace_back(Attr::name, n.name);
          return el;
        } else if constexpr (std::is_same_v<T, wml::Select>) {
          auto el = element(Tag::select);
          el.attrs.emplace_back(Attr::name, n.name);
          for (const auto& opt : n.options) {
            auto o = element(Tag::option);
            o.attrs.emplace_back(Attr::value, opt.value);
            add_text_child(o, opt.label);
            el.children.push_back(std::move(o));
          }
          return el;
        } else if constexpr (std::is_same_v<T, wml::Table>) {
          auto el = element(Tag::table);
          el.attrs.emplace_back(Attr::columns, std::to_string(std::max<std::size_t>(1, n.columns())));
          for (const auto& row : n.rows) {
            auto tr = element(Tag::tr);
            for (const auto& cell : row) {
              auto td = element(Tag::td);
              add_text_child(td, cell);
              tr.children.push_back(std::move(td));
            }
            el.children.push_back(std::move(tr));
          }
          return el;
        } else if constexpr (std::is_same_v<T, wml::Image>) {
          auto el = element(Tag::img);
          el.attrs.emplace_back(Attr::src, n.src);
          el.attrs.emplace_back(Attr::alt, n.alt);
          return el;
        } else {
          return element(Tag::br);
        }
      },
      node.value);
}

}  // namespace

std::optional<Tag> tag_from_name(std::string_view name) {
  for (const auto& info : kTags) {
    if (info.name == name) return info.tag;
  }
  return std::nullopt;
}

std::optional<Tag> tag_from_token(std::uint8_t token) {
  for (const auto& info : kTags) {
    if (static_cast<std::uint8_t>(info.tag) == token) return info.tag;
  }
  return std::nullopt;
}

std::string_view tag_name(Tag tag) {
  for (const auto& info : kTags) {
    if (info.tag == tag) return info.name;
  }
  return "#text";
}

ContentModel content_model(Tag tag) {
  for (const auto& info : kTags) {
    if (info.tag == tag) return info.model;
  }
  return ContentModel::empty;
}

std::optional<Attr> attr_from_name(std::string_view name) {
  for (const auto& [attr, n] : kAttrs) {
    if (n == name) return attr;
  }
  return std::nullopt;
}

std::optional<Attr> attr_from_token(std::uint8_t token) {
  for (const auto& [attr, n] : kAttrs) {
    if (static_cast<std::uint8_t>(attr) == token) return attr;
  }
  return std::nullopt;
}

std::string_view attr_name(Attr attr) {
  for (const auto& [a, n] : kAttrs) {
    if (a == attr) return n;
  }
  return "?";
}

const std::string* RawElement::attr(Attr a) const {
  for (const auto& [key, value] : attrs) {
    if (key == a) return &value;
  }
  return nullptr;
}

wml::Deck build_deck(const RawElement& root) {
  if (root.tag != Tag::wml) fail(root, "document element must be <wml>");
  check_element(root);
  wml::Deck deck;
  for (const auto& el : root.children) {
    check_element(el);
    wml::Card card;
    card.id = require(el, Attr::id);
    card.title = optional_attr(el, Attr::title);
    card.content = build_nodes(el);
    deck.cards.push_back(std::move(card));
  }
  return deck;
}

RawElement lower_deck(const wml::Deck& deck) {
  auto root = element(Tag::wml);
  for (const auto& card : deck.cards) {
    auto el = element(Tag::card);
    el.attrs.emplace_back(Attr::id, card.id);
    if (!card.title.empty()) el.attrs.emplace_back(Attr::title, card.title);
    lower_nodes(el, card.content);
    root.children.push_back(std::move(el));
  }
  return root;
}

}  // namespace wapshop::detail
