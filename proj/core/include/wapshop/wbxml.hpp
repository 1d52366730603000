// Binary tokenized deck encoding, single code page, inline strings only.
//
//   version 0x01
//   tag byte  = tag token | 0x40 (has content) | 0x80 (has attributes)
//   attribute = attr token, STR_I
//   STR_I     = 0x03, UTF-8 bytes, 0x00
//   END       = 0x01 after an attribute list and after element content
#pragma once

#include "wapshop/wml.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wapshop::wbxml {

inline constexpr std::uint8_t kVersion = 0x01;
inline constexpr std::uint8_t kEnd = 0x01;
inline constexpr std::uint8_t kStrI = 0x03;
inline constexpr std::uint8_t kHasContent = 0x40;
inline constexpr std::uint8_t kHasAttributes = 0x80;

struct CompiledDeck {
  std::vector<std::uint8_t> bytes;
  std::size_t source_card_count = 0;
};

class InvalidDeck : public std::runtime_error {
 public:
  explicit InvalidDeck(std::vector<wml::Violation> violations);
  const std::vector<wml::Violation>& violations() const { return violations_; }

 private:
  std::vector<wml::Violation> violations_;
};

class CodecError : public std::runtime_error {
 public:
  CodecError(std::size_t offset, std::string reason);
  std::size_t offset() const { return offset_; }
  const std::string& reason() const { return reason_; }

 private:
  std::size_t offset_;
  std::string reason_;
};

/// Throws InvalidDeck unless validate_deck(deck) is empty.
CompiledDeck compile_deck(const wml::Deck& deck);

/// Encodes without the structural validation step. Used where a size is
/// needed for a deck that may not be valid (lint reports, for instance).
std::vector<std::uint8_t> encode_unchecked(const wml::Deck& deck);

wml::Deck decompile_deck(std::span<const std::uint8_t> bytes);

std::size_t compiled_size(const wml::Deck& deck);

}  // namespace wapshop::wbxml
