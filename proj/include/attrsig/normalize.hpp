#pragma once

#include <string>
#include <string_view>

namespace attrsig {

/// Attribute name or dictionary word after cleaning.
///
/// `normalized` is lowercased and stripped of combining diacritical marks.
/// Punctuation, digits and whitespace are kept as ordinary characters.
struct NormalizedName {
  std::string original;
  std::string normalized;

  bool operator==(const NormalizedName&) const = default;
};

/// Lowercases, applies canonical decomposition and drops combining marks.
/// Invalid UTF-8 sequences are replaced with U+FFFD.
NormalizedName normalize(std::string_view text);

/// True iff at least one alphabetic code point is present.
bool has_letters(std::string_view utf8);
bool has_letters(std::u32string_view text);

std::u32string to_u32(std::string_view utf8);
std::string to_utf8(std::u32string_view text);

}  // namespace attrsig
