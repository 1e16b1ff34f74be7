#include "attrsig/normalize.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "attrsig/error.hpp"

namespace attrsig {

namespace {

bool is_combining_mark(UChar32 c) {
  const auto mask = U_GET_GC_MASK(c);
  return (mask & (U_GC_MN_MASK | U_GC_ME_MASK)) != 0;
}

const icu::Normalizer2& nfd() {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* instance = icu::Normalizer2::getNFDInstance(status);
  if (U_FAILURE(status) || instance == nullptr) {
    throw Error(std::string("ICU NFD normalizer unavailable: ") + u_errorName(status));
  }
  return *instance;
}

}  // namespace

std::u32string to_u32(std::string_view utf8) {
  std::u32string out;
  out.reserve(utf8.size());
  const auto* bytes = reinterpret_cast<const uint8_t*>(utf8.data());
  const auto length = static_cast<int32_t>(utf8.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    out.push_back(c < 0 ? U'\uFFFD' : static_cast<char32_t>(c));
  }
  return out;
}

std::string to_utf8(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t c : text) {
    uint8_t buf[U8_MAX_LENGTH];
    int32_t n = 0;
    UBool error = false;
    U8_APPEND(buf, n, U8_MAX_LENGTH, static_cast<UChar32>(c), error);
    if (error) {
      // Not a scalar value: emit U+FFFD instead.
      out += "\xEF\xBF\xBD";
      continue;
    }
    out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(n));
  }
  return out;
}

NormalizedName normalize(std::string_view text) {
  icu::UnicodeString lowered = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  // Lowercase first: lowercasing can emit combining marks (U+0130) which
  // must then be removed.
  lowered.toLower(icu::Locale::getRoot());

  UErrorCode status = U_ZERO_ERROR;
  const icu::UnicodeString decomposed = nfd().normalize(lowered, status);
  if (U_FAILURE(status)) {
    throw Error(std::string("normalization failed: ") + u_errorName(status));
  }

  icu::UnicodeString stripped;
  for (int32_t i = 0; i < decomposed.length();) {
    const UChar32 c = decomposed.char32At(i);
    if (!is_combining_mark(c)) {
      stripped.append(c);
    }
    i += U16_LENGTH(c);
  }

  NormalizedName result;
  result.original = std::string(text);
  stripped.toUTF8String(result.normalized);
  return result;
}

bool has_letters(std::u32string_view text) {
  for (char32_t c : text) {
    if (u_isalpha(static_cast<UChar32>(c))) {
      return true;
    }
  }
  return false;
}

bool has_letters(std::string_view utf8) { return has_letters(to_u32(utf8)); }

}  // namespace attrsig
