#include "attrsig/normalize.hpp"

#include <random>

#include <gtest/gtest.h>
#include <unicode/uchar.h>

namespace attrsig {
namespace {

TEST(NormalizeTest, FoldsCaseAndDiacritics) {
  EXPECT_EQ(normalize("Âge").normalized, "age");
  EXPECT_EQ(normalize("Âge").original, "Âge");
  EXPECT_EQ(normalize("MÉDECIN Légiste").normalized, "medecin legiste");
  EXPECT_EQ(normalize("Prénom").normalized, "prenom");
  EXPECT_EQ(normalize("ÇÀÏÔÛ").normalized, "caiou");
}

TEST(NormalizeTest, KeepsPunctuationDigitsAndSpaces) {
  EXPECT_EQ(normalize("adr-post").normalized, "adr-post");
  EXPECT_EQ(normalize("add pst").normalized, "add pst");
  EXPECT_EQ(normalize("Client_N2").normalized, "client_n2");
}

TEST(NormalizeTest, AlreadyNormalizedIsUnchanged) {
  EXPECT_EQ(normalize("naissance").normalized, "naissance");
  EXPECT_EQ(normalize("").normalized, "");
}

TEST(NormalizeTest, DecomposedInputMatchesPrecomposed) {
  // "e" + U+0301 combining acute.
  EXPECT_EQ(normalize("e\xCC\x81t\xC3\xA9").normalized, "ete");
}

TEST(NormalizeTest, DottedCapitalIDoesNotLeaveAMark) {
  EXPECT_EQ(normalize("\xC4\xB0").normalized, "i");  // U+0130
}

TEST(HasLettersTest, Examples) {
  EXPECT_TRUE(has_letters("adr-"));
  EXPECT_FALSE(has_letters("-_ 42"));
  EXPECT_FALSE(has_letters(""));
  EXPECT_TRUE(has_letters("é"));
  EXPECT_FALSE(has_letters(std::u32string_view(U"12")));
}

TEST(Utf8Test, RoundTripsCodePoints) {
  const std::string text = "médecin légiste ß 東京";
  const std::u32string points = to_u32(text);
  EXPECT_EQ(points.size(), 20u);
  EXPECT_EQ(to_utf8(points), text);
}

TEST(Utf8Test, InvalidBytesBecomeReplacementCharacter) {
  const std::u32string points = to_u32("a\xFF" "b");
  ASSERT_EQ(points.size(), 3u);
  EXPECT_EQ(points[1], U'�');
}

// Random strings drawn from a pool mixing ASCII, accented Latin, Greek,
// Cyrillic, combining marks, digits and punctuation.
std::string random_text(std::mt19937_64& rng) {
  static const std::u32string pool =
      U"aZ09 -_.ÀÉèçÏöÜñÅøßĲŒœΣσςΆάΐДжЁёİı̧́̈ﬁ東";
  std::u32string out;
  const std::size_t length = rng() % 12;
  for (std::size_t i = 0; i < length; ++i) {
    out.push_back(pool[rng() % pool.size()]);
  }
  return to_utf8(out);
}

TEST(NormalizePropertyTest, IdempotentLowercaseAndMarkFree) {
  std::mt19937_64 rng(7);
  for (int iteration = 0; iteration < 5000; ++iteration) {
    const std::string text = random_text(rng);
    const std::string once = normalize(text).normalized;
    EXPECT_EQ(normalize(once).normalized, once) << text;
    for (char32_t c : to_u32(once)) {
      EXPECT_FALSE(u_isupper(static_cast<UChar32>(c))) << text;
      EXPECT_NE(u_charType(static_cast<UChar32>(c)), U_NON_SPACING_MARK) << text;
    }
    EXPECT_EQ(has_letters(once), has_letters(normalize(once).normalized));
    // Letters are only ever folded, never introduced.
    if (!has_letters(text)) {
      EXPECT_FALSE(has_letters(once)) << text;
    }
  }
}

}  // namespace
}  // namespace attrsig
