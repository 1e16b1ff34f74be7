#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <ranges>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace attrsig {

/// Words shorter than this never take part in compound decomposition.
inline constexpr std::size_t kMinDecompositionLength = 4;

struct DictionaryWord {
  std::string text;       // normalized, UTF-8
  std::u32string points;  // same word as code points
};

/// Immutable, normalized word list ordered by descending length (code
/// points), equal lengths in ascending lexicographic order. Copies share the
/// underlying storage.
class Dictionary {
 public:
  /// Normalizes, drops empty words and stopwords, deduplicates and sorts.
  /// Throws Error("empty dictionary") if nothing is left.
  static Dictionary build(std::span<const std::string> raw_words,
                          std::span<const std::string> stopwords = {});

  static Dictionary load(const std::filesystem::path& words,
                         const std::optional<std::filesystem::path>& stopwords = std::nullopt);

  const std::vector<DictionaryWord>& words() const;
  std::size_t size() const { return words().size(); }
  std::size_t min_length() const;
  std::size_t max_length() const;

  /// Words eligible for compound decomposition (length > 3), in order.
  auto long_words() const {
    return words() | std::views::take_while([](const DictionaryWord& w) {
             return w.points.size() >= kMinDecompositionLength;
           });
  }
  std::size_t long_word_count() const;

  /// Position of a long word in dictionary order, if present.
  std::optional<std::size_t> long_word_rank(std::u32string_view word) const;

 private:
  struct Impl;
  explicit Dictionary(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

/// Reads a word list: UTF-8, one entry per line, '#' comments and blank
/// lines skipped, surrounding whitespace trimmed.
std::vector<std::string> read_word_file(const std::filesystem::path& path);

void write_word_file(const std::filesystem::path& path, const Dictionary& dictionary);

}  // namespace attrsig
