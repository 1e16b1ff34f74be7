#include "attrsig/dictionary.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "attrsig/error.hpp"
#include "attrsig/normalize.hpp"

namespace attrsig {

struct Dictionary::Impl {
  std::vector<DictionaryWord> words;
  std::size_t long_count = 0;
  // Keys view into `words`, which never changes after construction.
  std::unordered_map<std::u32string_view, std::size_t> long_rank;
};

namespace {

constexpr std::string_view kBlank = " \t\r\n";

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(kBlank);
  if (first == std::string_view::npos) {
    return {};
  }
  return text.substr(first, text.find_last_not_of(kBlank) - first + 1);
}

}  // namespace

Dictionary::Dictionary(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

Dictionary Dictionary::build(std::span<const std::string> raw_words,
                             std::span<const std::string> stopwords) {
  std::unordered_set<std::string> stop;
  for (const auto& word : stopwords) {
    stop.insert(normalize(trim(word)).normalized);
  }

  std::unordered_set<std::string> seen;
  auto impl = std::make_shared<Impl>();
  for (const auto& raw : raw_words) {
    std::string word = normalize(trim(raw)).normalized;
    if (word.empty() || stop.contains(word) || !seen.insert(word).second) {
      continue;
    }
    DictionaryWord entry;
    entry.points = to_u32(word);
    entry.text = std::move(word);
    impl->words.push_back(std::move(entry));
  }
  if (impl->words.empty()) {
    throw Error("empty dictionary");
  }

  std::sort(impl->words.begin(), impl->words.end(),
            [](const DictionaryWord& a, const DictionaryWord& b) {
              if (a.points.size() != b.points.size()) {
                return a.points.size() > b.points.size();
              }
              return a.points < b.points;
            });

  for (std::size_t i = 0; i < impl->words.size(); ++i) {
    const auto& points = impl->words[i].points;
    if (points.size() < kMinDecompositionLength) {
      break;
    }
    impl->long_rank.emplace(std::u32string_view(points), i);
    impl->long_count = i + 1;
  }
  return Dictionary(std::move(impl));
}

Dictionary Dictionary::load(const std::filesystem::path& words,
                            const std::optional<std::filesystem::path>& stopwords) {
  const auto raw = read_word_file(words);
  std::vector<std::string> stop;
  if (stopwords) {
    stop = read_word_file(*stopwords);
  }
  return build(raw, stop);
}

const std::vector<DictionaryWord>& Dictionary::words() const { return impl_->words; }

std::size_t Dictionary::min_length() const { return impl_->words.back().points.size(); }

std::size_t Dictionary::max_length() const { return impl_->words.front().points.size(); }

std::size_t Dictionary::long_word_count() const { return impl_->long_count; }

std::optional<std::size_t> Dictionary::long_word_rank(std::u32string_view word) const {
  const auto it = impl_->long_rank.find(word);
  if (it == impl_->long_rank.end()) {
    return std::nullopt;
  }
  return it->second;
}

std::vector<std::string> read_word_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open word file '" + path.string() + "'");
  }
  std::vector<std::string> words;
  std::string line;
  bool first_line = true;
  while (std::getline(in, line)) {
    if (first_line && line.starts_with("\xEF\xBB\xBF")) {
      line.erase(0, 3);
    }
    first_line = false;
    const auto word = trim(line);
    if (word.empty() || word.front() == '#') {
      continue;
    }
    words.emplace_back(word);
  }
  return words;
}

void write_word_file(const std::filesystem::path& path, const Dictionary& dictionary) {
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot write word file '" + path.string() + "'");
  }
  for (const auto& word : dictionary.words()) {
    out << word.text << '\n';
  }
  if (!out) {
    throw Error("write failed for '" + path.string() + "'");
  }
}

}  // namespace attrsig
