#include "attrsig/bench.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <random>
#include <set>
#include <sstream>
#include <string_view>

#include "attrsig/error.hpp"
#include "attrsig/normalize.hpp"
#include "attrsig/signif.hpp"

namespace attrsig {

namespace {

std::size_t pick(std::mt19937_64& rng, std::size_t bound) {
  return static_cast<std::size_t>(rng() % bound);
}

bool is_vowel(char32_t c) {
  return c == U'a' || c == U'e' || c == U'i' || c == U'o' || c == U'u' || c == U'y';
}

std::u32string abbreviate(std::u32string_view word, std::mt19937_64& rng) {
  std::u32string out;
  if (word.size() > 3 && pick(rng, 2) == 0) {
    out.push_back(word.front());
    for (std::size_t i = 1; i < word.size(); ++i) {
      if (!is_vowel(word[i])) {
        out.push_back(word[i]);
      }
    }
    if (out.size() < word.size() && out.size() >= 2) {
      return out;
    }
  }
  if (word.size() <= 2) {
    return std::u32string(word);
  }
  const std::size_t keep = 2 + pick(rng, word.size() - 2);  // [2, size - 1]
  return std::u32string(word.substr(0, keep));
}

}  // namespace

std::vector<std::string> generate_corpus(const Dictionary& dictionary, std::size_t size,
                                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto& words = dictionary.words();
  std::vector<std::string> corpus;
  corpus.reserve(size);
  for (std::size_t i = 0; i < size; ++i) {
    switch (i % 3) {
      case 0: {
        std::string name = words[pick(rng, words.size())].text;
        if (pick(rng, 2) == 0) {
          name += words[pick(rng, words.size())].text;
        }
        corpus.push_back(std::move(name));
        break;
      }
      case 1:
        corpus.push_back(to_utf8(abbreviate(words[pick(rng, words.size())].points, rng)));
        break;
      default: {
        const std::size_t length = 5 + pick(rng, 6);
        std::string name;
        for (std::size_t k = 0; k < length; ++k) {
          name.push_back(static_cast<char>('a' + pick(rng, 26)));
        }
        corpus.push_back(std::move(name));
        break;
      }
    }
  }
  return corpus;
}

Dictionary synthetic_dictionary(std::size_t words, std::uint64_t seed) {
  static constexpr std::array<std::string_view, 21> kOnsets = {
      "", "b", "c", "d", "f", "g", "l", "m", "n", "p", "r",
      "s", "t", "v", "ch", "tr", "pr", "br", "gr", "pl", "cl"};
  static constexpr std::array<std::string_view, 11> kNuclei = {
      "a", "e", "i", "o", "u", "ou", "ai", "an", "on", "in", "eu"};
  static constexpr std::array<std::string_view, 6> kCodas = {"", "r", "s", "n", "l", "t"};

  std::mt19937_64 rng(seed);
  std::set<std::string> unique;
  while (unique.size() < words) {
    const std::size_t syllables = 1 + pick(rng, 5);
    std::string word;
    for (std::size_t s = 0; s < syllables; ++s) {
      word += kOnsets[pick(rng, kOnsets.size())];
      word += kNuclei[pick(rng, kNuclei.size())];
      if (s + 1 == syllables || pick(rng, 4) == 0) {
        word += kCodas[pick(rng, kCodas.size())];
      }
    }
    unique.insert(std::move(word));
  }
  const std::vector<std::string> list(unique.begin(), unique.end());
  return Dictionary::build(list);
}

std::string BenchReport::to_csv() const {
  std::ostringstream out;
  out << "metric,dict_words,group_size,elapsed_ms,names_per_sec\n";
  for (const auto& row : rows) {
    char line[160];
    std::snprintf(line, sizeof line, "%s,%zu,%zu,%.3f,%.1f\n", row.metric.name().c_str(),
                  row.dict_words, row.group_size,
                  std::chrono::duration<double, std::milli>(row.elapsed).count(),
                  row.names_per_second);
    out << line;
  }
  return out.str();
}

BenchReport run_bench(const Dictionary& dictionary, std::span<const MetricKind> metrics,
                      std::span<const std::size_t> sizes, const BenchOptions& options) {
  if (sizes.empty()) {
    throw Error("bench needs at least one group size");
  }
  if (options.repetitions == 0) {
    throw Error("bench needs at least one repetition");
  }
  const std::size_t largest = *std::max_element(sizes.begin(), sizes.end());
  const auto corpus = generate_corpus(dictionary, largest, options.seed);
  const Thresholds thresholds;

  BenchReport report;
  for (const auto& metric : metrics) {
    for (const std::size_t size : sizes) {
      const std::span<const std::string> group(corpus.data(), size);
      std::vector<std::chrono::nanoseconds> timings;
      double score_sum = 0.0;
      for (unsigned rep = 0; rep < options.repetitions; ++rep) {
        const auto start = std::chrono::steady_clock::now();
        const auto results =
            has_signification(group, dictionary, metric, thresholds, {}, options.workers);
        const auto stop = std::chrono::steady_clock::now();
        timings.push_back(std::max(std::chrono::nanoseconds{1},
                                   std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start)));
        score_sum = 0.0;
        for (const auto& result : results) {
          score_sum += result.score;
        }
      }
      std::nth_element(timings.begin(), timings.begin() + timings.size() / 2, timings.end());
      BenchRow row;
      row.metric = metric;
      row.dict_words = dictionary.size();
      row.group_size = size;
      row.elapsed = timings[timings.size() / 2];
      row.names_per_second =
          static_cast<double>(size) / std::chrono::duration<double>(row.elapsed).count();
      row.score_sum = score_sum;
      report.rows.push_back(row);
    }
  }
  return report;
}

}  // namespace attrsig
